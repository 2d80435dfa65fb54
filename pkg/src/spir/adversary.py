"""Byzantine answer corruption and eavesdropper taps.

Node labels are 1-based.  Strategies are fixed rules that may read the
whole transcript (the adversary is omniscient):

``silent``    leave answers untouched
``additive``  add a uniformly random nonzero symbol to each targeted answer
``garbage``   replace each targeted answer with a uniform symbol
``altfile``   answer honestly, but as if the requested file were a different one
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Iterator

import numpy as np

from .errors import BudgetExceeded
from .schemes import (
    AnswerVector,
    CommonRandomness,
    Database,
    QuerySet,
    SchemeParams,
    Transcript,
    answer_all,
)


class Strategy(str, Enum):
    SILENT = "silent"
    ADDITIVE = "additive"
    GARBAGE = "garbage"
    ALTFILE = "altfile"


@dataclass(frozen=True, eq=False)
class AttackPlan:
    strategy: Strategy
    targets: frozenset[int] = dc_field(default_factory=frozenset)
    taps: frozenset[int] = dc_field(default_factory=frozenset)
    alt_file: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "targets", frozenset(int(n) for n in self.targets))
        object.__setattr__(self, "taps", frozenset(int(n) for n in self.taps))

    def check(self, params: SchemeParams, byzantine_budget: int | None = None) -> None:
        budget = params.byzantine if byzantine_budget is None else byzantine_budget
        if len(self.targets) > budget:
            raise BudgetExceeded(f"{len(self.targets)} corrupted nodes exceed B = {budget}")
        if len(self.taps) > params.eavesdrop:
            raise BudgetExceeded(f"{len(self.taps)} tapped nodes exceed E = {params.eavesdrop}")
        for n in self.targets | self.taps:
            params.check_node(n)


def random_plan(params: SchemeParams, strategy: Strategy | str, rng: np.random.Generator,
                n_targets: int | None = None) -> AttackPlan:
    """Corrupt ``n_targets`` (default B) and tap E nodes, both chosen uniformly.

    The two sets are drawn independently and may intersect.
    """
    nodes = np.arange(1, params.n_nodes + 1)
    b = params.byzantine if n_targets is None else n_targets
    targets = rng.choice(nodes, size=b, replace=False) if b else []
    taps = rng.choice(nodes, size=params.eavesdrop, replace=False) if params.eavesdrop else []
    return AttackPlan(Strategy(strategy), frozenset(targets), frozenset(taps))


def _alternative_file(params: SchemeParams, true_file: np.ndarray,
                      rng: np.random.Generator) -> np.ndarray:
    # Uniform over all files except the true one.
    alt = params.field.random(rng, params.file_length)
    while np.array_equal(alt, true_file):
        alt = params.field.random(rng, params.file_length)
    return alt


def corrupt(plan: AttackPlan, answers: AnswerVector, view: Transcript,
            rng: np.random.Generator, byzantine_budget: int | None = None) -> AnswerVector:
    """Overwrite the answers of ``plan.targets`` according to the strategy.

    ``view`` is the full round (database, queries, common randomness).
    The returned ``corrupted`` set holds exactly the nodes whose symbol
    changed.  ``byzantine_budget`` overrides B for deliberate over-budget
    experiments.
    """
    params = view.params
    plan.check(params, byzantine_budget)
    q = params.q
    a = answers.a.copy()
    targets = sorted(plan.targets)
    idx = np.array(targets, dtype=np.int64) - 1

    if plan.strategy is Strategy.SILENT or not targets:
        return AnswerVector(a, answers.corrupted)
    if plan.strategy is Strategy.ADDITIVE:
        a[idx] = (a[idx] + params.field.random_nonzero(rng, len(idx))) % q
    elif plan.strategy is Strategy.GARBAGE:
        a[idx] = params.field.random(rng, len(idx))
    elif plan.strategy is Strategy.ALTFILE:
        k = view.queries.k
        alt = plan.alt_file
        if alt is None:
            alt = _alternative_file(params, view.database.file(k), rng)
        forged = answer_all(params, view.queries, view.database.with_file(k, alt), view.randomness)
        a[idx] = forged.a[idx]
    changed = frozenset(int(i) + 1 for i in np.nonzero(a != answers.a)[0])
    return AnswerVector(a, answers.corrupted | changed)


@dataclass(frozen=True, eq=False)
class EavesdropperView:
    """Copies of ``(query, answer)`` for each tapped node, keyed by node label."""

    entries: dict[int, tuple[np.ndarray, int]]

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def tap(plan: AttackPlan, queries: QuerySet, answers: AnswerVector,
        params: SchemeParams | None = None) -> EavesdropperView:
    """Copy the transmissions of the tapped nodes; nothing is modified.

    With ``params`` given, more than E taps raise :class:`BudgetExceeded`.
    """
    if params is not None and len(plan.taps) > params.eavesdrop:
        raise BudgetExceeded(f"{len(plan.taps)} tapped nodes exceed E = {params.eavesdrop}")
    if any(not 1 <= n <= len(answers) for n in plan.taps):
        raise BudgetExceeded(f"cannot tap nodes {sorted(plan.taps)} of {len(answers)}")
    return EavesdropperView({n: (queries.node(n).copy(), int(answers.a[n - 1]))
                             for n in sorted(plan.taps)})


# ---------------------------------------------------------------------------
# Two indistinguishable worlds


@dataclass(frozen=True, eq=False)
class ConfusingPair:
    """Two rounds the user cannot tell apart.

    In ``case_true`` the database holds the true file and the nodes in
    ``forged_true`` answer as if it held ``alt_file``.  In ``case_alt`` the
    database holds ``alt_file`` and the nodes in ``forged_alt`` answer as if
    it held the true file.  Both rounds share queries and common randomness.
    """

    alt_file: np.ndarray
    honest: frozenset[int]
    forged_alt: frozenset[int]
    forged_true: frozenset[int]
    case_true: AnswerVector
    case_alt: AnswerVector

    @property
    def indistinguishable(self) -> bool:
        return np.array_equal(self.case_true.a, self.case_alt.a)


def two_world_answers(params: SchemeParams, queries: QuerySet, database: Database,
                      s: CommonRandomness, alt_file, honest, forged_alt, forged_true) -> ConfusingPair:
    k = queries.k
    alt_db = database.with_file(k, alt_file)
    real = answer_all(params, queries, database, s).a
    fake = answer_all(params, queries, alt_db, s).a

    def mix(base, other, nodes):
        out = base.copy()
        idx = np.array(sorted(nodes), dtype=np.int64) - 1
        out[idx] = other[idx]
        return AnswerVector(out, frozenset(int(i) + 1 for i in np.nonzero(out != base)[0]))

    return ConfusingPair(np.asarray(alt_file, dtype=np.int64), frozenset(honest),
                         frozenset(forged_alt), frozenset(forged_true),
                         case_true=mix(real, fake, forged_true),
                         case_alt=mix(fake, real, forged_alt))


def confusing_pairs(params: SchemeParams, queries: QuerySet, database: Database,
                    s: CommonRandomness, extra: int = 1) -> Iterator[ConfusingPair]:
    """Yield indistinguishable two-world pairs that use ``B + extra`` forgeries.

    The nodes are split into an honest set of size ``N - 2B - extra``, a set
    of B nodes forged in the alternative world and ``B + extra`` nodes forged
    in the true world.  A pair is yielded whenever the honest nodes' answers
    agree under both files, so the two received words coincide.  With
    ``extra = 0`` nothing is ever yielded for a valid scheme.
    """
    k = queries.k
    b = params.byzantine
    n_honest = params.n_nodes - 2 * b - extra
    if n_honest < 0:
        return
    true_file = database.file(k)
    nodes = range(1, params.n_nodes + 1)
    real = answer_all(params, queries, database, s).a
    for alt in itertools.product(range(params.q), repeat=params.file_length):
        alt = np.array(alt, dtype=np.int64)
        if np.array_equal(alt, true_file):
            continue
        fake = answer_all(params, queries, database.with_file(k, alt), s).a
        agree = [n for n in nodes if real[n - 1] == fake[n - 1]]
        for honest in itertools.combinations(agree, n_honest):
            rest = [n for n in nodes if n not in honest]
            for forged_alt in itertools.combinations(rest, b):
                forged_true = [n for n in rest if n not in forged_alt]
                yield two_world_answers(params, queries, database, s, alt,
                                        honest, forged_alt, forged_true)
