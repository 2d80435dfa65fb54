"""Exact privacy audits by enumerating every realisation of the randomness.

A mutual-information-zero condition holds exactly when the distribution of
the observation does not depend on the secret.  Each audit therefore builds
exact occurrence-count tables of what the observer sees under every value of
the secret and compares them.

* user privacy: the query tuple seen by a colluding set must have the same
  distribution, uniform, whatever file index is requested;
* database privacy: for every user randomness U, the answer vector seen by
  the user (distribution over the common randomness s) must not depend on
  the files that were not requested;
* eavesdropper privacy: queries and answers on a tapped set must have the
  same distribution over (U, s) for every database.

Database realisations are either all enumerated (``method="full"``) or, when
that exceeds the budget, reduced to the zero database plus one unit vector
per coordinate (``method="basis"``).  Because answers are affine in the
database, equality at those points implies equality everywhere.  An audit
that does not fit the budget is reported as SKIPPED, never sampled.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import asdict, dataclass, field as dc_field
from enum import Enum
from typing import Callable, Iterator, Sequence

import numpy as np

from .codes import matmul_mod, row_reduce
from .schemes import SchemeParams, expand_queries, node_masks

DEFAULT_BUDGET = 10**7
CHUNK_STATES = 1 << 18


def default_budget() -> int:
    """Enumeration budget: ``SPIR_AUDIT_BUDGET`` if set, else 10**7 joint states."""
    value = os.environ.get("SPIR_AUDIT_BUDGET")
    return int(float(value)) if value else DEFAULT_BUDGET


class Constraint(str, Enum):
    USER = "user"
    DATABASE = "database"
    EAVESDROPPER = "eavesdropper"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


# ---------------------------------------------------------------------------
# Scheme models (the honest one, plus deliberately broken fixtures)

QueryFn = Callable[[SchemeParams, int, np.ndarray], np.ndarray]
AnswerFn = Callable[[SchemeParams, np.ndarray, Sequence[int], np.ndarray, np.ndarray], np.ndarray]


def honest_answers(params: SchemeParams, vectors: np.ndarray, nodes: Sequence[int],
                   flat_db: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Answers of ``nodes`` (1-based) whose queries are the columns of ``vectors``.

    Broadcasts over leading axes of ``vectors``, ``flat_db`` and ``s``.
    """
    q = params.q
    inner = matmul_mod(np.asarray(flat_db, dtype=np.int64)[..., None, :], vectors, q)[..., 0, :]
    masks = node_masks(params, s)[..., [n - 1 for n in nodes]]
    return (inner + masks) % q


@dataclass(frozen=True)
class SchemeModel:
    """How queries and per-node answers are produced; audited as a black box.

    ``queries(params, k, u)`` maps a stack of U matrices to a stack of
    ``(K*L', N)`` query matrices.  ``answers(params, vectors, nodes, W, s)``
    computes the answers of the listed nodes from their own query columns.
    """

    name: str
    queries: QueryFn = expand_queries
    answers: AnswerFn = honest_answers


HONEST = SchemeModel("honest")


def _leak_index_queries(params: SchemeParams, k: int, u: np.ndarray) -> np.ndarray:
    vectors = expand_queries(params, k, u)
    tag = np.full(vectors.shape[:-2] + (1, vectors.shape[-1]), k % params.q, dtype=np.int64)
    return np.concatenate([vectors, tag], axis=-2)


def _leak_index_answers(params, vectors, nodes, flat_db, s):
    return honest_answers(params, vectors[..., :-1, :], nodes, flat_db, s)


def _unmasked_answers(params, vectors, nodes, flat_db, s):
    return honest_answers(params, vectors, nodes, flat_db, np.zeros_like(s))


BROKEN_MODELS: dict[str, SchemeModel] = {
    # every query carries the requested index in an extra coordinate
    "leak_index": SchemeModel("leak_index", _leak_index_queries, _leak_index_answers),
    # nodes forget to add the common-randomness mask
    "unmasked": SchemeModel("unmasked", expand_queries, _unmasked_answers),
}


# ---------------------------------------------------------------------------
# Enumeration helpers


def all_vectors(q: int, length: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows ``start..stop`` of the lexicographic list of all vectors in F_q^length."""
    total = q**length
    stop = total if stop is None else min(stop, total)
    idx = np.arange(start, stop, dtype=np.int64)
    powers = q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers) % q


def iter_vectors(q: int, length: int, chunk: int = CHUNK_STATES) -> Iterator[np.ndarray]:
    total = q**length
    for start in range(0, total, chunk):
        yield all_vectors(q, length, start, start + chunk)


def _encode(rows: np.ndarray, q: int) -> np.ndarray:
    """Base-q integer code of each row (rows must fit in int64)."""
    rows = np.asarray(rows, dtype=np.int64)
    width = rows.shape[-1]
    if width == 0:
        return np.zeros(rows.shape[:-1], dtype=np.int64)
    if q**width >= 2**62:
        raise OverflowError("observation too wide to encode")
    powers = q ** np.arange(width - 1, -1, -1, dtype=np.int64)
    return rows @ powers


def _decode(code: int, q: int, width: int) -> tuple[int, ...]:
    digits = []
    for _ in range(width):
        digits.append(code % q)
        code //= q
    return tuple(reversed(digits))


DENSE_LIMIT = 1 << 20
DB_BATCH = 16


@dataclass(eq=False)
class DistributionTable:
    """Exact occurrence counts of observed outcomes (tuples of symbols).

    Outcomes are stored as base-q codes in ``codes`` (sorted, unique) with
    their counts.  Tables built from disjoint parts of a state space merge
    with ``+``; the merge is associative and order independent.
    """

    q: int
    width: int
    codes: np.ndarray = dc_field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    counts: np.ndarray = dc_field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def space_size(self) -> int:
        return self.q**self.width

    @classmethod
    def from_codes(cls, q: int, width: int, codes: np.ndarray,
                   weights: np.ndarray | None = None) -> "DistributionTable":
        codes = np.asarray(codes, dtype=np.int64).ravel()
        if weights is None:
            uniq, counts = np.unique(codes, return_counts=True)
        else:
            uniq, inverse = np.unique(codes, return_inverse=True)
            counts = np.bincount(inverse.ravel(), weights=np.asarray(weights).ravel(),
                                 minlength=len(uniq)).astype(np.int64)
        return cls(q, width, uniq, counts.astype(np.int64))

    @classmethod
    def from_rows(cls, rows: np.ndarray, q: int) -> "DistributionTable":
        rows = np.asarray(rows, dtype=np.int64)
        return cls.from_codes(q, rows.shape[-1], _encode(rows, q))

    def count(self, outcome: Sequence[int]) -> int:
        code = int(_encode(np.array([outcome], dtype=np.int64), self.q)[0])
        i = np.searchsorted(self.codes, code)
        return int(self.counts[i]) if i < len(self.codes) and self.codes[i] == code else 0

    def outcomes(self) -> dict[tuple[int, ...], int]:
        return {_decode(int(c), self.q, self.width): int(n) for c, n in zip(self.codes, self.counts)}

    def __add__(self, other: "DistributionTable") -> "DistributionTable":
        if (self.q, self.width) != (other.q, other.width):
            raise ValueError("cannot merge tables over different outcome spaces")
        return DistributionTable.from_codes(self.q, self.width,
                                            np.concatenate([self.codes, other.codes]),
                                            np.concatenate([self.counts, other.counts]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistributionTable):
            return NotImplemented
        return ((self.q, self.width) == (other.q, other.width)
                and np.array_equal(self.codes, other.codes)
                and np.array_equal(self.counts, other.counts))

    def first_difference(self, other: "DistributionTable") -> tuple[tuple[int, ...], int, int] | None:
        """Smallest outcome whose count differs between the two tables."""
        if self == other:
            return None
        merged = np.union1d(self.codes, other.codes)
        a = np.zeros(len(merged), dtype=np.int64)
        b = np.zeros(len(merged), dtype=np.int64)
        a[np.searchsorted(merged, self.codes)] = self.counts
        b[np.searchsorted(merged, other.codes)] = other.counts
        i = int(np.nonzero(a != b)[0][0])
        return _decode(int(merged[i]), self.q, self.width), int(a[i]), int(b[i])

    def uniformity_violation(self) -> tuple[tuple[int, ...], int, tuple[int, ...], int] | None:
        """Two outcomes of the full space ``F_q^width`` with unequal counts, if any."""
        if len(self.codes) == 0:
            return None
        hi_i = int(np.argmax(self.counts))
        hi = (_decode(int(self.codes[hi_i]), self.q, self.width), int(self.counts[hi_i]))
        if len(self.codes) < self.space_size:
            # smallest code absent from the support
            gaps = np.nonzero(self.codes != np.arange(len(self.codes)))[0]
            missing = int(gaps[0]) if gaps.size else len(self.codes)
            return hi[0], hi[1], _decode(missing, self.q, self.width), 0
        lo_i = int(np.argmin(self.counts))
        if self.counts[lo_i] != self.counts[hi_i]:
            return hi[0], hi[1], _decode(int(self.codes[lo_i]), self.q, self.width), int(self.counts[lo_i])
        return None


class _Accumulator:
    """Chunked builder of one table; dense counting when the outcome space is small."""

    def __init__(self, q: int, width: int) -> None:
        self.q, self.width = q, width
        self.dense = (np.zeros(q**width, dtype=np.int64)
                      if width * np.log2(q) < np.log2(DENSE_LIMIT) else None)
        self.parts: list[DistributionTable] = []

    def add(self, codes: np.ndarray, weight: int = 1) -> None:
        if self.dense is not None:
            self.dense += weight * np.bincount(codes.ravel(), minlength=len(self.dense))
        else:
            part = DistributionTable.from_codes(self.q, self.width, codes)
            part.counts *= weight
            self.parts.append(part)

    def table(self) -> DistributionTable:
        if self.dense is not None:
            nz = np.nonzero(self.dense)[0]
            return DistributionTable(self.q, self.width, nz.astype(np.int64), self.dense[nz])
        if not self.parts:
            return DistributionTable(self.q, self.width)
        return DistributionTable.from_codes(self.q, self.width,
                                            np.concatenate([t.codes for t in self.parts]),
                                            np.concatenate([t.counts for t in self.parts]))


@dataclass(frozen=True)
class Witness:
    """Counterexample: ``outcome_a`` under ``condition_a`` and ``outcome_b``
    under ``condition_b`` occur a different number of times."""

    condition_a: dict
    outcome_a: tuple[int, ...]
    count_a: int
    condition_b: dict
    outcome_b: tuple[int, ...]
    count_b: int


@dataclass(frozen=True)
class AuditReport:
    constraint: Constraint
    verdict: Verdict
    subset: tuple[int, ...] = ()
    k: int | None = None
    witness: Witness | None = None
    states_enumerated: int = 0
    required_states: int = 0
    method: str = "full"
    model: str = "honest"

    def __post_init__(self) -> None:
        if self.verdict is Verdict.FAIL and self.witness is None:
            raise ValueError("a failing audit must carry a witness")

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_dict(self) -> dict:
        d = asdict(self)
        d["constraint"] = self.constraint.value
        d["verdict"] = self.verdict.value
        d["subset"] = list(self.subset)
        if self.witness is not None:
            w = d["witness"]
            w["outcome_a"] = list(w["outcome_a"])
            w["outcome_b"] = list(w["outcome_b"])
        return d


def _skipped(constraint, subset, k, required, method, model) -> AuditReport:
    return AuditReport(constraint, Verdict.SKIPPED, tuple(subset), k,
                       required_states=int(required), method=method, model=model.name)


# ---------------------------------------------------------------------------
# User privacy


def query_table(params: SchemeParams, k: int, subset: Sequence[int],
                model: SchemeModel = HONEST) -> DistributionTable:
    """Exact distribution of the queries sent to ``subset`` when file ``k`` is requested."""
    q = params.q
    cols = [n - 1 for n in subset]
    acc = None
    for flat_u in iter_vectors(q, params.db_length * params.randomness_count):
        u = flat_u.reshape(-1, params.db_length, params.randomness_count)
        obs = model.queries(params, k, u)[..., cols]
        # node-major flattening: (Q_n1, Q_n2, ...)
        obs = np.swapaxes(obs, -1, -2).reshape(len(u), -1)
        acc = acc or _Accumulator(q, obs.shape[-1])
        acc.add(_encode(obs, q))
    return acc.table()


def audit_user_privacy(params: SchemeParams, subset: Sequence[int], budget: int | None = None,
                       model: SchemeModel = HONEST) -> AuditReport:
    """Pass iff the query tuple of ``subset`` is uniform and identical for every k."""
    budget = default_budget() if budget is None else budget
    subset = tuple(sorted(subset))
    per_k = params.q ** (params.db_length * params.randomness_count)
    if per_k > budget:
        return _skipped(Constraint.USER, subset, None, per_k * params.n_files, "full", model)

    tables = {k: query_table(params, k, subset, model) for k in range(1, params.n_files + 1)}
    states = per_k * params.n_files

    def fail(witness):
        return AuditReport(Constraint.USER, Verdict.FAIL, subset, None, witness, states,
                           model=model.name)

    ref = tables[1]
    for k, table in tables.items():
        bad = table.uniformity_violation()
        if bad:
            return fail(Witness({"k": k}, bad[0], bad[1], {"k": k}, bad[2], bad[3]))
        if k != 1:
            diff = ref.first_difference(table)
            if diff:
                return fail(Witness({"k": 1}, diff[0], diff[1], {"k": k}, diff[0], diff[2]))
    return AuditReport(Constraint.USER, Verdict.PASS, subset, None, None, states, model=model.name)


# ---------------------------------------------------------------------------
# Database privacy


def canonical_file(params: SchemeParams) -> np.ndarray:
    """The fixed requested file ``(1, 2, ..., L) mod q`` used when none is given."""
    return np.arange(1, params.file_length + 1, dtype=np.int64) % params.q


def _other_file_variants(params: SchemeParams, budget_left: int) -> tuple[str, np.ndarray] | None:
    width = (params.n_files - 1) * params.file_length
    full = params.q**width
    if full <= budget_left:
        return "full", all_vectors(params.q, width)
    if width + 1 <= budget_left:
        return "basis", np.vstack([np.zeros((1, width), dtype=np.int64),
                                   np.eye(width, dtype=np.int64)])
    return None


def _assemble(params: SchemeParams, k: int, file_k: np.ndarray, others: np.ndarray) -> np.ndarray:
    """Flat databases with ``file_k`` in slot k and the rows of ``others`` elsewhere."""
    l = params.file_length
    others = np.atleast_2d(others).reshape(len(others), params.n_files - 1, l)
    mine = np.broadcast_to(file_k, (len(others), 1, l))
    return np.concatenate([others[:, : k - 1], mine, others[:, k - 1:]], axis=1).reshape(len(others), -1)


def answer_table_given_u(params: SchemeParams, k: int, u: np.ndarray, flat_db: np.ndarray,
                         model: SchemeModel = HONEST) -> DistributionTable:
    """Distribution of the full answer vector over all s for one fixed U and database."""
    q = params.q
    s_all = all_vectors(q, params.randomness_count)
    vectors = model.queries(params, k, np.asarray(u)[None])[0]
    nodes = list(range(1, params.n_nodes + 1))
    return DistributionTable.from_rows(model.answers(params, vectors, nodes, flat_db, s_all), q)


def audit_database_privacy(params: SchemeParams, k: int, file_k=None, budget: int | None = None,
                           model: SchemeModel = HONEST) -> AuditReport:
    """Pass iff, for every U, the answers' distribution over s ignores the other files.

    ``file_k`` fixes the requested file (default :func:`canonical_file`).
    """
    budget = default_budget() if budget is None else budget
    params.check_file_index(k)
    q, m = params.q, params.randomness_count
    file_k = canonical_file(params) if file_k is None else np.asarray(file_k, dtype=np.int64) % q
    n_u = q ** (params.db_length * m)
    n_s = q**m
    per_variant = n_u * n_s
    choice = _other_file_variants(params, budget // per_variant if per_variant <= budget else 0)
    if choice is None:
        width = (params.n_files - 1) * params.file_length
        return _skipped(Constraint.DATABASE, (), k, per_variant * (width + 1), "basis", model)
    method, others = choice
    dbs = _assemble(params, k, file_k, others)

    s_all = all_vectors(q, m)
    nodes = list(range(1, params.n_nodes + 1))
    for flat_u in iter_vectors(q, params.db_length * m, max(1, CHUNK_STATES // n_s)):
        u = flat_u.reshape(-1, params.db_length, m)
        vectors = model.queries(params, k, u)                       # (c, KL', N)
        ref = None
        for v, db in enumerate(dbs):
            ans = model.answers(params, vectors[:, None], nodes, db, s_all)   # (c, n_s, N)
            multiset = np.sort(_encode(ans, q), axis=1)
            if ref is None:
                ref = multiset
                continue
            rows = np.nonzero(np.any(multiset != ref, axis=1))[0]
            if rows.size:
                i = int(rows[0])
                u_i = u[i]
                t0 = answer_table_given_u(params, k, u_i, dbs[0], model)
                t1 = answer_table_given_u(params, k, u_i, db, model)
                outcome, c0, c1 = t0.first_difference(t1)
                cond = {"k": k, "u": u_i.tolist(), "file_k": file_k.tolist()}
                witness = Witness({**cond, "database": dbs[0].tolist()}, outcome, c0,
                                  {**cond, "database": db.tolist()}, outcome, c1)
                return AuditReport(Constraint.DATABASE, Verdict.FAIL, (), k, witness,
                                   per_variant * len(dbs), method=method, model=model.name)
    return AuditReport(Constraint.DATABASE, Verdict.PASS, (), k, None, per_variant * len(dbs),
                       method=method, model=model.name)


# ---------------------------------------------------------------------------
# Eavesdropper privacy


def _tapped_literal(params: SchemeParams, k: int, subset: Sequence[int], flat_db: np.ndarray,
                    model: SchemeModel) -> DistributionTable:
    q, m = params.q, params.randomness_count
    cols = [n - 1 for n in subset]
    s_all = all_vectors(q, m)
    acc = None
    for flat_u in iter_vectors(q, params.db_length * m, max(1, CHUNK_STATES // len(s_all))):
        u = flat_u.reshape(-1, params.db_length, m)
        vectors = model.queries(params, k, u)[..., cols]
        ans = model.answers(params, vectors[:, None], subset, flat_db, s_all)
        seen = np.swapaxes(vectors, -1, -2).reshape(len(u), -1)
        acc = acc or _Accumulator(q, seen.shape[-1] + len(subset))
        acc.add(_encode(seen, q)[:, None] * q ** len(subset) + _encode(ans, q))
    return acc.table()


def _reduce_mod_rows(v: np.ndarray, rref: np.ndarray, pivots: list[int], q: int) -> np.ndarray:
    """Canonical representative of each row of ``v`` modulo the row space of ``rref``."""
    v = v.copy()
    for row, col in zip(rref, pivots):
        v = (v - v[:, col:col + 1] * row) % q
    return v


def tapped_tables(params: SchemeParams, k: int, subset: Sequence[int], dbs: np.ndarray,
                  model: SchemeModel = HONEST) -> list[DistributionTable]:
    """Exact distribution of ``(Q_E, A_E)`` over all (U, s), one table per database.

    Answers are affine in s.  When the s-part does not depend on U, the tapped
    answers for one U range uniformly over a coset of a fixed subspace S, so
    outcomes are keyed by the coset's canonical representative with weight
    q^(M - dim S).  The table then lists one outcome per coset; two such
    tables are equal exactly when the expanded tables are.  Otherwise every
    s is enumerated.
    """
    q, m, kl = params.q, params.randomness_count, params.db_length
    dbs = np.atleast_2d(np.asarray(dbs, dtype=np.int64))
    cols = [n - 1 for n in subset]
    probes = np.vstack([np.zeros((1, m), dtype=np.int64), np.eye(m, dtype=np.int64)])
    ref_mask = rref = pivots = None
    accs: list[_Accumulator] = []
    for flat_u in iter_vectors(q, kl * m):
        u = flat_u.reshape(-1, kl, m)
        vectors = model.queries(params, k, u)[..., cols]
        pure = model.answers(params, vectors[:, None], subset, np.zeros(kl, dtype=np.int64), probes)
        mask = (pure[:, 1:] - pure[:, :1]) % q                  # (c, M, E)
        if ref_mask is None:
            ref_mask = mask[0]
            rref, pivots = row_reduce(ref_mask, q)
            rref = rref[:len(pivots)]
        if not (mask == ref_mask).all():
            return [_tapped_literal(params, k, subset, db, model) for db in dbs]
        seen = _encode(np.swapaxes(vectors, -1, -2).reshape(len(u), -1), q) * q ** len(subset)
        if not accs:
            width = vectors.shape[-2] * len(subset) + len(subset)
            accs = [_Accumulator(q, width) for _ in dbs]
        for acc, db in zip(accs, dbs):
            base = model.answers(params, vectors, subset, db, probes[0])
            rep = _reduce_mod_rows(base, rref, pivots, q)
            acc.add(seen + _encode(rep, q), q ** (m - len(pivots)))
    return [acc.table() for acc in accs]


def tapped_table(params: SchemeParams, k: int, subset: Sequence[int], flat_db: np.ndarray,
                 model: SchemeModel = HONEST) -> DistributionTable:
    return tapped_tables(params, k, subset, np.asarray(flat_db)[None], model)[0]


def audit_eavesdropper_privacy(params: SchemeParams, subset: Sequence[int],
                               budget: int | None = None,
                               model: SchemeModel = HONEST) -> AuditReport:
    """Pass iff the tapped view has one distribution for every k and every database."""
    budget = default_budget() if budget is None else budget
    subset = tuple(sorted(subset))
    if not subset:
        return AuditReport(Constraint.EAVESDROPPER, Verdict.PASS, (), None, None, 0,
                           model=model.name)
    q, m, kl = params.q, params.randomness_count, params.db_length
    per_db = q ** (kl * m) * (m + 2)
    per_k_full = per_db * q**kl
    if per_k_full * params.n_files <= budget:
        method, dbs = "full", all_vectors(q, kl)
    elif per_db * (kl + 1) * params.n_files <= budget:
        method, dbs = "basis", np.vstack([np.zeros((1, kl), dtype=np.int64),
                                          np.eye(kl, dtype=np.int64)])
    else:
        return _skipped(Constraint.EAVESDROPPER, subset, None,
                        per_db * (kl + 1) * params.n_files, "basis", model)

    states = per_db * len(dbs) * params.n_files
    for k in range(1, params.n_files + 1):
        ref = None
        for start in range(0, len(dbs), DB_BATCH):
            batch = dbs[start:start + DB_BATCH]
            for db, table in zip(batch, tapped_tables(params, k, subset, batch, model)):
                ref = ref or table
                diff = ref.first_difference(table)
                if diff:
                    witness = Witness({"k": k, "database": dbs[0].tolist()}, diff[0], diff[1],
                                      {"k": k, "database": db.tolist()}, diff[0], diff[2])
                    return AuditReport(Constraint.EAVESDROPPER, Verdict.FAIL, subset, k, witness,
                                       states, method=method, model=model.name)
    return AuditReport(Constraint.EAVESDROPPER, Verdict.PASS, subset, None, None, states,
                       method=method, model=model.name)


# ---------------------------------------------------------------------------


def replay_witness(params: SchemeParams, report: AuditReport,
                   model: SchemeModel = HONEST) -> tuple[int, int]:
    """Recount the witness outcomes of a failed audit from scratch."""
    w = report.witness
    if w is None:
        raise ValueError("report has no witness")
    if report.constraint is Constraint.USER:
        ta = query_table(params, w.condition_a["k"], report.subset, model)
        tb = query_table(params, w.condition_b["k"], report.subset, model)
    elif report.constraint is Constraint.DATABASE:
        u = np.array(w.condition_a["u"], dtype=np.int64)
        ta = answer_table_given_u(params, w.condition_a["k"], u,
                                  np.array(w.condition_a["database"]), model)
        tb = answer_table_given_u(params, w.condition_b["k"], u,
                                  np.array(w.condition_b["database"]), model)
    else:
        ta = tapped_table(params, w.condition_a["k"], report.subset,
                          np.array(w.condition_a["database"]), model)
        tb = tapped_table(params, w.condition_b["k"], report.subset,
                          np.array(w.condition_b["database"]), model)
    return ta.count(w.outcome_a), tb.count(w.outcome_b)


def admissible_subsets(n_nodes: int, size: int, given=None) -> list[tuple[int, ...]]:
    """All ``size``-subsets of ``[1:N]`` when N <= 6, otherwise the caller's list."""
    if n_nodes <= 6 or given is None:
        if given is None and n_nodes > 6:
            raise ValueError("N > 6: pass the subsets to audit explicitly")
        return list(itertools.combinations(range(1, n_nodes + 1), size))
    return [tuple(sorted(s)) for s in given]


def audit_all(params: SchemeParams, budget: int | None = None, model: SchemeModel = HONEST,
              subsets_t=None, subsets_e=None, file_k=None) -> list[AuditReport]:
    """Every audit over every admissible subset (and every k for database privacy)."""
    reports: list[AuditReport] = []
    for sub in admissible_subsets(params.n_nodes, params.collusion, subsets_t):
        reports.append(audit_user_privacy(params, sub, budget, model))
    for k in range(1, params.n_files + 1):
        reports.append(audit_database_privacy(params, k, file_k, budget, model))
    if params.eavesdrop:
        for sub in admissible_subsets(params.n_nodes, params.eavesdrop, subsets_e):
            reports.append(audit_eavesdropper_privacy(params, sub, budget, model))
    return reports


# ---------------------------------------------------------------------------
# Monte-Carlo fallback


@dataclass(frozen=True)
class SampledEstimate:
    """Empirical total-variation distance; advisory only, never a verdict."""

    constraint: Constraint
    distance: float
    samples: int


def _tv(a: np.ndarray, b: np.ndarray) -> float:
    support = np.union1d(a, b)
    pa = np.bincount(np.searchsorted(support, a), minlength=len(support)) / len(a)
    pb = np.bincount(np.searchsorted(support, b), minlength=len(support)) / len(b)
    return float(0.5 * np.abs(pa - pb).sum())


def sampled_statistical_distance(params: SchemeParams, constraint: Constraint | str, samples: int,
                                 rng: np.random.Generator, model: SchemeModel = HONEST,
                                 subset: Sequence[int] | None = None) -> SampledEstimate:
    """Estimate the TV distance between the two observation laws an audit compares.

    user: queries of ``subset`` (default the first T nodes) for k=1 vs k=2.
    database: answers over random s for one random U and requested file,
    under two random realisations of the other files.
    eavesdropper: tapped view (default the first E nodes) over random (U, s)
    under two random databases.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    constraint = Constraint(constraint)
    q, m, kl = params.q, params.randomness_count, params.db_length

    def draw_u(n):
        return params.field.random(rng, (n, kl, m))

    def draw_s(n):
        return params.field.random(rng, (n, m))

    if constraint is Constraint.USER:
        cols = [n - 1 for n in (subset or range(1, params.collusion + 1))]
        obs = []
        for k in (1, 2):
            v = model.queries(params, k, draw_u(samples))[..., cols]
            obs.append(_encode(np.swapaxes(v, -1, -2).reshape(samples, -1), q))
    elif constraint is Constraint.DATABASE:
        k = 1
        u = draw_u(1)
        vectors = model.queries(params, k, u)[0]
        file_k = params.field.random(rng, params.file_length)
        nodes = list(range(1, params.n_nodes + 1))
        obs = []
        for _ in range(2):
            others = params.field.random(rng, (1, (params.n_files - 1) * params.file_length))
            db = _assemble(params, k, file_k, others)[0]
            obs.append(_encode(model.answers(params, vectors, nodes, db, draw_s(samples)), q))
    else:
        sub = list(subset or range(1, max(params.eavesdrop, 1) + 1))
        cols = [n - 1 for n in sub]
        obs = []
        for _ in range(2):
            db = params.field.random(rng, kl)
            v = model.queries(params, 1, draw_u(samples))[..., cols]
            a = model.answers(params, v, sub, db, draw_s(samples))
            rows = np.concatenate([np.swapaxes(v, -1, -2).reshape(samples, -1), a], axis=-1)
            obs.append(_encode(rows, q))
    return SampledEstimate(constraint, _tv(obs[0], obs[1]), samples)
