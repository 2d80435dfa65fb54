"""Seeded Monte-Carlo runs, audit orchestration, capacity tables and reports."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import audit as audit_mod
from .adversary import Strategy, corrupt, random_plan, tap
from .audit import HONEST, AuditReport, SchemeModel, Verdict
from .schemes import (
    Database,
    SchemeKind,
    SchemeParams,
    achieved_rate,
    capacity,
    decode,
    honest_round,
    resolve_modulus,
    secrecy_rate,
    validity_violation,
)

SCHEMA_VERSION = 1
CSV_HEADER = ["scheme", "N", "K", "T", "B", "E", "q", "capacity_num", "capacity_den",
              "secrecy_num", "secrecy_den", "valid"]


@dataclass(frozen=True)
class RunConfig:
    scheme: SchemeKind
    n: int
    k: int = 2
    t: int = 1
    b: int = 0
    e: int = 0
    q: int | str = "auto"
    trials: int = 100
    adversary: Strategy = Strategy.SILENT
    seed: int = 0
    out: Path | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", SchemeKind(self.scheme))
        object.__setattr__(self, "adversary", Strategy(self.adversary))
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        object.__setattr__(self, "seed", int(self.seed) & (2**64 - 1))

    @property
    def modulus(self) -> int:
        return resolve_modulus(self.q, self.n)

    def params(self) -> SchemeParams:
        """Validated scheme parameters; raises :class:`InvalidParams`."""
        return SchemeParams.create(self.scheme, self.n, self.k, self.t, self.b, self.e, self.q)

    def to_dict(self) -> dict:
        return {"scheme": self.scheme.value, "N": self.n, "K": self.k, "T": self.t, "B": self.b,
                "E": self.e, "q": self.q, "q_resolved": self.modulus, "trials": self.trials,
                "adversary": self.adversary.value, "seed": self.seed}


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for trial ``trial``, reproducible in isolation."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def _fraction(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


@dataclass
class StrategyTally:
    trials: int = 0
    successes: int = 0
    errors_located: int = 0
    failed_trials: list[int] = dc_field(default_factory=list)

    def merge(self, other: "StrategyTally") -> "StrategyTally":
        return StrategyTally(self.trials + other.trials, self.successes + other.successes,
                             self.errors_located + other.errors_located,
                             sorted(self.failed_trials + other.failed_trials))

    def to_dict(self) -> dict:
        return {"trials": self.trials, "successes": self.successes,
                "errors_located": self.errors_located, "failed_trials": self.failed_trials[:20]}


@dataclass
class RunReport:
    config: RunConfig
    params: SchemeParams
    tally: StrategyTally
    audits: list[AuditReport] = dc_field(default_factory=list)
    duration_s: float = 0.0

    @property
    def achieved_rate(self) -> Fraction:
        return achieved_rate(self.params)

    @property
    def capacity(self) -> Fraction:
        return capacity(self.params)

    @property
    def secrecy_rate(self) -> Fraction:
        return secrecy_rate(self.params)

    @property
    def all_decoded(self) -> bool:
        return self.tally.successes == self.tally.trials

    @property
    def audit_failed(self) -> bool:
        return any(a.verdict is Verdict.FAIL for a in self.audits)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_decoded and not self.audit_failed else 1

    def to_dict(self, include_timing: bool = False) -> dict:
        p = self.params
        d = {
            "schema": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "derived": {"L": p.file_length, "M": p.randomness_count, "q": p.q},
            "trials": self.tally.trials,
            "successes": self.tally.successes,
            "achieved_rate": _fraction(self.achieved_rate),
            "capacity": _fraction(self.capacity),
            "secrecy_rate": _fraction(self.secrecy_rate),
            "rate_equals_capacity": self.achieved_rate == self.capacity,
            "strategies": {self.config.adversary.value: self.tally.to_dict()},
            "audits": [a.to_dict() for a in self.audits],
            "exit_code": self.exit_code,
        }
        if include_timing:
            d["duration_s"] = round(self.duration_s, 6)
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"

    def write(self, path: Path | str, include_timing: bool = False) -> None:
        Path(path).write_text(self.to_json(include_timing))


def run_trial(params: SchemeParams, strategy: Strategy, seed: int, trial: int) -> tuple[bool, bool]:
    """One retrieval with a fresh database, index, U, s and attack.

    Returns ``(decoded correctly, located errors match the corrupted set)``.
    """
    rng = trial_rng(seed, trial)
    database = Database.random(params, rng)
    k = int(rng.integers(1, params.n_files + 1))
    transcript = honest_round(params, k, database, rng)
    plan = random_plan(params, strategy, rng)
    received = corrupt(plan, transcript.answers, transcript, rng)
    tap(plan, transcript.queries, received, params)
    result = decode(params, received)
    ok = result.ok and np.array_equal(result.file, database.file(k))
    located = ok and (not params.kind.byzantine_robust or result.located_errors == received.corrupted)
    return ok, located


def cli_run(config: RunConfig) -> RunReport:
    params = config.params()
    start = time.perf_counter()
    tally = StrategyTally()
    for t in range(config.trials):
        ok, located = run_trial(params, config.adversary, config.seed, t)
        tally.trials += 1
        tally.successes += ok
        tally.errors_located += located
        if not ok:
            tally.failed_trials.append(t)
    return RunReport(config, params, tally, duration_s=time.perf_counter() - start)


def default_subsets(n_nodes: int, size: int) -> list[tuple[int, ...]]:
    """All subsets for N <= 6, else only ``{1..size}``."""
    if n_nodes <= 6:
        return audit_mod.admissible_subsets(n_nodes, size)
    return [tuple(range(1, size + 1))]


def cli_audit(config: RunConfig, budget: int | None = None, model: SchemeModel = HONEST,
              subsets_t: Sequence[Sequence[int]] | None = None,
              subsets_e: Sequence[Sequence[int]] | None = None) -> RunReport:
    """All three exact audits over the admissible subsets; runs no trials."""
    params = config.params()
    start = time.perf_counter()
    reports = audit_mod.audit_all(
        params, budget, model,
        subsets_t=subsets_t or default_subsets(params.n_nodes, params.collusion),
        subsets_e=subsets_e or default_subsets(params.n_nodes, params.eavesdrop),
    )
    return RunReport(config, params, StrategyTally(), reports, time.perf_counter() - start)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CapacityRow:
    scheme: SchemeKind
    n: int
    k: int
    t: int
    b: int
    e: int
    q: int
    capacity: Fraction | None
    secrecy: Fraction | None
    problem: str | None

    @property
    def valid(self) -> bool:
        return self.problem is None

    def as_csv_row(self) -> list:
        cap = self.capacity or Fraction(0)
        sec = self.secrecy or Fraction(0)
        nums = ([cap.numerator, cap.denominator, sec.numerator, sec.denominator]
                if self.valid else ["", "", "", ""])
        flag = "true" if self.valid else f"false: {self.problem}"
        return [self.scheme.value, self.n, self.k, self.t, self.b, self.e, self.q, *nums, flag]


def cli_capacity_table(schemes: Iterable[SchemeKind | str], n_values: Iterable[int],
                       t_values: Iterable[int], b_values: Iterable[int] = (0,),
                       e_values: Iterable[int] = (0,), k: int = 2,
                       q: int | str = "auto") -> list[CapacityRow]:
    """One row per parameter tuple; invalid tuples are flagged, not dropped."""
    rows = []
    for scheme in schemes:
        scheme = SchemeKind(scheme)
        for n in n_values:
            modulus = resolve_modulus(q, n)
            for t in t_values:
                for b in b_values:
                    for e in e_values:
                        problem = validity_violation(scheme, n, k, t, b, e, modulus)
                        cap = sec = None
                        if problem is None:
                            p = SchemeParams.create(scheme, n, k, t, b, e, modulus)
                            cap, sec = capacity(p), secrecy_rate(p)
                        rows.append(CapacityRow(scheme, n, k, t, b, e, modulus, cap, sec, problem))
    return rows


def capacity_csv(rows: Iterable[CapacityRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv_row())
    return buf.getvalue()

