"""Query generation, node answers and decoding for the three retrieval schemes.

Indexing: files ``k`` and nodes ``n`` are 1-based at this interface,
matching the protocol description ``[1:K]`` and ``[1:N]``.  Arrays are
0-based internally; query matrices are ``(K*L, N)`` so node ``n`` reads
column ``n - 1``.

Three schemes share one answer rule::

    A_n = <Q_n, W> + <column n of the (N, M) mask generator, s>

* ``TBSPIR``  - Byzantine-robust, M = T, L = N - 2B - T.
* ``TBESPIR`` - same construction with T replaced by M = max(T, E).
* ``TESPIR``  - eavesdropper-secure, B = 0, M = max(T, E), L = N - M.  The
  retrieval unit vectors ride on the last L nodes instead of a second code.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from functools import cached_property

import numpy as np

from .codes import (
    DecodeStatus,
    GrsSpec,
    Matrix,
    grs_generator,
    matmul_mod,
    rs_decode,
    solve_square,
    vstack,
)
from .errors import BadIndex, DimensionMismatch, InvalidParams, Singular
from .gf import Locators, PrimeField, default_locators, next_prime


class SchemeKind(str, Enum):
    TBSPIR = "tbspir"
    TESPIR = "tespir"
    TBESPIR = "tbespir"

    @property
    def byzantine_robust(self) -> bool:
        return self is not SchemeKind.TESPIR


def validity_violation(kind: SchemeKind, n: int, k: int, t: int, b: int, e: int,
                       q: int | None = None) -> str | None:
    """Name the first violated validity inequality, or ``None`` if valid."""
    kind = SchemeKind(kind)
    if k < 2:
        return "requires K >= 2"
    if t < 1:
        return "requires T >= 1"
    if b < 0 or e < 0:
        return "requires B >= 0 and E >= 0"
    if kind is SchemeKind.TBSPIR:
        if e != 0:
            return "TBSPIR requires E = 0"
        if n <= 2 * b + t:
            return "requires N > 2B+T"
    elif kind is SchemeKind.TESPIR:
        if b != 0:
            return "TESPIR requires B = 0"
        if n <= max(t, e):
            return "requires N > max(T,E)"
    else:
        if n <= 2 * b + max(t, e):
            return "requires N > 2B+max(T,E)"
    if q is not None and q < n + 1:
        return "requires q >= N+1"
    return None


def resolve_modulus(q: int | str, n_nodes: int) -> int:
    """``"auto"`` becomes the smallest prime >= N+1."""
    if q == "auto" or q is None:
        return next_prime(n_nodes + 1)
    return int(q)


@dataclass(frozen=True)
class SchemeParams:
    kind: SchemeKind
    n_nodes: int
    n_files: int
    collusion: int
    byzantine: int
    eavesdrop: int
    field: PrimeField

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        problem = validity_violation(self.kind, self.n_nodes, self.n_files, self.collusion,
                                     self.byzantine, self.eavesdrop, self.field.q)
        if problem:
            raise InvalidParams(f"{self.kind.name} N={self.n_nodes}, K={self.n_files}, "
                                f"T={self.collusion}, B={self.byzantine}, E={self.eavesdrop}, "
                                f"q={self.field.q}: {problem}")

    @classmethod
    def create(cls, kind, n: int, k: int, t: int, b: int = 0, e: int = 0,
               q: int | str = "auto") -> "SchemeParams":
        return cls(SchemeKind(kind), n, k, t, b, e, PrimeField(resolve_modulus(q, n)))

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def randomness_count(self) -> int:
        """M: number of random query vectors and of common-randomness symbols."""
        if self.kind is SchemeKind.TBSPIR:
            return self.collusion
        return max(self.collusion, self.eavesdrop)

    @property
    def file_length(self) -> int:
        """L: symbols per file retrieved in one round."""
        return self.n_nodes - 2 * self.byzantine - self.randomness_count

    @property
    def db_length(self) -> int:
        return self.n_files * self.file_length

    @cached_property
    def locators(self) -> Locators:
        return default_locators(self.field, self.n_nodes)

    @cached_property
    def mask_generator(self) -> Matrix:
        """The (N, M) unit-multiplier GRS generator spreading U and s over the nodes."""
        return grs_generator(GrsSpec(self.locators, self.randomness_count))

    @cached_property
    def file_generator(self) -> Matrix:
        """G_e: (N, L) GRS code with powers starting at M (Byzantine schemes only)."""
        return grs_generator(GrsSpec(self.locators, self.file_length,
                                     first_power=self.randomness_count))

    @cached_property
    def decode_spec(self) -> GrsSpec:
        """GRS description of the combined (N, N-2B) code the honest answers form."""
        return GrsSpec(self.locators, self.n_nodes - 2 * self.byzantine)

    @cached_property
    def espir_decode_matrix(self) -> Matrix:
        """``[[G_(N,M)], [0, I_L]]``, the N x N matrix mapping (aliases, file) to answers."""
        m, l = self.randomness_count, self.file_length
        lower = np.concatenate([np.zeros((l, m), dtype=np.int64), np.eye(l, dtype=np.int64)], axis=1)
        return vstack(self.mask_generator, Matrix(self.field, lower))

    def check_file_index(self, k: int) -> None:
        if not 1 <= int(k) <= self.n_files:
            raise BadIndex(f"file index {k} outside [1, {self.n_files}]")

    def check_node(self, n: int) -> None:
        if not 1 <= int(n) <= self.n_nodes:
            raise BadIndex(f"node {n} outside [1, {self.n_nodes}]")

    def __str__(self) -> str:
        return (f"{self.kind.name}(N={self.n_nodes}, K={self.n_files}, T={self.collusion}, "
                f"B={self.byzantine}, E={self.eavesdrop}, q={self.q})")


# ---------------------------------------------------------------------------
# Protocol data


@dataclass(frozen=True, eq=False)
class Database:
    """K files of L symbols each; ``files[k-1]`` is file ``k``."""

    files: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.files, dtype=np.int64, ndmin=2)
        arr.setflags(write=False)
        object.__setattr__(self, "files", arr)

    @classmethod
    def random(cls, params: SchemeParams, rng: np.random.Generator) -> "Database":
        return cls(params.field.random(rng, (params.n_files, params.file_length)))

    @classmethod
    def from_flat(cls, params: SchemeParams, flat) -> "Database":
        return cls(np.asarray(flat, dtype=np.int64).reshape(params.n_files, params.file_length))

    @property
    def flat(self) -> np.ndarray:
        """The concatenation ``(W_1, ..., W_K)``: file k occupies offsets ``(k-1)L .. kL-1``."""
        return self.files.reshape(-1)

    def file(self, k: int) -> np.ndarray:
        return self.files[k - 1]

    def with_file(self, k: int, new_file) -> "Database":
        files = self.files.copy()
        files[k - 1] = new_file
        return Database(files)

    def check(self, params: SchemeParams) -> None:
        if self.files.shape != (params.n_files, params.file_length):
            raise DimensionMismatch(f"database shape {self.files.shape} != "
                                    f"{(params.n_files, params.file_length)}")

    def __eq__(self, other) -> bool:
        return isinstance(other, Database) and np.array_equal(self.files, other.files)


@dataclass(frozen=True, eq=False)
class QuerySet:
    """Queries of one retrieval plus the user's secret randomness.

    ``vectors[:, n-1]`` is the query sent to node ``n``; ``u`` is the
    ``(K*L, M)`` randomness matrix.  Only the user holds ``u`` and ``k``.
    """

    k: int
    u: np.ndarray
    vectors: np.ndarray

    def node(self, n: int) -> np.ndarray:
        return self.vectors[:, n - 1]

    def __eq__(self, other) -> bool:
        return (isinstance(other, QuerySet) and self.k == other.k
                and np.array_equal(self.u, other.u) and np.array_equal(self.vectors, other.vectors))


@dataclass(frozen=True, eq=False)
class CommonRandomness:
    """Symbols shared by all nodes and never shown to the user."""

    s: np.ndarray

    @classmethod
    def random(cls, params: SchemeParams, rng: np.random.Generator) -> "CommonRandomness":
        return cls(params.field.random(rng, params.randomness_count))

    @classmethod
    def zeros(cls, params: SchemeParams) -> "CommonRandomness":
        return cls(np.zeros(params.randomness_count, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.s)


@dataclass(frozen=True, eq=False)
class AnswerVector:
    """One symbol per node.  ``corrupted`` is simulator bookkeeping, hidden from decoders."""

    a: np.ndarray
    corrupted: frozenset[int] = dc_field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.a)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AnswerVector) and self.corrupted == other.corrupted
                and np.array_equal(self.a, other.a))


@dataclass(frozen=True)
class RetrievalResult:
    status: DecodeStatus
    file: np.ndarray | None = None
    aliases: np.ndarray | None = None
    located_errors: frozenset[int] = dc_field(default_factory=frozenset)

    @property
    def ok(self) -> bool:
        return self.status is DecodeStatus.RECOVERED


# ---------------------------------------------------------------------------
# Queries


def unit_block(params: SchemeParams, k: int) -> np.ndarray:
    """The ``(K*L, L)`` matrix of unit vectors selecting file k."""
    params.check_file_index(k)
    l = params.file_length
    e = np.zeros((params.db_length, l), dtype=np.int64)
    e[(k - 1) * l + np.arange(l), np.arange(l)] = 1
    return e


def query_offset(params: SchemeParams, k: int) -> np.ndarray:
    """Deterministic ``(K*L, N)`` part of the queries (everything except the U term)."""
    e = unit_block(params, k)
    if params.kind is SchemeKind.TESPIR:
        offset = np.zeros((params.db_length, params.n_nodes), dtype=np.int64)
        offset[:, params.randomness_count:] = e
        return offset
    return matmul_mod(e, params.file_generator.data, params.q)


def expand_queries(params: SchemeParams, k: int, u: np.ndarray) -> np.ndarray:
    """``U @ G_mask + offset`` for one U of shape ``(K*L, M)`` or a stack ``(..., K*L, M)``."""
    u = np.asarray(u, dtype=np.int64)
    if u.shape[-2:] != (params.db_length, params.randomness_count):
        raise DimensionMismatch(f"U has shape {u.shape[-2:]}, expected "
                                f"{(params.db_length, params.randomness_count)}")
    q = params.q
    return (matmul_mod(u % q, params.mask_generator.data, q) + query_offset(params, k)) % q


def _query_gen(params: SchemeParams, k: int, rng, u) -> QuerySet:
    params.check_file_index(k)
    if u is None:
        u = params.field.random(rng, (params.db_length, params.randomness_count))
    u = np.asarray(u, dtype=np.int64) % params.q
    return QuerySet(int(k), u, expand_queries(params, k, u))


def query_gen_bspir(params: SchemeParams, k: int, rng: np.random.Generator | None = None,
                    u: np.ndarray | None = None) -> QuerySet:
    """Queries ``U G_U + e G_e`` for the Byzantine-robust schemes.

    Pass ``u`` to fix the randomness matrix instead of drawing it from ``rng``.
    """
    if not params.kind.byzantine_robust:
        raise ValueError(f"query_gen_bspir does not apply to {params.kind.name}")
    return _query_gen(params, k, rng, u)


def query_gen_espir(params: SchemeParams, k: int, rng: np.random.Generator | None = None,
                    u: np.ndarray | None = None) -> QuerySet:
    """Queries ``U G + [0, ..., 0, e_1, ..., e_L]`` for TESPIR."""
    if params.kind is not SchemeKind.TESPIR:
        raise ValueError(f"query_gen_espir does not apply to {params.kind.name}")
    return _query_gen(params, k, rng, u)


def query_gen(params: SchemeParams, k: int, rng: np.random.Generator | None = None,
              u: np.ndarray | None = None) -> QuerySet:
    if params.kind is SchemeKind.TESPIR:
        return query_gen_espir(params, k, rng, u)
    return query_gen_bspir(params, k, rng, u)


# ---------------------------------------------------------------------------
# Answers


def node_masks(params: SchemeParams, s) -> np.ndarray:
    """Per-node masks ``s @ G_mask``; ``s`` may be a stack ``(..., M)``."""
    s = np.asarray(s, dtype=np.int64)
    if s.shape[-1] != params.randomness_count:
        raise DimensionMismatch(f"common randomness has {s.shape[-1]} symbols, "
                                f"expected {params.randomness_count}")
    return matmul_mod(s, params.mask_generator.data, params.q)


def answer_gen(params: SchemeParams, node: int, query, database: Database,
               s: CommonRandomness) -> int:
    params.check_node(node)
    query = np.asarray(query, dtype=np.int64)
    if query.shape != (params.db_length,):
        raise DimensionMismatch(f"query length {query.shape} != {params.db_length}")
    database.check(params)
    q = params.q
    mask = node_masks(params, s.s)[node - 1]
    return int((int(matmul_mod(query, database.flat, q)) + mask) % q)


def answers_batch(params: SchemeParams, vectors: np.ndarray, flat_db: np.ndarray,
                  s: np.ndarray) -> np.ndarray:
    """Vectorised answers: ``vectors (..., KL, N)``, ``flat_db (..., KL)``, ``s (..., M)``."""
    q = params.q
    inner = matmul_mod(np.asarray(flat_db, dtype=np.int64)[..., None, :], vectors, q)[..., 0, :]
    return (inner + node_masks(params, s)) % q


def answer_all(params: SchemeParams, queries: QuerySet, database: Database,
               s: CommonRandomness) -> AnswerVector:
    database.check(params)
    return AnswerVector(answers_batch(params, queries.vectors, database.flat, s.s))


# ---------------------------------------------------------------------------
# Decoding (user side: sees params and answers only)


def decode_bspir(params: SchemeParams, answers: AnswerVector) -> RetrievalResult:
    if not params.kind.byzantine_robust:
        raise ValueError(f"decode_bspir does not apply to {params.kind.name}")
    outcome = rs_decode(answers.a, params.decode_spec, params.byzantine)
    if not outcome.ok:
        return RetrievalResult(DecodeStatus.UNRECOVERABLE)
    m = params.randomness_count
    return RetrievalResult(DecodeStatus.RECOVERED, file=outcome.message[m:],
                           aliases=outcome.message[:m],
                           located_errors=frozenset(i + 1 for i in outcome.error_positions))


def decode_espir(params: SchemeParams, answers: AnswerVector) -> RetrievalResult:
    if params.kind is not SchemeKind.TESPIR:
        raise ValueError(f"decode_espir does not apply to {params.kind.name}")
    try:
        x = solve_square(params.espir_decode_matrix, answers.a)
    except Singular as exc:  # pragma: no cover - impossible for valid params
        raise RuntimeError(f"stacked decode matrix singular for {params}") from exc
    m = params.randomness_count
    return RetrievalResult(DecodeStatus.RECOVERED, file=x[m:], aliases=x[:m])


def decode(params: SchemeParams, answers: AnswerVector) -> RetrievalResult:
    if params.kind is SchemeKind.TESPIR:
        return decode_espir(params, answers)
    return decode_bspir(params, answers)


# ---------------------------------------------------------------------------
# Rates


def capacity(params: SchemeParams) -> Fraction:
    n, b = params.n_nodes, params.byzantine
    if params.kind is SchemeKind.TBSPIR:
        return 1 - Fraction(2 * b + params.collusion, n)
    worst = max(params.collusion, params.eavesdrop)
    if params.kind is SchemeKind.TESPIR:
        return 1 - Fraction(worst, n)
    return 1 - Fraction(2 * b + worst, n)


def secrecy_rate(params: SchemeParams) -> Fraction:
    """Common-randomness symbols per file symbol, M / L."""
    return Fraction(params.randomness_count, params.file_length)


def achieved_rate(params: SchemeParams) -> Fraction:
    """File symbols per downloaded symbol: one symbol per node per round."""
    return Fraction(params.file_length, params.n_nodes)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Transcript:
    """Everything that happened in one honest round, for inspection and attacks."""

    params: SchemeParams
    database: Database
    queries: QuerySet
    randomness: CommonRandomness
    answers: AnswerVector


def honest_round(params: SchemeParams, k: int, database: Database,
                 rng: np.random.Generator) -> Transcript:
    """Draw U then s from ``rng`` and compute the honest answers."""
    queries = query_gen(params, k, rng)
    s = CommonRandomness.random(params, rng)
    return Transcript(params, database, queries, s, answer_all(params, queries, database, s))
