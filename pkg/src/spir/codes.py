"""Linear algebra over F_q, GRS generator matrices and error-correcting decoding.

Conventions
-----------
* Row-vector orientation: ``codeword = message @ G`` with ``G`` of shape
  ``(k_dim, N)``.
* Codeword positions are 0-based here.  The protocol layer translates them
  to 1-based node labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, DimensionTooLarge, FieldMismatch, Singular
from .gf import FieldElement, Locators, PrimeField

_INT64_HEADROOM = 2**62


def matmul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """``(a @ b) mod q`` for canonical int64 operands, broadcasting like ``@``."""
    inner = a.shape[-1]
    if inner * (q - 1) ** 2 < _INT64_HEADROOM:
        return np.matmul(a, b) % q
    out = np.matmul(a.astype(object), b.astype(object)) % q
    return out.astype(np.int64)


def row_reduce(a: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``a`` over F_q and its pivot columns."""
    m = np.array(a, dtype=np.int64) % q
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
        m[r] = (m[r] * pow(int(m[r, c]), q - 2, q)) % q
        others = np.nonzero(m[:, c])[0]
        others = others[others != r]
        if others.size:
            m[others] = (m[others] - np.outer(m[others, c], m[r])) % q
        pivots.append(c)
        r += 1
    return m, pivots


def rank_mod(a: np.ndarray, q: int) -> int:
    return len(row_reduce(a, q)[1])


def solve_linear(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray | None:
    """One solution ``x`` of ``a @ x = b`` over F_q (free variables set to 0).

    Returns ``None`` when the system is inconsistent.
    """
    rows, cols = a.shape
    aug = np.concatenate([np.asarray(a, dtype=np.int64) % q,
                          (np.asarray(b, dtype=np.int64) % q).reshape(rows, 1)], axis=1)
    red, pivots = row_reduce(aug, q)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = red[i, cols]
    return x


@dataclass(frozen=True, eq=False)
class Matrix:
    """Dense matrix over a prime field, stored as a read-only int64 array."""

    field: PrimeField
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.int64, ndmin=2) % self.field.q
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if arr.ndim != 2:
            raise DimensionMismatch(f"matrix must be 2-D, got shape {arr.shape}")

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "Matrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> "Matrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.data.T)

    def columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(self.field, self.data[:, list(idx)])

    def rank(self) -> int:
        return rank_mod(self.data, self.field.q)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"Matrix(F_{self.field.q}, {self.data.tolist()})"


def vstack(*blocks: Matrix) -> Matrix:
    _same_field(*blocks)
    return Matrix(blocks[0].field, np.vstack([b.data for b in blocks]))


def _same_field(*mats: Matrix) -> None:
    f = mats[0].field
    for m in mats[1:]:
        if m.field != f:
            raise FieldMismatch(f"{f!r} vs {m.field!r}")


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    _same_field(a, b)
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return Matrix(a.field, matmul_mod(a.data, b.data, a.field.q))


def solve_square(m: Matrix, rhs) -> np.ndarray:
    """Solve the row-vector system ``x @ m = rhs``.

    Raises :class:`Singular` if ``m`` is rank deficient.
    """
    if m.rows != m.cols:
        raise DimensionMismatch(f"solve_square needs a square matrix, got {m.shape}")
    q = m.field.q
    rhs = _as_vector(rhs, q)
    if rhs.shape != (m.cols,):
        raise DimensionMismatch(f"rhs length {rhs.shape[0]} != {m.cols}")
    aug = np.concatenate([m.data.T, rhs.reshape(-1, 1)], axis=1)
    red, pivots = row_reduce(aug, q)
    if pivots != list(range(m.rows)):
        raise Singular("matrix is not invertible over F_%d" % q)
    return red[:, m.rows].copy()


def _as_vector(values, q: int) -> np.ndarray:
    if isinstance(values, np.ndarray):
        return np.asarray(values, dtype=np.int64).ravel() % q
    return np.array([int(v) for v in values], dtype=np.int64) % q


# ---------------------------------------------------------------------------
# Generalized Reed-Solomon codes


@dataclass(frozen=True)
class GrsSpec:
    """GRS generator with entry ``(j, n) = multipliers[n] * locators[n] ** (first_power + j)``.

    ``multipliers`` defaults to all ones.
    """

    locators: Locators
    k_dim: int
    multipliers: tuple[int, ...] | None = None
    first_power: int = 0

    def __post_init__(self) -> None:
        n = len(self.locators)
        mult = self.multipliers
        if mult is None:
            mult = (1,) * n
        mult = tuple(int(v) % self.field.q for v in mult)
        object.__setattr__(self, "multipliers", mult)
        if len(mult) != n:
            raise DimensionMismatch(f"{len(mult)} multipliers for {n} locators")
        if any(v == 0 for v in mult):
            raise ValueError("column multipliers must be nonzero")
        if self.k_dim < 1:
            raise ValueError("k_dim must be at least 1")
        if self.first_power < 0:
            raise ValueError("first_power must be nonnegative")

    @property
    def field(self) -> PrimeField:
        return self.locators.field

    @property
    def n(self) -> int:
        return len(self.locators)

    def column_scales(self) -> np.ndarray:
        """Per-position factor ``multiplier_n * lambda_n ** first_power``."""
        q = self.field.q
        return np.array([(m * pow(lam, self.first_power, q)) % q
                         for m, lam in zip(self.multipliers, self.locators)], dtype=np.int64)


def vandermonde_powers(locators: Locators, first_power: int, count: int) -> np.ndarray:
    """Rows ``lambda ** (first_power + j)`` for ``j < count`` as a ``(count, N)`` array."""
    q = locators.field.q
    return np.array([[pow(lam, first_power + j, q) for lam in locators] for j in range(count)],
                    dtype=np.int64).reshape(count, len(locators))


def grs_generator(spec: GrsSpec) -> Matrix:
    if spec.k_dim > spec.n:
        raise DimensionTooLarge(f"k_dim {spec.k_dim} exceeds length {spec.n}")
    q = spec.field.q
    g = vandermonde_powers(spec.locators, spec.first_power, spec.k_dim)
    g = (g * np.array(spec.multipliers, dtype=np.int64)) % q
    return Matrix(spec.field, g)


def encode(message, spec: GrsSpec) -> np.ndarray:
    g = grs_generator(spec)
    return matmul_mod(_as_vector(message, spec.field.q), g.data, spec.field.q)


class DecodeStatus(str, Enum):
    RECOVERED = "recovered"
    UNRECOVERABLE = "unrecoverable"


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of :func:`rs_decode`.

    ``error_positions`` are 0-based codeword positions whose received symbol
    differs from the decoded codeword.  ``message`` is ``None`` when the word
    could not be decoded.
    """

    status: DecodeStatus
    message: np.ndarray | None = None
    error_positions: frozenset[int] = dc_field(default_factory=frozenset)

    @property
    def ok(self) -> bool:
        return self.status is DecodeStatus.RECOVERED


def _poly_divmod(num: np.ndarray, den: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Polynomial long division over F_q; coefficients in ascending order."""
    num = [int(v) % q for v in num]
    den = [int(v) % q for v in den]
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError("division by the zero polynomial")
    lead_inv = pow(den[-1], q - 2, q)
    quot = [0] * max(len(num) - len(den) + 1, 1)
    rem = num[:]
    for i in range(len(num) - len(den), -1, -1):
        coef = (rem[i + len(den) - 1] * lead_inv) % q
        quot[i] = coef
        if coef:
            for j, d in enumerate(den):
                rem[i + j] = (rem[i + j] - coef * d) % q
    return np.array(quot, dtype=np.int64), np.array(rem[: len(den) - 1] or [0], dtype=np.int64)


def rs_decode(received, spec: GrsSpec, max_errors: int) -> DecodeOutcome:
    """Correct up to ``max_errors`` symbol errors with Berlekamp-Welch.

    The column scales of the GRS code are divided out first, so the problem
    becomes decoding a plain polynomial evaluation code: find the message
    polynomial ``f`` (degree < k_dim) and a monic error locator ``E`` of
    degree ``max_errors`` with ``f(lam_n) E(lam_n) = y_n E(lam_n)`` at every
    position.

    The outcome is RECOVERED only if the decoded codeword lies within
    Hamming distance ``max_errors`` of ``received``; that codeword is unique
    whenever ``k_dim + 2 * max_errors <= N``.
    """
    field = spec.field
    q = field.q
    n, k, b = spec.n, spec.k_dim, int(max_errors)
    r = _as_vector(received, q)
    if r.shape != (n,):
        raise DimensionMismatch(f"received word has length {r.shape[0]}, expected {n}")
    if b < 0 or k + 2 * b > n:
        raise DimensionTooLarge(f"cannot correct {b} errors with a ({n},{k}) code")

    y = (r * field.inv_array(spec.column_scales())) % q

    # Unknowns: Q_0..Q_{k+b-1}, E_0..E_{b-1}  (E_b = 1).
    q_pows = vandermonde_powers(spec.locators, 0, k + b).T          # (n, k+b)
    e_pows = vandermonde_powers(spec.locators, 0, b + 1).T          # (n, b+1)
    a = np.concatenate([q_pows, (-y[:, None] * e_pows[:, :b]) % q], axis=1)
    rhs = (y * e_pows[:, b]) % q
    sol = solve_linear(a, rhs, q)
    if sol is None:
        return DecodeOutcome(DecodeStatus.UNRECOVERABLE)

    q_poly = sol[: k + b]
    e_poly = np.append(sol[k + b:], 1)
    f, rem = _poly_divmod(q_poly, e_poly, q)
    if np.any(rem) or np.any(f[k:]):
        return DecodeOutcome(DecodeStatus.UNRECOVERABLE)
    message = np.zeros(k, dtype=np.int64)
    message[: min(k, f.size)] = f[:k]

    codeword = encode(message, spec)
    errors = frozenset(int(i) for i in np.nonzero(codeword != r)[0])
    if len(errors) > b:
        return DecodeOutcome(DecodeStatus.UNRECOVERABLE)
    return DecodeOutcome(DecodeStatus.RECOVERED, message, errors)


def as_elements(values, field: PrimeField) -> list[FieldElement]:
    return [FieldElement(int(v) % field.q, field) for v in values]
