"""Prime-field arithmetic and code locators.

Two layers are offered.  :class:`PrimeField` works on plain Python ints
(and numpy int64 arrays, see :meth:`PrimeField.array`), which is what the
protocol code uses internally.  :class:`FieldElement` wraps a single value
together with its field, supports the usual operators and refuses to mix
elements of different fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DivisionByZero, FieldMismatch, FieldTooSmall, NotPrime

MAX_MODULUS = 2**31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


@dataclass(frozen=True)
class PrimeField:
    """The field F_q for a prime q < 2**31.

    Raises
    ------
    NotPrime
        If ``q`` is composite (or < 2).
    """

    q: int

    def __post_init__(self) -> None:
        q = int(self.q)
        object.__setattr__(self, "q", q)
        if q >= MAX_MODULUS:
            raise ValueError(f"modulus {q} exceeds the supported bound 2**31")
        if not is_prime(q):
            raise NotPrime(f"{q} is not prime")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.q, self)

    def __repr__(self) -> str:
        return f"PrimeField({self.q})"

    def __iter__(self) -> Iterator["FieldElement"]:
        return (FieldElement(v, self) for v in range(self.q))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1 % self.q, self)

    # -- element arithmetic ---------------------------------------------
    # Accepts ints or FieldElements; returns the same kind it was given.

    def _unwrap(self, a) -> int:
        if isinstance(a, FieldElement):
            if a.field != self:
                raise FieldMismatch(f"element of {a.field!r} used in {self!r}")
            return a.value
        return int(a) % self.q

    def _wrap(self, like, value: int):
        if isinstance(like, FieldElement):
            return FieldElement(value, self)
        return value

    def add(self, a, b):
        return self._wrap(a, (self._unwrap(a) + self._unwrap(b)) % self.q)

    def sub(self, a, b):
        return self._wrap(a, (self._unwrap(a) - self._unwrap(b)) % self.q)

    def mul(self, a, b):
        return self._wrap(a, (self._unwrap(a) * self._unwrap(b)) % self.q)

    def neg(self, a):
        return self._wrap(a, (-self._unwrap(a)) % self.q)

    def inv(self, a):
        v = self._unwrap(a)
        if v == 0:
            raise DivisionByZero("zero has no multiplicative inverse")
        return self._wrap(a, pow(v, self.q - 2, self.q))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            raise ValueError("exponent must be nonnegative")
        # Python's pow gives pow(0, 0, q) == 1, the empty-product convention.
        return self._wrap(a, pow(self._unwrap(a), int(e), self.q))

    # -- array helpers --------------------------------------------------

    def array(self, values) -> np.ndarray:
        """Canonical int64 array of ``values`` reduced mod q."""
        return np.mod(np.asarray(values, dtype=np.int64), self.q)

    def random(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(0, self.q, size=size, dtype=np.int64)

    def random_nonzero(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(1, self.q, size=size, dtype=np.int64)

    def inv_array(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a % self.q == 0):
            raise DivisionByZero("zero has no multiplicative inverse")
        return np.array([pow(int(v), self.q - 2, self.q) for v in a.ravel()],
                        dtype=np.int64).reshape(a.shape)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"{self.value} is not canonical in {self.field!r}")

    def _other(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other
        return self.field(other)

    def __add__(self, other):
        return self.field.add(self, self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.field.sub(self, self._other(other))

    def __rsub__(self, other):
        return self.field.sub(self._other(other), self)

    def __mul__(self, other):
        return self.field.mul(self, self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.field.div(self, self._other(other))

    def __neg__(self):
        return self.field.neg(self)

    def __pow__(self, e: int):
        return self.field.pow(self, e)

    def inverse(self) -> "FieldElement":
        return self.field.inv(self)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.q
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.field.q))

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.q})"


@dataclass(frozen=True)
class Locators(Sequence[int]):
    """N distinct nonzero code locators, one per storage node."""

    field: PrimeField
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        vals = tuple(int(v) % self.field.q for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(v == 0 for v in vals):
            raise ValueError("code locators must be nonzero")
        if len(set(vals)) != len(vals):
            raise ValueError("code locators must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def elements(self) -> list[FieldElement]:
        return [FieldElement(v, self.field) for v in self.values]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64)


def default_locators(field: PrimeField, n: int) -> Locators:
    """Canonical locators ``1, 2, ..., n``.

    Raises :class:`FieldTooSmall` unless ``field.q >= n + 1``.
    """
    if field.q < n + 1:
        raise FieldTooSmall(f"need q >= N+1 = {n + 1} for {n} nonzero locators, got q = {field.q}")
    return Locators(field, tuple(range(1, n + 1)))


def field_new(q: int) -> PrimeField:
    return PrimeField(q)
