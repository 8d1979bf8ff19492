"""Exact arithmetic and linear algebra over prime fields F_q.

Elements are small immutable value objects.  The matrix routines keep
entries as plain ints internally, which is what the protocol engine and the
enumeration oracle operate on; :class:`FieldElement` is the public face.
"""
from __future__ import annotations

import hashlib
import random
import secrets
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    FieldMismatchError,
    NoSolution,
    NotInvertibleError,
    ParameterError,
)

# q*q must stay far below 2**63 so products of lanes never overflow int64.
MAX_ORDER = 2**31


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or not _is_prime(self.q):
            raise ParameterError(f"field order must be prime, got {self.q!r}")
        if self.q >= MAX_ORDER:
            raise ParameterError(f"field order {self.q} exceeds {MAX_ORDER}")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value % self.q, self)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def elements(self) -> Iterator["FieldElement"]:
        for v in range(self.q):
            yield FieldElement(v, self)

    def vector(self, values: Iterable[int]) -> list["FieldElement"]:
        return [self(v) for v in values]


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ParameterError(f"{self.value} is not reduced modulo {self.field.q}")

    def _other(self, other: Union["FieldElement", int]) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot mix {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        return NotImplemented

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(v % self.field.q, self.field)

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.value - o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(o - self.value)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.value)

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * FieldElement(o, self.field).inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return self._wrap(pow(self.value, exponent, self.field.q))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.q})"

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise NotInvertibleError(f"0 has no inverse in {self.field}")
        return self._wrap(pow(self.value, self.field.q - 2, self.field.q))


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inverse(a: FieldElement) -> FieldElement:
    return a.inverse()


def common_field(values: Iterable[FieldElement]) -> PrimeField | None:
    field = None
    for v in values:
        if not isinstance(v, FieldElement):
            raise ParameterError(f"expected a FieldElement, got {v!r}")
        if field is None:
            field = v.field
        elif v.field != field:
            raise FieldMismatchError(f"cannot mix {field} and {v.field}")
    return field


def as_ints(values: Iterable[FieldElement | int], field: PrimeField) -> list[int]:
    """Reduce a mixed sequence of elements/ints to residues, checking fields."""
    out = []
    for v in values:
        if isinstance(v, FieldElement):
            if v.field != field:
                raise FieldMismatchError(f"cannot mix {field} and {v.field}")
            out.append(v.value)
        else:
            out.append(int(v) % field.q)
    return out


# -- integer-level linear algebra -------------------------------------------------


def rref(rows: Sequence[Sequence[int]], q: int, ncols: int | None = None):
    """Reduced row echelon form of an int matrix mod q.

    Returns ``(reduced_rows, pivot_columns)``; only the first ``ncols`` columns
    are eligible as pivots (the rest ride along, e.g. an augmented column).
    """
    m = [[x % q for x in row] for row in rows]
    if not m:
        return m, []
    width = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], q - 2, q)
        m[r] = [x * inv % q for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                factor = m[i][c]
                m[i] = [(x - factor * y) % q for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank_of(rows: Sequence[Sequence[int]], q: int) -> int:
    return len(rref(rows, q)[1])


def solve_ints(rows: Sequence[Sequence[int]], b: Sequence[int], q: int) -> list[int]:
    """Solve ``rows @ x = b`` mod q; free variables are set to zero."""
    if len(rows) != len(b):
        raise ParameterError(f"system has {len(rows)} rows but {len(b)} right-hand sides")
    if not rows:
        return []
    ncols = len(rows[0])
    aug = [list(row) + [bi] for row, bi in zip(rows, b)]
    red, pivots = rref(aug, q, ncols)
    for row in red[len(pivots):]:
        if row[ncols] % q:
            raise NoSolution("inconsistent linear system")
    x = [0] * ncols
    for row, c in zip(red, pivots):
        x[c] = row[ncols]
    return x


# -- matrices ---------------------------------------------------------------------


@dataclass(frozen=True)
class Matrix:
    field: PrimeField
    data: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        widths = {len(row) for row in self.data}
        if len(widths) > 1:
            raise ParameterError("ragged matrix")
        q = self.field.q
        if any(not 0 <= x < q for row in self.data for x in row):
            raise ParameterError("matrix entries must be reduced residues")

    @classmethod
    def from_ints(cls, field: PrimeField, rows: Iterable[Iterable[int]]) -> "Matrix":
        return cls(field, tuple(tuple(int(x) % field.q for x in row) for row in rows))

    @classmethod
    def from_elements(cls, rows: Sequence[Sequence[FieldElement]]) -> "Matrix":
        field = common_field(x for row in rows for x in row)
        if field is None:
            raise ParameterError("cannot infer the field of an empty matrix")
        return cls(field, tuple(tuple(x.value for x in row) for row in rows))

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return len(self.data[0]) if self.data else 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx: tuple[int, int]) -> FieldElement:
        i, j = idx
        return FieldElement(self.data[i][j], self.field)

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.data]

    def transpose(self) -> "Matrix":
        return Matrix(self.field, tuple(zip(*self.data)) if self.data else ())

    def select_columns(self, cols: Sequence[int]) -> "Matrix":
        return Matrix(self.field, tuple(tuple(row[c] for c in cols) for row in self.data))

    def select_rows(self, rows: Sequence[int]) -> "Matrix":
        return Matrix(self.field, tuple(self.data[r] for r in rows))

    def rank(self) -> int:
        return rank_of(self.data, self.field.q)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if other.field != self.field:
            raise FieldMismatchError(f"cannot mix {self.field} and {other.field}")
        if self.cols != other.rows:
            raise ParameterError(f"shape mismatch {self.shape} @ {other.shape}")
        q = self.field.q
        cols = list(zip(*other.data))
        return Matrix(
            self.field,
            tuple(tuple(sum(a * b for a, b in zip(row, col)) % q for col in cols) for row in self.data),
        )

    def vecmul(self, x: Sequence[FieldElement | int]) -> list[FieldElement]:
        """Row vector times matrix: ``x @ self``."""
        xs = as_ints(x, self.field)
        if len(xs) != self.rows:
            raise ParameterError(f"vector of length {len(xs)} against {self.rows} rows")
        q = self.field.q
        return [
            FieldElement(sum(a * row[j] for a, row in zip(xs, self.data)) % q, self.field)
            for j in range(self.cols)
        ]


def vandermonde(alphas: Sequence[FieldElement], rows: int) -> Matrix:
    """Matrix whose entry (i, j) is ``alphas[j] ** i`` for ``0 <= i < rows``."""
    if rows < 1:
        raise ParameterError("a Vandermonde matrix needs at least one row")
    field = common_field(alphas)
    if field is None:
        raise ParameterError("no evaluation points given")
    values = [a.value for a in alphas]
    if 0 in values:
        raise ParameterError("evaluation points must be non-zero")
    if len(set(values)) != len(values):
        raise ParameterError(f"evaluation points must be distinct, got {values}")
    q = field.q
    return Matrix(field, tuple(tuple(pow(a, i, q) for a in values) for i in range(rows)))


def solve_linear(A: Matrix, b: Sequence[FieldElement | int]) -> list[FieldElement]:
    """Return some ``x`` with ``A @ x == b``.

    Free variables of an underdetermined system are set to zero, so the
    answer is deterministic.  Raises :class:`NoSolution` when inconsistent.
    """
    bs = as_ints(b, A.field)
    x = solve_ints(A.data, bs, A.field.q)
    return [FieldElement(v, A.field) for v in x]


# -- randomness -------------------------------------------------------------------


class RandomSource(random.Random):
    """Seedable word source with deterministic, labelled child streams.

    ``spawn(label)`` derives an independent stream from the seed and the label,
    which is how each node gets its own coin tape during a protocol run.
    """

    def __init__(self, seed: int | None = None):
        if seed is None:
            seed = secrets.randbits(64)
        self.root_seed = int(seed)
        super().__init__(self.root_seed)

    def spawn(self, *labels) -> "RandomSource":
        material = repr((self.root_seed,) + tuple(labels)).encode()
        child = int.from_bytes(hashlib.sha256(material).digest()[:8], "big")
        return RandomSource(child)


def uniform_element(rng: random.Random, field: PrimeField) -> FieldElement:
    """Exactly uniform element via rejection sampling on ``getrandbits``."""
    bits = max(1, (field.q - 1).bit_length())
    while True:
        v = rng.getrandbits(bits)
        if v < field.q:
            return FieldElement(v, field)
