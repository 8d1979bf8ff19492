"""Exact joint-count tables and the decisions made on them.

A :class:`DistributionTable` counts outcomes of a pair ``(x, y)`` of symbol
tuples over F_q, where ``x`` is usually the message and ``y`` an adversary
view.  Pairs are stored as big-endian base-q integer codes in a sorted int64
array, so tables with millions of cells stay cheap.  Every decision is made
with integer arithmetic; floating point only appears in :func:`entropy`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from ..errors import ParameterError


def encode_digits(lanes, q: int, size: int):
    """Big-endian base-q code of a list of lanes (ints or arrays)."""
    code = np.zeros(size, dtype=np.int64)
    for lane in lanes:
        code = code * q + lane
    return code


def decode_code(code: int, q: int, width: int) -> tuple[int, ...]:
    digits = []
    for _ in range(width):
        code, d = divmod(int(code), q)
        digits.append(d)
    return tuple(reversed(digits))


def _reduce(keys: np.ndarray, counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if keys.size == 0:
        return keys.astype(np.int64), counts.astype(np.int64)
    order = np.argsort(keys, kind="stable")
    keys, counts = keys[order], counts[order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    return keys[starts], np.add.reduceat(counts, starts)


def _group(values: np.ndarray, counts: np.ndarray):
    """Unique values, their summed counts, and each entry's group index."""
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    flags = np.r_[True, sorted_vals[1:] != sorted_vals[:-1]]
    starts = np.flatnonzero(flags)
    sums = np.add.reduceat(counts[order], starts)
    inverse = np.empty(values.size, dtype=np.int64)
    inverse[order] = np.cumsum(flags) - 1
    return sorted_vals[starts], sums, inverse


@dataclass(frozen=True, eq=False)
class DistributionTable:
    q: int
    x_width: int
    y_width: int
    keys: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if self.q ** (self.x_width + self.y_width) >= 2**62:
            raise ParameterError("table too wide for 64-bit cell codes")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def y_radix(self) -> int:
        return self.q ** self.y_width

    @classmethod
    def empty(cls, q: int, x_width: int, y_width: int) -> "DistributionTable":
        return cls(q, x_width, y_width, np.zeros(0, np.int64), np.zeros(0, np.int64))

    @classmethod
    def from_codes(cls, q, x_width, y_width, keys, counts) -> "DistributionTable":
        keys, counts = _reduce(np.asarray(keys, np.int64), np.asarray(counts, np.int64))
        return cls(q, x_width, y_width, keys, counts)

    @classmethod
    def from_counts(cls, q: int, cells: Mapping[tuple[tuple, tuple], int] | Iterable[tuple[tuple, tuple]]) -> "DistributionTable":
        """Build from ``{(x, y): count}`` or an iterable of ``(x, y)`` outcomes."""
        items = cells.items() if isinstance(cells, Mapping) else ((pair, 1) for pair in cells)
        items = list(items)
        if not items:
            raise ParameterError("empty outcome list")
        (x0, y0), _ = items[0]
        xw, yw = len(x0), len(y0)
        keys, counts = [], []
        for (x, y), c in items:
            if len(x) != xw or len(y) != yw:
                raise ParameterError("ragged outcomes")
            code = 0
            for d in tuple(x) + tuple(y):
                code = code * q + int(d) % q
            keys.append(code)
            counts.append(c)
        return cls.from_codes(q, xw, yw, keys, counts)

    def merge(self, other: "DistributionTable") -> "DistributionTable":
        """Cell-wise count addition (associative and commutative)."""
        if (self.q, self.x_width, self.y_width) != (other.q, other.x_width, other.y_width):
            raise ParameterError("tables over different outcome spaces")
        return DistributionTable.from_codes(
            self.q,
            self.x_width,
            self.y_width,
            np.concatenate([self.keys, other.keys]),
            np.concatenate([self.counts, other.counts]),
        )

    def split_codes(self) -> tuple[np.ndarray, np.ndarray]:
        return self.keys // self.y_radix, self.keys % self.y_radix

    def items(self):
        for key, c in zip(self.keys.tolist(), self.counts.tolist()):
            x, y = divmod(key, self.y_radix)
            yield (decode_code(x, self.q, self.x_width), decode_code(y, self.q, self.y_width)), c

    def as_dict(self) -> dict[tuple[tuple, tuple], int]:
        return dict(self.items())

    def x_counts(self) -> np.ndarray:
        x, _ = self.split_codes()
        return _group(x, self.counts)[1]

    def y_counts(self) -> np.ndarray:
        _, y = self.split_codes()
        return _group(y, self.counts)[1]


def check_independence(table: DistributionTable) -> bool:
    """Exact test of ``count(x, y) * total == count(x) * count(y)`` for every cell.

    Cells absent from the table have count zero, so independence also
    requires the support to be the full product of the marginal supports.
    """
    if table.keys.size == 0:
        return True
    x, y = table.split_codes()
    ux, cx, xi = _group(x, table.counts)
    uy, cy, yi = _group(y, table.counts)
    if table.keys.size != ux.size * uy.size:
        return False
    total = table.total
    if total < 2**31:
        lhs = table.counts * total
        rhs = cx[xi] * cy[yi]
        return bool(np.array_equal(lhs, rhs))
    lhs = table.counts.astype(object) * total
    rhs = cx[xi].astype(object) * cy[yi].astype(object)
    return bool(np.all(lhs == rhs))


def entropy(counts, base: int) -> float:
    """Shannon entropy of a count vector (or table y-marginal), in base-``base`` units."""
    if isinstance(counts, DistributionTable):
        counts = counts.y_counts()
    c = np.asarray(list(counts.values()) if isinstance(counts, Mapping) else counts, dtype=np.float64)
    c = c[c > 0]
    if c.size == 0:
        return 0.0
    total = c.sum()
    h = math.log(total) - float((c * np.log(c)).sum()) / total
    return max(0.0, h / math.log(base))


def is_function_of(table: DistributionTable) -> bool:
    """Exact ``H(x | y) == 0``: every observed y co-occurs with a single x."""
    _, y = table.split_codes()
    return np.unique(y).size == table.keys.size


def is_uniform(counts, support_size: int) -> bool:
    """All ``support_size`` outcomes occur, each equally often."""
    c = np.asarray(counts, dtype=np.int64)
    return c.size == support_size and bool(np.all(c == c[0]))
