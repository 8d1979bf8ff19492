"""Repair bandwidth: the lower bound for rate-optimal schemes and per-protocol caps."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ..errors import NotApplicable, ParameterError
from ..protocol.transcript import BandwidthReport
from ..schemes import LinearScheme, RepairPlan

CSV_FIELDS = [
    "construction", "n", "k", "r", "z", "t", "W", "measured",
    "lower_num", "lower_den", "upper_num", "upper_den", "ratio",
]


def lower_bound_bandwidth(n: int, z: int, W: int, *, rate_optimal: bool = True) -> Fraction:
    """``(n-1) W / (2 (n-z-1))`` symbols; only claimed for rate-optimal schemes."""
    if not rate_optimal:
        raise NotApplicable("the lower bound is only established for rate-optimal schemes")
    if n - z - 1 <= 0:
        raise ParameterError(f"bound needs n - z - 1 > 0, got n={n}, z={z}")
    if W < 0:
        raise ParameterError("W must be non-negative")
    return Fraction((n - 1) * W, 2 * (n - z - 1))


def upper_bound_bandwidth(kind: str, scheme: LinearScheme, plan: RepairPlan, batches: int = 1) -> int:
    """Per-construction cap on total symbols sent, for ``batches`` parallel runs."""
    I, J = len(plan.helpers), len(plan.coords)
    if kind == "c2":
        cap = (I + 1) * (scheme.z + 1)
    elif kind == "c4":
        cap = (I + 1) * scheme.n
    elif kind == "c5":
        cap = (I * J + scheme.t) * scheme.n
    else:
        raise ParameterError(f"unknown protocol {kind!r}")
    return cap * batches


def batches_of(kind: str, scheme: LinearScheme, symbols_repaired: int) -> int:
    per_run = scheme.t if kind == "c2" else (scheme.n - scheme.z) * scheme.t
    return max(1, -(-symbols_repaired // per_run))


@dataclass(frozen=True)
class BoundsReport:
    construction: str
    n: int
    k: int
    r: int
    z: int
    t: int
    W: int
    measured: int
    lower: Fraction | None
    upper: Fraction
    rate_optimal: bool
    normalized: Fraction = Fraction(0)

    @property
    def ratio(self) -> Fraction | None:
        if self.lower is None or self.lower == 0:
            return None
        return Fraction(self.measured) / self.lower

    @property
    def within_upper(self) -> bool:
        return self.measured <= self.upper

    @property
    def above_lower(self) -> bool:
        return self.lower is None or self.lower <= self.measured

    def row(self) -> dict:
        lower = self.lower if self.lower is not None else None
        ratio = self.ratio
        return {
            "construction": self.construction,
            "n": self.n,
            "k": self.k,
            "r": self.r,
            "z": self.z,
            "t": self.t,
            "W": self.W,
            "measured": self.measured,
            "lower_num": "" if lower is None else lower.numerator,
            "lower_den": "" if lower is None else lower.denominator,
            "upper_num": self.upper.numerator,
            "upper_den": self.upper.denominator,
            "ratio": "" if ratio is None else str(ratio),
        }


def bounds_report(
    kind: str,
    scheme: LinearScheme,
    plan: RepairPlan | None,
    bandwidth: BandwidthReport | None,
) -> BoundsReport:
    """Compare a measured run with the lower bound and the construction's cap.

    W is the repair function's input size in base-field symbols.  A missing
    plan or bandwidth stands for a no-op repair.
    """
    p = scheme.params
    measured = bandwidth.total_symbols if bandwidth is not None else 0
    if plan is None:
        W, upper = 0, Fraction(0)
    else:
        W = plan.input_size
        batches = batches_of(kind, scheme, bandwidth.symbols_repaired) if bandwidth else 1
        upper = Fraction(upper_bound_bandwidth(kind, scheme, plan, batches))
    try:
        lower = lower_bound_bandwidth(p.n, p.z, W, rate_optimal=p.rate_optimal)
    except (NotApplicable, ParameterError):
        lower = None
    return BoundsReport(
        kind, p.n, p.k, p.r, p.z, p.t, W, measured, lower, upper, p.rate_optimal,
        bandwidth.normalized if bandwidth is not None else Fraction(0),
    )


def bounds_csv(reports: Iterable[BoundsReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.row())
    return buf.getvalue()
