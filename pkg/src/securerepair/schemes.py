"""Linear secret sharing schemes and their linear repair functions.

A scheme is described by a generator matrix ``G`` of shape
``(k*t + rho) x (n*t)``: the row vector ``(message || keys)`` times ``G`` gives
all share coordinates, node ``i`` (1-based) owning columns
``(i-1)*t .. i*t - 1``.  Shamir and ramp schemes are the Vandermonde special
cases; anything else can be loaded as a raw generator.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Any, Mapping, Sequence

from .errors import (
    DecodeError,
    FieldMismatchError,
    InconsistentShares,
    NoRepairFunction,
    NoSolution,
    ParameterError,
    TooFewShares,
)
from .field import (
    FieldElement,
    Matrix,
    PrimeField,
    as_ints,
    common_field,
    rank_of,
    solve_ints,
    uniform_element,
    vandermonde,
)

Share = list[FieldElement]


@dataclass(frozen=True)
class SchemeParams:
    n: int
    k: int
    r: int
    z: int
    t: int
    q: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or self.t < 1:
            raise ParameterError(f"n, k, t must be positive: {self}")
        if not 0 <= self.z < self.n - self.r:
            raise ParameterError(f"need 0 <= z < n - r: {self}")
        if self.r < 0:
            raise ParameterError(f"r must be non-negative: {self}")
        if self.q <= self.n:
            raise ParameterError(f"field order q={self.q} must exceed n={self.n}")

    @property
    def rate_optimal(self) -> bool:
        return self.k == self.n - self.r - self.z


@dataclass(frozen=True)
class LinearScheme:
    params: SchemeParams
    generator: Matrix
    rho: int
    alphas: tuple[FieldElement, ...] | None = None
    construction: str = "generic"

    def __post_init__(self):
        p = self.params
        if self.generator.field.q != p.q:
            raise FieldMismatchError("generator field differs from params.q")
        expected = (p.k * p.t + self.rho, p.n * p.t)
        if self.generator.shape != expected:
            raise ParameterError(f"generator shape {self.generator.shape}, expected {expected}")

    @property
    def field(self) -> PrimeField:
        return self.generator.field

    n = property(lambda self: self.params.n)
    k = property(lambda self: self.params.k)
    r = property(lambda self: self.params.r)
    z = property(lambda self: self.params.z)
    t = property(lambda self: self.params.t)
    q = property(lambda self: self.params.q)

    @property
    def message_len(self) -> int:
        return self.params.k * self.params.t

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def columns(self, node: int) -> list[int]:
        if node not in self.nodes:
            raise ParameterError(f"unknown node {node}")
        t = self.t
        return list(range((node - 1) * t, node * t))

    def columns_of(self, nodes: Sequence[int], coords: Sequence[int] | None = None) -> list[int]:
        """Generator columns for ``nodes`` (node-major), restricted to 1-based ``coords``."""
        coords = range(1, self.t + 1) if coords is None else coords
        return [(i - 1) * self.t + (j - 1) for i in nodes for j in coords]

    def encode_lanes(self, x):
        """Generic encoder: ``x`` holds ints or numpy lanes; returns one value per column."""
        q = self.q
        out = []
        for col in zip(*self.generator.data):
            acc = 0
            for g, xi in zip(col, x):
                if g:
                    acc = acc + g * xi
            out.append(acc % q)
        return out


@dataclass(frozen=True)
class ShareStack:
    """Shares of ``len(shares)`` independent instances held by one node."""

    node: int
    shares: tuple[tuple[FieldElement, ...], ...]

    @property
    def instances(self) -> int:
        return len(self.shares)


@dataclass(frozen=True)
class RepairPlan:
    """Failed node ``e``, helpers ``I``, coordinates ``J`` (1-based) and f.

    ``coeffs`` is a ``t x (|I|*|J|)`` matrix; input coordinates are ordered
    helper-major, i.e. ``(i_1, j_1), (i_1, j_2), ..., (i_2, j_1), ...``.
    """

    e: int
    helpers: tuple[int, ...]
    coords: tuple[int, ...]
    coeffs: Matrix
    verified: bool = dc_field(default=False, compare=False)

    @property
    def input_size(self) -> int:
        return len(self.helpers) * len(self.coords)

    def apply(self, inputs: Sequence[FieldElement | int]) -> list[FieldElement]:
        """Evaluate f on the helper coordinates (helper-major order)."""
        return self.coeffs.transpose().vecmul(inputs)

    def check(self, scheme: LinearScheme) -> bool:
        """True when f reproduces c_e on every codeword of ``scheme``."""
        try:
            _check_plan_shape(scheme, self.e, self.helpers, self.coords)
        except ParameterError:
            return False
        if self.coeffs.shape != (scheme.t, self.input_size):
            return False
        q = scheme.q
        g = scheme.generator.data
        in_cols = scheme.columns_of(self.helpers, self.coords)
        for l, col in enumerate(scheme.columns(self.e)):
            f = self.coeffs.data[l]
            for row in g:
                if sum(a * row[c] for a, c in zip(f, in_cols)) % q != row[col]:
                    return False
        return True

    def to_dict(self) -> dict:
        return {
            "e": self.e,
            "I": list(self.helpers),
            "J": list(self.coords),
            "coeffs": self.coeffs.tolist(),
        }


def _check_plan_shape(scheme, e, helpers, coords):
    if e not in scheme.nodes:
        raise ParameterError(f"unknown failed node {e}")
    if e in helpers:
        raise ParameterError(f"failed node {e} cannot be its own helper")
    if len(set(helpers)) != len(helpers) or any(i not in scheme.nodes for i in helpers):
        raise ParameterError(f"bad helper set {helpers}")
    if not coords or len(set(coords)) != len(coords) or any(not 1 <= j <= scheme.t for j in coords):
        raise ParameterError(f"bad coordinate set {coords}")


# -- constructions ----------------------------------------------------------------


def _points(n: int, alphas: Sequence[FieldElement]) -> PrimeField:
    if len(alphas) != n:
        raise ParameterError(f"need {n} evaluation points, got {len(alphas)}")
    field = common_field(alphas)
    if field is None:
        raise ParameterError("no evaluation points given")
    if field.q <= n:
        raise ParameterError(f"field order q={field.q} must exceed n={n}")
    return field


def shamir_scheme(n: int, z: int, alphas: Sequence[FieldElement]) -> LinearScheme:
    """Shamir's threshold scheme: ``c_j = m + sum_i u_i * alpha_j**i``."""
    if not 0 <= z < n:
        raise ParameterError(f"need 0 <= z < n, got n={n}, z={z}")
    field = _points(n, alphas)
    gen = vandermonde(alphas, z + 1)
    params = SchemeParams(n=n, k=1, r=n - z - 1, z=z, t=1, q=field.q)
    return LinearScheme(params, gen, rho=z, alphas=tuple(alphas), construction="shamir")


def ramp_scheme(n: int, r: int, z: int, alphas: Sequence[FieldElement]) -> LinearScheme:
    """Ramp Shamir: k = n - r - z message symbols as the low coefficients."""
    if n <= r + z or r < 0 or z < 0:
        raise ParameterError(f"ramp scheme needs n > r + z, got n={n}, r={r}, z={z}")
    field = _points(n, alphas)
    k = n - r - z
    gen = vandermonde(alphas, k + z)
    params = SchemeParams(n=n, k=k, r=r, z=z, t=1, q=field.q)
    return LinearScheme(params, gen, rho=z, alphas=tuple(alphas), construction="ramp")


def generic_scheme(
    field: PrimeField,
    generator: Sequence[Sequence[int]],
    *,
    n: int,
    k: int,
    r: int,
    z: int,
    t: int = 1,
    rho: int,
) -> LinearScheme:
    params = SchemeParams(n=n, k=k, r=r, z=z, t=t, q=field.q)
    return LinearScheme(params, Matrix.from_ints(field, generator), rho=rho)


# -- encoding / decoding ----------------------------------------------------------


def _split(scheme: LinearScheme, flat: list[FieldElement]) -> list[Share]:
    t = scheme.t
    return [flat[i * t:(i + 1) * t] for i in range(scheme.n)]


def encode(
    scheme: LinearScheme,
    message: Sequence[FieldElement | int],
    keys: Sequence[FieldElement | int],
) -> list[Share]:
    """Shares for ``message`` under ``keys``; one length-t vector per node."""
    if len(message) != scheme.message_len:
        raise ParameterError(f"message has {len(message)} symbols, expected {scheme.message_len}")
    if len(keys) != scheme.rho:
        raise ParameterError(f"got {len(keys)} keys, expected {scheme.rho}")
    x = as_ints(message, scheme.field) + as_ints(keys, scheme.field)
    return _split(scheme, scheme.generator.vecmul(x))


def encode_random(
    scheme: LinearScheme,
    message: Sequence[FieldElement | int],
    rng: random.Random,
) -> tuple[list[Share], list[FieldElement]]:
    keys = [uniform_element(rng, scheme.field) for _ in range(scheme.rho)]
    return encode(scheme, message, keys), keys


def decoding_matrix(scheme: LinearScheme, nodes: Sequence[int]) -> list[list[int]]:
    """Int matrix ``D`` with ``message = shares(nodes) @ D``.

    Raises :class:`DecodeError` when the message is not a linear function of
    those shares.
    """
    cols = scheme.columns_of(nodes)
    g_s = [[row[c] for c in cols] for row in scheme.generator.data]
    K = len(g_s)
    q = scheme.q
    per_symbol = []
    for i in range(scheme.message_len):
        target = [1 if r == i else 0 for r in range(K)]
        try:
            per_symbol.append(solve_ints(g_s, target, q))
        except NoSolution:
            raise DecodeError(f"message symbol {i + 1} is not determined by nodes {list(nodes)}")
    # transpose: rows indexed by share coordinate
    return [list(col) for col in zip(*per_symbol)]


def is_codeword(scheme: LinearScheme, nodes: Sequence[int], values: Sequence[int]) -> bool:
    cols = scheme.columns_of(nodes)
    system = [[row[c] for row in scheme.generator.data] for c in cols]
    try:
        solve_ints(system, values, scheme.q)
    except NoSolution:
        return False
    return True


def decode(scheme: LinearScheme, available: Mapping[int, Sequence[FieldElement | int]]) -> list[FieldElement]:
    """Recover the message from at least ``n - r`` shares."""
    nodes = sorted(available)
    if len(nodes) < scheme.n - scheme.r:
        raise TooFewShares(f"{len(nodes)} shares given, {scheme.n - scheme.r} needed")
    values = []
    for i in nodes:
        share = available[i]
        if len(share) != scheme.t:
            raise ParameterError(f"share of node {i} has {len(share)} coordinates, expected {scheme.t}")
        values.extend(as_ints(share, scheme.field))
    if not is_codeword(scheme, nodes, values):
        raise InconsistentShares(f"shares of nodes {nodes} are not a codeword")
    D = decoding_matrix(scheme, nodes)
    q = scheme.q
    return [
        scheme.field(sum(v * D[c][i] for c, v in enumerate(values)) % q)
        for i in range(scheme.message_len)
    ]


def linear_combine_shares(
    scheme: LinearScheme,
    codeword_a: Sequence[Sequence[FieldElement | int]],
    codeword_b: Sequence[Sequence[FieldElement | int]],
    f: Sequence[FieldElement | int],
) -> list[Share]:
    """Apply ``f(a, b) = f[0]*a + f[1]*b`` coordinate-wise to two codewords."""
    fa, fb = as_ints(f, scheme.field)
    flat = []
    for cw in (codeword_a, codeword_b):
        if len(cw) != scheme.n or any(len(s) != scheme.t for s in cw):
            raise ParameterError("codeword shape does not match the scheme")
        vals = [v for s in cw for v in as_ints(s, scheme.field)]
        if not is_codeword(scheme, list(scheme.nodes), vals):
            raise ParameterError("argument is not a codeword of this scheme")
        flat.append(vals)
    q = scheme.q
    out = [scheme.field((fa * a + fb * b) % q) for a, b in zip(*flat)]
    return _split(scheme, out)


# -- repair functions -------------------------------------------------------------


def derive_repair_function(
    scheme: LinearScheme,
    e: int,
    helpers: Sequence[int],
    coords: Sequence[int] | None = None,
) -> RepairPlan:
    """Find linear f with ``f(c_{i,j} : i in I, j in J) = c_e`` on every codeword."""
    coords = tuple(range(1, scheme.t + 1)) if coords is None else tuple(coords)
    helpers = tuple(helpers)
    _check_plan_shape(scheme, e, helpers, coords)
    in_cols = scheme.columns_of(helpers, coords)
    g = scheme.generator.data
    system = [[row[c] for c in in_cols] for row in g]
    coeffs = []
    for col in scheme.columns(e):
        try:
            coeffs.append(solve_ints(system, [row[col] for row in g], scheme.q))
        except NoSolution:
            raise NoRepairFunction(
                f"share of node {e} is not a linear function of nodes {list(helpers)} "
                f"(coordinates {list(coords)})"
            )
    plan = RepairPlan(e, helpers, coords, Matrix.from_ints(scheme.field, coeffs), verified=True)
    assert plan.check(scheme)
    return plan


def declared_plan(scheme: LinearScheme, e: int, helpers, coords, coeffs) -> RepairPlan:
    """A plan taken as given (e.g. from a fixture file); call ``check`` to trust it."""
    coords = tuple(coords) if coords else tuple(range(1, scheme.t + 1))
    plan = RepairPlan(e, tuple(helpers), coords, Matrix.from_ints(scheme.field, coeffs))
    return RepairPlan(plan.e, plan.helpers, plan.coords, plan.coeffs, verified=plan.check(scheme))


def find_repair_plan(scheme: LinearScheme, e: int, live: Sequence[int]) -> RepairPlan:
    """Smallest prefix of ``live`` (excluding ``e``) that admits a repair function."""
    candidates = [i for i in live if i != e]
    for size in range(1, len(candidates) + 1):
        try:
            return derive_repair_function(scheme, e, candidates[:size])
        except NoRepairFunction:
            continue
    raise NoRepairFunction(f"node {e} cannot be repaired from nodes {candidates}")


# -- validation -------------------------------------------------------------------


def secure_against(scheme: LinearScheme, nodes: Sequence[int]) -> bool:
    """Structural z-security test: the key rows cover the message image on ``nodes``."""
    cols = scheme.columns_of(nodes)
    g = scheme.generator.data
    sub = [[row[c] for c in cols] for row in g]
    m_rows, u_rows = sub[: scheme.message_len], sub[scheme.message_len:]
    q = scheme.q
    return rank_of(u_rows, q) == rank_of(u_rows + m_rows, q) if cols else True


def decodable_from(scheme: LinearScheme, nodes: Sequence[int]) -> bool:
    try:
        decoding_matrix(scheme, nodes)
    except DecodeError:
        return False
    return True


@dataclass
class ValidityReport:
    decodable: dict[tuple[int, ...], bool]
    secure: dict[tuple[int, ...], bool]
    exhaustive_secure: dict[tuple[int, ...], bool] | None = None

    @property
    def failures(self) -> list[str]:
        out = [f"not decodable from {s}" for s, ok in self.decodable.items() if not ok]
        out += [f"leaks to {s}" for s, ok in self.secure.items() if not ok]
        if self.exhaustive_secure:
            out += [f"exhaustive oracle: leaks to {s}" for s, ok in self.exhaustive_secure.items() if not ok]
        return out

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_scheme(scheme: LinearScheme, exhaustive: bool | None = None) -> ValidityReport:
    """Rank checks for every (n-r)-subset and z-subset.

    With ``exhaustive`` (default: when q <= 13 and the outcome space is small)
    security is cross-checked by full enumeration of messages and keys.
    """
    nodes = list(scheme.nodes)
    dec = {s: decodable_from(scheme, s) for s in itertools.combinations(nodes, scheme.n - scheme.r)}
    sec = {s: secure_against(scheme, s) for s in itertools.combinations(nodes, scheme.z)}
    report = ValidityReport(dec, sec)
    outcomes = scheme.q ** (scheme.message_len + scheme.rho)
    if exhaustive is None:
        exhaustive = scheme.q <= 13 and outcomes <= 10**6
    if exhaustive:
        from .analysis.enumeration import enumerate_scheme
        from .analysis.tables import check_independence

        report.exhaustive_secure = {
            s: check_independence(enumerate_scheme(scheme, s)) for s in sec
        }
    return report


# -- JSON -------------------------------------------------------------------------


@dataclass
class SchemeFile:
    """A scheme plus the optional extras a fixture file can carry."""

    scheme: LinearScheme
    plans: list[RepairPlan]
    c2_subscheme: LinearScheme | None = None


def scheme_from_dict(obj: Mapping[str, Any]) -> LinearScheme:
    try:
        kind = obj.get("construction", "generic")
        field = PrimeField(int(obj["q"]))
        n = int(obj["n"])
        if kind in ("shamir", "ramp"):
            if kind == "shamir":
                scheme = shamir_scheme(n, int(obj["z"]), field.vector(obj["alphas"]))
            else:
                scheme = ramp_scheme(n, int(obj["r"]), int(obj["z"]), field.vector(obj["alphas"]))
            for key in ("k", "r", "t"):
                if key in obj and int(obj[key]) != getattr(scheme.params, key):
                    raise ParameterError(
                        f"{kind} scheme has {key}={getattr(scheme.params, key)}, file says {obj[key]}"
                    )
            return scheme
        if kind == "generic":
            return generic_scheme(
                field,
                obj["generator"],
                n=n,
                k=int(obj["k"]),
                r=int(obj["r"]),
                z=int(obj["z"]),
                t=int(obj.get("t", 1)),
                rho=int(obj["rho"]),
            )
    except KeyError as exc:
        raise ParameterError(f"scheme definition lacks field {exc}") from None
    raise ParameterError(f"unknown construction {kind!r}")


def scheme_to_dict(scheme: LinearScheme) -> dict:
    p = scheme.params
    out = {"construction": scheme.construction, "q": p.q, "n": p.n, "k": p.k, "r": p.r, "z": p.z, "t": p.t}
    if scheme.alphas is not None:
        out["alphas"] = [a.value for a in scheme.alphas]
    else:
        out["generator"] = scheme.generator.tolist()
        out["rho"] = scheme.rho
    return out


def load_scheme_file(obj: Mapping[str, Any]) -> SchemeFile:
    scheme = scheme_from_dict(obj)
    plans = []
    for p in obj.get("repair_plans", []):
        try:
            plans.append(declared_plan(scheme, int(p["e"]), p["I"], p.get("J"), p["coeffs"]))
        except KeyError as exc:
            raise ParameterError(f"repair plan lacks field {exc}") from None
    sub = obj.get("c2_subscheme")
    c2_sub = None
    if sub is not None:
        sub = dict(sub)
        sub.setdefault("q", scheme.q)
        sub.setdefault("n", scheme.z + 1)
        sub.setdefault("k", 1)
        sub.setdefault("r", 0)
        sub.setdefault("z", scheme.z)
        sub.setdefault("rho", scheme.z)
        c2_sub = scheme_from_dict(sub)
    return SchemeFile(scheme, plans, c2_sub)
