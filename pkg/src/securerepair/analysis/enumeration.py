"""Exhaustive enumeration oracle for the secure repair conditions.

Every uniform symbol of a protocol run (message symbols, scheme keys and
protocol coins) is enumerated over F_q, the real protocol engine is executed
on all assignments at once (numpy lanes), and the exact joint counts of
(message, observation) are tabulated.

Message decomposition
---------------------
The full outcome space of a multi-instance run grows quickly (5**12 for the
ramp fixtures), so the message may be enumerated one block at a time: the
symbols of one block range over F_q while the other message symbols are
pinned to zero, and all keys and coins are always enumerated in full.  Each
observation is a linear function ``M m + R s`` of the message ``m`` and the
randomness ``s``, and m is independent of it exactly when the column space
of M lies inside that of R.  That inclusion holds for M exactly when it holds
for each block of columns, so the per-block verdicts combine to the verdict
on the full message.  ``decomposition="auto"`` picks the coarsest split
("full", then per "instance", then per "symbol") that fits the budget.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import BudgetExceeded, ParameterError
from ..protocol.constructions import build_setup
from ..protocol.engine import RawRun, RepairSetup, collect_view, execute
from ..schemes import LinearScheme, RepairPlan
from .tables import DistributionTable, check_independence, encode_digits, is_function_of

DEFAULT_BUDGET = 10**8
CHUNK_LIMIT = 1 << 19
DECOMPOSITIONS = ("full", "instance", "symbol")


@dataclass
class Outcome:
    """One chunk of enumerated outcomes, as lanes."""

    setup: RepairSetup | None
    message: list
    keys: list
    coins: dict[int, list]
    holdings: dict[int, list[list]]
    run: RawRun | None
    size: int

    @property
    def truth(self) -> list[list]:
        return self.holdings[self.setup.e]

    def round2_values(self, nodes: Sequence[int]) -> list:
        """The distilled values c'_j computed by ``nodes`` (sent to the failed node)."""
        by_node = {src: payload for src, _, rnd, payload in self.run.messages if rnd == 2}
        return [v for j in sorted(nodes) for v in by_node[j]]


Observer = Callable[[Outcome], tuple[list, list]]


def _chunks(q: int, n_symbols: int, free: Sequence[int]):
    L = 0
    while L < len(free) and q ** (L + 1) <= CHUNK_LIMIT:
        L += 1
    outer, inner = list(free[: len(free) - L]), list(free[len(free) - L:])
    size = q**L
    base = np.arange(size, dtype=np.int64)
    grids = [(base // q ** (L - 1 - d)) % q for d in range(L)]
    for prefix in itertools.product(range(q), repeat=len(outer)):
        lanes: list = [0] * n_symbols
        for idx, v in zip(outer, prefix):
            lanes[idx] = v
        for idx, g in zip(inner, grids):
            lanes[idx] = g
        yield lanes, size


class _Accumulator:
    def __init__(self, q: int):
        self.q = q
        self.widths: tuple[int, int] | None = None
        self.keys: list[np.ndarray] = []
        self.counts: list[np.ndarray] = []

    def add(self, x: list, y: list, size: int):
        if self.widths is None:
            self.widths = (len(x), len(y))
            if self.q ** (len(x) + len(y)) >= 2**62:
                raise ParameterError(
                    f"observation of {len(x) + len(y)} symbols is too wide to tabulate at q={self.q}"
                )
        code = encode_digits(x, self.q, size) * self.q ** len(y) + encode_digits(y, self.q, size)
        keys, counts = np.unique(code, return_counts=True)
        self.keys.append(keys)
        self.counts.append(counts.astype(np.int64))

    def table(self) -> DistributionTable:
        xw, yw = self.widths
        return DistributionTable.from_codes(self.q, xw, yw, np.concatenate(self.keys), np.concatenate(self.counts))


@dataclass
class Space:
    """Layout of the enumerated symbols: messages, then keys, then coins."""

    q: int
    instances: int
    message_len: int
    rho: int
    helpers: tuple[int, ...]
    coins_per_helper: int

    @property
    def n_message(self) -> int:
        return self.instances * self.message_len

    @property
    def n_random(self) -> int:
        return self.instances * self.rho + len(self.helpers) * self.coins_per_helper

    @property
    def n_symbols(self) -> int:
        return self.n_message + self.n_random

    def blocks(self, decomposition: str) -> list[list[int]]:
        if decomposition == "full":
            return [list(range(self.n_message))]
        if decomposition == "instance":
            ml = self.message_len
            return [list(range(b * ml, (b + 1) * ml)) for b in range(self.instances)]
        if decomposition == "symbol":
            return [[i] for i in range(self.n_message)]
        raise ParameterError(f"unknown decomposition {decomposition!r}")

    def cost(self, decomposition: str) -> int:
        return sum(self.q ** (len(b) + self.n_random) for b in self.blocks(decomposition))

    def choose(self, decomposition: str, budget: int) -> str:
        names = DECOMPOSITIONS if decomposition == "auto" else (decomposition,)
        for name in names:
            if self.cost(name) <= budget:
                return name
        raise BudgetExceeded(min(self.cost(n) for n in names), budget)

    def free(self, block: Sequence[int]) -> list[int]:
        return list(block) + list(range(self.n_message, self.n_symbols))


def _space(scheme: LinearScheme, setup: RepairSetup | None, instances: int) -> Space:
    if setup is None:
        return Space(scheme.q, instances, scheme.message_len, scheme.rho, (), 0)
    return Space(scheme.q, instances, scheme.message_len, scheme.rho, setup.helpers, setup.coins_per_helper)


def _walk(scheme: LinearScheme, setup: RepairSetup | None, space: Space, block, observers: dict[str, Observer]):
    """Run every outcome of one message block; returns tables and mismatch count."""
    acc = {name: _Accumulator(scheme.q) for name in observers}
    mismatches = 0
    M, ml, rho, t = space.n_message, space.message_len, space.rho, scheme.t
    for lanes, size in _chunks(scheme.q, space.n_symbols, space.free(block)):
        message = lanes[:M]
        keys = lanes[M:M + space.instances * rho]
        coin_lanes = lanes[M + space.instances * rho:]
        holdings: dict[int, list[list]] = {i: [] for i in scheme.nodes}
        for inst in range(space.instances):
            x = message[inst * ml:(inst + 1) * ml] + keys[inst * rho:(inst + 1) * rho]
            cols = scheme.encode_lanes(x)
            for i in scheme.nodes:
                holdings[i].append(cols[(i - 1) * t:i * t])
        coins = {}
        run = None
        if setup is not None:
            c = space.coins_per_helper
            coins = {i: coin_lanes[k * c:(k + 1) * c] for k, i in enumerate(setup.helpers)}
            alive = {i: h for i, h in holdings.items() if i != setup.e}
            run = execute(setup, alive, coins)
            for got, want in zip(run.repaired, holdings[setup.e]):
                for a, b in zip(got, want):
                    mismatches += int(np.count_nonzero(np.broadcast_to(np.asarray(a) != np.asarray(b), (size,))))
        outcome = Outcome(setup, message, keys, coins, holdings, run, size)
        for name, obs in observers.items():
            x, y = obs(outcome)
            acc[name].add(x, y, size)
    return {name: a.table() for name, a in acc.items()}, mismatches


def enumerate_scheme(
    scheme: LinearScheme,
    nodes: Sequence[int],
    budget: int = DEFAULT_BUDGET,
) -> DistributionTable:
    """Joint counts of (message, shares of ``nodes``) over all messages and keys."""
    unknown = [i for i in nodes if i not in scheme.nodes]
    if unknown:
        raise ParameterError(f"unknown nodes {unknown}")
    space = _space(scheme, None, 1)
    space.choose("full", budget)

    def observe(o: Outcome):
        return o.message, [v for i in sorted(nodes) for v in o.holdings[i][0]]

    tables, _ = _walk(scheme, None, space, space.blocks("full")[0], {"shares": observe})
    return tables["shares"]


def view_observer(nodes: Sequence[int]) -> Observer:
    nodes = tuple(sorted(nodes))

    def observe(o: Outcome):
        return o.message, collect_view(o.setup, o.holdings, o.coins, o.run, nodes)

    return observe


def _prepare(scheme, kind, plan, instances, receivers, subscheme):
    setup = build_setup(scheme, kind, plan, instances=instances, receivers=receivers, subscheme=subscheme)
    return setup, _space(scheme, setup, setup.instances)


def enumerate_protocol(
    scheme: LinearScheme,
    kind: str,
    plan: RepairPlan,
    adversary: Sequence[int],
    *,
    observe: Observer | None = None,
    instances: int | None = None,
    receivers: Sequence[int] | None = None,
    subscheme: LinearScheme | None = None,
    block: Sequence[int] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> DistributionTable:
    """Exact joint distribution of (message, view of ``adversary``).

    ``block`` lists the message symbols that are enumerated (the rest stay
    zero); ``None`` enumerates the whole message.  ``observe`` replaces the
    adversary view by any other observation of the run.
    """
    setup, space = _prepare(scheme, kind, plan, instances, receivers, subscheme)
    block = list(range(space.n_message)) if block is None else list(block)
    if any(not 0 <= b < space.n_message for b in block):
        raise ParameterError(f"block {block} outside the {space.n_message} message symbols")
    required = scheme.q ** (len(block) + space.n_random)
    if required > budget:
        raise BudgetExceeded(required, budget)
    observe = observe or view_observer(adversary)
    tables, _ = _walk(scheme, setup, space, block, {"view": observe})
    return tables["view"]


@dataclass
class CellResult:
    adversary: tuple[int, ...]
    independent: bool


@dataclass
class VerificationResult:
    kind: str
    e: int
    repairable: bool
    outcomes: int
    decomposition: str
    cells: list[CellResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.repairable and all(c.independent for c in self.cells)


def verify_protocol(
    scheme: LinearScheme,
    kind: str,
    plan: RepairPlan,
    adversaries: Sequence[Sequence[int]] | None = None,
    *,
    instances: int | None = None,
    receivers: Sequence[int] | None = None,
    subscheme: LinearScheme | None = None,
    budget: int = DEFAULT_BUDGET,
    decomposition: str = "auto",
) -> VerificationResult:
    """Repairability and security for one failed node and many colluding sets.

    One pass over the outcome space serves every adversary set.  Defaults to
    all z-subsets of the nodes.
    """
    setup, space = _prepare(scheme, kind, plan, instances, receivers, subscheme)
    if adversaries is None:
        adversaries = list(itertools.combinations(scheme.nodes, scheme.z))
    adversaries = [tuple(sorted(a)) for a in adversaries]
    chosen = space.choose(decomposition, budget)

    observers: dict[str, Observer] = {f"A{a}": view_observer(a) for a in adversaries}
    e = setup.e

    def truth_given_received(o: Outcome):
        return [v for s in o.truth for v in s], o.run.received.get(e, [])

    def repaired_given_received(o: Outcome):
        return [v for s in o.run.repaired for v in s], o.run.received.get(e, [])

    observers["truth"] = truth_given_received
    observers["repaired"] = repaired_given_received

    independent = {a: True for a in adversaries}
    repairable = True
    outcomes = 0
    for block in space.blocks(chosen):
        tables, mismatches = _walk(scheme, setup, space, block, observers)
        outcomes += tables["truth"].total
        repairable &= mismatches == 0
        repairable &= is_function_of(tables["truth"]) and is_function_of(tables["repaired"])
        for a in adversaries:
            independent[a] &= check_independence(tables[f"A{a}"])
    return VerificationResult(
        kind, e, repairable, outcomes, chosen, [CellResult(a, independent[a]) for a in adversaries]
    )


def check_repairability(
    scheme: LinearScheme,
    kind: str,
    plan: RepairPlan,
    *,
    instances: int | None = None,
    receivers: Sequence[int] | None = None,
    subscheme: LinearScheme | None = None,
    budget: int = DEFAULT_BUDGET,
    decomposition: str = "auto",
) -> bool:
    """Over every outcome the failed node recovers exactly its share, from d_e alone."""
    result = verify_protocol(
        scheme,
        kind,
        plan,
        adversaries=[],
        instances=instances,
        receivers=receivers,
        subscheme=subscheme,
        budget=budget,
        decomposition=decomposition,
    )
    return result.repairable
