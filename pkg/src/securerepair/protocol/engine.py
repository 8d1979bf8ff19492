"""Two-round secure repair engine shared by all three constructions.

Every construction has the same skeleton.  Each helper secret-shares the
values it contributes using a sub-scheme and sends one piece to each
receiver.  Each receiver applies the repair function to the pieces it holds
and forwards the result to the failed node, which decodes the sub-scheme.
The constructions differ only in the sub-scheme, the receiver set, the batch
of instances shared at once and the helper coordinates read.

Symbols here are "lanes": plain ints for a single run, or equally shaped
int64 numpy arrays when the enumeration oracle evaluates many outcomes at
once.  Only ``+``, ``*`` and ``% q`` are used, so both behave identically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

Lane = Any  # int or numpy.ndarray


@dataclass(frozen=True)
class RepairSetup:
    kind: str
    q: int
    t: int
    e: int
    helpers: tuple[int, ...]
    coords: tuple[int, ...]  # 0-based coordinates J read from each helper
    receivers: tuple[int, ...]
    f: tuple[tuple[int, ...], ...]  # t x (|I|*|J|), helper-major inputs
    sub_gen: tuple[tuple[int, ...], ...]  # (batch + sub_keys) x |receivers|
    sub_decode: tuple[tuple[int, ...], ...]  # |receivers| x batch
    batch: int
    sub_keys: int
    instances: int

    @property
    def n_batches(self) -> int:
        return -(-self.instances // self.batch)

    @property
    def coins_per_helper(self) -> int:
        return self.n_batches * len(self.coords) * self.sub_keys

    @property
    def round1_len(self) -> int:
        return self.n_batches * len(self.coords)

    @property
    def round2_len(self) -> int:
        return self.n_batches * self.t


@dataclass
class RawRun:
    messages: list[tuple[int, int, int, list[Lane]]]
    received: dict[int, list[Lane]]
    repaired: list[list[Lane]]


def _dot(coeffs: Sequence[int], values: Sequence[Lane], q: int) -> Lane:
    acc = 0
    for c, v in zip(coeffs, values):
        if c:
            acc = acc + c * v
    return acc % q


def _distil(setup: RepairSetup, pieces: dict[int, list[Lane]]) -> list[Lane]:
    """Round-2 values of one receiver from the pieces it holds (batch-major)."""
    nj = len(setup.coords)
    out = []
    for b in range(setup.n_batches):
        inputs = [pieces[i][b * nj + jj] for i in setup.helpers for jj in range(nj)]
        out.extend(_dot(row, inputs, setup.q) for row in setup.f)
    return out


def decode_at_failed(setup: RepairSetup, received: Sequence[Lane]) -> list[list[Lane]]:
    """Reconstruct the lost share(s) from the failed node's incoming data only."""
    pos = 0
    values = {}
    if setup.e in setup.receivers:
        pieces = {}
        for i in setup.helpers:
            pieces[i] = list(received[pos:pos + setup.round1_len])
            pos += setup.round1_len
        values[setup.e] = _distil(setup, pieces)
    for r in setup.receivers:
        if r != setup.e:
            values[r] = list(received[pos:pos + setup.round2_len])
            pos += setup.round2_len
    if pos != len(received):
        raise ValueError(f"failed node received {len(received)} symbols, expected {pos}")
    repaired = [[0] * setup.t for _ in range(setup.instances)]
    cols = list(zip(*setup.sub_decode))
    for b in range(setup.n_batches):
        for l in range(setup.t):
            shares = [values[r][b * setup.t + l] for r in setup.receivers]
            for s, col in enumerate(cols):
                inst = b * setup.batch + s
                if inst < setup.instances:
                    repaired[inst][l] = _dot(col, shares, setup.q)
    return repaired


def execute(setup: RepairSetup, holdings: dict[int, list[list[Lane]]], coins: dict[int, list[Lane]]) -> RawRun:
    """Run both rounds.

    ``holdings[i][inst][coord]`` is read only for helpers; ``coins[i]`` must
    hold ``setup.coins_per_helper`` symbols for every helper.
    """
    q = setup.q
    R = setup.receivers
    messages = []
    inbox: dict[int, dict[int, list[Lane]]] = {r: {} for r in R}

    for i in setup.helpers:
        tape = iter(coins[i])
        outgoing: list[list[Lane]] = [[] for _ in R]
        for b in range(setup.n_batches):
            for j in setup.coords:
                x = []
                for s in range(setup.batch):
                    inst = b * setup.batch + s
                    x.append(holdings[i][inst][j] if inst < setup.instances else 0)
                x.extend(next(tape) for _ in range(setup.sub_keys))
                for k in range(len(R)):
                    outgoing[k].append(_dot([row[k] for row in setup.sub_gen], x, q))
        for k, r in enumerate(R):
            inbox[r][i] = outgoing[k]
            if r != i:
                messages.append((i, r, 1, outgoing[k]))

    for r in R:
        out = _distil(setup, inbox[r])
        if r != setup.e:
            messages.append((r, setup.e, 2, out))

    received: dict[int, list[Lane]] = {}
    for _, dst, _, payload in messages:
        received.setdefault(dst, []).extend(payload)
    repaired = decode_at_failed(setup, received.get(setup.e, []))
    return RawRun(messages, received, repaired)


def collect_view(
    setup: RepairSetup,
    holdings: dict[int, list[list[Lane]]],
    coins: dict[int, list[Lane]],
    run: RawRun,
    nodes: Sequence[int],
) -> list[Lane]:
    """Flattened (shares, coins, received data) of ``nodes``, in node order.

    The failed node's share is the one it holds after the repair.
    """
    view = []
    for a in sorted(nodes):
        stack = run.repaired if a == setup.e else holdings.get(a, [])
        view.extend(v for share in stack for v in share)
        view.extend(coins.get(a, []))
        view.extend(run.received.get(a, []))
    return view
