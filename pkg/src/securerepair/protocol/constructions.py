"""The three two-round secure repair protocols and multi-failure repair."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from ..errors import (
    InvalidPlan,
    NoRepairFunction,
    ParameterError,
    UnrepairableError,
)
from ..field import FieldElement, PrimeField, RandomSource, uniform_element
from ..schemes import (
    LinearScheme,
    RepairPlan,
    decoding_matrix,
    find_repair_plan,
    ramp_scheme,
    shamir_scheme,
)
from .engine import RepairSetup, execute
from .network import Network
from .transcript import BandwidthReport, ProtocolMessage, Transcript

KINDS = ("c2", "c4", "c5")


def shamir_subscheme(field: PrimeField, z: int, alphas: Sequence[int] | None = None) -> LinearScheme:
    """The (z+1, 1, 0, z) scheme helpers use in the c2 protocol."""
    alphas = range(1, z + 2) if alphas is None else alphas
    return shamir_scheme(z + 1, z, field.vector(alphas))


def ramp_subscheme(field: PrimeField, n: int, z: int, alphas: Sequence[int] | None = None) -> LinearScheme:
    """The (n, n-z, 0, z) scheme helpers use in the c4 and c5 protocols."""
    alphas = range(1, n + 1) if alphas is None else alphas
    return ramp_scheme(n, 0, z, field.vector(alphas))


def default_receivers(scheme: LinearScheme, plan: RepairPlan, live: Sequence[int] | None = None) -> tuple[int, ...]:
    """First z+1 helpers, topped up with other live nodes if there are too few."""
    live = list(scheme.nodes) if live is None else list(live)
    picked = list(plan.helpers[: scheme.z + 1])
    for i in live:
        if len(picked) == scheme.z + 1:
            break
        if i not in picked and i != plan.e:
            picked.append(i)
    if len(picked) < scheme.z + 1:
        raise UnrepairableError(f"need {scheme.z + 1} receivers, only {len(picked)} live nodes available")
    return tuple(picked)


def build_setup(
    scheme: LinearScheme,
    kind: str,
    plan: RepairPlan,
    *,
    instances: int | None = None,
    receivers: Sequence[int] | None = None,
    subscheme: LinearScheme | None = None,
) -> RepairSetup:
    """Everything the engine needs that is public knowledge before the run."""
    if kind not in KINDS:
        raise ParameterError(f"unknown protocol {kind!r}, expected one of {KINDS}")
    n, z, t = scheme.n, scheme.z, scheme.t
    if kind in ("c2", "c4") and t != 1:
        raise ParameterError(f"{kind} repairs scalar schemes only (t={t}); use c5")
    if kind in ("c2", "c4") and plan.coords != (1,):
        raise ParameterError("scalar plans read coordinate 1 only")
    if plan.coeffs.shape != (t, plan.input_size):
        raise InvalidPlan(f"repair coefficients have shape {plan.coeffs.shape}")

    if kind == "c2":
        receivers = tuple(receivers) if receivers is not None else default_receivers(scheme, plan)
        sub = subscheme if subscheme is not None else shamir_subscheme(scheme.field, z)
        if len(receivers) != z + 1 or len(set(receivers)) != z + 1:
            raise ParameterError(f"c2 needs {z + 1} distinct receivers, got {receivers}")
        if sub.n != z + 1 or sub.k != 1 or sub.t != 1 or sub.z < z:
            raise ParameterError("the c2 sub-scheme must be a (z+1, 1, 0, z) scheme")
        default_instances = 1
    else:
        if receivers is not None and tuple(receivers) != tuple(scheme.nodes):
            raise ParameterError(f"{kind} sends pieces to every node")
        receivers = tuple(scheme.nodes)
        sub = subscheme if subscheme is not None else ramp_subscheme(scheme.field, n, z)
        if sub.n != n or sub.k != n - z or sub.t != 1 or sub.z < z:
            raise ParameterError(f"{kind} sub-scheme must be an (n, n-z, 0, z) scheme")
        default_instances = n - z
    if sub.q != scheme.q:
        raise ParameterError("sub-scheme must live in the same field")
    if any(r not in scheme.nodes for r in receivers):
        raise ParameterError(f"unknown receiver in {receivers}")

    instances = default_instances if instances is None else instances
    if instances < 1:
        raise ParameterError("nothing to repair")
    return RepairSetup(
        kind=kind,
        q=scheme.q,
        t=t,
        e=plan.e,
        helpers=plan.helpers,
        coords=tuple(j - 1 for j in plan.coords),
        receivers=tuple(receivers),
        f=plan.coeffs.data,
        sub_gen=sub.generator.data,
        sub_decode=tuple(tuple(row) for row in decoding_matrix(sub, list(sub.nodes))),
        batch=sub.k,
        sub_keys=sub.rho,
        instances=instances,
    )


def _run(
    network: Network,
    plan: RepairPlan,
    kind: str,
    rng,
    receivers=None,
    subscheme=None,
) -> tuple[list[list[FieldElement]], Transcript, BandwidthReport]:
    scheme = network.scheme
    if not plan.check(scheme):
        raise InvalidPlan(f"repair function for node {plan.e} does not reproduce its share")
    if plan.e not in network.failed:
        raise ParameterError(f"node {plan.e} has not failed")
    dead = [i for i in plan.helpers if i in network.failed]
    if dead:
        raise UnrepairableError(f"helpers {dead} have failed")
    if kind == "c2" and receivers is None:
        receivers = default_receivers(scheme, plan, network.live)
    if kind == "c2":
        dead = [j for j in receivers if j in network.failed and j != plan.e]
        if dead:
            raise UnrepairableError(f"receivers {dead} have failed")
    instances = network.instances
    if kind in ("c4", "c5") and instances < scheme.n - scheme.z:
        raise ParameterError(f"{kind} needs n-z={scheme.n - scheme.z} instances per node, have {instances}")
    setup = build_setup(scheme, kind, plan, instances=instances, receivers=receivers, subscheme=subscheme)

    if rng is None or isinstance(rng, int):
        rng = RandomSource(rng)
    tapes = RandomSource(rng.getrandbits(64))
    field = scheme.field
    coins = {}
    for i in setup.helpers:
        tape = tapes.spawn("coins", i)
        coins[i] = [uniform_element(tape, field) for _ in range(setup.coins_per_helper)]

    raw = execute(setup, network.holdings(), {i: [c.value for c in cs] for i, cs in coins.items()})
    messages = [
        ProtocolMessage(src, dst, rnd, tuple(field(v) for v in payload))
        for src, dst, rnd, payload in raw.messages
    ]
    repaired = [[field(v) for v in share] for share in raw.repaired]
    transcript = Transcript(kind, plan.e, messages, coins, repaired)
    return repaired, transcript, BandwidthReport.of(transcript)


def run_construction2(
    network: Network,
    plan: RepairPlan,
    receivers: Sequence[int] | None = None,
    rng: random.Random | int | None = None,
    subscheme: LinearScheme | None = None,
):
    """Generic secure repair through z+1 receivers.

    Every stored instance is repaired, each with independent coins.  Returns
    ``(repaired, transcript, bandwidth)``.
    """
    return _run(network, plan, "c2", rng, receivers, subscheme)


def run_construction4(network: Network, plan: RepairPlan, rng: random.Random | int | None = None, subscheme=None):
    """Bandwidth-efficient repair of n-z scalar instances at once."""
    return _run(network, plan, "c4", rng, None, subscheme)


def run_construction5(network: Network, plan: RepairPlan, rng: random.Random | int | None = None, subscheme=None):
    """The c4 protocol generalised to vector shares, reading coordinates J."""
    return _run(network, plan, "c5", rng, None, subscheme)


RUNNERS = {"c2": run_construction2, "c4": run_construction4, "c5": run_construction5}


@dataclass
class RepairRecord:
    plan: RepairPlan
    transcript: Transcript
    bandwidth: BandwidthReport


def repair_all_failures(
    network: Network,
    rng: random.Random | int | None = None,
    protocol: str = "c2",
    plans: dict[int, RepairPlan] | None = None,
    subscheme: LinearScheme | None = None,
    receivers: Sequence[int] | None = None,
) -> tuple[Network, list[RepairRecord]]:
    """Repair failed nodes one after another; repaired nodes can help later ones.

    ``receivers`` only applies to c2 and is used for every failure.
    """
    if rng is None or isinstance(rng, int):
        rng = RandomSource(rng)
    plans = plans or {}
    records = []
    for e in sorted(network.failed):
        plan = plans.get(e)
        if plan is None:
            try:
                plan = find_repair_plan(network.scheme, e, network.live)
            except NoRepairFunction as exc:
                raise UnrepairableError(str(exc)) from None
        if protocol not in RUNNERS:
            raise ParameterError(f"unknown protocol {protocol!r}, expected one of {KINDS}")
        if protocol == "c2":
            repaired, transcript, bw = run_construction2(network, plan, receivers, rng, subscheme)
        else:
            repaired, transcript, bw = RUNNERS[protocol](network, plan, rng=rng, subscheme=subscheme)
        network = network.restore(e, repaired)
        records.append(RepairRecord(plan, transcript, bw))
    return network, records


@dataclass
class AdversaryView:
    shares: dict[int, list[list[FieldElement]]]
    coins: dict[int, list[FieldElement]]
    received: dict[int, list[FieldElement]]

    def flat(self) -> list[FieldElement]:
        out = []
        for a in sorted(set(self.shares) | set(self.coins) | set(self.received)):
            out += [v for s in self.shares.get(a, []) for v in s]
            out += self.coins.get(a, [])
            out += self.received.get(a, [])
        return out


def adversary_view(transcript: Transcript, network: Network, nodes: Sequence[int]) -> AdversaryView:
    """Shares, coin flips and received data of a colluding set, nothing else."""
    unknown = [a for a in nodes if a not in network.scheme.nodes]
    if unknown:
        raise ParameterError(f"unknown nodes {unknown}")
    received = transcript.received
    view = AdversaryView({}, {}, {})
    for a in sorted(nodes):
        if a == transcript.e:
            view.shares[a] = [list(s) for s in transcript.repaired]
        else:
            view.shares[a] = [list(s) for s in network.stacks[a].shares]
        view.coins[a] = list(transcript.coins.get(a, []))
        view.received[a] = list(received.get(a, []))
    return view
