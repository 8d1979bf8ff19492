"""Simulated storage network: one share stack per node, some nodes failed."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import ParameterError
from ..field import FieldElement, as_ints
from ..schemes import LinearScheme, ShareStack, encode_random, is_codeword


@dataclass(frozen=True, eq=False)
class Network:
    scheme: LinearScheme
    stacks: dict[int, ShareStack]
    failed: frozenset[int] = frozenset()

    def __post_init__(self):
        if set(self.stacks) != set(self.scheme.nodes):
            raise ParameterError("network needs one stack per node")
        unknown = set(self.failed) - set(self.scheme.nodes)
        if unknown:
            raise ParameterError(f"unknown failed nodes {sorted(unknown)}")
        counts = {self.stacks[i].instances for i in self.live}
        if len(counts) > 1:
            raise ParameterError(f"live nodes hold different instance counts {sorted(counts)}")
        for i in self.live:
            for share in self.stacks[i].shares:
                if len(share) != self.scheme.t:
                    raise ParameterError(f"node {i} holds a share of the wrong width")
        live = self.live
        for inst in range(self.instances):
            vals = [v for i in live for v in as_ints(self.stacks[i].shares[inst], self.scheme.field)]
            if not is_codeword(self.scheme, live, vals):
                raise ParameterError(f"instance {inst + 1} is not codeword-consistent on live nodes")

    @classmethod
    def from_shares(cls, scheme: LinearScheme, codewords: Sequence[Sequence[Sequence[FieldElement]]]) -> "Network":
        """Build from a list of codewords, one per instance."""
        stacks = {
            i: ShareStack(i, tuple(tuple(cw[i - 1]) for cw in codewords)) for i in scheme.nodes
        }
        return cls(scheme, stacks)

    @classmethod
    def create(
        cls,
        scheme: LinearScheme,
        messages: Sequence[Sequence[FieldElement | int]],
        rng: random.Random,
    ) -> tuple["Network", list[list[FieldElement]]]:
        """Encode each message as an independent instance with fresh keys."""
        codewords, keys = [], []
        for msg in messages:
            cw, u = encode_random(scheme, msg, rng)
            codewords.append(cw)
            keys.append(u)
        return cls.from_shares(scheme, codewords), keys

    @property
    def live(self) -> list[int]:
        return [i for i in self.scheme.nodes if i not in self.failed]

    @property
    def instances(self) -> int:
        live = self.live
        return self.stacks[live[0]].instances if live else 0

    def fail(self, nodes: Iterable[int]) -> "Network":
        nodes = set(nodes)
        unknown = nodes - set(self.scheme.nodes)
        if unknown:
            raise ParameterError(f"unknown nodes {sorted(unknown)}")
        stacks = dict(self.stacks)
        for i in nodes:
            stacks[i] = ShareStack(i, ())
        return Network(self.scheme, stacks, self.failed | nodes)

    def restore(self, node: int, shares: Sequence[Sequence[FieldElement]]) -> "Network":
        stacks = dict(self.stacks)
        stacks[node] = ShareStack(node, tuple(tuple(s) for s in shares))
        return Network(self.scheme, stacks, self.failed - {node})

    def holdings(self) -> dict[int, list[list[int]]]:
        """Int view of every live stack, as consumed by the engine."""
        f = self.scheme.field
        return {i: [as_ints(s, f) for s in self.stacks[i].shares] for i in self.live}

    def to_dict(self) -> dict:
        return {
            "failed": sorted(self.failed),
            "shares": {
                str(i): [[v.value for v in s] for s in self.stacks[i].shares] for i in self.scheme.nodes
            },
        }
