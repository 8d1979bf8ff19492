"""Protocol messages, transcripts and bandwidth accounting."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ParameterError
from ..field import FieldElement


@dataclass(frozen=True)
class ProtocolMessage:
    sender: int
    receiver: int
    round: int
    payload: tuple[FieldElement, ...]

    def __post_init__(self):
        if self.sender == self.receiver:
            raise ParameterError("a node never messages itself")
        if self.round not in (1, 2):
            raise ParameterError(f"round must be 1 or 2, got {self.round}")

    def to_dict(self) -> dict:
        return {
            "from": self.sender,
            "to": self.receiver,
            "round": self.round,
            "payload": [v.value for v in self.payload],
        }


@dataclass
class Transcript:
    kind: str
    e: int
    messages: list[ProtocolMessage] = field(default_factory=list)
    coins: dict[int, list[FieldElement]] = field(default_factory=dict)
    repaired: list[list[FieldElement]] = field(default_factory=list)

    @property
    def received(self) -> dict[int, list[FieldElement]]:
        out: dict[int, list[FieldElement]] = {}
        for m in self.messages:
            out.setdefault(m.receiver, []).extend(m.payload)
        return out

    def to_dict(self) -> dict:
        return {
            "protocol": self.kind,
            "failed": self.e,
            "messages": [m.to_dict() for m in self.messages],
            "coins": {str(i): [v.value for v in c] for i, c in sorted(self.coins.items())},
            "repaired": [[v.value for v in s] for s in self.repaired],
        }


@dataclass(frozen=True)
class BandwidthReport:
    round1_symbols: int
    round2_symbols: int
    symbols_repaired: int

    @property
    def total_symbols(self) -> int:
        return self.round1_symbols + self.round2_symbols

    @property
    def normalized(self) -> Fraction:
        if self.symbols_repaired == 0:
            return Fraction(0)
        return Fraction(self.total_symbols, self.symbols_repaired)

    @classmethod
    def of(cls, transcript: Transcript) -> "BandwidthReport":
        r1 = sum(len(m.payload) for m in transcript.messages if m.round == 1)
        r2 = sum(len(m.payload) for m in transcript.messages if m.round == 2)
        repaired = sum(len(s) for s in transcript.repaired)
        return cls(r1, r2, repaired)

    def to_dict(self) -> dict:
        norm = self.normalized
        return {
            "round1_symbols": self.round1_symbols,
            "round2_symbols": self.round2_symbols,
            "total_symbols": self.total_symbols,
            "symbols_repaired": self.symbols_repaired,
            "normalized": {"num": norm.numerator, "den": norm.denominator},
        }
