"""Two-round secure repair protocols over a simulated network."""
from .constructions import (
    KINDS,
    AdversaryView,
    RepairRecord,
    adversary_view,
    build_setup,
    default_receivers,
    ramp_subscheme,
    repair_all_failures,
    run_construction2,
    run_construction4,
    run_construction5,
    shamir_subscheme,
)
from .engine import RepairSetup, decode_at_failed
from .network import Network
from .transcript import BandwidthReport, ProtocolMessage, Transcript

__all__ = [
    "KINDS",
    "AdversaryView",
    "BandwidthReport",
    "Network",
    "ProtocolMessage",
    "RepairRecord",
    "RepairSetup",
    "Transcript",
    "adversary_view",
    "build_setup",
    "decode_at_failed",
    "default_receivers",
    "ramp_subscheme",
    "repair_all_failures",
    "run_construction2",
    "run_construction4",
    "run_construction5",
    "shamir_subscheme",
]
