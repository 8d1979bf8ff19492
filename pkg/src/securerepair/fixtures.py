"""Small named schemes used by the tests, the CLI examples and the docs.

The three-node example over F_5 uses evaluation points (3, 2, 1), which make
``c1 = 2*c2 + 4*c3`` hold for every message and key.  Its two-piece
sub-scheme sends ``u`` to the first receiver and ``u + c`` to the second.
"""
from __future__ import annotations

import json
from importlib import resources

from .field import PrimeField
from .schemes import LinearScheme, SchemeFile, generic_scheme, load_scheme_file, ramp_scheme, shamir_scheme

F5 = PrimeField(5)
F7 = PrimeField(7)
THREE_NODE_ALPHAS = (3, 2, 1)


def three_node_scheme() -> LinearScheme:
    return shamir_scheme(3, 1, F5.vector(THREE_NODE_ALPHAS))


def two_piece_subscheme() -> LinearScheme:
    return generic_scheme(F5, [[0, 1], [1, 1]], n=2, k=1, r=0, z=1, rho=1)


def ramp4_scheme() -> LinearScheme:
    return ramp_scheme(4, 1, 1, F5.vector([1, 2, 3, 4]))


def ramp5_scheme(r: int = 1) -> LinearScheme:
    return ramp_scheme(5, r, 1, F7.vector([1, 2, 3, 4, 5]))


def interleaved_generator(alphas=THREE_NODE_ALPHAS) -> list[list[int]]:
    """Two independent copies of the three-node scheme, one per share coordinate."""
    n = len(alphas)
    gen = [[0] * (2 * n) for _ in range(4)]
    for i, a in enumerate(alphas):
        gen[0][2 * i] = 1
        gen[1][2 * i + 1] = 1
        gen[2][2 * i] = a
        gen[3][2 * i + 1] = a
    return gen


def vector_scheme() -> LinearScheme:
    return generic_scheme(F5, interleaved_generator(), n=3, k=1, r=1, z=1, t=2, rho=2)


def load_fixture(name: str) -> SchemeFile:
    """Load one of the bundled JSON scheme files by stem, e.g. ``"three_node"``."""
    return load_scheme_file(json.loads(fixture_text(name)))


def fixture_text(name: str) -> str:
    return resources.files("securerepair.data").joinpath(f"{name}.json").read_text()


def fixture_names() -> list[str]:
    return sorted(
        p.name[:-5] for p in resources.files("securerepair.data").iterdir() if p.name.endswith(".json")
    )
