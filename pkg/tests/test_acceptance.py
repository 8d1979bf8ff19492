"""Acceptance suite: one or more tests per criterion, each with its time limit.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints a
PASS/FAIL line per criterion.
"""
import itertools
import random
import subprocess
import sys
import time
from fractions import Fraction
from importlib import resources

import pytest

from securerepair.analysis import (
    bounds_report,
    check_independence,
    entropy,
    enumerate_scheme,
    is_uniform,
    verify_protocol,
)
from securerepair.field import PrimeField
from securerepair.fixtures import three_node_scheme, two_piece_subscheme, ramp4_scheme, ramp5_scheme, vector_scheme
from securerepair.protocol import Network, run_construction2, run_construction4, run_construction5
from securerepair.schemes import (
    decode,
    derive_repair_function,
    encode,
    linear_combine_shares,
    ramp_scheme,
    shamir_scheme,
)

criterion = pytest.mark.criterion


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def ints(xs):
    return [v.value for v in xs]


def random_network(scheme, instances, rng):
    cws = []
    for _ in range(instances):
        m = [rng.randrange(scheme.q) for _ in range(scheme.message_len)]
        u = [rng.randrange(scheme.q) for _ in range(scheme.rho)]
        cws.append(encode(scheme, m, u))
    return Network.from_shares(scheme, cws)


def helpers_of(scheme, e):
    return [i for i in scheme.nodes if i != e]


# -- 1 ----------------------------------------------------------------------------


@criterion(1, "three-node example reproduces the hand-derived round messages")
def test_c1_three_node_golden():
    with Timer() as t:
        s = three_node_scheme()
        plan = derive_repair_function(s, 1, [2, 3])
        assert plan.coeffs.tolist() == [[2, 4]]
        for m, u, seed in itertools.product(range(5), range(5), range(4)):
            net = Network.from_shares(s, [encode(s, [m], [u])])
            c1, c2, c3 = (net.stacks[i].shares[0][0].value for i in (1, 2, 3))
            repaired, tr, bw = run_construction2(
                net.fail([1]), plan, receivers=[2, 3], rng=seed, subscheme=two_piece_subscheme()
            )
            u2, u3 = tr.coins[2][0].value, tr.coins[3][0].value
            by = {(x.sender, x.receiver, x.round): ints(x.payload) for x in tr.messages}
            assert by == {
                (2, 3, 1): [(u2 + c2) % 5],
                (3, 2, 1): [u3],
                (2, 1, 2): [(2 * u2 + 4 * u3) % 5],
                (3, 1, 2): [(2 * u2 + 4 * u3 + 2 * c2 + 4 * c3) % 5],
            }
            assert ints(repaired[0]) == [c1]
            assert bw.total_symbols == 4
    assert t.seconds < 1


# -- 2 ----------------------------------------------------------------------------


@criterion(2, "c2 protocol repairable and secure on the three-node example")
def test_c2_three_node_enumeration():
    with Timer() as t:
        s = three_node_scheme()
        for sub in (two_piece_subscheme(), None):
            for e in s.nodes:
                plan = derive_repair_function(s, e, helpers_of(s, e))
                r = verify_protocol(s, "c2", plan, adversaries=[(1,), (2,), (3,)], subscheme=sub)
                assert r.decomposition == "full" and r.outcomes == 5**4
                assert r.repairable
                assert all(c.independent for c in r.cells), r.cells
    assert t.seconds < 5


# -- 3 ----------------------------------------------------------------------------


def _c4_cells(es, adversaries):
    s = ramp4_scheme()
    for e in es:
        plan = derive_repair_function(s, e, helpers_of(s, e))
        r = verify_protocol(s, "c4", plan, adversaries=adversaries, instances=3)
        # 12 uniform symbols in total; each of the 3 instance blocks enumerates 2 + 6
        assert r.decomposition == "instance" and r.outcomes == 3 * 5**8
        assert r.repairable
        assert all(c.independent for c in r.cells), (e, r.cells)


@criterion(3, "c4 protocol repairable and secure on the 4-node ramp scheme")
def test_c3_ramp_c4_reduced_cells():
    with Timer() as t:
        _c4_cells([1, 4], [(2,), (3,)])
    assert t.seconds < 60


@criterion(3, "c4 protocol repairable and secure on the 4-node ramp scheme")
def test_c3_ramp_c4_all_cells():
    with Timer() as t:
        _c4_cells([1, 2, 3, 4], [(1,), (2,), (3,), (4,)])
    assert t.seconds < 600


# -- 4 ----------------------------------------------------------------------------


@criterion(4, "c5 protocol repairable and secure on the interleaved vector scheme")
def test_c4_vector_c5():
    with Timer() as t:
        s = vector_scheme()
        for e in s.nodes:
            plan = derive_repair_function(s, e, helpers_of(s, e), coords=[1, 2])
            r = verify_protocol(s, "c5", plan, adversaries=[(1,), (2,), (3,)], instances=2)
            assert r.repairable
            assert all(c.independent for c in r.cells), (e, r.cells)
    assert t.seconds < 600


# -- 5 ----------------------------------------------------------------------------


@criterion(5, "linear homomorphism on 1000 random triples")
def test_c5_homomorphism():
    rng = random.Random(20240501)
    failures = 0
    with Timer() as t:
        for trial in range(1000):
            q = (5, 7, 11)[trial % 3]
            f = PrimeField(q)
            n = rng.randint(3, min(6, q - 1))
            z = rng.randint(1, n - 2)
            alphas = f.vector(rng.sample(range(1, q), n))
            if trial % 2:
                s = shamir_scheme(n, z, alphas)
            else:
                s = ramp_scheme(n, rng.randint(0, n - z - 1), z, alphas)
            draw = lambda k: [rng.randrange(q) for _ in range(k)]
            m1, m2, u1, u2 = draw(s.k), draw(s.k), draw(s.rho), draw(s.rho)
            a, b = draw(2)
            combo = lambda x, y: [(a * i + b * j) % q for i, j in zip(x, y)]
            lhs = encode(s, combo(m1, m2), combo(u1, u2))
            rhs = linear_combine_shares(s, encode(s, m1, u1), encode(s, m2, u2), [a, b])
            failures += lhs != rhs
    assert failures == 0
    assert t.seconds < 5


# -- 6 ----------------------------------------------------------------------------


@criterion(6, "base schemes decode from every n-r subset and hide the message from z shares")
def test_c6_base_scheme_contract():
    with Timer() as t:
        for s in (shamir_scheme(3, 1, PrimeField(5).vector([1, 2, 3])), ramp4_scheme()):
            for m in itertools.product(range(5), repeat=s.k):
                for u in itertools.product(range(5), repeat=s.rho):
                    shares = encode(s, m, u)
                    for S in itertools.combinations(s.nodes, s.n - s.r):
                        assert tuple(ints(decode(s, {i: shares[i - 1] for i in S}))) == m
            for A in itertools.combinations(s.nodes, s.z):
                table = enumerate_scheme(s, A)
                assert table.total == 5 ** (s.k + s.rho)
                assert check_independence(table)
    assert t.seconds < 10


# -- 7 ----------------------------------------------------------------------------


def _suite_runs():
    """Concrete seeded runs of every protocol on every fixture used above."""
    rng = random.Random(7)
    runs = []
    s = three_node_scheme()
    for e in s.nodes:
        plan = derive_repair_function(s, e, helpers_of(s, e))
        for sub in (two_piece_subscheme(), None):
            _, _, bw = run_construction2(random_network(s, 1, rng).fail([e]), plan, rng=rng.getrandbits(32), subscheme=sub)
            runs.append(("c2", s, plan, bw))
    for s, instances in ((ramp4_scheme(), 3), (ramp5_scheme(), 4)):
        for e in s.nodes:
            plan = derive_repair_function(s, e, helpers_of(s, e))
            _, _, bw = run_construction4(random_network(s, instances, rng).fail([e]), plan, rng=rng.getrandbits(32))
            runs.append(("c4", s, plan, bw))
            _, _, bw = run_construction2(random_network(s, 1, rng).fail([e]), plan, rng=rng.getrandbits(32))
            runs.append(("c2", s, plan, bw))
    s = vector_scheme()
    for e in s.nodes:
        plan = derive_repair_function(s, e, helpers_of(s, e), coords=[1, 2])
        _, _, bw = run_construction5(random_network(s, 2, rng).fail([e]), plan, rng=rng.getrandbits(32))
        runs.append(("c5", s, plan, bw))
    return runs


@criterion(7, "measured bandwidth between the lower bound and each construction's cap")
def test_c7_bandwidth_bounds():
    runs = _suite_runs()
    assert {kind for kind, *_ in runs} == {"c2", "c4", "c5"}
    for kind, s, plan, bw in runs:
        rep = bounds_report(kind, s, plan, bw)
        assert isinstance(rep.upper, Fraction)
        assert rep.measured <= rep.upper, rep
        if s.params.rate_optimal:
            assert rep.lower is not None and rep.lower <= rep.measured, rep
    s = three_node_scheme()
    plan = derive_repair_function(s, 1, [2, 3])
    net = Network.from_shares(s, [encode(s, [2], [1])]).fail([1])
    _, _, bw = run_construction2(net, plan, rng=7, subscheme=two_piece_subscheme())
    rep = bounds_report("c2", s, plan, bw)
    assert rep.lower == Fraction(2) and rep.measured == 4 and rep.upper == Fraction(6)
    assert rep.lower <= rep.measured <= rep.upper


# -- 8 ----------------------------------------------------------------------------


@criterion(8, "any k+z shares of the rate-optimal ramp scheme are uniform")
def test_c8_k_plus_z_shares_uniform():
    with Timer() as t:
        s = ramp4_scheme()
        assert s.params.rate_optimal
        width = s.k + s.z
        for I in itertools.combinations(s.nodes, width):
            counts = enumerate_scheme(s, I).y_counts()
            assert is_uniform(counts, 5**width)
            assert entropy(counts, 5) == pytest.approx(width)
    assert t.seconds < 30


# -- 9 ----------------------------------------------------------------------------


@criterion(9, "repair with a fixed seed is byte-identical across invocations")
def test_c9_replay(tmp_path):
    scheme = str(resources.files("securerepair.data").joinpath("three_node.json"))
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        subprocess.run(
            [sys.executable, "-m", "securerepair.cli", "repair", "--scheme", scheme,
             "--protocol", "c2", "--failed", "1", "--seed", "7", "--out", str(out)],
            check=True,
        )
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert b'"total_symbols": 4' in outputs[0]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
