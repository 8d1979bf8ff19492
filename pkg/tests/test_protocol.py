import itertools
import json
import random
from fractions import Fraction

import pytest

from securerepair.errors import InvalidPlan, ParameterError, UnrepairableError
from securerepair.field import RandomSource
from securerepair.fixtures import (
    F5,
    three_node_scheme,
    two_piece_subscheme,
    load_fixture,
    ramp4_scheme,
    ramp5_scheme,
    vector_scheme,
)
from securerepair.protocol import (
    BandwidthReport,
    Network,
    ProtocolMessage,
    adversary_view,
    build_setup,
    decode_at_failed,
    repair_all_failures,
    run_construction2,
    run_construction4,
    run_construction5,
)
from securerepair.protocol.engine import execute
from securerepair.schemes import decode, derive_repair_function, encode, is_codeword


def ints(xs):
    return [v.value for v in xs]


def network_with(scheme, messages, keys):
    return Network.from_shares(scheme, [encode(scheme, m, u) for m, u in zip(messages, keys)])


def random_network(scheme, instances, rng):
    msgs = [[rng.randrange(scheme.q) for _ in range(scheme.message_len)] for _ in range(instances)]
    keys = [[rng.randrange(scheme.q) for _ in range(scheme.rho)] for _ in range(instances)]
    return network_with(scheme, msgs, keys)


def fig1_run(m, u, seed, subscheme=None):
    s = three_node_scheme()
    net = network_with(s, [[m]], [[u]])
    truth = ints(net.stacks[1].shares[0])
    plan = derive_repair_function(s, 1, [2, 3])
    repaired, tr, bw = run_construction2(net.fail([1]), plan, receivers=[2, 3], rng=seed, subscheme=subscheme)
    return net, truth, repaired, tr, bw


def test_three_node_two_round_messages():
    net, truth, repaired, tr, bw = fig1_run(2, 1, 7, two_piece_subscheme())
    c2, c3 = ints(net.stacks[2].shares[0])[0], ints(net.stacks[3].shares[0])[0]
    u2, u3 = tr.coins[2][0].value, tr.coins[3][0].value
    by = {(m.sender, m.receiver, m.round): ints(m.payload) for m in tr.messages}
    assert by[(2, 3, 1)] == [(u2 + c2) % 5]
    assert by[(3, 2, 1)] == [u3]
    assert by[(2, 1, 2)] == [(2 * u2 + 4 * u3) % 5]
    assert by[(3, 1, 2)] == [(2 * u2 + 4 * u3 + 2 * c2 + 4 * c3) % 5]
    assert ints(repaired[0]) == truth
    assert (bw.round1_symbols, bw.round2_symbols, bw.total_symbols) == (2, 2, 4)


def test_three_node_repairs_for_every_message_key_and_seed():
    for m, u, seed in itertools.product(range(5), range(5), range(4)):
        for sub in (None, two_piece_subscheme()):
            _, truth, repaired, _, bw = fig1_run(m, u, seed, sub)
            assert ints(repaired[0]) == truth
            assert bw.total_symbols <= (2 + 1) * (1 + 1)


def test_all_zero_run():
    s = three_node_scheme()
    plan = derive_repair_function(s, 1, [2, 3])
    setup = build_setup(s, "c2", plan, receivers=[2, 3])
    run = execute(setup, {2: [[0]], 3: [[0]]}, {2: [0], 3: [0]})
    assert all(v == 0 for _, _, _, p in run.messages for v in p)
    assert run.repaired == [[0]]


def test_receivers_outside_helpers():
    s = three_node_scheme()
    plan = derive_repair_function(s, 1, [2, 3])
    for receivers in ([1, 2], [3, 1], [3, 2]):
        net = network_with(s, [[3]], [[4]])
        truth = ints(net.stacks[1].shares[0])
        repaired, tr, bw = run_construction2(net.fail([1]), plan, receivers=receivers, rng=1)
        assert ints(repaired[0]) == truth
        assert bw.total_symbols <= 6


def test_construction2_errors():
    s = three_node_scheme()
    net = network_with(s, [[1]], [[1]])
    plan = derive_repair_function(s, 1, [2, 3])
    with pytest.raises(ParameterError):
        run_construction2(net, plan, rng=0)  # node 1 has not failed
    with pytest.raises(ParameterError):
        run_construction2(net.fail([1]), plan, receivers=[2], rng=0)
    with pytest.raises(UnrepairableError):
        run_construction2(net.fail([1, 2]), plan, rng=0)
    bad = load_fixture("sabotage").plans[0]
    with pytest.raises(InvalidPlan):
        run_construction2(net.fail([1]), bad, rng=0)
    with pytest.raises(ParameterError):
        build_setup(vector_scheme(), "c2", derive_repair_function(vector_scheme(), 1, [2, 3]))


def test_construction4_recovers_ramp_instances():
    s = ramp4_scheme()
    plan = derive_repair_function(s, 4, [1, 2, 3])
    rng = random.Random(0)
    for seed in range(30):
        net = random_network(s, 3, rng)
        truth = [ints(x) for x in net.stacks[4].shares]
        repaired, tr, bw = run_construction4(net.fail([4]), plan, rng=seed)
        assert [ints(x) for x in repaired] == truth
        assert bw.symbols_repaired == 3
        assert bw.total_symbols <= (3 + 1) * 4
        assert bw.normalized <= Fraction((3 + 1) * 4, 4 - 1)


def test_construction4_needs_enough_instances():
    s = ramp4_scheme()
    plan = derive_repair_function(s, 4, [1, 2, 3])
    net = random_network(s, 2, random.Random(1))
    with pytest.raises(ParameterError):
        run_construction4(net.fail([4]), plan, rng=0)


def test_construction4_extra_instances_padded():
    s = ramp4_scheme()
    plan = derive_repair_function(s, 1, [2, 3, 4])
    net = random_network(s, 4, random.Random(2))
    truth = [ints(x) for x in net.stacks[1].shares]
    repaired, _, bw = run_construction4(net.fail([1]), plan, rng=3)
    assert [ints(x) for x in repaired] == truth
    assert bw.total_symbols <= (3 + 1) * 4 * 2


def test_construction5_vector_fixture():
    s = vector_scheme()
    rng = random.Random(5)
    for e in s.nodes:
        plan = derive_repair_function(s, e, [i for i in s.nodes if i != e], coords=[1, 2])
        for seed in range(10):
            net = random_network(s, 2, rng)
            truth = [ints(x) for x in net.stacks[e].shares]
            repaired, _, bw = run_construction5(net.fail([e]), plan, rng=seed)
            assert [ints(x) for x in repaired] == truth
            assert bw.symbols_repaired == (3 - 1) * 2
            assert bw.total_symbols <= (2 * 2 + 2) * 3


def test_construction5_with_t1_matches_construction4():
    s = ramp4_scheme()
    plan = derive_repair_function(s, 2, [1, 3, 4])
    net = random_network(s, 3, random.Random(6)).fail([2])
    r4, t4, b4 = run_construction4(net, plan, rng=11)
    r5, t5, b5 = run_construction5(net, plan, rng=11)
    assert r4 == r5 and b4 == b5
    shape = lambda tr: [(m.sender, m.receiver, m.round, len(m.payload)) for m in tr.messages]
    assert shape(t4) == shape(t5)
    assert [m.payload for m in t4.messages] == [m.payload for m in t5.messages]


def test_repaired_value_depends_only_on_received_data():
    cases = [
        (three_node_scheme(), "c2", 1, [2, 3], 1, run_construction2),
        (ramp4_scheme(), "c4", 3, [1, 2, 4], 3, run_construction4),
        (vector_scheme(), "c5", 2, [1, 3], 2, run_construction5),
    ]
    rng = random.Random(8)
    for scheme, kind, e, helpers, instances, runner in cases:
        plan = derive_repair_function(scheme, e, helpers)
        net = random_network(scheme, instances, rng).fail([e])
        repaired, tr, _ = runner(net, plan, rng=4)
        setup = build_setup(scheme, kind, plan, instances=instances, receivers=None if kind != "c2" else [helpers[0], helpers[1]])
        received = [v.value for v in tr.received[e]]
        assert decode_at_failed(setup, received) == [ints(x) for x in repaired]


def test_received_is_concatenation_in_delivery_order():
    _, _, _, tr, bw = fig1_run(1, 2, 3)
    want = {}
    for m in tr.messages:
        want.setdefault(m.receiver, []).extend(m.payload)
    assert tr.received == want
    assert bw.total_symbols == sum(len(m.payload) for m in tr.messages if m.sender != m.receiver)


def test_round2_values_form_subscheme_codeword():
    from securerepair.protocol import shamir_subscheme

    sub = shamir_subscheme(F5, 1)
    for m, u, seed in itertools.product(range(5), range(5), range(3)):
        _, truth, _, tr, _ = fig1_run(m, u, seed)
        values = {m.sender: m.payload for m in tr.messages if m.round == 2}
        vals = [values[2][0].value, values[3][0].value]
        assert is_codeword(sub, [1, 2], vals)
        assert [v.value for v in decode(sub, {1: [vals[0]], 2: [vals[1]]})] == truth


def test_replay_is_bit_identical():
    a = fig1_run(4, 4, 123)[3].to_dict()
    b = fig1_run(4, 4, 123)[3].to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    c = fig1_run(4, 4, 124)[3].to_dict()
    assert a["coins"] != c["coins"]


def test_adversary_views_match_hand_derived():
    net, _, _, tr, _ = fig1_run(2, 1, 7, two_piece_subscheme())
    failed = net.fail([1])
    c2, c3 = ints(net.stacks[2].shares[0])[0], ints(net.stacks[3].shares[0])[0]
    u2, u3 = tr.coins[2][0].value, tr.coins[3][0].value
    v2 = adversary_view(tr, failed, [2])
    assert ints(v2.shares[2][0]) == [c2] and ints(v2.coins[2]) == [u2] and ints(v2.received[2]) == [u3]
    v3 = adversary_view(tr, failed, [3])
    assert ints(v3.shares[3][0]) == [c3] and ints(v3.coins[3]) == [u3]
    assert ints(v3.received[3]) == [(u2 + c2) % 5]
    assert adversary_view(tr, failed, []).flat() == []
    with pytest.raises(ParameterError):
        adversary_view(tr, failed, [9])


def test_repair_all_two_failures():
    s = ramp5_scheme(r=2)
    for kind, instances in (("c2", 1), ("c4", 4)):
        net = random_network(s, instances, random.Random(9))
        truth = {i: net.stacks[i].shares for i in (2, 4)}
        restored, records = repair_all_failures(net.fail([2, 4]), 5, protocol=kind)
        assert len(records) == 2 and not restored.failed
        assert {i: restored.stacks[i].shares for i in (2, 4)} == truth
        for inst in range(instances):
            flat = [v.value for i in s.nodes for v in restored.stacks[i].shares[inst]]
            assert is_codeword(s, list(s.nodes), flat)


def test_repair_all_no_failures():
    net = random_network(three_node_scheme(), 1, random.Random(0))
    restored, records = repair_all_failures(net, 1)
    assert records == [] and restored is net


def test_repair_all_beyond_erasure_tolerance():
    s = ramp5_scheme(r=2)
    net = random_network(s, 1, random.Random(0))
    with pytest.raises(UnrepairableError):
        repair_all_failures(net.fail([1, 2, 3]), 0)


def test_network_rejects_inconsistent_stacks():
    s = three_node_scheme()
    cw = encode(s, [1], [1])
    cw[0] = [F5(cw[0][0].value + 1)]
    with pytest.raises(ParameterError):
        Network.from_shares(s, [cw])


def test_self_messages_rejected():
    with pytest.raises(ParameterError):
        ProtocolMessage(1, 1, 1, (F5(0),))


def test_bandwidth_report_json():
    bw = BandwidthReport(2, 2, 1)
    assert bw.to_dict()["normalized"] == {"num": 4, "den": 1}
    assert BandwidthReport(20, 4, 6).normalized == Fraction(4)
    assert BandwidthReport(0, 0, 0).normalized == 0
