import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import H, KET0, bell_state, outcome_probs
from syncnets.canon import iso_equal
from syncnets.correctness import closure, is_correct
from syncnets.figures import false_net, not_true_net, sync_tensor_net
from syncnets.formula import ONE, Var
from syncnets.generators import SMLL0, random_closed_net, random_net
from syncnets.net import NetBuilder, QuantumNet, Sort
from syncnets.qlambda import closure as qclosure
from syncnets.qregister import QuantumRegister
from syncnets.rewrite import (
    Measure,
    NotARedex,
    Redex,
    RedexKind,
    find_redexes,
    measure,
    multi_step,
    normal_forms,
    normalize,
    step,
)
from syncnets.translate import translate_closure


def kinds(rs):
    return [r.kind for r in rs]


def ax_cut_ax() -> "Net":
    b = NetBuilder()
    p1, n1 = b.ax(Var("a"))
    p2, n2 = b.ax(Var("a"))
    b.cut(p1, n2)
    return b.finish()


def test_cut_free_sync_free_net_has_no_redex():
    assert find_redexes(false_net()) == []


def test_sync_tensor_figure_has_one_redex():
    assert kinds(find_redexes(sync_tensor_net())) == [RedexKind.SYNC_TENSOR]


def test_ax_against_ax_gives_two_overlapping_redexes():
    rs = find_redexes(ax_cut_ax())
    assert kinds(rs) == [RedexKind.AX_CUT, RedexKind.AX_CUT]
    assert rs[0].site[1] == rs[1].site[1]


def test_ax_cut_splices():
    n = ax_cut_ax()
    for r in find_redexes(n):
        ((p, m),) = step(n, r)
        assert p == 1.0
        assert len(m.links) == 1 and m.links_of(Sort.AX)
        b = NetBuilder()
        pos, neg = b.ax(Var("a"))
        # the spliced net keeps the original conclusion order: ~a from the first axiom, then a
        assert iso_equal(m, b.finish([neg, pos]))


def test_sync_tensor_step_matches_the_figure():
    n = sync_tensor_net()
    ((_, m),) = step(n, find_redexes(n)[0])
    b = NetBuilder()
    one1, bot1 = b.ax(ONE)
    one2, bot2 = b.ax(ONE)
    s1, s2 = b.sync([one1, one2])
    one3, bot3 = b.ax(ONE)
    one4, bot4 = b.ax(ONE)
    b.cut(b.tensor(s1, s2), b.par(bot3, bot4))
    expected = b.finish([bot1, bot2, b.tensor(one3, one4)])
    assert iso_equal(m, expected)


def test_step_rejects_foreign_redex():
    with pytest.raises(NotARedex):
        step(false_net(), Redex(RedexKind.AX_CUT, (0, 1)))


def test_not_true_normalizes_to_false():
    nf, trace = normalize(not_true_net())
    assert iso_equal(nf, false_net())
    assert trace == []  # not recorded
    _, trace = normalize(not_true_net(), record=True)
    assert trace and all(t.measure is not None for t in trace)


def test_normal_net_is_a_fixpoint():
    n = false_net()
    nf, trace = normalize(n, record=True)
    assert nf is n and trace == []


def test_trace_json_fields():
    _, trace = normalize(not_true_net(), record=True)
    row = trace[0].to_json(0)
    assert set(row) == {"step", "redexKind", "site", "measureMajor", "measureMinor", "prob"}


def test_measure_of_single_axiom():
    b = NetBuilder()
    b.ax(Var("a"))
    assert measure(b.finish()) == Measure(1, 0)


def test_measure_counts_sync_weight():
    n = sync_tensor_net()
    # nine links plus one connective under the sync
    assert measure(n).major == len(n.links) + 1 == 10


@given(st.integers(0, 100_000))
def test_steps_preserve_correctness_and_decrease_the_measure(seed):
    n = random_net(seed)
    while True:
        rs = find_redexes(n)
        if not rs:
            return
        m0 = measure(n)
        for r in rs:
            ((_, m),) = step(n, r, checked=True)
            assert is_correct(m)
            assert measure(m) < m0
        n = step(n, rs[-1], checked=True)[0][1]


@given(st.integers(0, 100_000), st.integers(0, 1000))
def test_seeded_strategies_are_confluent(seed, strategy):
    n = random_net(seed)
    a, _ = normalize(n, "det")
    b, _ = normalize(n, f"seed:{strategy}")
    if any(l.contents > 1 for l in n.bots()):
        nfs = normal_forms(n)
        assert any(iso_equal(a, x) for x in nfs) and any(iso_equal(b, x) for x in nfs)
    else:
        assert iso_equal(a, b)


@given(st.integers(0, 100_000))
def test_smll0_normal_forms_are_cut_free(seed):
    nf, _ = normalize(random_net(seed, SMLL0))
    assert not nf.links_of(Sort.CUT)


@given(st.integers(0, 100_000))
def test_closed_normal_forms_have_no_cut_box_or_sync(seed):
    nf, _ = normalize(random_closed_net(seed))
    assert not nf.links_of(Sort.CUT, Sort.BOT, Sort.SYNC)


def test_normalize_is_deterministic_per_seed():
    n = random_net(11)
    a = normalize(n, "seed:5", record=True)[1]
    b = normalize(n, "seed:5", record=True)[1]
    assert a == b


# -- quantum rules ----------------------------------------------------------------------------

def test_plain_net_gives_dirac_on_normal_form():
    n = not_true_net()
    ((p, qn),) = multi_step(n)
    assert p == 1.0 and iso_equal(qn.net, normalize(n)[0]) and len(qn.register) == 0


def test_box_measure_on_plus_state():
    reg = QuantumRegister(("q",), H @ KET0)
    qn = translate_closure(qclosure("meas #q", reg))
    expected = outcome_probs(H @ KET0, 0, 1)
    cur = qn
    while True:
        rs = find_redexes(cur)
        meas = [r for r in rs if r.kind is RedexKind.Q_BOX_MEASURE]
        if meas:
            branches = step(cur, meas[0])
            assert sorted(p for p, _ in branches) == pytest.approx(sorted(expected), abs=1e-9)
            assert all(len(b.register) == 0 for _, b in branches)
            return
        ((_, cur),) = step(cur, rs[0])


def test_coin_flip_net():
    dist = multi_step(translate_closure(qclosure("meas (H new)")))
    assert len(dist) == 2
    assert [p for p, _ in dist] == pytest.approx([0.5, 0.5], abs=1e-9)


def test_bell_pair_net():
    ((p, qn),) = multi_step(translate_closure(qclosure("CNOT <H new, new>")))
    assert p == pytest.approx(1.0)
    assert len(qn.register) == 2
    (concl,) = qn.net.conclusions
    tensor = qn.net.src_link(concl)
    order = [qn.wire_of(qn.net.src_link(e).id) for e in tensor.premisses]
    assert np.allclose(qn.register.reorder(order), bell_state(), atol=1e-9)


def test_quantum_net_requires_matching_wiring():
    with pytest.raises(Exception):
        QuantumNet(false_net(), QuantumRegister.empty().fresh("q"), {})
