import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import H, KET0, bell_state, outcome_probs
from syncnets.figures import false_net, not_true_net
from syncnets.generators import ProgramGenConfig, random_program
from syncnets.net import QuantumNet
from syncnets.qlambda import closure
from syncnets.qregister import QuantumRegister
from syncnets.qsiam import MachineError, QMachine, qinterpret, qrun, qstep, sample
from syncnets.rewrite import find_redexes, step
from syncnets.siam import Machine, interpret
from syncnets.simulate import aggregate, readout_machine, same_distribution
from syncnets.translate import translate_closure

SMALL = ProgramGenConfig(depth=3, min_size=4, max_qubits=3, max_measurements=2)


def compiled(src: str) -> QuantumNet:
    return translate_closure(closure(src))


def test_classical_step_is_the_lifted_machine_step():
    n = false_net()
    qn = QuantumNet.plain(n)
    qm = QMachine(qn)
    m = Machine(n)
    s = qm.initial()
    while True:
        branches = qstep(qn, s)
        ts = m.enabled(s.tokens)
        if not ts:
            assert branches == []
            break
        ((p, nxt),) = branches
        assert p == 1.0 and nxt.tokens == m.fire(s.tokens, ts[0]) and len(nxt.register) == 0
        s = nxt


def test_classical_net_gives_a_dirac_on_the_machine_result():
    for n in (false_net(), not_true_net()):
        (o,) = qinterpret(QuantumNet.plain(n)).outcomes
        assert o.prob == 1.0 and o.injection == interpret(n) and len(o.register) == 0


def test_coin_unlock_branches():
    qn = compiled("meas (H new)")
    qm = QMachine(qn)
    s = qm.initial()
    expected = outcome_probs(H @ KET0, 0, 1)
    while True:
        ts = qm.enabled(s)
        assert ts, "the run ended without a measurement"
        branches = qm.fire(s, ts[0])
        if ts[0].rule == "unlock":
            assert sorted(p for p, _ in branches) == pytest.approx(sorted(expected), abs=1e-9)
            return
        ((_, s),) = branches


def test_bell_register_after_cnot():
    qn = compiled("CNOT <H new, new>")
    qm = QMachine(qn)
    s = qm.initial()
    while True:
        ts = qm.enabled(s)
        t = ts[0]
        ((_, s),) = qm.fire(s, t)
        if t.rule == "sync" and qn.net.links[t.link].label == "CNOT":
            break
    assert len(s.register) == 2
    # the Bell state is symmetric, so the wire order does not matter here
    assert np.allclose(s.register.amplitudes, bell_state(), atol=1e-9)


def test_coin_has_two_equal_outcomes():
    interp = qinterpret(compiled("meas (H new)"))
    assert len(interp.outcomes) == 2
    assert [o.prob for o in interp.outcomes] == pytest.approx([0.5, 0.5], abs=1e-9)


def test_measured_bell_pair_is_correlated():
    interp = qinterpret(compiled("let <a,b> = CNOT <H new, new> in <meas a, meas b>"))
    assert interp.total == pytest.approx(1.0)
    assert len(interp.outcomes) == 2
    for o in interp.outcomes:
        bits = o.register.basis_bits()
        assert bits is not None and len(set(bits.values())) == 1
        assert o.prob == pytest.approx(0.5, abs=1e-9)


def _run_on_input(qn, amplitudes):
    n = qn.net
    ((edge, addr),) = Machine(n).sets.init
    init = QuantumRegister(((n.conclusions.index(edge), addr),), np.array(amplitudes, dtype=complex))
    (o,) = qinterpret(qn, init=init).outcomes
    return o.register.amplitudes


@given(st.floats(0, 2 * np.pi))
def test_linear_on_an_input_qubit(angle):
    qn = compiled(r"\q. H q")
    alpha, beta = np.cos(angle), np.sin(angle)
    out0, out1 = _run_on_input(qn, [1, 0]), _run_on_input(qn, [0, 1])
    mixed = _run_on_input(qn, [alpha, beta])
    assert np.allclose(mixed, alpha * out0 + beta * out1, atol=1e-9)
    assert np.allclose(mixed, H @ np.array([alpha, beta]), atol=1e-9)


def test_init_must_sit_on_initial_positions():
    qn = compiled(r"\q. H q")
    with pytest.raises(MachineError):
        qinterpret(qn, init=QuantumRegister(((0, "r"),), KET0))


def test_sampling_is_seeded():
    qn = compiled("meas (H new)")
    a = [(o.prob, o.register.basis_bits()) for o in sample(qn, 50, seed=3)]
    b = [(o.prob, o.register.basis_bits()) for o in sample(qn, 50, seed=3)]
    assert a == b
    assert sum(p for p, _ in a) == pytest.approx(1.0)


@given(st.integers(0, 100_000), st.integers(0, 1000))
def test_schedule_independence(seed, schedule):
    qn = translate_closure(closure(random_program(seed, SMALL)))
    base = aggregate(readout_machine(qn.net, qinterpret(qn)))
    for sched in ("last", schedule):
        other = aggregate(readout_machine(qn.net, qinterpret(qn, schedule=sched)))
        assert same_distribution(base, other)


@given(st.integers(0, 100_000))
def test_outcomes_form_a_distribution(seed):
    qn = translate_closure(closure(random_program(seed, SMALL)))
    leaves = qrun(qn)
    assert sum(p for p, _ in leaves) == pytest.approx(1.0, abs=1e-9)
    assert all(s.register.norm() == pytest.approx(1.0) for _, s in leaves)


@given(st.integers(0, 100_000))
def test_invariant_under_one_net_reduction_step(seed):
    qn = translate_closure(closure(random_program(seed, SMALL)))
    before = readout_machine(qn.net, qinterpret(qn))
    for r in find_redexes(qn)[:3]:
        after = []
        for p, nxt in step(qn, r):
            after.extend((p * q, v) for q, v in readout_machine(nxt.net, qinterpret(nxt)))
        assert same_distribution(before, after)
