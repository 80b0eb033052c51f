import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import bell_state
from syncnets.canon import iso_equal
from syncnets.correctness import is_correct
from syncnets.formula import BOT, ONE, Par, Tensor, negate
from syncnets.generators import random_program, random_substitution_pair
from syncnets.net import Sort
from syncnets.qlambda import BOOL, QUBIT, Lolli, Tens, closure, parse, small_step, substitute, typecheck
from syncnets.qregister import QuantumRegister
from syncnets.rewrite import distributions_equal, multi_step, normal_forms, normalize
from syncnets.translate import (
    UnknownGate,
    boolean_net,
    cut_with,
    measurement_net,
    translate_closure,
    translate_derivation,
    translate_term,
    translate_type,
)


def test_types():
    assert translate_type(BOOL) == ONE == translate_type(QUBIT)
    assert translate_type(Lolli(QUBIT, BOOL)) == Par(BOT, ONE)
    assert translate_type(Tens(QUBIT, QUBIT)) == Tensor(ONE, ONE)


def test_true_has_a_single_one_link():
    n = translate_term(parse("tt")).net
    assert len(n.links_of(Sort.ONE)) == 1
    assert not n.bots()
    assert [n.type_of(e) for e in n.conclusions] == [translate_type(BOOL)]
    assert iso_equal(n, boolean_net(True))


def test_measurement_box_carries_both_labels():
    n = translate_term(parse("meas")).net
    assert iso_equal(n, measurement_net())
    (box,) = n.bots()
    assert box.contents == 2
    labels = {l.label for l in n.links_of(Sort.SYNC)}
    assert labels == {"I", "X"}
    assert all(l.box is not None for l in n.links_of(Sort.SYNC))
    assert [n.type_of(e) for e in n.conclusions] == [Par(BOT, ONE)]


def test_if_becomes_a_guarded_box():
    n = translate_term(parse("if meas new then tt else ff")).net
    two = [b for b in n.bots() if b.contents == 2 and b.box is None]
    # one box comes from meas; the conditional's box has its lock cut against the condition
    guarded = [b for b in two if n.dst_link(n.lock(b.id)).sort is Sort.CUT]
    assert len(guarded) == 1


def test_closed_classical_closure_has_no_register():
    qn = translate_closure(closure("tt"))
    assert qn.wiring == {} and len(qn.register) == 0


def test_single_qubit_closure_is_wired():
    reg = QuantumRegister.empty().fresh("r")
    qn = translate_closure(closure("#r", reg))
    assert list(qn.wiring) == ["r"]
    assert qn.net.links[qn.wiring["r"]].sort is Sort.ONE
    assert qn.net.links_of(Sort.AX)


def test_bell_closure_mid_evaluation():
    c = closure(r"(\<x,y>. CNOT <H x, y>) <new, new>")
    for _ in range(3):
        ((_, c),) = small_step(c)
    ((p, qn),) = multi_step(translate_closure(c))
    assert p == pytest.approx(1.0)
    tensor = qn.net.src_link(qn.net.conclusions[0])
    order = [qn.wire_of(qn.net.src_link(e).id) for e in tensor.premisses]
    assert np.allclose(qn.register.reorder(order), bell_state(), atol=1e-9)


def test_unknown_gate():
    with pytest.raises(Exception):
        translate_term(parse("FOO new"))


def test_conclusions_follow_the_context():
    c = translate_term(parse("x (meas #q)"), {"x": Lolli(BOOL, QUBIT)})
    assert [r["kind"] for r in c.port_table()] == ["v", "q", "out"]
    types = [c.net.type_of(e) for e in c.net.conclusions]
    assert types == [negate(Par(BOT, ONE)), BOT, ONE]


# -- substitution ---------------------------------------------------------------------------

def _same_normal_forms(a, b) -> bool:
    """Plain normal forms up to isomorphism, and the quantum rules' outcome distributions,
    which keep the gate labels that plain normalization erases."""
    x, y = normal_forms(a), normal_forms(b)
    plain = len(x) == len(y) and all(any(iso_equal(u, v) for v in y) for u in x)
    return plain and distributions_equal(multi_step(a), multi_step(b))


def test_identity_cut_with_true():
    d1 = typecheck(parse("x"), {"x": BOOL})
    d2 = typecheck(parse("tt"))
    lhs, tt = cut_with(d1, "x", d2), translate_term(parse("tt")).net
    assert iso_equal(normalize(lhs)[0], normalize(tt)[0])
    assert _same_normal_forms(lhs, tt)
    assert not _same_normal_forms(lhs, translate_term(parse("ff")).net)


def test_applied_variable_substituted_by_identity():
    d1 = typecheck(parse("x tt"), {"x": Lolli(BOOL, BOOL)})
    d2 = typecheck(parse(r"\y. y"), expect=Lolli(BOOL, BOOL))
    rhs = translate_derivation(typecheck(substitute(d1.term, "x", d2.term), expect=d1.type)).net
    assert _same_normal_forms(cut_with(d1, "x", d2), rhs)


def test_cut_with_type_mismatch():
    d1 = typecheck(parse("x"), {"x": BOOL})
    with pytest.raises(TypeError):
        cut_with(d1, "x", typecheck(parse("new")))


@given(st.integers(0, 100_000))
def test_translations_are_correct_nets(seed):
    t = random_program(seed)
    n = translate_term(t).net
    assert is_correct(n)
    assert n.type_of(n.conclusions[-1]) == translate_type(typecheck(t).type)


@given(st.integers(0, 100_000))
def test_cut_with_matches_substitution(seed):
    body, x, v, a = random_substitution_pair(seed)
    d1 = typecheck(body, {x: a})
    d2 = typecheck(v, expect=a)
    rhs = translate_derivation(typecheck(substitute(body, x, v), expect=d1.type)).net
    assert _same_normal_forms(cut_with(d1, x, d2), rhs)
