import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import bell_state
from syncnets.generators import ProgramGenConfig, random_program
from syncnets.qlambda import (
    BOOL,
    HOLE,
    QUBIT,
    FF,
    TT,
    App,
    Closure,
    LambdaSyntaxError,
    LambdaTypeError,
    Lam,
    LetPair,
    Lolli,
    Meas,
    New,
    Pair,
    QVar,
    Tens,
    Unitary,
    Var,
    big_step,
    closure,
    decompose,
    free_qvars,
    is_value,
    parse,
    parse_type,
    plug,
    show_term,
    small_step,
    substitute,
    typecheck,
)
from syncnets.qregister import QuantumRegister


def test_parse_lambda():
    assert parse(r"\x. x") == Lam("x", Var("x"))


def test_parse_application_nesting():
    assert parse("meas (H new)") == App(Meas(), App(Unitary("H"), New()))


def test_parse_let():
    assert parse("let <x,y> = t in u") == LetPair("x", "y", Var("t"), Var("u"))


def test_parse_errors_carry_a_location():
    with pytest.raises(LambdaSyntaxError) as exc:
        parse("\\x. (x")
    assert exc.value.line == 1
    with pytest.raises(LambdaSyntaxError):
        parse("<tt>")


def test_type_of_meas():
    assert typecheck(Meas()).type == Lolli(QUBIT, BOOL)


def test_pair_identity_at_qubits():
    t = parse(r"\<x,y>. <x,y>")
    qq = Tens(QUBIT, QUBIT)
    assert typecheck(t, expect=Lolli(qq, qq)).type == Lolli(qq, qq)


def test_non_linear_use():
    with pytest.raises(LambdaTypeError) as exc:
        typecheck(parse(r"\x. <x,x>"))
    assert exc.value.kind == "NonLinearUse"


def test_unused_variable_rejected():
    with pytest.raises(LambdaTypeError):
        typecheck(parse(r"\x. tt"))


def test_branches_must_be_closed():
    with pytest.raises(LambdaTypeError):
        typecheck(parse(r"\y. if tt then y else ff"))


def test_mismatch():
    with pytest.raises(LambdaTypeError):
        typecheck(parse("meas tt"))


def test_decompose_top_redex():
    t = parse(r"(\x. x) tt")
    assert decompose(t) == (HOLE, t)


def test_decompose_inside_pair():
    e, r = decompose(parse(r"<tt, (\x. x) ff>"))
    assert e == Pair(TT(), HOLE)
    assert r == parse(r"(\x. x) ff")
    assert plug(e, r) == parse(r"<tt, (\x. x) ff>")


def test_decompose_meas():
    t = App(Meas(), QVar("r"))
    assert decompose(t) == (HOLE, t)


def test_beta():
    ((p, c),) = small_step(closure(r"(\x. x) tt"))
    assert p == 1.0 and c.term == TT() and len(c.register) == 0


def test_coin():
    dist = {show_term(c.term): p for p, c in big_step(closure("meas (H new)"))}
    assert dist == pytest.approx({"tt": 0.5, "ff": 0.5}, abs=1e-9)


def test_if_true():
    reg = QuantumRegister.empty().fresh("r")
    ((p, c),) = small_step(Closure(reg, parse("if tt then #r else new")))
    assert p == 1.0 and c.term == QVar("r") and c.register.allclose(reg)


def test_value_is_a_fixpoint():
    c = closure(r"\x. x")
    ((p, v),) = big_step(c)
    assert p == 1.0 and v.same(c)


def test_bell_program():
    ((p, c),) = big_step(closure(r"(\<x,y>. CNOT <H x, y>) <new, new>"))
    assert p == pytest.approx(1.0)
    order = free_qvars(c.term)
    assert len(order) == 2
    assert np.allclose(c.register.reorder(order), bell_state(), atol=1e-9)


def test_measured_bell_pair_is_correlated():
    dist = {show_term(c.term): p for p, c in big_step(closure(r"let <a,b> = CNOT <H new, new> in <meas a, meas b>"))}
    assert dist == pytest.approx({"<tt, tt>": 0.5, "<ff, ff>": 0.5}, abs=1e-9)


def test_substitute_avoids_capture():
    t = substitute(parse(r"\y. x y"), "x", Var("y"))
    assert isinstance(t, Lam) and t.var != "y"


def test_parse_type():
    assert parse_type("Q -o B") == Lolli(QUBIT, BOOL)
    assert parse_type("Q * Q -o Q") == Lolli(Tens(QUBIT, QUBIT), QUBIT)


# -- properties over generated programs -------------------------------------------------------

@given(st.integers(0, 100_000))
def test_show_parse_roundtrip(seed):
    t = random_program(seed)
    assert parse(show_term(t)) == t


@given(st.integers(0, 100_000))
def test_subject_reduction(seed):
    t = random_program(seed)
    ty = typecheck(t).type
    todo = [closure(t)]
    while todo:
        c = todo.pop()
        if is_value(c.term):
            continue
        branches = small_step(c)
        assert sum(p for p, _ in branches) == pytest.approx(1.0)
        for _, nxt in branches:
            d = typecheck(nxt.term, expect=ty)
            assert sorted(e.name for e in d.ctx if e.kind == "q") == sorted(nxt.register.qubits)
            todo.append(nxt)


@given(st.integers(0, 100_000))
def test_big_step_is_a_distribution(seed):
    t = random_program(seed, ProgramGenConfig(max_qubits=4))
    dist = big_step(closure(t))
    assert sum(p for p, _ in dist) == pytest.approx(1.0, abs=1e-9)
    assert all(is_value(c.term) for _, c in dist)
