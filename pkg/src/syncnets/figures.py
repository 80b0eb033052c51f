"""Small reference nets used throughout the tests and the CLI demos."""

from __future__ import annotations

from .formula import ONE, Var, parse_formula
from .net import Edge, Link, Net, NetBuilder, Sort, check

ALPHA = Var("a")
BOOL_TYPE = parse_formula("(~a | ~a) | (a * a)")


def _boolean(swap: bool) -> Net:
    b = NetBuilder()
    p1, n1 = b.ax(ALPHA)
    p2, n2 = b.ax(ALPHA)
    inputs = b.par(n1, n2)
    outputs = b.tensor(p2, p1) if swap else b.tensor(p1, p2)
    return b.finish([b.par(inputs, outputs)])


def false_net() -> Net:
    """Swaps its two inputs: leftmost input exits rightmost."""
    return _boolean(swap=True)


def true_net() -> Net:
    return _boolean(swap=False)


def not_net() -> Net:
    """Cut-free net for the negation combinator, conclusion ~B | B."""
    b = NetBuilder()
    # x : B is consumed through ~B = (a * a) * (~a | ~a)
    x_in1, y_neg = b.ax(ALPHA)
    x_in2, z_neg = b.ax(ALPHA)
    o1, x_out1 = b.ax(ALPHA)
    o2, x_out2 = b.ax(ALPHA)
    # x receives <z, y>: its first input is linked to the second argument
    x_side = b.tensor(b.tensor(x_in1, x_in2), b.par(x_out1, x_out2))
    result = b.par(b.par(z_neg, y_neg), b.tensor(o1, o2))
    return b.finish([b.par(x_side, result)])


def apply_nets(fun: Net, arg: Net) -> Net:
    """Application: cut fun's conclusion ~A | B against arg * ~B; conclusion B."""
    b = NetBuilder()
    (f,) = b.embed(fun)
    (u,) = b.embed(arg)
    out_ty = b.type_of(f).right
    pos, neg = b.ax(out_ty)
    b.cut(f, b.tensor(u, neg))
    return b.finish([pos])


def not_true_net() -> Net:
    return apply_nets(not_net(), true_net())


def polarity_counterexample() -> Net:
    """An axiom whose bot and 1 conclusions meet at one sync link."""
    b = NetBuilder()
    one, bot = b.ax(ONE)
    b.sync([bot, one])
    return b.finish()


def deadlock_net() -> Net:
    """Three one links wired through two syncs so that each sync waits on the other.

    Not buildable bottom-up, so it is spelled out link by link.
    """
    s1, s2 = 3, 4
    links = {
        0: Link(0, Sort.ONE, (), (0,)),
        1: Link(1, Sort.ONE, (), (1,)),
        2: Link(2, Sort.ONE, (), (2,)),
        s1: Link(s1, Sort.SYNC, (0, 6, 2), (3, 4, 5)),
        s2: Link(s2, Sort.SYNC, (1, 5), (6, 7)),
    }
    ends = {
        0: ((0, 0), (s1, 0)), 1: ((1, 0), (s2, 0)), 2: ((2, 0), (s1, 2)),
        3: ((s1, 0), None), 4: ((s1, 1), None), 5: ((s1, 2), (s2, 1)),
        6: ((s2, 0), (s1, 1)), 7: ((s2, 1), None),
    }
    edges = {e: Edge(e, ONE, src, dst) for e, (src, dst) in ends.items()}
    return check(Net(links, edges, (3, 4, 7)))


def sync_tensor_net() -> Net:
    """A sync on 1 * 1 feeding a cut; nine links, one sync/tensor redex."""
    b = NetBuilder()
    one1, bot1 = b.ax(ONE)
    one2, bot2 = b.ax(ONE)
    (s,) = b.sync([b.tensor(one1, one2)])
    one3, bot3 = b.ax(ONE)
    one4, bot4 = b.ax(ONE)
    b.cut(s, b.par(bot3, bot4))
    rest = b.tensor(one3, one4)
    return b.finish([bot1, bot2, rest])


FIGURES = {
    "false": false_net,
    "true": true_net,
    "not": not_net,
    "not_true": not_true_net,
    "polarity_counterexample": polarity_counterexample,
    "deadlock": deadlock_net,
    "sync_tensor": sync_tensor_net,
}

__all__ = [
    "ALPHA", "BOOL_TYPE", "FIGURES", "false_net", "true_net", "not_net",
    "not_true_net", "apply_nets", "polarity_counterexample", "deadlock_net", "sync_tensor_net",
]
