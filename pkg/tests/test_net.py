from dataclasses import replace

import pytest

from syncnets.figures import false_net
from syncnets.formula import BOT, ONE, Par, Tensor, Var
from syncnets.net import Edge, Link, Net, NetBuilder, NetError, Sort, check, content_net, sync_paths_from, validate, zero_graph
from syncnets.translate import measurement_net


def kinds(errs):
    return {e.kind for e in errs}


def test_false_net_validates():
    assert validate(false_net()) == []


def test_sync_with_mismatched_port_types():
    b = NetBuilder()
    one, bot = b.ax(ONE)
    (s,) = b.sync([one])
    n = b.finish()
    # retype the sync conclusion behind the builder's back
    n = Net(dict(n.links), {**n.edges, s: replace(n.edges[s], type=Tensor(ONE, ONE))}, n.conclusions)
    assert "TypeMismatch" in kinds(validate(n))


def test_unpolarized_sync_rejected():
    b = NetBuilder()
    a, _ = b.ax(Par(BOT, ONE))
    b.sync([a])
    with pytest.raises(NetError) as exc:
        b.finish()
    assert "UnpolarizedSync" in kinds(exc.value.errors)


def test_conclusions_must_be_the_pending_edges():
    n = false_net()
    bad = Net(n.links, n.edges, ())
    assert "ConclusionMismatch" in kinds(validate(bad))


def test_edge_used_twice():
    b = NetBuilder()
    p, _ = b.ax(Var("a"))
    b.tensor(p, b.one())
    with pytest.raises(NetError):
        b.par(p, b.one())


def test_gate_arity_checked_when_a_table_is_given():
    b = NetBuilder()
    one, _ = b.ax(ONE)
    b.sync([one], label="CNOT")
    n = b.finish()
    assert validate(n) == []
    assert "GateArity" in kinds(validate(n, {"CNOT": 2}))
    assert "UnknownGate" in kinds(validate(n, {}))


def test_box_leak_detected():
    n = measurement_net()
    inner = next(l for l in n.links.values() if l.box is not None)
    moved = {**n.links, inner.id: replace(inner, box=None)}
    assert "BoxLeak" in kinds(validate(Net(moved, n.edges, n.conclusions)))


def test_zero_graph_without_boxes_is_a_copy():
    n = false_net()
    z = zero_graph(n)
    assert dict(z.links) == dict(n.links) and dict(z.edges) == dict(n.edges)


def test_zero_graph_of_measurement_collapses_the_box():
    n = measurement_net()
    z = zero_graph(n)
    boxes = z.links_of(Sort.BOX)
    assert len(boxes) == 1
    (box,) = boxes
    assert [z.type_of(e) for e in box.conclusions] == [BOT, ONE]
    assert not any(l.box is not None for l in z.links.values())
    outside = [l for l in n.links.values() if l.box is None and l.sort is not Sort.BOT]
    assert all(z.links[l.id] == l for l in outside)


def _nested() -> Net:
    inner = NetBuilder()
    inner.ax(ONE)
    inner_net = inner.finish()
    mid = NetBuilder()
    lock, outer = mid.bot([inner_net])
    mid_net = mid.finish()
    b = NetBuilder()
    b.bot([mid_net])
    return b.finish()


def test_zero_graph_of_nested_boxes_keeps_only_the_outer_box():
    n = _nested()
    assert len(n.bots()) == 2
    z = zero_graph(n)
    assert len(z.links_of(Sort.BOX)) == 1
    assert len(z.links) == 1


def test_content_net_is_a_net():
    n = _nested()
    outer = next(b for b in n.bots() if b.box is None)
    c = content_net(n, outer.id, 0)
    assert check(c) is c
    assert len(c.bots()) == 1


def test_sync_paths_trivial():
    n = false_net()
    assert sync_paths_from(n, n.conclusions[0]) == {n.conclusions[0]}


def test_sync_path_one_step():
    b = NetBuilder()
    one, bot = b.ax(ONE)
    (f,) = b.sync([bot])
    n = b.finish()
    assert sync_paths_from(n, bot) == {bot, f}


def _closure_via_syncs(n: Net, e: int) -> set[int]:
    """Fixed point of the one-step relation, computed independently."""
    rel = set()
    for l in n.links_of(Sort.SYNC):
        for p, c in zip(l.premisses, l.conclusions):
            rel |= {(p, c), (c, p)}
    reach = {e}
    while True:
        more = {y for x, y in rel if x in reach} - reach
        if not more:
            return reach
        reach |= more


def test_chain_of_two_syncs():
    b = NetBuilder()
    one, bot = b.ax(ONE)
    (f,) = b.sync([one])
    (g,) = b.sync([f])
    n = b.finish()
    assert sync_paths_from(n, one) == {one, f, g} == _closure_via_syncs(n, one)
    assert sync_paths_from(n, g) == _closure_via_syncs(n, g)


def test_links_dataclass_defaults():
    l = Link(0, Sort.ONE, (), (0,))
    assert l.box is None and l.contents == 0 and l.label is None
    assert Edge(0, ONE, (0, 0), None).dst is None
