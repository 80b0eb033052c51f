"""Correctness criterion, the polarized order on links, and net closure."""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (
    BOT,
    Bot,
    Formula,
    NegVar,
    One,
    Polarity,
    Tensor,
    Var,
    contains_bot,
    negate,
    is_polarized,
    polarity_of,
)
from .net import Net, NetBuilder, Sort, content_net

Step = tuple[int, str]  # (edge id, "down" = source to target, "up" = reverse)


@dataclass(frozen=True)
class SwitchingWitness:
    cycle: tuple[Step, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.cycle)

    def edges(self) -> list[int]:
        return [e for e, _ in self.cycle]


class CycleDetected(Exception):
    def __init__(self, links: list[int]):
        self.links = links
        super().__init__(f"polarized cycle through links {links}")


@dataclass(frozen=True)
class PolarizedOrder:
    pairs: frozenset[tuple[int, int]]
    layers: tuple[tuple[int, ...], ...]

    def below(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def predecessors(self, b: int) -> set[int]:
        return {a for a, c in self.pairs if c == b}


# -- switching structure --------------------------------------------------------------

def _restricted_at(n: Net, e: int, node: int, as_premiss: bool) -> bool:
    """Whether the edge end at ``node`` is one of the mutually exclusive ones."""
    sort = n.links[node].sort
    if sort is Sort.PAR:
        return as_premiss
    if sort is Sort.SYNC:
        positive = polarity_of(n.type_of(e)) is Polarity.POSITIVE
        # out-edges: positive conclusions and negative premisses
        return (not as_premiss) if positive else as_premiss
    return False


def _depth0_graph(n: Net):
    """Adjacency of the 0-graph: node -> [(edge, restricted here, other node, restricted there, dir)]."""
    nodes = [i for i, l in n.links.items() if l.box is None]
    adj: dict[int, list] = {i: [] for i in nodes}
    edges = []
    for eid, e in sorted(n.edges.items()):
        if e.src is None or e.dst is None:
            continue
        a, b = e.src[0], e.dst[0]
        if a not in adj or b not in adj:
            continue  # inside a box
        ra = _restricted_at(n, eid, a, as_premiss=False)
        rb = _restricted_at(n, eid, b, as_premiss=True)
        adj[a].append((eid, ra, b, rb, "down"))
        adj[b].append((eid, rb, a, ra, "up"))
        edges.append((eid, a, b, ra, rb))
    return adj, edges


def _blocks(adj) -> dict[int, int]:
    """Biconnected-component id per edge (multigraph aware, iterative Tarjan)."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    block_of: dict[int, int] = {}
    estack: list[int] = []
    counter = 0
    nblocks = 0
    for root in adj:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            node, via, it = stack[-1]
            pushed = False
            for eid, _, other, _, _ in it:
                if eid == via:
                    continue
                if other not in index:
                    estack.append(eid)
                    index[other] = low[other] = counter
                    counter += 1
                    stack.append((other, eid, iter(adj[other])))
                    pushed = True
                    break
                if index[other] < index[node]:
                    estack.append(eid)
                    low[node] = min(low[node], index[other])
                elif other == node and eid not in block_of:
                    # self loop: a block on its own
                    block_of[eid] = nblocks
                    nblocks += 1
            if pushed:
                continue
            stack.pop()
            if stack:
                parent = stack[-1][0]
                low[parent] = min(low[parent], low[node])
                if low[node] >= index[parent]:
                    while estack:
                        e = estack.pop()
                        block_of.setdefault(e, nblocks)
                        if e == via:
                            break
                    nblocks += 1
    return block_of


def find_switching_cycle(n: Net) -> SwitchingWitness:
    """Search the 0-graph of ``n`` for a switching cycle."""
    adj, edges = _depth0_graph(n)
    block = _blocks(adj)
    dead: set[int] = set()
    for eid, u, v, ru, rv in edges:
        if u == v:
            if not (ru and rv):
                return SwitchingWitness(((eid, "down"),))
            dead.add(eid)
            continue
        found = _cycle_through(adj, block, dead, eid, u, v, ru, rv)
        if found:
            return SwitchingWitness(tuple(found))
        dead.add(eid)
    return SwitchingWitness()


def _cycle_through(adj, block, dead, e0, u, v, ru, rv):
    b0 = block.get(e0)
    visited = {u, v}
    path = [(e0, "down")]
    stack = [(v, e0, rv, iter(adj[v]))]
    while stack:
        node, via, restricted_in, it = stack[-1]
        pushed = False
        for eid, r_here, other, r_there, direction in it:
            if eid == via or eid in dead or block.get(eid) != b0:
                continue
            if restricted_in and r_here:
                continue
            if other == u:
                if not (r_there and ru):
                    return path + [(eid, direction)]
                continue
            if other in visited:
                continue
            visited.add(other)
            path.append((eid, direction))
            stack.append((other, eid, r_there, iter(adj[other])))
            pushed = True
            break
        if not pushed:
            stack.pop()
            if len(path) > 1:
                visited.discard(node)
                path.pop()
    return None


def is_switching_path(n: Net, steps, closed: bool = False) -> bool:
    """Replay ``steps`` and check the switching-path conditions on the 0-graph."""
    steps = list(steps)
    if not steps:
        return False
    ends = []
    for eid, d in steps:
        e = n.edges.get(eid)
        if e is None or e.src is None or e.dst is None:
            return False
        if n.links[e.src[0]].box is not None or n.links[e.dst[0]].box is not None:
            return False
        a, b = (e.src[0], e.dst[0]) if d == "down" else (e.dst[0], e.src[0])
        ends.append((a, b))
    for (_, b), (c, _) in zip(ends, ends[1:]):
        if b != c:
            return False
    nodes = [a for a, _ in ends] + ([] if closed else [ends[-1][1]])
    if closed and ends[-1][1] != ends[0][0]:
        return False
    if len(set(nodes)) != len(nodes) or len({e for e, _ in steps}) != len(steps):
        return False

    def restricted(eid, node, d, arriving):
        # the end of the edge at ``node``: arriving down or leaving up means the target end
        at_target = (d == "down") == arriving
        return _restricted_at(n, eid, node, as_premiss=at_target)

    pairs = list(zip(steps, steps[1:]))
    if closed:
        pairs.append((steps[-1], steps[0]))
    for (e1, d1), (e2, d2) in pairs:
        e = n.edges[e1]
        node = e.dst[0] if d1 == "down" else e.src[0]
        if restricted(e1, node, d1, True) and restricted(e2, node, d2, False):
            return False
    return True


def is_correct(n: Net) -> bool:
    cached = n._memo.get("correct")
    if cached is not None:
        return cached
    ok = not find_switching_cycle(n)
    if ok:
        for b in n.bots():
            if b.box is not None:
                continue
            for c in range(b.contents):
                if not is_correct(content_net(n, b.id, c)):
                    ok = False
                    break
            if not ok:
                break
    return n.register_memo("correct", ok)


# -- polarized order ---------------------------------------------------------------------

def _polarized_node(n: Net, lid: int) -> bool:
    return all(is_polarized(n.type_of(e)) for e in n.links[lid].conclusions)


def polarized_successors(n: Net) -> dict[int, list[int]]:
    """Single polarized steps between depth-0 polarized links."""
    nodes = [i for i, l in sorted(n.links.items()) if l.box is None and _polarized_node(n, i)]
    succ: dict[int, list[int]] = {i: [] for i in nodes}
    for eid, e in sorted(n.edges.items()):
        if e.src is None or e.dst is None:
            continue
        a, b = e.src[0], e.dst[0]
        if a not in succ or b not in succ:
            continue
        pol = polarity_of(e.type)
        if pol is Polarity.POSITIVE:
            succ[a].append(b)
        elif pol is Polarity.NEGATIVE:
            succ[b].append(a)
    return succ


def polarized_order(n: Net) -> PolarizedOrder:
    succ = polarized_successors(n)
    # Kahn layering doubles as the cycle check
    indeg = {i: 0 for i in succ}
    for i in succ:
        for j in succ[i]:
            indeg[j] += 1
    layer = [i for i in succ if indeg[i] == 0]
    layers = []
    seen = 0
    while layer:
        layers.append(tuple(sorted(layer)))
        seen += len(layer)
        nxt = []
        for i in layer:
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    nxt.append(j)
        layer = nxt
    if seen != len(succ):
        raise CycleDetected(sorted(i for i in succ if indeg[i] > 0))
    pairs = set()
    for i in succ:
        todo, reach = list(succ[i]), set()
        while todo:
            j = todo.pop()
            if j in reach:
                continue
            reach.add(j)
            todo.extend(succ[j])
        pairs.update((i, j) for j in reach)
    return PolarizedOrder(frozenset(pairs), tuple(layers))


# -- closure --------------------------------------------------------------------------------

def _closing_net(b: NetBuilder, a: Formula) -> tuple[int, list[int]]:
    """Build the closing structure for ``a``: (main conclusion of type a, side conclusions)."""
    if isinstance(a, One):
        return b.one(), []
    if isinstance(a, Bot):
        main, other = b.ax(BOT)
        return main, [other]
    if isinstance(a, (Var, NegVar)):
        main, other = b.ax(a)
        return main, [other]
    left, ls = _closing_net(b, a.left)
    right, rs = _closing_net(b, a.right)
    main = b.tensor(left, right) if isinstance(a, Tensor) else b.par(left, right)
    return main, ls + rs


def closure(n: Net) -> Net:
    """Cut every conclusion containing bot against a closing structure for its dual."""
    b = NetBuilder()
    concl = b.embed(n)
    keep, extra = [], []
    for e in concl:
        ty = b.type_of(e)
        if contains_bot(ty):
            main, side = _closing_net(b, negate(ty))
            b.cut(e, main)
            extra.extend(side)
        else:
            keep.append(e)
    return b.finish(keep + extra)


__all__ = [
    "SwitchingWitness",
    "PolarizedOrder",
    "CycleDetected",
    "find_switching_cycle",
    "is_switching_path",
    "is_correct",
    "polarized_order",
    "polarized_successors",
    "closure",
]
