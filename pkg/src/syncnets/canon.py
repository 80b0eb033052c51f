"""Canonical labelling of nets, for isomorphism tests and aggregation keys.

Ports are ordered, so a traversal from a fixed anchor determines every id.
Axiom conclusions and cut premisses are unordered; their ports are ranked
by the printed type instead, which differs between a formula and its dual.
The part reachable from the ordered conclusions is labelled first; closed
leftovers are labelled from whichever start link gives the smallest code.
"""

from __future__ import annotations

from collections import deque

from .formula import show
from .net import Net, Sort

_SYMMETRIC = (Sort.AX, Sort.CUT)


def _ordered(net: Net, edges: tuple[int, ...], sort: Sort) -> tuple[int, ...]:
    if sort in _SYMMETRIC:
        return tuple(sorted(edges, key=lambda e: show(net.edges[e].type)))
    return edges


def _port(net: Net, end) -> tuple[int, int]:
    lid, p = end
    l = net.links[lid]
    if l.sort not in _SYMMETRIC:
        return lid, p
    ports = l.conclusions if l.sort is Sort.AX else l.premisses
    return lid, _ordered(net, ports, l.sort).index(ports[p])


def _bfs(net: Net, seeds, links: dict[int, int], edges: dict[int, int]) -> list[int]:
    """Extend ``links``/``edges`` labellings from ``seeds``; return newly labelled links."""
    new_links = []
    queue = deque(seeds)
    while queue:
        kind, x = queue.popleft()
        if kind == "e":
            e = net.edges[x]
            for end in (e.src, e.dst):
                if end is not None and end[0] not in links:
                    links[end[0]] = len(links)
                    new_links.append(end[0])
                    queue.append(("l", end[0]))
        else:
            l = net.links[x]
            for y in _ordered(net, l.premisses, l.sort) + _ordered(net, l.conclusions, l.sort):
                if y not in edges:
                    edges[y] = len(edges)
                    queue.append(("e", y))
    return new_links


def _link_code(net: Net, lid: int, links, edges):
    l = net.links[lid]
    box = (-1, -1) if l.box is None else (links.get(l.box[0], -2), l.box[1])
    return (
        links[lid], l.sort.value, l.label or "", l.contents, box,
        tuple(edges[e] for e in _ordered(net, l.premisses, l.sort)),
        tuple(edges[e] for e in _ordered(net, l.conclusions, l.sort)),
    )


def _edge_code(net: Net, eid: int, links, edges):
    e = net.edges[eid]
    src = (-1, -1) if e.src is None else (links[e.src[0]], _port(net, e.src)[1])
    dst = (-1, -1) if e.dst is None else (links[e.dst[0]], _port(net, e.dst)[1])
    return (edges[eid], show(e.type), src, dst)


def _part_code(net, new_links, links, edges):
    lset = set(new_links)
    codes = [_link_code(net, i, links, edges) for i in new_links]
    ecodes = sorted(
        _edge_code(net, eid, links, edges) for eid in edges
        if (net.edges[eid].src and net.edges[eid].src[0] in lset)
        or (net.edges[eid].dst and net.edges[eid].dst[0] in lset)
    )
    return tuple(sorted(codes)), tuple(ecodes)


def canonical_labels(net: Net) -> tuple[tuple, dict[int, int], dict[int, int]]:
    """Return (code, link relabelling, edge relabelling)."""
    memo = net._memo.get("canon")
    if memo is not None:
        return memo
    links: dict[int, int] = {}
    edges: dict[int, int] = {}
    for c in net.conclusions:
        edges[c] = len(edges)
    _bfs(net, [("e", c) for c in net.conclusions], links, edges)
    parts = []
    while len(links) < len(net.links):
        best = None
        for start in sorted(net.links):
            if start in links:
                continue
            box = net.links[start].box
            if box is not None and box[0] not in links:
                continue
            trial_l, trial_e = dict(links), dict(edges)
            trial_l[start] = len(trial_l)
            new = [start] + _bfs(net, [("l", start)], trial_l, trial_e)
            code = _part_code(net, new, trial_l, trial_e)
            if best is None or code < best[0]:
                best = (code, trial_l, trial_e)
        code, links, edges = best
        parts.append(code)
    lcodes = tuple(sorted(_link_code(net, i, links, edges) for i in net.links))
    ecodes = tuple(sorted(_edge_code(net, i, links, edges) for i in net.edges))
    code = (len(net.conclusions), lcodes, ecodes)
    return net.register_memo("canon", (code, links, edges))


def canonical_code(net: Net) -> tuple:
    return canonical_labels(net)[0]


def iso_equal(a: Net, b: Net) -> bool:
    if len(a.links) != len(b.links) or len(a.edges) != len(b.edges):
        return False
    if len(a.conclusions) != len(b.conclusions):
        return False
    return canonical_code(a) == canonical_code(b)


def canonical_net(net: Net) -> Net:
    """A copy of ``net`` renumbered by its canonical labelling."""
    from dataclasses import replace

    _, lmap, emap = canonical_labels(net)
    links = {}
    for old, l in net.links.items():
        box = None if l.box is None else (lmap[l.box[0]], l.box[1])
        links[lmap[old]] = replace(
            l, id=lmap[old], box=box,
            premisses=tuple(emap[e] for e in l.premisses),
            conclusions=tuple(emap[e] for e in l.conclusions),
        )
    edges = {}
    for old, e in net.edges.items():
        src = None if e.src is None else (lmap[e.src[0]], e.src[1])
        dst = None if e.dst is None else (lmap[e.dst[0]], e.dst[1])
        edges[emap[old]] = replace(e, id=emap[old], src=src, dst=dst)
    return Net(dict(sorted(links.items())), dict(sorted(edges.items())), tuple(emap[c] for c in net.conclusions))
