"""Cut elimination: redexes, rewriting steps, strategies, the termination
measure, and distribution-valued reduction of quantum nets."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace
from typing import Mapping, Union

import numpy as np

from .canon import canonical_code
from .correctness import polarized_order
from .formula import Polarity, polarity_of, weight
from .net import Edge, Link, Net, QuantumNet, Sort
from .qregister import BUILTIN_GATES, TOL, UnitarySpec


class RedexKind(enum.Enum):
    AX_CUT = "AxCut"
    TENSOR_PAR = "TensorPar"
    SYNC_AX = "SyncAx"
    SYNC_CUT = "SyncCut"
    SYNC_TENSOR = "SyncTensor"
    SYNC_PAR = "SyncPar"
    SYNC_ONES = "SyncOnes"
    BOX_OPEN = "BoxOpen"
    Q_FRESH_ONE = "QFreshOne"
    Q_SYNC_UNITARY = "QSyncUnitary"
    Q_BOX_MEASURE = "QBoxMeasure"

    @property
    def rank(self) -> int:
        return _RANK[self]


_RANK = {k: i for i, k in enumerate(RedexKind)}
QUANTUM_KINDS = {RedexKind.Q_FRESH_ONE, RedexKind.Q_SYNC_UNITARY, RedexKind.Q_BOX_MEASURE}


@dataclass(frozen=True)
class Redex:
    kind: RedexKind
    site: tuple[int, ...]
    port: int | None = None

    def key(self):
        return (self.kind.rank, min(self.site), self.site, -1 if self.port is None else self.port)


class NotARedex(ValueError):
    pass


class UnwiredQubit(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Measure:
    major: int
    minor: int


@dataclass(frozen=True)
class TraceStep:
    redex: Redex
    measure: Measure | None
    prob: float = 1.0

    def to_json(self, step: int) -> dict:
        return {
            "step": step,
            "redexKind": self.redex.kind.value,
            "site": list(self.redex.site),
            "measureMajor": None if self.measure is None else self.measure.major,
            "measureMinor": None if self.measure is None else self.measure.minor,
            "prob": self.prob,
        }


AnyNet = Union[Net, QuantumNet]


# -- redex search --------------------------------------------------------------------

def _src(n: Net, e: int) -> Link | None:
    s = n.edges[e].src
    return None if s is None else n.links[s[0]]


def _is_lock(n: Net, e: int) -> int | None:
    s = n.edges[e].src
    if s is not None and s[1] == 0 and n.links[s[0]].sort is Sort.BOT:
        return s[0]
    return None


def find_redexes(net: AnyNet, final_readout: bool = True) -> list[Redex]:
    """Every rule instance at depth 0, in strategy order.

    Passing a QuantumNet switches on the quantum rules.  With
    ``final_readout`` an unwired one link is wired once nothing else applies.
    """
    quantum = isinstance(net, QuantumNet)
    n = net.net if quantum else net
    wired = set(net.wiring.values()) if quantum else set()
    out: list[Redex] = []
    for lid, l in n.links.items():
        if l.box is not None:
            continue
        if l.sort is Sort.CUT:
            p0, p1 = l.premisses
            a, b = _src(n, p0), _src(n, p1)
            for k, s in enumerate((a, b)):
                other = (b, a)[k]
                if s.sort is Sort.AX and other.id != s.id:
                    out.append(Redex(RedexKind.AX_CUT, (s.id, lid)))
            sorts = {a.sort, b.sort}
            if sorts == {Sort.TENSOR, Sort.PAR}:
                t, p = (a, b) if a.sort is Sort.TENSOR else (b, a)
                out.append(Redex(RedexKind.TENSOR_PAR, (lid, t.id, p.id)))
            for one, lock_edge in ((a, p1), (b, p0)):
                bot = _is_lock(n, lock_edge)
                if one.sort is not Sort.ONE or bot is None:
                    continue
                if not quantum:
                    out.append(Redex(RedexKind.BOX_OPEN, (one.id, lid, bot)))
                elif one.id in wired:
                    out.append(Redex(RedexKind.Q_BOX_MEASURE, (one.id, lid, bot)))
                else:
                    out.append(Redex(RedexKind.Q_FRESH_ONE, (one.id,)))
        elif l.sort is Sort.SYNC:
            srcs = [_src(n, e) for e in l.premisses]
            for i, (e, s) in enumerate(zip(l.premisses, srcs)):
                pol = polarity_of(n.type_of(e))
                if s.sort is Sort.AX and pol is Polarity.POSITIVE:
                    other = s.conclusions[1 - n.edges[e].src[1]]
                    if n.edges[other].dst is None or n.edges[other].dst[0] != lid:
                        out.append(Redex(RedexKind.SYNC_AX, (lid, s.id), i))
                elif s.sort is Sort.TENSOR:
                    out.append(Redex(RedexKind.SYNC_TENSOR, (lid, s.id), i))
                elif s.sort is Sort.PAR:
                    out.append(Redex(RedexKind.SYNC_PAR, (lid, s.id), i))
            for i, f in enumerate(l.conclusions):
                d = n.edges[f].dst
                if d is None or polarity_of(n.type_of(f)) is not Polarity.NEGATIVE:
                    continue
                c = n.links[d[0]]
                if c.sort is Sort.CUT:
                    h = c.premisses[1 - d[1]]
                    if n.edges[h].src[0] != lid:
                        out.append(Redex(RedexKind.SYNC_CUT, (lid, c.id), i))
            if all(s.sort is Sort.ONE for s in srcs):
                if not quantum or l.label is None:
                    out.append(Redex(RedexKind.SYNC_ONES, (lid,)))
                else:
                    unwired = [s.id for s in srcs if s.id not in wired]
                    if unwired:
                        out.extend(Redex(RedexKind.Q_FRESH_ONE, (o,)) for o in unwired)
                    else:
                        out.append(Redex(RedexKind.Q_SYNC_UNITARY, (lid,)))
    if quantum and final_readout and not out:
        out = [
            Redex(RedexKind.Q_FRESH_ONE, (lid,))
            for lid, l in n.links.items()
            if l.sort is Sort.ONE and l.box is None and lid not in wired
        ]
    uniq = {r: None for r in out}
    return sorted(uniq, key=Redex.key)


# -- in-place editing of a copied net ------------------------------------------------

class _Edit:
    def __init__(self, n: Net):
        self.links: dict[int, Link] = dict(n.links)
        self.edges: dict[int, Edge] = dict(n.edges)
        self.concl: list[int] = list(n.conclusions)
        self._next_edge = max(self.edges, default=-1) + 1
        self._next_link = max(self.links, default=-1) + 1

    def new_link_id(self) -> int:
        self._next_link += 1
        return self._next_link - 1

    def new_edge(self, ty, src=None, dst=None) -> int:
        eid = self._next_edge
        self._next_edge += 1
        self.edges[eid] = Edge(eid, ty, src, dst)
        return eid

    def set_link(self, lid, sort, premisses, conclusions, label=None, box=None, contents=0):
        """(Re)define a link and point its edges at it."""
        self.links[lid] = Link(lid, sort, tuple(premisses), tuple(conclusions), label, box, contents)
        for port, e in enumerate(premisses):
            self.edges[e] = replace(self.edges[e], dst=(lid, port))
        for port, e in enumerate(conclusions):
            self.edges[e] = replace(self.edges[e], src=(lid, port))

    def take_over(self, old: int, new: int):
        """``new`` goes wherever ``old`` went."""
        d = self.edges[old].dst
        self.edges[new] = replace(self.edges[new], dst=d)
        if d is None:
            self.concl[self.concl.index(old)] = new
        else:
            l = self.links[d[0]]
            prem = list(l.premisses)
            prem[d[1]] = new
            self.links[d[0]] = replace(l, premisses=tuple(prem))

    def drop_edges(self, *es):
        for e in es:
            del self.edges[e]

    def drop_links(self, *ls):
        for l in ls:
            del self.links[l]

    def finish(self) -> Net:
        return Net(dict(sorted(self.links.items())), dict(sorted(self.edges.items())), tuple(self.concl))


def _ax_cut(n: Net, a: int, c: int) -> Net:
    ed = _Edit(n)
    cut = n.links[c]
    k = 0 if n.edges[cut.premisses[0]].src[0] == a else 1
    e, f = cut.premisses[k], cut.premisses[1 - k]
    ax = n.links[a]
    g = ax.conclusions[1 - n.edges[e].src[1]]
    ed.take_over(g, f)
    ed.drop_links(a, c)
    ed.drop_edges(e, g)
    return ed.finish()


def _tensor_par(n: Net, c: int, t: int, p: int) -> Net:
    ed = _Edit(n)
    cut = n.links[c]
    tl, pl = n.links[t], n.links[p]
    tensor_first = n.edges[cut.premisses[0]].src[0] == t
    for x, y in zip(tl.premisses, pl.premisses):
        pair = (x, y) if tensor_first else (y, x)
        ed.set_link(ed.new_link_id(), Sort.CUT, pair, (), box=cut.box)
    ed.drop_links(c, t, p)
    ed.drop_edges(tl.conclusions[0], pl.conclusions[0])
    return ed.finish()


def _sync_connective(n: Net, s: int, t: int, i: int) -> Net:
    ed = _Edit(n)
    sl, tl = n.links[s], n.links[t]
    e, f = sl.premisses[i], sl.conclusions[i]
    a, b = tl.premisses
    a2 = ed.new_edge(n.type_of(a))
    b2 = ed.new_edge(n.type_of(b))
    prem = sl.premisses[:i] + (a, b) + sl.premisses[i + 1:]
    concl = sl.conclusions[:i] + (a2, b2) + sl.conclusions[i + 1:]
    ed.set_link(s, Sort.SYNC, prem, concl, sl.label, sl.box)
    ed.set_link(t, tl.sort, (a2, b2), (f,), box=tl.box)
    ed.drop_edges(e)
    return ed.finish()


def _sync_ax(n: Net, s: int, a: int, i: int) -> Net:
    # the sync moves to the dual side of the axiom; targets of f and g stay put
    ed = _Edit(n)
    sl, al = n.links[s], n.links[a]
    e, f = sl.premisses[i], sl.conclusions[i]
    k = n.edges[e].src[1]
    g = al.conclusions[1 - k]
    g2 = ed.new_edge(n.type_of(g))
    concl = [None, None]
    concl[k], concl[1 - k] = f, g2
    ed.set_link(a, Sort.AX, (), concl, box=al.box)
    prem = sl.premisses[:i] + (g2,) + sl.premisses[i + 1:]
    conc = sl.conclusions[:i] + (g,) + sl.conclusions[i + 1:]
    ed.set_link(s, Sort.SYNC, prem, conc, sl.label, sl.box)
    ed.drop_edges(e)
    return ed.finish()


def _sync_cut(n: Net, s: int, c: int, i: int) -> Net:
    ed = _Edit(n)
    sl, cl = n.links[s], n.links[c]
    e, f = sl.premisses[i], sl.conclusions[i]
    k = n.edges[f].dst[1]
    h = cl.premisses[1 - k]
    f2 = ed.new_edge(n.type_of(h))
    cp = [None, None]
    cp[k], cp[1 - k] = e, f2
    ed.set_link(c, Sort.CUT, cp, (), box=cl.box)
    prem = sl.premisses[:i] + (h,) + sl.premisses[i + 1:]
    conc = sl.conclusions[:i] + (f2,) + sl.conclusions[i + 1:]
    ed.set_link(s, Sort.SYNC, prem, conc, sl.label, sl.box)
    ed.drop_edges(f)
    return ed.finish()


def _sync_ones(n: Net, s: int) -> Net:
    ed = _Edit(n)
    sl = n.links[s]
    for e, c in zip(sl.premisses, sl.conclusions):
        o = n.edges[e].src[0]
        ed.set_link(o, Sort.ONE, (), (c,), box=n.links[o].box)
    ed.drop_links(s)
    ed.drop_edges(*sl.premisses)
    return ed.finish()


def _box_open(n: Net, o: int, c: int, b: int, choice: int) -> Net:
    bl = n.links[b]
    if not 0 <= choice < bl.contents:
        raise NotARedex(f"box {b} has no content {choice}")
    ed = _Edit(n)
    outer = n.outer(b)
    inner = n.inner(b, choice)
    for o_e, i_e in zip(outer, inner):
        ed.take_over(o_e, i_e)
    for lid in n.content_links(b, choice, hereditary=False):
        ed.links[lid] = replace(ed.links[lid], box=bl.box)
    doomed = {o, c, b}
    for other in range(bl.contents):
        if other != choice:
            doomed.update(n.content_links(b, other))
    for lid in doomed:
        for e in n.links[lid].conclusions:
            ed.edges.pop(e, None)
    ed.drop_edges(*[e for e in outer if e in ed.edges])
    ed.drop_links(*doomed)
    return ed.finish()


def _apply_plain(n: Net, r: Redex, choice: int = 0) -> Net:
    k, s = r.kind, r.site
    if k is RedexKind.AX_CUT:
        return _ax_cut(n, *s)
    if k is RedexKind.TENSOR_PAR:
        return _tensor_par(n, *s)
    if k in (RedexKind.SYNC_TENSOR, RedexKind.SYNC_PAR):
        return _sync_connective(n, s[0], s[1], r.port)
    if k is RedexKind.SYNC_AX:
        return _sync_ax(n, s[0], s[1], r.port)
    if k is RedexKind.SYNC_CUT:
        return _sync_cut(n, s[0], s[1], r.port)
    if k is RedexKind.SYNC_ONES:
        return _sync_ones(n, s[0])
    if k is RedexKind.BOX_OPEN:
        return _box_open(n, *s, choice)
    raise NotARedex(f"{k.value} needs a quantum net")


def _fresh_name(used) -> str:
    k = 0
    while f"q{k}" in used:
        k += 1
    return f"q{k}"


def _apply_quantum(qn: QuantumNet, r: Redex, gates: Mapping[str, UnitarySpec]) -> list[tuple[float, QuantumNet]]:
    n = qn.net
    if r.kind is RedexKind.Q_FRESH_ONE:
        name = _fresh_name(qn.wiring)
        wiring = dict(qn.wiring)
        wiring[name] = r.site[0]
        return [(1.0, QuantumNet(n, qn.register.fresh(name), wiring))]
    if r.kind is RedexKind.Q_SYNC_UNITARY:
        s = n.links[r.site[0]]
        wires = []
        for e in s.premisses:
            name = qn.wire_of(n.edges[e].src[0])
            if name is None:
                raise UnwiredQubit(f"sync {s.id} is fed by an unwired one link")
            wires.append(name)
        if s.label not in gates:
            raise KeyError(f"unknown gate {s.label!r}")
        reg = qn.register.apply(gates[s.label], wires)
        return [(1.0, QuantumNet(_sync_ones(n, s.id), reg, qn.wiring))]
    if r.kind is RedexKind.Q_BOX_MEASURE:
        o, c, b = r.site
        name = qn.wire_of(o)
        contents = n.links[b].contents
        if contents > 2:
            raise NotARedex(f"box {b} has {contents} contents; measurement needs at most two")
        wiring = {k: v for k, v in qn.wiring.items() if k != name}
        out = []
        for bit in (0, 1):
            p = qn.register.prob(name, bit)
            if p <= 1e-12:
                continue
            reg = qn.register.project(name, bit)
            choice = bit if contents == 2 else 0
            out.append((p, QuantumNet(_box_open(n, o, c, b, choice), reg, wiring)))
        return out
    return [(1.0, QuantumNet(_apply_plain(n, r), qn.register, qn.wiring))]


def step(net: AnyNet, r: Redex, choice: int = 0, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES,
         checked: bool = False) -> list[tuple[float, AnyNet]]:
    """One rewriting step as a list of (probability, result)."""
    if not checked and r not in find_redexes(net):
        raise NotARedex(f"{r} is not a redex of this net")
    if isinstance(net, QuantumNet):
        return _apply_quantum(net, r, gates)
    return [(1.0, _apply_plain(net, r, choice))]


# -- measure ---------------------------------------------------------------------------

def measure(n: Net) -> Measure:
    syncs = n.links_of(Sort.SYNC)
    w = sum(weight(n.type_of(e)) for s in syncs for e in s.premisses)
    order = polarized_order(n)
    ranked = {l.id for l in n.links.values() if l.box is None and l.sort in (Sort.AX, Sort.CUT)}
    rho = 0
    for s in syncs:
        if s.box is None:
            rho += sum(1 for a in order.predecessors(s.id) if a in ranked)
    return Measure(len(n.links) + w, rho)


# -- strategies ------------------------------------------------------------------------

def _strategy_rng(strategy) -> random.Random | None:
    if strategy in (None, "det"):
        return None
    if isinstance(strategy, str) and strategy.startswith("seed:"):
        strategy = int(strategy[5:])
    if isinstance(strategy, int):
        return random.Random(strategy)
    raise ValueError(f"unknown strategy {strategy!r}")


def normalize(n: Net, strategy="det", record: bool = False, max_steps: int = 100_000):
    """Reduce a plain net to normal form.  Returns (normal form, trace).

    ``strategy`` is "det", "seed:N" or an int seed; it affects the trace
    and, on multi-boxes, which content is opened.
    """
    rng = _strategy_rng(strategy)
    trace: list[TraceStep] = []
    for _ in range(max_steps):
        rs = find_redexes(n)
        if not rs:
            return n, trace
        r = rs[0] if rng is None else rng.choice(rs)
        choice = 0
        if r.kind is RedexKind.BOX_OPEN and rng is not None:
            choice = rng.randrange(n.links[r.site[2]].contents)
        if record:
            trace.append(TraceStep(r, measure(n)))
        n = _apply_plain(n, r, choice)
    raise RuntimeError(f"no normal form within {max_steps} steps")


def normal_forms(n: Net, limit: int = 10_000) -> list[Net]:
    """All normal forms reachable by choosing multi-box contents, up to isomorphism."""
    todo, seen, out = [n], set(), {}
    while todo:
        cur = todo.pop()
        rs = find_redexes(cur)
        opens = [r for r in rs if r.kind is RedexKind.BOX_OPEN and cur.links[r.site[2]].contents > 1]
        if not rs:
            out.setdefault(canonical_code(cur), cur)
            continue
        r = opens[0] if opens and len(opens) == len(rs) else next(x for x in rs if x not in opens)
        choices = range(cur.links[r.site[2]].contents) if r in opens else [0]
        for ch in choices:
            nxt = _apply_plain(cur, r, ch)
            key = canonical_code(nxt)
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > limit:
                raise RuntimeError("too many intermediate nets")
            todo.append(nxt)
    return list(out.values())


# -- distributions ---------------------------------------------------------------------

def same_quantum_net(a: QuantumNet, b: QuantumNet, tol: float = TOL) -> bool:
    if canonical_code(a.net) != canonical_code(b.net):
        return False
    la, va = a.canonical_register()
    lb, vb = b.canonical_register()
    return la == lb and np.allclose(va, vb, atol=tol, rtol=0)


def aggregate(branches, tol: float = TOL) -> list[tuple[float, QuantumNet]]:
    """Merge equal quantum nets, summing their probabilities."""
    groups: dict[tuple, list[list]] = {}
    for p, qn in branches:
        bucket = groups.setdefault(canonical_code(qn.net), [])
        for entry in bucket:
            if same_quantum_net(entry[1], qn, tol):
                entry[0] += p
                break
        else:
            bucket.append([p, qn])
    return [(p, qn) for bucket in groups.values() for p, qn in bucket]


def multi_step(qn: AnyNet, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES,
               max_steps: int = 100_000) -> list[tuple[float, QuantumNet]]:
    """Reduce to normal forms, branching on measurements."""
    if isinstance(qn, Net):
        qn = QuantumNet.plain(qn)
    leaves = []
    todo = [(1.0, qn)]
    steps = 0
    while todo:
        p, cur = todo.pop()
        rs = find_redexes(cur)
        if not rs:
            leaves.append((p, cur))
            continue
        steps += 1
        if steps > max_steps:
            raise RuntimeError(f"no normal form within {max_steps} steps")
        todo.extend((p * q, nxt) for q, nxt in _apply_quantum(cur, rs[0], gates))
    return aggregate(leaves)


def distributions_equal(d1, d2, tol: float = TOL) -> bool:
    """Equality of two aggregated quantum-net distributions."""
    d1, d2 = aggregate(d1, tol), aggregate(d2, tol)
    if len(d1) != len(d2):
        return False
    used = set()
    for p, a in d1:
        for j, (q, b) in enumerate(d2):
            if j not in used and abs(p - q) <= tol and same_quantum_net(a, b, tol):
                used.add(j)
                break
        else:
            return False
    return True


__all__ = [
    "RedexKind", "Redex", "Measure", "TraceStep", "NotARedex", "UnwiredQubit",
    "find_redexes", "step", "measure", "normalize", "normal_forms",
    "multi_step", "aggregate", "same_quantum_net", "distributions_equal",
]
