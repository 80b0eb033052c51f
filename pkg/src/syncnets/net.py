"""Proof structures: links, typed edges, boxes.

A box is owned by its bot link, which doubles as the box border.  The bot
link's conclusions are the lock (type bot) followed by the box's outer
conclusions Gamma; its premisses are the conclusions of each content, laid
out content after content, so content ``c`` port ``j`` is premiss
``c * len(Gamma) + j``.  Every link records its innermost enclosing box as
``(bot id, content index)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping

from .formula import (
    BOT,
    ONE,
    Formula,
    Par,
    Tensor,
    atom_addresses,
    is_atom,
    is_polarized,
    negate,
    show,
)


class Sort(str, enum.Enum):
    AX = "ax"
    CUT = "cut"
    TENSOR = "tensor"
    PAR = "par"
    ONE = "one"
    BOT = "bot"
    SYNC = "sync"
    # pseudo-node standing for a collapsed box, only found in zero graphs
    BOX = "box"


Port = tuple[int, int]
Container = tuple[int, int]


@dataclass(frozen=True)
class Link:
    id: int
    sort: Sort
    premisses: tuple[int, ...] = ()
    conclusions: tuple[int, ...] = ()
    label: str | None = None
    box: Container | None = None
    contents: int = 0


@dataclass(frozen=True)
class Edge:
    id: int
    type: Formula
    src: Port | None
    dst: Port | None


@dataclass(frozen=True)
class StructuralError:
    kind: str
    where: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind} at {self.where}: {self.detail}" if self.detail else f"{self.kind} at {self.where}"


class NetError(ValueError):
    def __init__(self, errors: list[StructuralError]):
        self.errors = errors
        super().__init__("; ".join(map(str, errors[:5])))


@dataclass(frozen=True, eq=False)
class Net:
    links: Mapping[int, Link]
    edges: Mapping[int, Edge]
    conclusions: tuple[int, ...]
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    # -- lookups ---------------------------------------------------------
    def link(self, i: int) -> Link:
        return self.links[i]

    def edge(self, i: int) -> Edge:
        return self.edges[i]

    def type_of(self, e: int) -> Formula:
        return self.edges[e].type

    def src_link(self, e: int) -> Link | None:
        src = self.edges[e].src
        return None if src is None else self.links[src[0]]

    def dst_link(self, e: int) -> Link | None:
        dst = self.edges[e].dst
        return None if dst is None else self.links[dst[0]]

    def links_of(self, *sorts: Sort) -> list[Link]:
        return [l for _, l in sorted(self.links.items()) if l.sort in sorts]

    def depth(self, link: int) -> int:
        d, box = 0, self.links[link].box
        while box is not None:
            d += 1
            box = self.links[box[0]].box
        return d

    def max_depth(self) -> int:
        return max((self.depth(i) for i in self.links), default=0)

    def at_depth0(self, link: int) -> bool:
        return self.links[link].box is None

    def edge_level(self, e: int) -> Container | None:
        """The box level an edge lives at: that of its source link."""
        src = self.edges[e].src
        if src is None:
            dst = self.edges[e].dst
            return None if dst is None else self.links[dst[0]].box
        return self.links[src[0]].box

    # -- boxes ------------------------------------------------------------
    def bots(self) -> list[Link]:
        return self.links_of(Sort.BOT)

    def lock(self, bot: int) -> int:
        return self.links[bot].conclusions[0]

    def outer(self, bot: int) -> tuple[int, ...]:
        return self.links[bot].conclusions[1:]

    def inner(self, bot: int, content: int) -> tuple[int, ...]:
        b = self.links[bot]
        k = len(b.conclusions) - 1
        return b.premisses[content * k:(content + 1) * k]

    def content_links(self, bot: int, content: int, hereditary: bool = True) -> list[int]:
        """Links inside content ``content`` of the box owned by ``bot``."""
        direct = [i for i, l in sorted(self.links.items()) if l.box == (bot, content)]
        if not hereditary:
            return direct
        out = []
        for i in direct:
            out.append(i)
            if self.links[i].sort is Sort.BOT:
                for c in range(self.links[i].contents):
                    out.extend(self.content_links(i, c))
        return out

    def is_inside(self, link: int, bot: int) -> bool:
        box = self.links[link].box
        while box is not None:
            if box[0] == bot:
                return True
            box = self.links[box[0]].box
        return False

    def register_memo(self, key, value):
        self._memo[key] = value
        return value

    def __repr__(self) -> str:
        return f"Net({len(self.links)} links, {len(self.edges)} edges, conclusions={list(self.conclusions)})"


# -- builder -------------------------------------------------------------------

class NetBuilder:
    """Bottom-up construction with dense ids.  Returned handles are edge ids."""

    def __init__(self):
        self.links: dict[int, Link] = {}
        self.edges: dict[int, Edge] = {}
        self._next_link = 0
        self._next_edge = 0
        self.container: Container | None = None

    def _link(self, sort: Sort, premisses=(), nconcl=(), label=None, contents=0) -> tuple[int, list[int]]:
        lid = self._next_link
        self._next_link += 1
        concl = []
        for port, ty in enumerate(nconcl):
            concl.append(self._edge(ty, (lid, port), None))
        for port, e in enumerate(premisses):
            self._plug(e, (lid, port))
        self.links[lid] = Link(lid, sort, tuple(premisses), tuple(concl), label, self.container, contents)
        return lid, concl

    def _edge(self, ty: Formula, src, dst) -> int:
        eid = self._next_edge
        self._next_edge += 1
        self.edges[eid] = Edge(eid, ty, src, dst)
        return eid

    def _plug(self, e: int, dst: Port):
        edge = self.edges[e]
        if edge.dst is not None:
            raise NetError([StructuralError("EdgeAlreadyUsed", f"edge {e}")])
        self.edges[e] = replace(edge, dst=dst)

    def type_of(self, e: int) -> Formula:
        return self.edges[e].type

    def ax(self, a: Formula) -> tuple[int, int]:
        """Axiom with conclusions (A, A-dual)."""
        _, (p, n) = self._link(Sort.AX, (), (a, negate(a)))
        return p, n

    def one(self) -> int:
        lid, (e,) = self._link(Sort.ONE, (), (ONE,))
        return e

    def tensor(self, a: int, b: int) -> int:
        ty = Tensor(self.type_of(a), self.type_of(b))
        _, (e,) = self._link(Sort.TENSOR, (a, b), (ty,))
        return e

    def par(self, a: int, b: int) -> int:
        ty = Par(self.type_of(a), self.type_of(b))
        _, (e,) = self._link(Sort.PAR, (a, b), (ty,))
        return e

    def cut(self, a: int, b: int) -> int:
        lid, _ = self._link(Sort.CUT, (a, b), ())
        return lid

    def sync(self, edges: Iterable[int], label: str | None = None) -> list[int]:
        edges = list(edges)
        types = [self.type_of(e) for e in edges]
        _, out = self._link(Sort.SYNC, edges, types, label)
        return out

    def embed(self, net: Net) -> list[int]:
        """Copy ``net`` in at the current box level; returns its conclusion edges."""
        lmap = {old: self._next_link + k for k, old in enumerate(sorted(net.links))}
        self._next_link += len(lmap)
        emap = {old: self._next_edge + k for k, old in enumerate(sorted(net.edges))}
        self._next_edge += len(emap)
        for old, l in net.links.items():
            box = self.container if l.box is None else (lmap[l.box[0]], l.box[1])
            self.links[lmap[old]] = Link(
                lmap[old], l.sort,
                tuple(emap[e] for e in l.premisses),
                tuple(emap[e] for e in l.conclusions),
                l.label, box, l.contents,
            )
        for old, e in net.edges.items():
            src = None if e.src is None else (lmap[e.src[0]], e.src[1])
            dst = None if e.dst is None else (lmap[e.dst[0]], e.dst[1])
            self.edges[emap[old]] = Edge(emap[old], e.type, src, dst)
        return [emap[c] for c in net.conclusions]

    def bot(self, contents: list[Net]) -> tuple[int, list[int]]:
        """Box around ``contents`` (all with the same conclusion types).

        Returns (lock edge, outer conclusion edges).
        """
        if not contents:
            raise NetError([StructuralError("EmptyBox", "bot")])
        gamma = [contents[0].type_of(e) for e in contents[0].conclusions]
        lid = self._next_link
        self._next_link += 1
        saved = self.container
        inner = []
        for c, net in enumerate(contents):
            self.container = (lid, c)
            inner.extend(self.embed(net))
        self.container = saved
        concl = [self._edge(BOT, (lid, 0), None)]
        for j, ty in enumerate(gamma):
            concl.append(self._edge(ty, (lid, 1 + j), None))
        for port, e in enumerate(inner):
            self._plug(e, (lid, port))
        self.links[lid] = Link(lid, Sort.BOT, tuple(inner), tuple(concl), None, saved, len(contents))
        return concl[0], concl[1:]

    def pending(self) -> list[int]:
        return [i for i, e in sorted(self.edges.items()) if e.dst is None]

    def finish(self, conclusions: Iterable[int] | None = None, check: bool = True) -> Net:
        concl = tuple(self.pending() if conclusions is None else conclusions)
        net = Net(dict(self.links), dict(self.edges), concl)
        if check:
            errs = validate(net)
            if errs:
                raise NetError(errs)
        return net


# -- validation -----------------------------------------------------------------

def validate(n: Net, gate_arity: Mapping[str, int] | None = None) -> list[StructuralError]:
    errs: list[StructuralError] = []

    def err(kind, where, detail=""):
        errs.append(StructuralError(kind, where, detail))

    # ports agree with edges
    for lid, l in n.links.items():
        if l.id != lid:
            err("IdMismatch", f"link {lid}")
        for port, e in enumerate(l.premisses):
            if e not in n.edges:
                err("DanglingPort", f"link {lid}", f"premiss {port} names missing edge {e}")
            elif n.edges[e].dst != (lid, port):
                err("PortMismatch", f"link {lid}", f"premiss {port} / edge {e}")
        for port, e in enumerate(l.conclusions):
            if e not in n.edges:
                err("DanglingPort", f"link {lid}", f"conclusion {port} names missing edge {e}")
            elif n.edges[e].src != (lid, port):
                err("PortMismatch", f"link {lid}", f"conclusion {port} / edge {e}")
    for eid, e in n.edges.items():
        if e.src is None:
            err("MissingSource", f"edge {eid}")
        elif e.src[0] not in n.links or n.links[e.src[0]].conclusions[e.src[1]:e.src[1] + 1] != (eid,):
            err("PortMismatch", f"edge {eid}", "source port does not list this edge")
        if e.dst is not None and (
            e.dst[0] not in n.links or n.links[e.dst[0]].premisses[e.dst[1]:e.dst[1] + 1] != (eid,)
        ):
            err("PortMismatch", f"edge {eid}", "target port does not list this edge")
    pending = {eid for eid, e in n.edges.items() if e.dst is None}
    if sorted(pending) != sorted(n.conclusions) or len(set(n.conclusions)) != len(n.conclusions):
        err("ConclusionMismatch", "net", f"pending {sorted(pending)} vs conclusions {list(n.conclusions)}")
    if errs:
        return errs

    ty = n.type_of
    for lid, l in sorted(n.links.items()):
        where = f"{l.sort.value} link {lid}"
        p, c = l.premisses, l.conclusions
        if l.sort is Sort.AX:
            if len(p) != 0 or len(c) != 2:
                err("Arity", where)
            elif ty(c[1]) != negate(ty(c[0])):
                err("TypeMismatch", where, "axiom conclusions are not dual")
        elif l.sort is Sort.CUT:
            if len(p) != 2 or len(c) != 0:
                err("Arity", where)
            elif ty(p[1]) != negate(ty(p[0])):
                err("TypeMismatch", where, "cut premisses are not dual")
        elif l.sort in (Sort.TENSOR, Sort.PAR):
            if len(p) != 2 or len(c) != 1:
                err("Arity", where)
            else:
                want = (Tensor if l.sort is Sort.TENSOR else Par)(ty(p[0]), ty(p[1]))
                if ty(c[0]) != want:
                    err("TypeMismatch", where, f"conclusion {show(ty(c[0]))}, expected {show(want)}")
        elif l.sort is Sort.ONE:
            if len(p) != 0 or len(c) != 1:
                err("Arity", where)
            elif ty(c[0]) != ONE:
                err("TypeMismatch", where, "one link conclusion must be 1")
        elif l.sort in (Sort.BOT, Sort.BOX):
            if len(c) < 1 or ty(c[0]) != BOT:
                err("TypeMismatch", where, "lock must be typed bot")
                continue
            if l.sort is Sort.BOX:
                if p:
                    err("Arity", where, "box pseudo-node has no premisses")
                continue
            k = len(c) - 1
            if l.contents < 1:
                err("EmptyBox", where)
                continue
            if len(p) != k * l.contents:
                err("Arity", where, f"{len(p)} inner edges for {l.contents} contents of width {k}")
                continue
            for ci in range(l.contents):
                for j in range(k):
                    inner = p[ci * k + j]
                    if ty(inner) != ty(c[1 + j]):
                        err("TypeMismatch", where, f"content {ci} conclusion {j} differs from the box conclusion")
                    src = n.edges[inner].src
                    if src is not None and n.links[src[0]].box != (lid, ci):
                        err("BoxLeak", where, f"inner edge {inner} does not come from content {ci}")
        elif l.sort is Sort.SYNC:
            if len(p) < 1 or len(p) != len(c):
                err("Arity", where)
                continue
            for i, (a, b) in enumerate(zip(p, c)):
                if ty(a) != ty(b):
                    err("TypeMismatch", where, f"port {i} premiss and conclusion differ")
                elif not is_polarized(ty(a)):
                    err("UnpolarizedSync", where, f"port {i} carries {show(ty(a))}")
            if l.label is not None and gate_arity is not None:
                atoms = sum(len(atom_addresses(ty(a))) for a in p)
                if l.label not in gate_arity:
                    err("UnknownGate", where, l.label)
                elif gate_arity[l.label] != atoms:
                    err("GateArity", where, f"{l.label} has arity {gate_arity[l.label]}, sync has {atoms} atoms")
        if l.box is not None:
            owner = n.links.get(l.box[0])
            if owner is None or owner.sort is not Sort.BOT or not 0 <= l.box[1] < owner.contents:
                err("BadContainer", where, f"container {l.box}")

    # box nesting must be a tree
    for lid in n.links:
        seen, box = {lid}, n.links[lid].box
        while box is not None:
            if box[0] in seen:
                err("BoxCycle", f"link {lid}")
                break
            seen.add(box[0])
            box = n.links[box[0]].box if box[0] in n.links else None

    # edges stay within one box level (inner edges excepted)
    for eid, e in sorted(n.edges.items()):
        if e.src is None or e.dst is None:
            continue
        s, d = n.links[e.src[0]], n.links[e.dst[0]]
        if d.sort is Sort.BOT and e.dst[1] < len(d.premisses):
            continue  # inner edge, checked above
        if s.box != d.box:
            err("BoxLeak", f"edge {eid}", "crosses a box border")
    return errs


def check(n: Net, gate_arity=None) -> Net:
    errs = validate(n, gate_arity)
    if errs:
        raise NetError(errs)
    return n


# -- graph views ------------------------------------------------------------------

def zero_graph(n: Net) -> Net:
    """Depth-0 view: each outermost box becomes a single box pseudo-node."""
    links = {}
    for lid, l in n.links.items():
        if l.box is not None:
            continue
        if l.sort is Sort.BOT:
            l = Link(lid, Sort.BOX, (), l.conclusions, None, None, 0)
        links[lid] = l
    edges = {eid: e for eid, e in n.edges.items() if e.src is not None and e.src[0] in links}
    return Net(links, edges, n.conclusions)


def content_net(n: Net, bot: int, content: int) -> Net:
    """The structure inside one content of a box, its inner edges left pending."""
    inside = set(n.content_links(bot, content))
    links = {}
    for lid in inside:
        l = n.links[lid]
        links[lid] = replace(l, box=None) if l.box == (bot, content) else l
    edges = {}
    inner = n.inner(bot, content)
    for eid, e in n.edges.items():
        if e.src is not None and e.src[0] in inside:
            edges[eid] = replace(e, dst=None) if eid in inner else e
    return Net(links, edges, tuple(inner))


def sync_paths_from(n: Net, e: int) -> set[int]:
    """Edges reached from ``e`` by crossing sync links at corresponding ports."""
    seen = {e}
    todo = [e]
    while todo:
        cur = todo.pop()
        edge = n.edges[cur]
        nxt = []
        if edge.dst is not None:
            l = n.links[edge.dst[0]]
            if l.sort is Sort.SYNC:
                nxt.append(l.conclusions[edge.dst[1]])
        if edge.src is not None:
            l = n.links[edge.src[0]]
            if l.sort is Sort.SYNC:
                nxt.append(l.premisses[edge.src[1]])
        for f in nxt:
            if f not in seen:
                seen.add(f)
                todo.append(f)
    return seen


def downward_sync_path(n: Net, e: int) -> list[int]:
    """Edges reached going down from ``e`` through syncs only (hereditary conclusions)."""
    out = [e]
    while True:
        dst = n.edges[out[-1]].dst
        if dst is None or n.links[dst[0]].sort is not Sort.SYNC:
            return out
        out.append(n.links[dst[0]].conclusions[dst[1]])


def is_hereditary_conclusion_of(n: Net, e: int, sorts: tuple[Sort, ...]) -> bool:
    """Whether ``e`` is reached going down through syncs from a conclusion of a link of ``sorts``."""
    cur = e
    while True:
        src = n.edges[cur].src
        if src is None:
            return False
        l = n.links[src[0]]
        if l.sort in sorts:
            return True
        if l.sort is not Sort.SYNC:
            return False
        cur = l.premisses[src[1]]


def neighbours(n: Net, lid: int) -> Iterator[int]:
    l = n.links[lid]
    for e in l.premisses + l.conclusions:
        edge = n.edges[e]
        for end in (edge.src, edge.dst):
            if end is not None and end[0] != lid:
                yield end[0]


def atomic_axioms(n: Net) -> bool:
    return all(is_atom(n.type_of(l.conclusions[0])) for l in n.links_of(Sort.AX))


def sort_counts(n: Net) -> dict[str, int]:
    out: dict[str, int] = {}
    for l in n.links.values():
        out[l.sort.value] = out.get(l.sort.value, 0) + 1
    return out


# -- quantum nets ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuantumNet:
    """A net with a register whose wires name depth-0 one links."""

    net: Net
    register: "QuantumRegister"
    wiring: Mapping[str, int]

    def __post_init__(self):
        wired = list(self.wiring.values())
        if len(set(wired)) != len(wired):
            raise NetError([StructuralError("WiringNotInjective", "register")])
        if set(self.wiring) != set(self.register.qubits):
            raise NetError([StructuralError("WiringMismatch", "register",
                                            f"{sorted(self.wiring)} vs {list(self.register.qubits)}")])
        for name, lid in self.wiring.items():
            l = self.net.links.get(lid)
            if l is None or l.sort is not Sort.ONE or l.box is not None:
                raise NetError([StructuralError("BadWiring", f"wire {name}", f"link {lid}")])

    @classmethod
    def plain(cls, net: Net) -> "QuantumNet":
        from .qregister import QuantumRegister

        return cls(net, QuantumRegister.empty(), {})

    def wire_of(self, link: int) -> str | None:
        for name, lid in self.wiring.items():
            if lid == link:
                return name
        return None

    def canonical_register(self):
        """Amplitudes with wires ordered by the canonical label of their one link."""
        from .canon import canonical_labels

        _, lmap, _ = canonical_labels(self.net)
        order = sorted(self.register.qubits, key=lambda q: lmap[self.wiring[q]])
        return tuple(lmap[self.wiring[q]] for q in order), self.register.reorder(order)
