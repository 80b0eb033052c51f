"""Multi-token interaction machine over a net's atom positions.

A position is ``(edge, address)`` for an atom occurrence, or ``(lock, i)``
once a token has opened content ``i`` of a box.  Tokens are named by the
position they started from.  Positive tokens travel along edge direction,
negative tokens against it; sync links hold tokens back until every
incoming edge is full and then release them together.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .formula import signed_atoms
from .net import Net, Sort

Pos = tuple  # (edge, address str) or (lock edge, content int)


class MachineError(RuntimeError):
    pass


@dataclass(frozen=True)
class MachineState:
    tokens: tuple[tuple[Pos, Pos], ...]
    unlocked: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def make(tokens: dict, unlocked: dict) -> "MachineState":
        return MachineState(tuple(sorted(tokens.items())), tuple(sorted(unlocked.items())))

    def token_map(self) -> dict:
        return dict(self.tokens)

    def boxes(self) -> dict:
        return dict(self.unlocked)


@dataclass(frozen=True)
class PositionSets:
    init: frozenset
    fin: frozenset
    ones: frozenset
    botbox: frozenset


@dataclass(frozen=True)
class Transition:
    rule: str  # move | sync | spawn | unlock
    origin: Pos | None = None
    target: Pos | None = None
    link: int | None = None

    def sort_key(self):
        return (self.rule, repr(self.origin), repr(self.target), -1 if self.link is None else self.link)


@dataclass(frozen=True)
class Interpretation:
    """Either a deadlock or a partial injection from initial to final positions.

    Positions are reported as (conclusion index, address).
    """

    pairs: frozenset | None

    @property
    def deadlock(self) -> bool:
        return self.pairs is None

    def as_dict(self) -> dict:
        return dict(self.pairs or ())

    def __str__(self) -> str:
        if self.pairs is None:
            return "DEADLOCK"
        return "{" + ", ".join(f"{a}->{b}" for a, b in sorted(self.pairs)) + "}"


DEADLOCK = Interpretation(None)


@dataclass
class RunResult:
    final: MachineState
    outcome: str  # "final" or "deadlock"
    trace: list = field(default_factory=list)


class Machine:
    """Static tables for one net plus the transition function."""

    def __init__(self, net: Net):
        self.net = net
        self.sign: dict[Pos, int] = {}
        self.edge_positions: dict[int, list[Pos]] = {}
        for eid, e in net.edges.items():
            ps = []
            for m, s in signed_atoms(e.type):
                self.sign[(eid, m)] = s
                ps.append((eid, m))
            self.edge_positions[eid] = ps
        self.concl_index = {e: i for i, e in enumerate(net.conclusions)}
        init, fin = set(), set()
        for e in net.conclusions:
            for p in self.edge_positions[e]:
                (fin if self.sign[p] > 0 else init).add(p)
        ones = {net.links[l.id].conclusions[0] for l in net.links_of(Sort.ONE)}
        botbox = {(net.lock(b.id), i) for b in net.bots() for i in range(b.contents)}
        self.sets = PositionSets(frozenset(init), frozenset(fin),
                                 frozenset((e, "") for e in ones), frozenset(botbox))
        self.syncs = net.links_of(Sort.SYNC)
        self.sync_in: dict[int, list[Pos]] = {}
        for s in self.syncs:
            ins = []
            for p, c in zip(s.premisses, s.conclusions):
                e = p if self.sign[self.edge_positions[p][0]] > 0 else c
                ins.extend(self.edge_positions[e])
            self.sync_in[s.id] = ins
        self.one_links = net.links_of(Sort.ONE)

    # -- helpers -------------------------------------------------------------------
    def num_positions(self) -> int:
        return len(self.sign) + len(self.sets.botbox)

    def initial(self) -> MachineState:
        return MachineState.make({p: p for p in self.sets.init}, {})

    def active(self, link: int, unlocked: dict) -> bool:
        box = self.net.links[link].box
        while box is not None:
            if unlocked.get(box[0]) != box[1]:
                return False
            box = self.net.links[box[0]].box
        return True

    def is_final(self, s: MachineState) -> bool:
        image = {pos for _, pos in s.tokens}
        for pos in image:
            if pos not in self.sets.fin and pos not in self.sets.botbox:
                return False
        return self.sets.fin <= image

    def _moves(self, origin, pos, unlocked) -> list[Transition]:
        e, m = pos
        if isinstance(m, int):
            return []
        n = self.net
        edge = n.edges[e]
        if self.sign[pos] > 0:
            if edge.dst is None:
                return []
            lid, port = edge.dst
            link = n.links[lid]
            if link.sort is Sort.CUT:
                nxt = (link.premisses[1 - port], m)
            elif link.sort in (Sort.TENSOR, Sort.PAR):
                nxt = (link.conclusions[0], "lr"[port] + m)
            elif link.sort is Sort.BOT:
                k = len(link.conclusions) - 1
                c, j = divmod(port, k)
                if unlocked.get(lid) != c:
                    return []
                nxt = (link.conclusions[1 + j], m)
            else:
                return []  # sync: wait for the barrier
            return [Transition("move", origin, nxt)]
        lid, port = edge.src
        link = n.links[lid]
        if link.sort is Sort.AX:
            nxt = (link.conclusions[1 - port], m)
        elif link.sort in (Sort.TENSOR, Sort.PAR):
            nxt = (link.premisses[0 if m[0] == "l" else 1], m[1:])
        elif link.sort is Sort.BOT:
            if port == 0:
                if lid in unlocked:
                    return []
                return [Transition("unlock", origin, (e, i), lid) for i in range(link.contents)]
            c = unlocked.get(lid)
            if c is None:
                return []
            nxt = (n.inner(lid, c)[port - 1], m)
        else:
            return []
        return [Transition("move", origin, nxt)]

    def enabled(self, s: MachineState) -> list[Transition]:
        tokens = s.token_map()
        unlocked = s.boxes()
        occupied = set(tokens.values())
        out = []
        for origin, pos in s.tokens:
            out.extend(self._moves(origin, pos, unlocked))
        for sync in self.syncs:
            ins = self.sync_in[sync.id]
            if all(p in occupied for p in ins):
                out.append(Transition("sync", link=sync.id))
        for one in self.one_links:
            origin = (one.conclusions[0], "")
            if origin not in tokens and self.active(one.id, unlocked):
                out.append(Transition("spawn", origin, origin, one.id))
        return out

    def sync_crossings(self, s: MachineState, link: int) -> list[tuple[Pos, Pos, Pos]]:
        """(origin, from, to) for every token released by a sync, in port then address order."""
        where = {pos: origin for origin, pos in s.tokens}
        l = self.net.links[link]
        out = []
        for p, c in zip(l.premisses, l.conclusions):
            positive = self.sign[self.edge_positions[p][0]] > 0
            src, dst = (p, c) if positive else (c, p)
            for (_, m) in self.edge_positions[src]:
                out.append((where[(src, m)], (src, m), (dst, m)))
        return out

    def fire(self, s: MachineState, t: Transition) -> MachineState:
        tokens = s.token_map()
        unlocked = s.boxes()
        if t.rule == "move":
            tokens[t.origin] = t.target
        elif t.rule == "spawn":
            tokens[t.origin] = t.target
        elif t.rule == "unlock":
            tokens[t.origin] = t.target
            unlocked[t.link] = t.target[1]
        elif t.rule == "sync":
            for origin, _, to in self.sync_crossings(s, t.link):
                tokens[origin] = to
        else:
            raise MachineError(f"unknown rule {t.rule}")
        if len(set(tokens.values())) != len(tokens):
            raise MachineError(f"{t} breaks injectivity")
        return MachineState.make(tokens, unlocked)

    def trace_rows(self, s: MachineState, t: Transition) -> list[dict]:
        tokens = s.token_map()
        if t.rule == "sync":
            return [{"rule": "sync", "origin": o, "from": a, "to": b}
                    for o, a, b in self.sync_crossings(s, t.link)]
        return [{"rule": t.rule, "origin": t.origin, "from": tokens.get(t.origin), "to": t.target}]

    def interpretation(self, s: MachineState) -> Interpretation:
        if not self.is_final(s):
            return DEADLOCK
        pairs = set()
        for origin, pos in s.tokens:
            if origin in self.sets.init and pos in self.sets.fin:
                pairs.add((self.readable(origin), self.readable(pos)))
        return Interpretation(frozenset(pairs))

    def readable(self, pos: Pos) -> tuple[int, str]:
        return (self.concl_index[pos[0]], pos[1])


# -- runs ---------------------------------------------------------------------------------

def _schedule_rng(schedule) -> random.Random | None:
    if schedule in (None, "det"):
        return None
    if isinstance(schedule, str) and schedule.startswith("seed:"):
        schedule = int(schedule[5:])
    if isinstance(schedule, int):
        return random.Random(schedule)
    raise ValueError(f"unknown schedule {schedule!r}")


def position_sets(n: Net) -> PositionSets:
    return Machine(n).sets


def enabled(n: Net, s: MachineState) -> list[Transition]:
    return Machine(n).enabled(s)


def run(n: Net, schedule="det", record: bool = False, machine: Machine | None = None,
        max_steps: int | None = None) -> RunResult:
    """A maximal run.  ``schedule`` is "det", "seed:N" or an int seed."""
    m = machine or Machine(n)
    rng = _schedule_rng(schedule)
    s = m.initial()
    trace = []
    bound = max_steps or (m.num_positions() + 1) ** 2 + 10
    for k in range(bound):
        ts = m.enabled(s)
        if not ts:
            return RunResult(s, "final" if m.is_final(s) else "deadlock", trace)
        t = ts[0] if rng is None else rng.choice(ts)
        if record:
            for row in m.trace_rows(s, t):
                trace.append({"step": k, **row})
        s = m.fire(s, t)
    raise MachineError(f"run exceeded {bound} steps")


def exhaustive_finals(n: Net, machine: Machine | None = None, limit: int = 200_000) -> set[MachineState]:
    """Stuck states reachable under every interleaving."""
    m = machine or Machine(n)
    start = m.initial()
    seen = {start}
    todo = [start]
    stuck = set()
    while todo:
        s = todo.pop()
        ts = m.enabled(s)
        if not ts:
            stuck.add(s)
        for t in ts:
            nxt = m.fire(s, t)
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > limit:
                    raise MachineError("state space too large for exhaustive exploration")
                todo.append(nxt)
    return stuck


def interpret(n: Net, schedule="det") -> Interpretation:
    m = Machine(n)
    res = run(n, schedule, machine=m)
    return m.interpretation(res.final) if res.outcome == "final" else DEADLOCK


__all__ = [
    "Pos", "MachineState", "PositionSets", "Transition", "Interpretation", "DEADLOCK",
    "RunResult", "Machine", "MachineError", "position_sets", "enabled", "run",
    "exhaustive_finals", "interpret",
]
