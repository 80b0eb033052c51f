"""Random nets and random typed programs for the property suites."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .correctness import closure, is_correct
from .formula import BOT, ONE, Formula, NegVar, Par, Tensor, Var, contains_bot, is_polarized, negate
from .net import Net, NetBuilder, NetError
from .qlambda import (
    BOOL,
    QUBIT,
    App,
    FF,
    If,
    Lam,
    LetPair,
    Lolli,
    LType,
    Meas,
    New,
    Pair,
    Tens,
    Term,
    TT,
    Unitary,
    Var as LVar,
    term_size,
)
from .translate import identity


# -- nets --------------------------------------------------------------------------------

@dataclass(frozen=True)
class NetGenConfig:
    max_links: int = 40
    atoms: tuple[str, ...] = ("a", "b")
    units: bool = True  # one/bot links and boxes
    syncs: bool = True
    multibox: bool = True
    box_depth: int = 2
    operations: int = 14
    formula_depth: int = 2


def random_formula(rng: random.Random, depth: int, atoms, polarized: bool = False) -> Formula:
    """A random formula.  With ``polarized`` only unit-built positive or negative formulas."""
    if polarized:
        pos = _random_positive(rng, depth)
        return pos if rng.random() < 0.5 else negate(pos)
    if depth == 0 or rng.random() < 0.4:
        r = rng.random()
        if r < 0.25:
            return ONE if rng.random() < 0.5 else BOT
        name = rng.choice(atoms)
        return Var(name) if rng.random() < 0.5 else NegVar(name)
    left = random_formula(rng, depth - 1, atoms)
    right = random_formula(rng, depth - 1, atoms)
    return Tensor(left, right) if rng.random() < 0.5 else Par(left, right)


def _random_positive(rng: random.Random, depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.6:
        return ONE
    return Tensor(_random_positive(rng, depth - 1), _random_positive(rng, depth - 1))


class _Pool:
    """Pending edges of a builder grouped into connected components."""

    def __init__(self, b: NetBuilder):
        self.b = b
        self.comp: dict[int, int] = {}
        self._next = 0

    def add(self, *edges: int) -> None:
        c = self._fresh()
        for e in edges:
            self.comp[e] = c

    def _fresh(self) -> int:
        self._next += 1
        return self._next

    def take(self, *edges: int) -> None:
        for e in edges:
            del self.comp[e]

    def edges(self) -> list[int]:
        return sorted(self.comp)


def _net_ops(rng: random.Random, cfg: NetGenConfig, pool: _Pool, depth: int) -> None:
    b = pool.b
    ops = ["ax", "ax", "tensor", "par", "par", "cut", "eta_cut"]
    if cfg.syncs:
        ops += ["sync", "sync", "pol_ax"]
    if cfg.units:
        ops += ["one", "lock_cut", "lock_cut"]
        if depth < cfg.box_depth:
            ops += ["box"]
    op = rng.choice(ops)
    es = pool.edges()
    if op == "ax" or not es:
        a = random_formula(rng, cfg.formula_depth, cfg.atoms)
        pool.add(*b.ax(a))
    elif op == "pol_ax":
        pool.add(*b.ax(random_formula(rng, cfg.formula_depth, cfg.atoms, polarized=True)))
    elif op == "one":
        pool.add(b.one())
    elif op in ("tensor", "par"):
        if len(es) < 2:
            return
        x, y = rng.sample(es, 2)
        if op == "tensor" and pool.comp[x] == pool.comp[y]:
            return
        others = _component(pool, x) | _component(pool, y)
        pool.take(x, y)
        e = b.tensor(x, y) if op == "tensor" else b.par(x, y)
        _merge_set(pool, (others - {x, y}) | {e})
    elif op == "cut":
        pairs = [(x, y) for x in es for y in es
                 if x < y and b.type_of(y) == negate(b.type_of(x)) and pool.comp[x] != pool.comp[y]]
        if not pairs:
            return
        x, y = rng.choice(pairs)
        others = _component(pool, x) | _component(pool, y)
        pool.take(x, y)
        b.cut(x, y)
        _merge_set(pool, others - {x, y})
    elif op == "eta_cut":
        x = rng.choice(es)
        dual, same = identity(b, negate(b.type_of(x)))
        others = _component(pool, x) - {x}
        pool.take(x)
        b.cut(x, dual)
        _merge_set(pool, others | {same})
    elif op == "sync":
        pol = [e for e in es if is_polarized(b.type_of(e))]
        if not pol:
            one, bot = b.ax(ONE) if not cfg.units or rng.random() < 0.5 else (b.one(), None)
            pool.add(*(e for e in (one, bot) if e is not None))
            return
        k = min(len(pol), rng.choice([1, 1, 2, 2, 3]))
        chosen = rng.sample(pol, k)
        others = set().union(*(_component(pool, e) for e in chosen))
        pool.take(*chosen)
        out = b.sync(chosen)
        _merge_set(pool, (others - set(chosen)) | set(out))
    elif op == "lock_cut":
        locks = [e for e in es if b.type_of(e) == BOT]
        ones = [e for e in es if b.type_of(e) == ONE]
        if not locks:
            return
        lock = rng.choice(locks)
        cands = [e for e in ones if pool.comp[e] != pool.comp[lock]]
        one = rng.choice(cands) if cands and rng.random() < 0.5 else b.one()
        others = _component(pool, lock) | (_component(pool, one) if one in pool.comp else set())
        pool.take(*(e for e in (lock, one) if e in pool.comp))
        b.cut(one, lock)
        _merge_set(pool, others - {lock, one})
    elif op == "box":
        sub = NetGenConfig(
            max_links=max(4, cfg.max_links // 3), atoms=cfg.atoms, units=cfg.units, syncs=cfg.syncs,
            multibox=cfg.multibox, box_depth=cfg.box_depth, operations=max(2, cfg.operations // 3),
            formula_depth=1,
        )
        content = _random_component(rng, sub, depth + 1)
        if content is None:
            return
        contents = [content]
        if cfg.multibox and rng.random() < 0.4:
            contents.append(_variant(rng, content))
        lock, outer = b.bot(contents)
        pool.add(lock, *outer)


def _component(pool: _Pool, e: int) -> set[int]:
    c = pool.comp[e]
    return {x for x, d in pool.comp.items() if d == c}


def _merge_set(pool: _Pool, edges: set[int]) -> None:
    c = pool._fresh()
    for e in edges:
        pool.comp[e] = c


def _variant(rng: random.Random, content: Net) -> Net:
    """Same conclusion types, different structure: a sync on one polarized conclusion."""
    b = NetBuilder()
    concl = b.embed(content)
    pol = [i for i, e in enumerate(concl) if is_polarized(b.type_of(e))]
    if pol:
        i = rng.choice(pol)
        (concl[i],) = b.sync([concl[i]])
    return b.finish(concl)


def _random_component(rng: random.Random, cfg: NetGenConfig, depth: int = 0) -> Net | None:
    b = NetBuilder()
    pool = _Pool(b)
    for _ in range(cfg.operations):
        try:
            _net_ops(rng, cfg, pool, depth)
        except NetError:
            return None
        if len(b.links) > cfg.max_links:
            return None
    if not pool.edges():
        return None
    try:
        net = b.finish(pool.edges())
    except NetError:
        return None
    return net if is_correct(net) else None


def random_net(rng: random.Random | int, cfg: NetGenConfig = NetGenConfig(), tries: int = 500) -> Net:
    """A random correct net with at most ``cfg.max_links`` links."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    for _ in range(tries):
        net = _random_component(rng, cfg)
        if net is not None and len(net.links) <= cfg.max_links:
            return net
    raise RuntimeError("no correct net generated")


def random_closed_net(rng: random.Random | int, cfg: NetGenConfig = NetGenConfig(), tries: int = 500) -> Net:
    """A random correct net with no bot in its conclusions, built with the closure."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    small = NetGenConfig(**{**cfg.__dict__, "max_links": cfg.max_links * 2 // 3})
    for _ in range(tries):
        net = random_net(rng, small, tries)
        closed = closure(net)
        if len(closed.links) <= cfg.max_links and not any(contains_bot(closed.type_of(e)) for e in closed.conclusions):
            return closed
    raise RuntimeError("no closed net generated")


SMLL0 = NetGenConfig(units=False)


def rewired(rng: random.Random, net: Net) -> Net | None:
    """Swap the targets of two same-typed edges.  Used to produce structures
    that are usually incorrect; the result is validated but not checked for
    correctness."""
    from dataclasses import replace

    by_type: dict = {}
    for eid, e in net.edges.items():
        if e.dst is not None and net.links[e.src[0]].box is None and net.links[e.dst[0]].box is None:
            by_type.setdefault(e.type, []).append(eid)
    cands = [es for es in by_type.values() if len(es) >= 2]
    if not cands:
        return None
    x, y = rng.sample(rng.choice(cands), 2)
    ex, ey = net.edges[x], net.edges[y]
    edges = dict(net.edges)
    edges[x] = replace(ex, dst=ey.dst)
    edges[y] = replace(ey, dst=ex.dst)
    links = dict(net.links)
    for eid, (lid, port) in ((x, ey.dst), (y, ex.dst)):
        l = links[lid]
        ps = list(l.premisses)
        ps[port] = eid
        links[lid] = replace(l, premisses=tuple(ps))
    out = Net(links, edges, net.conclusions)
    from .net import validate

    return None if validate(out) else out


# -- programs ------------------------------------------------------------------------------

@dataclass(frozen=True)
class ProgramGenConfig:
    depth: int = 4
    min_size: int = 8
    max_qubits: int = 6
    max_measurements: int = 3
    gates1: tuple[str, ...] = ("H", "X", "Z")
    gates2: tuple[str, ...] = ("CNOT", "SWAP")


_SMALL_TYPES = [BOOL, QUBIT, Tens(BOOL, BOOL), Tens(QUBIT, QUBIT), Tens(BOOL, QUBIT),
                Lolli(QUBIT, QUBIT), Lolli(QUBIT, BOOL), Lolli(BOOL, BOOL)]


class _GiveUp(Exception):
    pass


class _TermGen:
    def __init__(self, rng: random.Random, cfg: ProgramGenConfig):
        self.rng = rng
        self.cfg = cfg
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def split(self, ctx: list) -> tuple[list, list]:
        a, b = [], []
        for entry in ctx:
            (a if self.rng.random() < 0.5 else b).append(entry)
        return a, b

    def gen(self, ctx: list[tuple[str, LType]], ty: LType, depth: int) -> Term:
        rng = self.rng
        if depth < -4:
            raise _GiveUp
        if len(ctx) == 1 and ctx[0][1] == ty and (depth <= 0 or rng.random() < 0.25):
            return LVar(ctx[0][0])
        if not ctx and (depth <= 0 or rng.random() < 0.1):
            return self.closed(ty, depth)
        choices = ["app"]
        if depth > 0:
            choices += ["let", "beta"]
            if ty == BOOL or rng.random() < 0.3:
                choices.append("if")
        if isinstance(ty, Tens):
            choices += ["pair", "pair"]
        if isinstance(ty, Lolli):
            choices += ["lam", "lam"]
        if ty == BOOL:
            choices += ["meas"]
        if ty == QUBIT or ty == Tens(QUBIT, QUBIT):
            choices += ["gate", "gate"]
        if depth <= 0:
            return self.consume(ctx, ty) if ctx else self.closed(ty, 0)
        c = rng.choice(choices)
        d = depth - 1
        if c == "pair":
            a, b = self.split(ctx)
            return Pair(self.gen(a, ty.left, d), self.gen(b, ty.right, d))
        if c == "lam":
            x = self.fresh()
            return Lam(x, self.gen(ctx + [(x, ty.arg)], ty.res, d))
        if c == "meas":
            return App(Meas(), self.gen(ctx, QUBIT, d))
        if c == "gate":
            name = rng.choice(self.cfg.gates1 if ty == QUBIT else self.cfg.gates2)
            return App(Unitary(name), self.gen(ctx, ty, d))
        if c == "if":
            return If(self.gen(ctx, BOOL, d), self.closed(ty, d), self.closed(ty, d))
        if c == "let":
            pt = rng.choice([Tens(BOOL, BOOL), Tens(QUBIT, QUBIT), Tens(BOOL, QUBIT)])
            a, b = self.split(ctx)
            x, y = self.fresh(), self.fresh()
            return LetPair(x, y, self.gen(a, pt, d), self.gen(b + [(x, pt.left), (y, pt.right)], ty, d))
        if c == "beta":
            at = rng.choice([BOOL, QUBIT])
            a, b = self.split(ctx)
            x = self.fresh()
            return App(Lam(x, self.gen(b + [(x, at)], ty, d)), self.gen(a, at, d))
        # app of a generated function
        at = rng.choice([BOOL, QUBIT])
        a, b = self.split(ctx)
        return App(self.gen(a, Lolli(at, ty), d), self.gen(b, at, d))

    def consume(self, ctx: list[tuple[str, LType]], ty: LType) -> Term:
        """A small term of type ``ty`` using every variable of ``ctx`` once."""
        t, a = LVar(ctx[0][0]), ctx[0][1]
        for name, b in ctx[1:]:
            t, a = Pair(t, LVar(name)), Tens(a, b)
        return self.eliminate(t, a, ty)

    def eliminate(self, t: Term, a: LType, ty: LType) -> Term:
        if a == ty:
            return t
        if a == BOOL:
            return If(t, self.closed(ty, 0), self.closed(ty, 0))
        if a == QUBIT:
            return self.eliminate(App(Meas(), t), BOOL, ty)
        if isinstance(a, Lolli):
            return self.eliminate(App(t, self.closed(a.arg, 0)), a.res, ty)
        x, y = self.fresh(), self.fresh()
        if isinstance(ty, Tens):
            body = Pair(self.eliminate(LVar(x), a.left, ty.left), self.eliminate(LVar(y), a.right, ty.right))
        else:
            z1, z2 = self.fresh(), self.fresh()
            branch = If(
                self.eliminate(LVar(x), a.left, BOOL),
                Lam(z1, self.eliminate(LVar(z1), a.right, ty)),
                Lam(z2, self.eliminate(LVar(z2), a.right, ty)),
            )
            body = App(branch, LVar(y))
        return LetPair(x, y, t, body)

    def closed(self, ty: LType, depth: int) -> Term:
        rng = self.rng
        if ty == BOOL:
            return rng.choice([TT(), FF(), TT(), FF(), App(Meas(), App(Unitary("H"), New()))])
        if ty == QUBIT:
            return rng.choice([New(), New(), App(Unitary("H"), New()), App(Unitary("X"), New())])
        if isinstance(ty, Tens):
            return Pair(self.closed(ty.left, depth), self.closed(ty.right, depth))
        if isinstance(ty, Lolli):
            x = self.fresh()
            return Lam(x, self.gen([(x, ty.arg)], ty.res, max(depth - 1, 0)))
        raise TypeError(ty)

    def value(self, ty: LType, depth: int) -> Term:
        """A closed value of type ``ty``."""
        if ty == BOOL:
            return self.rng.choice([TT(), FF()])
        if isinstance(ty, Tens):
            return Pair(self.value(ty.left, depth), self.value(ty.right, depth))
        if isinstance(ty, Lolli):
            if ty == Lolli(QUBIT, BOOL) and self.rng.random() < 0.3:
                return Meas()
            if ty == Lolli(QUBIT, QUBIT) and self.rng.random() < 0.3:
                return Unitary(self.rng.choice(self.cfg.gates1))
            x = self.fresh()
            return Lam(x, self.gen([(x, ty.arg)], ty.res, depth))
        raise TypeError(f"no closed value of type {ty}")


def _count(t: Term, cls) -> int:
    from .qlambda import _children

    return isinstance(t, cls) + sum(_count(c, cls) for c in _children(t))


def random_program(rng: random.Random | int, cfg: ProgramGenConfig = ProgramGenConfig(),
                   ty: LType | None = None, tries: int = 200) -> Term:
    """A closed well-typed program of ground type within the qubit and measurement budget."""
    from .qlambda import LambdaTypeError, typecheck

    if isinstance(rng, int):
        rng = random.Random(rng)
    for _ in range(tries):
        target = ty or rng.choice([BOOL, QUBIT, Tens(BOOL, BOOL), Tens(QUBIT, QUBIT), Tens(BOOL, QUBIT)])
        g = _TermGen(rng, cfg)
        try:
            t = g.gen([], target, cfg.depth)
        except _GiveUp:
            continue
        if _count(t, New) > cfg.max_qubits or _count(t, Meas) > cfg.max_measurements:
            continue
        if term_size(t) < cfg.min_size:
            continue
        try:
            typecheck(t, expect=target)
        except LambdaTypeError:
            continue
        return t
    raise RuntimeError("no program generated")


def random_substitution_pair(rng: random.Random | int, cfg: ProgramGenConfig = ProgramGenConfig(),
                             tries: int = 200) -> tuple[Term, str, Term, LType]:
    """(body with one free variable x, "x", closed value, type of x)."""
    from .qlambda import LambdaTypeError, typecheck

    if isinstance(rng, int):
        rng = random.Random(rng)
    value_types = [t for t in _SMALL_TYPES if t != QUBIT and t != Tens(QUBIT, QUBIT) and t != Tens(BOOL, QUBIT)]
    for _ in range(tries):
        g = _TermGen(rng, cfg)
        a = rng.choice(value_types)
        target = rng.choice([BOOL, QUBIT, Tens(BOOL, BOOL), Tens(BOOL, QUBIT)])
        try:
            body = g.gen([("x", a)], target, cfg.depth - 1)
            value = g.value(a, 2)
        except _GiveUp:
            continue
        if _count(body, New) + _count(value, New) > cfg.max_qubits:
            continue
        if term_size(body) + term_size(value) < cfg.min_size:
            continue
        try:
            typecheck(body, {"x": a}, expect=target)
            typecheck(value, expect=a)
        except LambdaTypeError:
            continue
        return body, "x", value, a
    raise RuntimeError("no substitution pair generated")


__all__ = [
    "NetGenConfig", "SMLL0", "random_formula", "random_net", "random_closed_net", "rewired",
    "ProgramGenConfig", "random_program", "random_substitution_pair",
]
