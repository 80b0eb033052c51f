"""Linear quantum lambda calculus: syntax, typing, and probabilistic evaluation.

Evaluation is call-by-value on closures ``[Q, t]`` where ``Q`` is a register
over the quantum variables free in ``t``.  ``new`` always reduces, so a
value never contains it.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .qregister import BUILTIN_GATES, TOL, QuantumRegister, UnitarySpec

# -- terms -------------------------------------------------------------------------


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class QVar(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Lam(Term):
    var: str
    body: Term
    ann: "LType | None" = field(default=None, compare=False)


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class LetPair(Term):
    x: str
    y: str
    bound: Term
    body: Term


@dataclass(frozen=True)
class New(Term):
    pass


@dataclass(frozen=True)
class TT(Term):
    pass


@dataclass(frozen=True)
class FF(Term):
    pass


@dataclass(frozen=True)
class Meas(Term):
    pass


@dataclass(frozen=True)
class Unitary(Term):
    name: str


@dataclass(frozen=True)
class If(Term):
    cond: Term
    then: Term
    else_: Term


@dataclass(frozen=True)
class Hole(Term):
    pass


HOLE = Hole()


def show_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, QVar):
        return "#" + t.name
    if isinstance(t, App):
        f = show_term(t.fun) if isinstance(t.fun, (Var, QVar, App, Unitary, Meas, New, TT, FF)) else f"({show_term(t.fun)})"
        a = show_term(t.arg)
        if isinstance(t.arg, (App, Lam, LetPair, If)):
            a = f"({a})"
        return f"{f} {a}"
    if isinstance(t, Lam):
        ann = "" if t.ann is None else f":{show_type(t.ann)}"
        return f"\\{t.var}{ann}. {show_term(t.body)}"
    if isinstance(t, Pair):
        return f"<{show_term(t.left)}, {show_term(t.right)}>"
    if isinstance(t, LetPair):
        return f"let <{t.x}, {t.y}> = {show_term(t.bound)} in {show_term(t.body)}"
    if isinstance(t, If):
        return f"if {show_term(t.cond)} then {show_term(t.then)} else {show_term(t.else_)}"
    if isinstance(t, Unitary):
        return t.name
    return {New: "new", TT: "tt", FF: "ff", Meas: "meas", Hole: "[]"}[type(t)]


# -- types -----------------------------------------------------------------------


class LType:
    __slots__ = ()

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class BoolT(LType):
    pass


@dataclass(frozen=True)
class QubitT(LType):
    pass


@dataclass(frozen=True)
class Lolli(LType):
    arg: LType
    res: LType


@dataclass(frozen=True)
class Tens(LType):
    left: LType
    right: LType


@dataclass(frozen=True)
class TVar(LType):
    id: int


BOOL = BoolT()
QUBIT = QubitT()


def qubits(n: int) -> LType:
    """Left-nested tensor of ``n`` qubits."""
    t: LType = QUBIT
    for _ in range(n - 1):
        t = Tens(t, QUBIT)
    return t


def show_type(a: LType) -> str:
    if isinstance(a, BoolT):
        return "B"
    if isinstance(a, QubitT):
        return "Q"
    if isinstance(a, TVar):
        return f"'t{a.id}"
    if isinstance(a, Tens):
        right = show_type(a.right)
        if isinstance(a.right, (Tens, Lolli)):
            right = f"({right})"
        left = show_type(a.left)
        if isinstance(a.left, Lolli):
            left = f"({left})"
        return f"{left} * {right}"
    left = show_type(a.arg)
    if isinstance(a.arg, Lolli):
        left = f"({left})"
    return f"{left} -o {show_type(a.res)}"


# -- parsing ---------------------------------------------------------------------


class LambdaSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {msg}")


_TOKENS = re.compile(
    r"(?P<ws>\s+|--[^\n]*)|(?P<op>-o|⊸|[\\λ.()<>⟨⟩,=:*⊗])|(?P<qvar>#[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
)
KEYWORDS = {"let", "in", "if", "then", "else", "new", "tt", "ff", "meas"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(src: str) -> list[_Tok]:
    out, pos, line, bol = [], 0, 1, 0
    while pos < len(src):
        m = _TOKENS.match(src, pos)
        if not m:
            raise LambdaSyntaxError(f"unexpected character {src[pos]!r}", line, pos - bol + 1)
        text = m.group(0)
        if m.lastgroup != "ws":
            kind = m.lastgroup
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            norm = {"λ": "\\", "⟨": "<", "⟩": ">", "⊸": "-o", "⊗": "*"}.get(text, text)
            out.append(_Tok(kind, norm, line, pos - bol + 1))
        for k, ch in enumerate(text):
            if ch == "\n":
                line += 1
                bol = pos + k + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - bol + 1))
    return out


class _Parser:
    def __init__(self, src: str):
        self.toks = _lex(src)
        self.i = 0
        self.fresh = itertools.count()

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg: str):
        t = self.peek()
        raise LambdaSyntaxError(f"{msg}, found {t.text or 'end of input'!r}", t.line, t.col)

    def take(self, text: str | None = None, kind: str | None = None) -> _Tok:
        t = self.peek()
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            self.fail(f"expected {text or kind}")
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("op", "kw")

    def term(self) -> Term:
        if self.at("\\"):
            return self.lam()
        if self.at("let"):
            self.take("let")
            self.take("<")
            x = self.take(kind="ident").text
            self.take(",")
            y = self.take(kind="ident").text
            self.take(">")
            self.take("=")
            bound = self.term()
            self.take("in")
            return LetPair(x, y, bound, self.term())
        if self.at("if"):
            self.take("if")
            c = self.term()
            self.take("then")
            u = self.term()
            self.take("else")
            return If(c, u, self.term())
        return self.app()

    def lam(self) -> Term:
        self.take("\\")
        if self.at("<"):
            self.take("<")
            x = self.take(kind="ident").text
            self.take(",")
            y = self.take(kind="ident").text
            self.take(">")
            self.take(".")
            z = f"_p{next(self.fresh)}"
            return Lam(z, LetPair(x, y, Var(z), self.term()))
        x = self.take(kind="ident").text
        ann = None
        if self.at(":"):
            self.take(":")
            ann = self.type_()
        self.take(".")
        return Lam(x, self.term(), ann)

    def app(self) -> Term:
        t = self.atom()
        while True:
            tok = self.peek()
            if tok.kind in ("ident", "qvar") or (tok.kind == "kw" and tok.text in ("new", "tt", "ff", "meas")) \
                    or tok.text in ("(", "<"):
                t = App(t, self.atom())
            elif tok.text == "\\":
                t = App(t, self.lam())
            else:
                return t

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "qvar":
            self.i += 1
            return QVar(tok.text[1:])
        if tok.kind == "kw" and tok.text in ("new", "tt", "ff", "meas"):
            self.i += 1
            return {"new": New(), "tt": TT(), "ff": FF(), "meas": Meas()}[tok.text]
        if tok.kind == "ident":
            self.i += 1
            return Unitary(tok.text) if tok.text[0].isupper() else Var(tok.text)
        if tok.text == "(":
            self.i += 1
            t = self.term()
            self.take(")")
            return t
        if tok.text == "<":
            self.i += 1
            items = [self.term()]
            while self.at(","):
                self.take(",")
                items.append(self.term())
            self.take(">")
            if len(items) < 2:
                self.fail("a tuple needs at least two components")
            t = items[0]
            for x in items[1:]:
                t = Pair(t, x)
            return t
        self.fail("expected a term")

    def type_(self) -> LType:
        left = self.tens_type()
        if self.at("-o"):
            self.take("-o")
            return Lolli(left, self.type_())
        return left

    def tens_type(self) -> LType:
        t = self.type_atom()
        while self.at("*"):
            self.take("*")
            t = Tens(t, self.type_atom())
        return t

    def type_atom(self) -> LType:
        tok = self.peek()
        if tok.text in ("B", "Bool"):
            self.i += 1
            return BOOL
        if tok.text in ("Q", "Qubit"):
            self.i += 1
            return QUBIT
        if tok.text == "(":
            self.i += 1
            t = self.type_()
            self.take(")")
            return t
        self.fail("expected a type")


def parse(src: str) -> Term:
    p = _Parser(src)
    t = p.term()
    if p.peek().kind != "eof":
        p.fail("trailing input")
    return t


def parse_type(src: str) -> LType:
    p = _Parser(src)
    t = p.type_()
    if p.peek().kind != "eof":
        p.fail("trailing input")
    return t


# -- typing ----------------------------------------------------------------------


class LambdaTypeError(TypeError):
    def __init__(self, kind: str, detail: str):
        self.kind = kind
        super().__init__(f"{kind}: {detail}")


@dataclass(frozen=True)
class CtxEntry:
    name: str
    kind: str  # "v" for lambda variables, "q" for quantum variables
    type: LType

    def key(self):
        return (0 if self.kind == "v" else 1, self.name)


@dataclass(frozen=True)
class Derivation:
    rule: str
    ctx: tuple[CtxEntry, ...]
    term: Term
    type: LType
    children: tuple["Derivation", ...] = ()

    def lookup(self, name: str, kind: str = "v") -> CtxEntry:
        for c in self.ctx:
            if c.name == name and c.kind == kind:
                return c
        raise KeyError(name)

    def walk(self) -> Iterator["Derivation"]:
        yield self
        for c in self.children:
            yield from c.walk()


class _Infer:
    def __init__(self, gates: Mapping[str, UnitarySpec]):
        self.gates = gates
        self.subst: dict[int, LType] = {}
        self.counter = itertools.count()

    def fresh(self) -> TVar:
        return TVar(next(self.counter))

    def resolve(self, a: LType) -> LType:
        while isinstance(a, TVar) and a.id in self.subst:
            a = self.subst[a.id]
        return a

    def zonk(self, a: LType) -> LType:
        a = self.resolve(a)
        if isinstance(a, Lolli):
            return Lolli(self.zonk(a.arg), self.zonk(a.res))
        if isinstance(a, Tens):
            return Tens(self.zonk(a.left), self.zonk(a.right))
        return a

    def occurs(self, v: int, a: LType) -> bool:
        a = self.resolve(a)
        if isinstance(a, TVar):
            return a.id == v
        if isinstance(a, Lolli):
            return self.occurs(v, a.arg) or self.occurs(v, a.res)
        if isinstance(a, Tens):
            return self.occurs(v, a.left) or self.occurs(v, a.right)
        return False

    def unify(self, a: LType, b: LType, where: Term):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, TVar):
            if self.occurs(a.id, b):
                raise LambdaTypeError("Mismatch", f"infinite type in {show_term(where)}")
            self.subst[a.id] = b
            return
        if isinstance(b, TVar):
            self.unify(b, a, where)
            return
        if isinstance(a, Lolli) and isinstance(b, Lolli):
            self.unify(a.arg, b.arg, where)
            self.unify(a.res, b.res, where)
            return
        if isinstance(a, Tens) and isinstance(b, Tens):
            self.unify(a.left, b.left, where)
            self.unify(a.right, b.right, where)
            return
        raise LambdaTypeError("Mismatch", f"{show_type(self.zonk(a))} vs {show_type(self.zonk(b))} in {show_term(where)}")

    def infer(self, t: Term, env: dict[str, LType]) -> Derivation:
        """Derivation whose context lists exactly the variables used by ``t``."""
        if isinstance(t, Var):
            if t.name not in env:
                raise LambdaTypeError("UnboundVar", t.name)
            a = env[t.name]
            return Derivation("ax", (CtxEntry(t.name, "v", a),), t, a)
        if isinstance(t, QVar):
            return Derivation("qax", (CtxEntry(t.name, "q", QUBIT),), t, QUBIT)
        if isinstance(t, TT):
            return Derivation("tt", (), t, BOOL)
        if isinstance(t, FF):
            return Derivation("ff", (), t, BOOL)
        if isinstance(t, New):
            return Derivation("new", (), t, QUBIT)
        if isinstance(t, Meas):
            return Derivation("meas", (), t, Lolli(QUBIT, BOOL))
        if isinstance(t, Unitary):
            if t.name not in self.gates:
                raise LambdaTypeError("UnknownGate", t.name)
            q = qubits(self.gates[t.name].arity)
            return Derivation("unitary", (), t, Lolli(q, q))
        if isinstance(t, Lam):
            a = t.ann if t.ann is not None else self.fresh()
            body = self.infer(t.body, {**env, t.var: a})
            ctx = [c for c in body.ctx if not (c.kind == "v" and c.name == t.var)]
            if len(ctx) == len(body.ctx):
                raise LambdaTypeError("NonLinearUse", f"{t.var} is never used in {show_term(t)}")
            return Derivation("lam", tuple(ctx), t, Lolli(a, body.type), (body,))
        if isinstance(t, App):
            f = self.infer(t.fun, env)
            x = self.infer(t.arg, env)
            res = self.fresh()
            self.unify(f.type, Lolli(x.type, res), t)
            return Derivation("app", self.join(f.ctx, x.ctx, t), t, res, (f, x))
        if isinstance(t, Pair):
            a = self.infer(t.left, env)
            b = self.infer(t.right, env)
            return Derivation("pair", self.join(a.ctx, b.ctx, t), t, Tens(a.type, b.type), (a, b))
        if isinstance(t, LetPair):
            if t.x == t.y:
                raise LambdaTypeError("NonLinearUse", f"{t.x} bound twice")
            bound = self.infer(t.bound, env)
            a, b = self.fresh(), self.fresh()
            self.unify(bound.type, Tens(a, b), t)
            body = self.infer(t.body, {**env, t.x: a, t.y: b})
            names = {c.name for c in body.ctx if c.kind == "v"}
            for v in (t.x, t.y):
                if v not in names:
                    raise LambdaTypeError("NonLinearUse", f"{v} is never used in {show_term(t)}")
            rest = tuple(c for c in body.ctx if not (c.kind == "v" and c.name in (t.x, t.y)))
            return Derivation("let", self.join(bound.ctx, rest, t), t, body.type, (bound, body))
        if isinstance(t, If):
            c = self.infer(t.cond, env)
            self.unify(c.type, BOOL, t)
            u = self.infer(t.then, env)
            v = self.infer(t.else_, env)
            for branch in (u, v):
                if branch.ctx:
                    names = ", ".join(e.name for e in branch.ctx)
                    raise LambdaTypeError("OpenBranch", f"branch {show_term(branch.term)} uses {names}")
            self.unify(u.type, v.type, t)
            return Derivation("if", c.ctx, t, u.type, (c, u, v))
        raise LambdaTypeError("Mismatch", f"cannot type {show_term(t)}")

    def join(self, a, b, where: Term) -> tuple[CtxEntry, ...]:
        names = {(c.kind, c.name) for c in a}
        for c in b:
            if (c.kind, c.name) in names:
                raise LambdaTypeError("NonLinearUse", f"{c.name} used twice in {show_term(where)}")
        return tuple(sorted(a + b, key=CtxEntry.key))

    def finish(self, d: Derivation) -> Derivation:
        def ground(a: LType) -> LType:
            a = self.zonk(a)
            if isinstance(a, TVar):
                return BOOL
            if isinstance(a, Lolli):
                return Lolli(ground(a.arg), ground(a.res))
            if isinstance(a, Tens):
                return Tens(ground(a.left), ground(a.right))
            return a

        return self._map(d, ground)

    def _map(self, d: Derivation, f) -> Derivation:
        ctx = tuple(CtxEntry(c.name, c.kind, f(c.type)) for c in d.ctx)
        return Derivation(d.rule, ctx, d.term, f(d.type), tuple(self._map(c, f) for c in d.children))


def typecheck(t: Term, ctx: Mapping[str, LType] | None = None,
              gates: Mapping[str, UnitarySpec] = BUILTIN_GATES, expect: LType | None = None) -> Derivation:
    """The derivation of ``ctx, qvars(t) |- t : A``.

    Every name in ``ctx`` must be used exactly once.  Type variables left
    open by unannotated lambdas default to B.
    """
    ctx = dict(ctx or {})
    inf = _Infer(gates)
    d = inf.infer(t, ctx)
    used = {c.name for c in d.ctx if c.kind == "v"}
    for name in ctx:
        if name not in used:
            raise LambdaTypeError("NonLinearUse", f"context variable {name} is never used")
    if expect is not None:
        inf.unify(d.type, expect, t)
    return inf.finish(d)


def free_qvars(t: Term) -> list[str]:
    """Quantum variables in first-occurrence order."""
    out: list[str] = []

    def go(u):
        if isinstance(u, QVar):
            if u.name not in out:
                out.append(u.name)
        for child in _children(u):
            go(child)

    go(t)
    return out


def _children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, App):
        return (t.fun, t.arg)
    if isinstance(t, Lam):
        return (t.body,)
    if isinstance(t, Pair):
        return (t.left, t.right)
    if isinstance(t, LetPair):
        return (t.bound, t.body)
    if isinstance(t, If):
        return (t.cond, t.then, t.else_)
    return ()


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    if isinstance(t, LetPair):
        return free_vars(t.bound) | (free_vars(t.body) - {t.x, t.y})
    out: set[str] = set()
    for c in _children(t):
        out |= free_vars(c)
    return out


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c in _children(t))


# -- substitution and contexts -----------------------------------------------------

_fresh_names = itertools.count()


def _rename_away(name: str, avoid: set[str]) -> str:
    while True:
        cand = f"{name}_{next(_fresh_names)}"
        if cand not in avoid:
            return cand


def substitute(t: Term, x: str, v: Term) -> Term:
    """Capture-avoiding ``t{v/x}``."""
    fv = free_vars(v)

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            return v if u.name == x else u
        if isinstance(u, Lam):
            if u.var == x:
                return u
            if u.var in fv:
                new = _rename_away(u.var, fv | free_vars(u.body))
                return Lam(new, go(substitute(u.body, u.var, Var(new))), u.ann)
            return Lam(u.var, go(u.body), u.ann)
        if isinstance(u, LetPair):
            bound = go(u.bound)
            if x in (u.x, u.y):
                return LetPair(u.x, u.y, bound, u.body)
            body, a, b = u.body, u.x, u.y
            for old in (u.x, u.y):
                if old in fv:
                    new = _rename_away(old, fv | free_vars(body))
                    body = substitute(body, old, Var(new))
                    a, b = (new if a == old else a), (new if b == old else b)
            return LetPair(a, b, bound, go(body))
        if isinstance(u, App):
            return App(go(u.fun), go(u.arg))
        if isinstance(u, Pair):
            return Pair(go(u.left), go(u.right))
        if isinstance(u, If):
            return If(go(u.cond), go(u.then), go(u.else_))
        return u

    return go(t)


def is_value(t: Term) -> bool:
    if isinstance(t, (QVar, Lam, TT, FF, Meas, Unitary)):
        return True
    if isinstance(t, Pair):
        return is_value(t.left) and is_value(t.right)
    return False


class EvaluationStuck(RuntimeError):
    pass


def decompose(t: Term) -> tuple[Term, Term]:
    """Split ``t`` as E[u] with u the next redex (or ``t`` itself if a value)."""
    if is_value(t):
        return HOLE, t
    if isinstance(t, App):
        if not is_value(t.fun):
            e, r = decompose(t.fun)
            return App(e, t.arg), r
        if not is_value(t.arg):
            e, r = decompose(t.arg)
            return App(t.fun, e), r
        return HOLE, t
    if isinstance(t, Pair):
        if not is_value(t.left):
            e, r = decompose(t.left)
            return Pair(e, t.right), r
        e, r = decompose(t.right)
        return Pair(t.left, e), r
    if isinstance(t, LetPair):
        if not is_value(t.bound):
            e, r = decompose(t.bound)
            return LetPair(t.x, t.y, e, t.body), r
        return HOLE, t
    if isinstance(t, If):
        if not is_value(t.cond):
            e, r = decompose(t.cond)
            return If(e, t.then, t.else_), r
        return HOLE, t
    if isinstance(t, New):
        return HOLE, t
    raise EvaluationStuck(f"no redex in {show_term(t)}")


def plug(e: Term, u: Term) -> Term:
    if isinstance(e, Hole):
        return u
    if isinstance(e, App):
        return App(plug(e.fun, u), e.arg) if _has_hole(e.fun) else App(e.fun, plug(e.arg, u))
    if isinstance(e, Pair):
        return Pair(plug(e.left, u), e.right) if _has_hole(e.left) else Pair(e.left, plug(e.right, u))
    if isinstance(e, LetPair):
        return LetPair(e.x, e.y, plug(e.bound, u), e.body)
    if isinstance(e, If):
        return If(plug(e.cond, u), e.then, e.else_)
    raise ValueError("not an evaluation context")


def _has_hole(t: Term) -> bool:
    return isinstance(t, Hole) or any(_has_hole(c) for c in _children(t))


# -- closures and evaluation -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Closure:
    register: QuantumRegister
    term: Term

    def canonical(self) -> "Closure":
        """Rename quantum variables q0, q1, ... by first occurrence and bound
        variables v0, v1, ... by binding order."""
        qs = free_qvars(self.term)
        qmap = {q: f"q{i}" for i, q in enumerate(qs)}
        counter = itertools.count()

        def go(u: Term, env: dict[str, str]) -> Term:
            if isinstance(u, QVar):
                return QVar(qmap[u.name])
            if isinstance(u, Var):
                return Var(env.get(u.name, u.name))
            if isinstance(u, Lam):
                new = f"v{next(counter)}"
                return Lam(new, go(u.body, {**env, u.var: new}), u.ann)
            if isinstance(u, LetPair):
                bound = go(u.bound, env)
                a, b = f"v{next(counter)}", f"v{next(counter)}"
                return LetPair(a, b, bound, go(u.body, {**env, u.x: a, u.y: b}))
            if isinstance(u, App):
                return App(go(u.fun, env), go(u.arg, env))
            if isinstance(u, Pair):
                return Pair(go(u.left, env), go(u.right, env))
            if isinstance(u, If):
                return If(go(u.cond, env), go(u.then, env), go(u.else_, env))
            return u

        return Closure(self.register.rename(qmap), go(self.term, {}))

    def same(self, other: "Closure", tol: float = TOL) -> bool:
        a, b = self.canonical(), other.canonical()
        return a.term == b.term and a.register.allclose(b.register, tol)

    def __str__(self) -> str:
        return f"[{self.register.pretty()}, {show_term(self.term)}]"


def closure(t: Term | str, register: QuantumRegister | None = None) -> Closure:
    if isinstance(t, str):
        t = parse(t)
    return Closure(register or QuantumRegister.empty(), t)


def _fresh_qvar(used) -> str:
    k = 0
    while f"q{k}" in used:
        k += 1
    return f"q{k}"


def _tuple_wires(v: Term) -> list[str]:
    if isinstance(v, QVar):
        return [v.name]
    if isinstance(v, Pair) and isinstance(v.right, QVar):
        return _tuple_wires(v.left) + [v.right.name]
    raise EvaluationStuck(f"gate argument {show_term(v)} is not a tuple of quantum variables")


def small_step(c: Closure, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES) -> list[tuple[float, Closure]]:
    e, r = decompose(c.term)
    if is_value(r):
        raise EvaluationStuck(f"{show_term(c.term)} is a value")
    q = c.register
    if isinstance(r, App) and isinstance(r.fun, Lam):
        return [(1.0, Closure(q, plug(e, substitute(r.fun.body, r.fun.var, r.arg))))]
    if isinstance(r, LetPair) and isinstance(r.bound, Pair):
        body = substitute(r.body, r.x, r.bound.left)
        body = substitute(body, r.y, r.bound.right)
        return [(1.0, Closure(q, plug(e, body)))]
    if isinstance(r, If) and isinstance(r.cond, (TT, FF)):
        return [(1.0, Closure(q, plug(e, r.then if isinstance(r.cond, TT) else r.else_)))]
    if isinstance(r, New):
        name = _fresh_qvar(set(q.qubits) | set(free_qvars(c.term)))
        return [(1.0, Closure(q.fresh(name), plug(e, QVar(name))))]
    if isinstance(r, App) and isinstance(r.fun, Unitary):
        wires = _tuple_wires(r.arg)
        return [(1.0, Closure(q.apply(gates[r.fun.name], wires), plug(e, r.arg)))]
    if isinstance(r, App) and isinstance(r.fun, Meas) and isinstance(r.arg, QVar):
        out = []
        for bit, val in ((0, TT()), (1, FF())):
            p = q.prob(r.arg.name, bit)
            if p > 1e-12:
                out.append((p, Closure(q.project(r.arg.name, bit), plug(e, val))))
        return out
    raise EvaluationStuck(f"no rule for {show_term(r)}")


def aggregate_closures(branches, tol: float = TOL) -> list[tuple[float, Closure]]:
    out: list[list] = []
    for p, c in branches:
        can = c.canonical()
        for entry in out:
            if entry[1].term == can.term and entry[1].register.allclose(can.register, tol):
                entry[0] += p
                break
        else:
            out.append([p, can])
    return [(p, c) for p, c in out]


def big_step(c: Closure, gates: Mapping[str, UnitarySpec] = BUILTIN_GATES,
             max_steps: int = 1_000_000) -> list[tuple[float, Closure]]:
    """The distribution of value closures reached from ``c``."""
    leaves = []
    todo = [(1.0, c)]
    steps = 0
    while todo:
        p, cur = todo.pop()
        if is_value(cur.term):
            leaves.append((p, cur))
            continue
        steps += 1
        if steps > max_steps:
            raise EvaluationStuck("evaluation did not terminate")
        todo.extend((p * q, nxt) for q, nxt in small_step(cur, gates))
    return aggregate_closures(leaves)


def classical_value(t: Term):
    """tt/ff and nested pairs of them as Python values; None otherwise."""
    if isinstance(t, TT):
        return "tt"
    if isinstance(t, FF):
        return "ff"
    if isinstance(t, Pair):
        a, b = classical_value(t.left), classical_value(t.right)
        if a is None or b is None:
            return None
        return (a, b)
    return None


def show_value(v) -> str:
    if isinstance(v, tuple):
        return f"<{show_value(v[0])},{show_value(v[1])}>"
    return str(v)


__all__ = [
    "Term", "Var", "QVar", "App", "Lam", "Pair", "LetPair", "New", "TT", "FF", "Meas",
    "Unitary", "If", "Hole", "HOLE", "show_term",
    "LType", "BoolT", "QubitT", "Lolli", "Tens", "TVar", "BOOL", "QUBIT", "qubits", "show_type",
    "LambdaSyntaxError", "parse", "parse_type",
    "LambdaTypeError", "CtxEntry", "Derivation", "typecheck", "free_qvars", "free_vars", "term_size",
    "substitute", "is_value", "decompose", "plug", "EvaluationStuck",
    "Closure", "closure", "small_step", "big_step", "aggregate_closures", "classical_value", "show_value",
]
