"""Surface expressions: syntax tree, parser, printer and groupoid-graded typing.

Grammar::

    expr   := term (';' term)*          glue, left then right
    term   := factor ('|' factor)*      disjoint union
    factor := gen | '(' expr ')'
    gen    := 'B' sign '(' ID ')'
            | 'C' '(' sign ',' sign ')' '(' ID ';' ID ')'
            | 'D' '(' sign ',' sign ',' sign ')' '(' ID ',' ID ';' ID ',' ID ')'
            | 'id' '(' ID (',' ID)* ')'
            | 'swap' '(' ID ',' ID ')'

Boundary conventions. Every generator lists its negative circles as inputs
and its positive circles as outputs:

* ``B+(x)``: output ``[1_x]``; ``B-(x)``: input ``[1_x]``.
* ``C(e,m)(a;b)`` has circles ``C0`` (label ``a``, sign ``e``) and ``C1``
  (label ``b a^(-e m) b^-1``, sign ``m``). Inputs in order (C0, C1);
  outputs in order (C1, C0).
* ``D(e,m,n)(a,b;r,d)`` has circles ``S`` (``a``, sign ``e``), ``T``
  (``b``, sign ``m``) and ``U`` (``outer_label``, sign ``n``). Inputs in
  order (S, T, U); outputs in order (T, S, U).

The identifier ``1_x`` denotes the identity at object ``x`` unless the
groupoid has a morphism literally named ``1_x``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .groupoid import Groupoid, GroupoidError, MorRef


class SurfaceError(ValueError):
    pass


class SurfaceSyntaxError(SurfaceError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{msg} at position {pos}")


class SurfaceTypeError(SurfaceError):
    pass


class GlueMismatch(SurfaceTypeError):
    def __init__(self, msg: str, index: int | None):
        self.index = index
        super().__init__(msg)


def sign_char(s: int) -> str:
    return "+" if s > 0 else "-"


# -- syntax tree ----------------------------------------------------------------

class Expr:
    __slots__ = ()

    def __str__(self):
        return pretty(self)


class Generator(Expr):
    __slots__ = ()


@dataclass(frozen=True)
class B(Generator):
    sign: int
    obj: str


@dataclass(frozen=True)
class C(Generator):
    eps: int
    mu: int
    alpha: str
    beta: str


@dataclass(frozen=True)
class D(Generator):
    eps: int
    mu: int
    nu: int
    alpha: str
    beta: str
    rho: str
    delta: str

    @property
    def signs(self) -> tuple[int, int, int]:
        return (self.eps, self.mu, self.nu)


@dataclass(frozen=True)
class Id(Generator):
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise SurfaceError("id needs at least one label")


@dataclass(frozen=True)
class Swap(Generator):
    a: str
    b: str


@dataclass(frozen=True)
class Tensor(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Glue(Expr):
    left: Expr
    right: Expr


def par(*parts: Expr | None) -> Expr | None:
    """Left-nested disjoint union, skipping empty parts."""
    out = None
    for p in parts:
        if p is not None:
            out = p if out is None else Tensor(out, p)
    return out


def then(*parts: Expr | None) -> Expr | None:
    """Left-nested gluing, skipping empty parts."""
    out = None
    for p in parts:
        if p is not None:
            out = p if out is None else Glue(out, p)
    return out


def ids(labels) -> Id | None:
    labels = tuple(_name(x) for x in labels)
    return Id(labels) if labels else None


def generators(e: Expr) -> list[Generator]:
    if isinstance(e, (Tensor, Glue)):
        return generators(e.left) + generators(e.right)
    return [e]


def size(e: Expr) -> int:
    return len(generators(e))


def _name(m) -> str:
    return m.id if isinstance(m, MorRef) else str(m)


# -- parsing --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z0-9_][A-Za-z0-9_.']*)|(?P<punct>[();,|+\-]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise SurfaceSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start("id") if m.group("id") else m.start("punct")
        kind = "id" if m.group("id") else m.group("punct")
        toks.append((kind, m.group("id") or m.group("punct"), start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class ExprParser:
    def __init__(self, text: str, groupoid: Groupoid | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.g = groupoid

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def err(self, msg, tok=None):
        tok = tok or self.peek()
        return SurfaceSyntaxError(msg, tok[2], self.text)

    def take(self, kind: str, what: str | None = None):
        tok = self.peek()
        if tok[0] != kind:
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise self.err(f"expected {what or repr(kind)}, found {found}")
        self.i += 1
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "eof":
            raise self.err(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[0] == ";":
            self.i += 1
            e = Glue(e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[0] == "|":
            self.i += 1
            e = Tensor(e, self.factor())
        return e

    def factor(self) -> Expr:
        tok = self.peek()
        if tok[0] == "(":
            self.i += 1
            e = self.expr()
            self.take(")", "')'")
            return e
        if tok[0] != "id":
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise self.err(f"expected a generator or '(', found {found}")
        return self.generator(tok)

    def generator(self, tok) -> Generator:
        word = tok[1]
        if word == "B" and self.peek(1)[0] in ("+", "-"):
            self.i += 1
            sign = self.sign()
            self.take("(", "'('")
            obj = self.obj(self.take("id", "an object id"))
            self.take(")", "')'")
            return B(sign, obj)
        if word in ("C", "D") and self.peek(1)[0] == "(":
            return self.cd(word)
        if word in ("id", "swap") and self.peek(1)[0] == "(":
            self.i += 2
            labels = [self.mor(self.take("id", "a morphism id"))]
            while self.peek()[0] == ",":
                self.i += 1
                labels.append(self.mor(self.take("id", "a morphism id")))
            self.take(")", "')'")
            if word == "swap":
                if len(labels) != 2:
                    raise self.err(f"swap takes 2 labels, got {len(labels)}", tok)
                return Swap(*labels)
            return Id(tuple(labels))
        raise self.err(f"unknown generator {word!r}", tok)

    def sign(self) -> int:
        tok = self.peek()
        if tok[0] not in ("+", "-"):
            raise self.err("expected '+' or '-'")
        self.i += 1
        return 1 if tok[0] == "+" else -1

    def cd(self, word: str) -> Generator:
        head = self.peek()
        self.i += 2
        signs = [self.sign()]
        while self.peek()[0] == ",":
            self.i += 1
            signs.append(self.sign())
        self.take(")", "')'")
        self.take("(", "'('")
        groups = [[self.take("id", "a morphism id")]]
        while self.peek()[0] in (",", ";"):
            if self.take(self.peek()[0])[0] == ";":
                groups.append([])
            groups[-1].append(self.take("id", "a morphism id"))
        self.take(")", "')'")
        want_signs, want_groups = (2, [1, 1]) if word == "C" else (3, [2, 2])
        got_groups = [len(gr) for gr in groups]
        if len(signs) != want_signs or got_groups != want_groups:
            shape = ";".join(",".join("ID" for _ in range(n)) for n in want_groups)
            raise self.err(f"{word} takes {want_signs} signs and labels ({shape}); "
                           f"got {len(signs)} signs and {';'.join(map(str, got_groups))} labels", head)
        names = [self.mor(t) for gr in groups for t in gr]
        if word == "C":
            return C(signs[0], signs[1], *names)
        return D(*signs, *names)

    def mor(self, tok) -> str:
        if self.g is None:
            return tok[1]
        try:
            return resolve(self.g, tok[1]).id
        except GroupoidError:
            raise self.err(f"unknown morphism id {tok[1]!r}", tok) from None

    def obj(self, tok) -> str:
        if self.g is not None and tok[1] not in self.g.objects:
            raise self.err(f"unknown object id {tok[1]!r}", tok)
        return tok[1]


def parse(text: str, groupoid: Groupoid | None = None) -> Expr:
    """Parse surface-expression text. With a groupoid, ids are also resolved."""
    return ExprParser(text, groupoid).parse()


def resolve(g: Groupoid, name) -> MorRef:
    if isinstance(name, MorRef):
        return g.mor(name)
    if name in g:
        return g.mor(name)
    if name.startswith("1_") and name[2:] in g.objects:
        return g.identity(name[2:])
    raise GroupoidError(f"unknown morphism {name!r}")


# -- printing -------------------------------------------------------------------

def pretty(e: Expr) -> str:
    if isinstance(e, B):
        return f"B{sign_char(e.sign)}({e.obj})"
    if isinstance(e, C):
        return f"C({sign_char(e.eps)},{sign_char(e.mu)})({e.alpha};{e.beta})"
    if isinstance(e, D):
        s = ",".join(sign_char(x) for x in e.signs)
        return f"D({s})({e.alpha},{e.beta};{e.rho},{e.delta})"
    if isinstance(e, Id):
        return f"id({','.join(e.labels)})"
    if isinstance(e, Swap):
        return f"swap({e.a},{e.b})"
    if isinstance(e, Generator) and hasattr(e, "render"):
        return e.render()
    if isinstance(e, Glue):
        right = pretty(e.right)
        if isinstance(e.right, Glue):
            right = f"({right})"
        return f"{pretty(e.left)} ; {right}"
    if isinstance(e, Tensor):
        def wrap(x, nested_ok):
            s = pretty(x)
            if isinstance(x, Glue) or (isinstance(x, Tensor) and not nested_ok):
                return f"({s})"
            return s
        return f"{wrap(e.left, True)} | {wrap(e.right, False)}"
    raise TypeError(f"not a surface expression: {e!r}")


# -- typing ---------------------------------------------------------------------

def _loop(g: Groupoid, name, what: str) -> MorRef:
    try:
        m = resolve(g, name)
    except GroupoidError as e:
        raise SurfaceTypeError(str(e)) from None
    if not m.is_loop:
        raise SurfaceTypeError(f"{what} {m.id!r} is not a loop")
    return m


def _mor(g: Groupoid, name) -> MorRef:
    try:
        return resolve(g, name)
    except GroupoidError as e:
        raise SurfaceTypeError(str(e)) from None


def cylinder_labels(gen: C, g: Groupoid) -> tuple[MorRef, MorRef]:
    """The labels of circles C0 and C1."""
    a = _loop(g, gen.alpha, "C label")
    b = _mor(g, gen.beta)
    if b.tgt != a.src:
        raise SurfaceTypeError(f"C path {b.id!r} must end at {a.src!r}, the base of {a.id!r}")
    return a, g.conjugate(g.power(a, -gen.eps * gen.mu), b)


def outer_label(eps: int, mu: int, nu: int, alpha, beta, rho, delta, g: Groupoid) -> MorRef:
    """``(r a^-e r^-1 d b^-m d^-1)^n``, the loop at the common source of r and d."""
    a, b = _loop(g, alpha, "D label"), _loop(g, beta, "D label")
    r, d = _mor(g, rho), _mor(g, delta)
    if r.tgt != a.src:
        raise SurfaceTypeError(f"D path {r.id!r} must end at {a.src!r}, the base of {a.id!r}")
    if d.tgt != b.src:
        raise SurfaceTypeError(f"D path {d.id!r} must end at {b.src!r}, the base of {b.id!r}")
    if r.src != d.src:
        raise SurfaceTypeError(f"D paths {r.id!r} and {d.id!r} must start at the same object")
    inner = g.compose(g.conjugate(g.power(a, -eps), r), g.conjugate(g.power(b, -mu), d))
    return g.power(inner, nu)


def disc_circles(gen: D, g: Groupoid) -> dict[str, tuple[MorRef, int]]:
    """Role (S, T, U) -> (label, sign)."""
    gam = outer_label(*gen.signs, gen.alpha, gen.beta, gen.rho, gen.delta, g)
    return {"S": (resolve(g, gen.alpha), gen.eps), "T": (resolve(g, gen.beta), gen.mu),
            "U": (gam, gen.nu)}


INPUT_ORDER = {"C": ("C0", "C1"), "D": ("S", "T", "U")}
OUTPUT_ORDER = {"C": ("C1", "C0"), "D": ("T", "S", "U")}


def boundary_roles(gen: Generator, g: Groupoid) -> tuple[list[tuple[str, MorRef]], list[tuple[str, MorRef]]]:
    """Input and output circles of a C or D generator as (role, label) lists."""
    if isinstance(gen, C):
        c0, c1 = cylinder_labels(gen, g)
        circles, kind = {"C0": (c0, gen.eps), "C1": (c1, gen.mu)}, "C"
    elif isinstance(gen, D):
        circles, kind = disc_circles(gen, g), "D"
    else:
        raise TypeError("boundary roles exist only for C and D")
    ins = [(r, circles[r][0]) for r in INPUT_ORDER[kind] if circles[r][1] < 0]
    outs = [(r, circles[r][0]) for r in OUTPUT_ORDER[kind] if circles[r][1] > 0]
    return ins, outs


Signature = tuple[MorRef, ...]


def generator_signature(gen: Generator, g: Groupoid) -> tuple[Signature, Signature]:
    if isinstance(gen, B):
        if gen.obj not in g.objects:
            raise SurfaceTypeError(f"unknown object {gen.obj!r}")
        u = (g.identity(gen.obj),)
        return ((), u) if gen.sign > 0 else (u, ())
    if isinstance(gen, Id):
        labels = tuple(_loop(g, x, "id label") for x in gen.labels)
        return labels, labels
    if isinstance(gen, Swap):
        a, b = _loop(g, gen.a, "swap label"), _loop(g, gen.b, "swap label")
        return (a, b), (b, a)
    if isinstance(gen, (C, D)):
        ins, outs = boundary_roles(gen, g)
        return tuple(m for _, m in ins), tuple(m for _, m in outs)
    raise TypeError(f"not a generator: {gen!r}")


def _sig_str(sig) -> str:
    return "[" + ", ".join(m.id for m in sig) + "]"


def typecheck(e: Expr, g: Groupoid) -> tuple[Signature, Signature]:
    """Input and output boundary signatures of ``e``."""
    if isinstance(e, Tensor):
        li, lo = typecheck(e.left, g)
        ri, ro = typecheck(e.right, g)
        return li + ri, lo + ro
    if isinstance(e, Glue):
        li, lo = typecheck(e.left, g)
        ri, ro = typecheck(e.right, g)
        if lo != ri:
            idx = next((k for k, (x, y) in enumerate(zip(lo, ri)) if x != y), min(len(lo), len(ri)))
            raise GlueMismatch(
                f"cannot glue output {_sig_str(lo)} of {pretty(e.left)!r} to input {_sig_str(ri)} "
                f"of {pretty(e.right)!r}: first disagreement at index {idx}", idx)
        return li, ro
    return generator_signature(e, g)


# -- disc rotation --------------------------------------------------------------

CANONICAL_D = {(-1, -1, -1), (-1, -1, 1), (1, 1, -1), (1, 1, 1)}

# roles of the original disc seen from the rotated one
ROTATION_ROLES = {"S": "U", "T": "S", "U": "T"}


def rotate_disc(d: D, g: Groupoid) -> D:
    """``D(e,m,n)(a,b;r,d) -> D(m,n,e)(b,c;r^-1 d, r^-1)`` with ``c`` the outer label."""
    gam = outer_label(*d.signs, d.alpha, d.beta, d.rho, d.delta, g)
    r, dl = resolve(g, d.rho), resolve(g, d.delta)
    ri = g.inverse(r)
    return D(d.mu, d.nu, d.eps, resolve(g, d.beta).id, gam.id, g.compose(ri, dl).id, ri.id)


def canonical_rotation(d: D, g: Groupoid) -> tuple[int, D]:
    """Rotate ``d`` at most twice to reach a canonical sign pattern."""
    k, cur = 0, d
    while cur.signs not in CANONICAL_D:
        cur = rotate_disc(cur, g)
        k += 1
    return k, cur


# -- duality --------------------------------------------------------------------

def dual_signature(sig, g: Groupoid) -> Signature:
    return tuple(g.inverse(resolve(g, m)) for m in reversed(sig))


def ev_expr(sig, g: Groupoid) -> Expr | None:
    """Nested evaluation ``M (x) M* -> I`` built from ``C(-,-)(a;1)``."""
    sig = [resolve(g, m) for m in sig]
    out = None
    while sig:
        a = sig.pop()
        cap = C(-1, -1, a.id, g.identity(a.src).id)
        stage = par(ids(sig), cap, ids(dual_signature(sig, g)))
        out = then(out, stage)
    return out


def coev_expr(sig, g: Groupoid) -> Expr | None:
    """Nested coevaluation ``I -> M* (x) M`` built from ``C(+,+)(a;1)``."""
    sig = [resolve(g, m) for m in sig]
    out = None
    for k in range(len(sig) - 1, -1, -1):
        a, rest = sig[k], sig[k + 1:]
        cup = C(1, 1, a.id, g.identity(a.src).id)
        out = then(out, par(ids(dual_signature(rest, g)), cup, ids(rest)))
    return out


def dualize(e: Expr, g: Groupoid) -> Expr:
    """The dual cobordism ``M1* -> M0*`` of ``e: M0 -> M1``."""
    m0, m1 = typecheck(e, g)
    d0, d1 = dual_signature(m0, g), dual_signature(m1, g)
    out = then(par(coev_expr(m0, g), ids(d1)),
               par(ids(d0), e, ids(d1)),
               par(ids(d0), ev_expr(m1, g)))
    return out


# -- enumeration ----------------------------------------------------------------

def enumerate_expressions(alphabet, g: Groupoid, max_generators: int, max_width: int = 3):
    """All well-typed expressions over ``alphabet`` up to bracketing.

    Both operations are associative, so only left-nested trees are produced:
    the right child of a glue is never a glue, and likewise for disjoint
    union. Every subexpression has at most ``max_width`` circles on each
    side. Yields expressions grouped by number of generators.
    """
    by_size: list[list[tuple[Expr, tuple, tuple]]] = [[]]
    leaves = []
    for gen in alphabet:
        i, o = generator_signature(gen, g)
        if len(i) <= max_width and len(o) <= max_width:
            leaves.append((gen, i, o))
    by_size.append(leaves)
    yield from (e for e, _, _ in leaves)
    for n in range(2, max_generators + 1):
        level = []
        for k in range(1, n):
            for l, li, lo in by_size[k]:
                for r, ri, ro in by_size[n - k]:
                    if not isinstance(r, Tensor) and len(li) + len(ri) <= max_width \
                            and len(lo) + len(ro) <= max_width:
                        level.append((Tensor(l, r), li + ri, lo + ro))
                    if not isinstance(r, Glue) and lo == ri:
                        level.append((Glue(l, r), li, ro))
        by_size.append(level)
        yield from (e for e, _, _ in level)
