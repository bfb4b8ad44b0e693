"""One-dimensional theories: groupoid representations and 1-cobordism expressions.

A representation sends each object ``y`` to ``K^(d_y)`` and each morphism
``g: y -> z`` to a ``d_z x d_y`` matrix, with ``mats(g h) = mats(h) mats(g)``.
Signed points ``+y`` and ``-y`` stand for ``F(y)`` and its dual, both with
standard coordinates.

Grammar (same glue/union/bracket rules as surface expressions)::

    gen := 'ev' '(' ID ')'                 [+y, -y] -> []
         | 'coev' '(' ID ')'               [] -> [-y, +y]
         | 'interval' '(' ID ',' sign ')'  [+y] -> [+z]  or  [-y] -> [-z]
         | 'circle' '(' ID ')'             [] -> []
         | 'swap' '(' pt ',' pt ')'
         | 'id' '(' pt (',' pt)* ')'
    pt  := sign ID
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactlin import ExactMatrix, FieldSpec, QQ, compose, identity, matrix_from_json, \
    matrix_to_json, symmetry, tensor
from .groupoid import Groupoid, GroupoidError, MorRef
from .report import Report
from .surface import (
    Expr, ExprParser, GlueMismatch, Generator, Glue, SurfaceTypeError, Tensor, resolve, sign_char,
)

Point = tuple[str, int]  # (object, sign)


class RepError(ValueError):
    pass


# -- representations ------------------------------------------------------------

@dataclass(eq=False)
class DualizableRep:
    groupoid: Groupoid
    dims: dict[str, int]
    mats: dict[str, ExactMatrix]
    field: FieldSpec = QQ

    def __post_init__(self):
        g = self.groupoid
        for x in g.objects:
            d = self.dims.get(x)
            if not isinstance(d, int) or isinstance(d, bool) or d < 0:
                raise RepError(f"dims[{x!r}] must be a natural number, got {d!r}")
        for m in g.morphisms:
            if m.id not in self.mats:
                raise RepError(f"no matrix for morphism {m.id!r}")
            mat = self.mats[m.id]
            want = (self.dims[m.tgt], self.dims[m.src])
            if mat.shape != want or mat.field != self.field:
                raise RepError(f"mats[{m.id!r}] has shape {mat.shape}, expected {want}")

    def __call__(self, m) -> ExactMatrix:
        return self.mats[resolve(self.groupoid, m).id]

    def dim(self, point) -> int:
        obj = point[0] if isinstance(point, tuple) else point
        return self.dims[obj]

    def to_json(self, embed_groupoid: bool = False) -> dict:
        out = {"field": self.field.to_json(), "dims": dict(self.dims),
               "mats": {k: matrix_to_json(v) for k, v in self.mats.items()}}
        if embed_groupoid:
            out["groupoid"] = self.groupoid.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict, groupoid: Groupoid | None = None) -> DualizableRep:
        if not isinstance(data, dict):
            raise RepError("representation JSON must be an object")
        if groupoid is None:
            if "groupoid" not in data:
                raise RepError("no groupoid supplied and none embedded in the representation JSON")
            groupoid = Groupoid.from_json(data["groupoid"])
        try:
            fld = FieldSpec.from_json(data.get("field", "rationals"))
            mats = {k: matrix_from_json(v, fld) for k, v in data["mats"].items()}
            return cls(groupoid, dict(data["dims"]), mats, fld)
        except (KeyError, TypeError, AttributeError, ValueError) as e:
            if isinstance(e, RepError):
                raise
            raise RepError(f"malformed representation JSON: {e}") from e


def validate_rep(r: DualizableRep) -> Report:
    g, rep = r.groupoid, Report()
    for x in g.objects:
        rep.expect_equal("rep.identity", (x,), r(g.identity(x)), identity(r.dims[x], r.field))
    for a, b in g.composable_pairs():
        rep.expect_equal("rep.composition", (a, b), r(g.compose(a, b)), compose(r(a), r(b)))
    return rep


def trivial_representation(g: Groupoid, field: FieldSpec = QQ) -> DualizableRep:
    return DualizableRep(g, {x: 1 for x in g.objects},
                         {m.id: identity(1, field) for m in g.morphisms}, field)


def scalar_representation(g: Groupoid, values: dict[str, object], field: FieldSpec = QQ) -> DualizableRep:
    """One-dimensional representation ``m -> [values[m]]``."""
    return DualizableRep(g, {x: 1 for x in g.objects},
                         {m.id: ExactMatrix.scalar(values[m.id], field) for m in g.morphisms}, field)


def regular_representation(g: Groupoid, field: FieldSpec = QQ) -> DualizableRep:
    """``F(x)`` has a basis of the morphisms into ``x``; ``a`` sends ``c`` to ``c a``."""
    basis = {x: g.into(x) for x in g.objects}
    mats = {}
    for a in g.morphisms:
        src, tgt = basis[a.src], basis[a.tgt]
        pos = {c: i for i, c in enumerate(tgt)}
        rows = [[field.zero] * len(src) for _ in tgt]
        for j, c in enumerate(src):
            rows[pos[g.compose(c, a)]][j] = field.one
        mats[a.id] = ExactMatrix(len(tgt), len(src), [v for row in rows for v in row], field)
    return DualizableRep(g, {x: len(basis[x]) for x in g.objects}, mats, field)


def circle_invariant(r: DualizableRep, loop):
    m = resolve(r.groupoid, loop)
    if not m.is_loop:
        raise RepError(f"{m.id!r} is not a loop")
    mat = r(m)
    total = r.field.zero
    for i in range(mat.rows):
        total = r.field.reduce(total + mat[i, i])
    return total


# -- 1D expressions ---------------------------------------------------------------

def _pt(p: Point) -> str:
    return f"{sign_char(p[1])}{p[0]}"


@dataclass(frozen=True)
class Ev(Generator):
    obj: str

    def render(self):
        return f"ev({self.obj})"


@dataclass(frozen=True)
class Coev(Generator):
    obj: str

    def render(self):
        return f"coev({self.obj})"


@dataclass(frozen=True)
class Interval(Generator):
    mor: str
    sign: int

    def render(self):
        return f"interval({self.mor},{sign_char(self.sign)})"


@dataclass(frozen=True)
class Circle(Generator):
    mor: str

    def render(self):
        return f"circle({self.mor})"


@dataclass(frozen=True)
class PointSwap(Generator):
    a: Point
    b: Point

    def render(self):
        return f"swap({_pt(self.a)},{_pt(self.b)})"


@dataclass(frozen=True)
class PointId(Generator):
    points: tuple[Point, ...]

    def render(self):
        return f"id({','.join(_pt(p) for p in self.points)})"


class _Parser1D(ExprParser):
    def point(self) -> Point:
        sign = self.sign()
        return (self.obj(self.take("id", "an object id")), sign)

    def generator(self, tok):
        word = tok[1]
        if self.peek(1)[0] != "(" or word not in ("ev", "coev", "interval", "circle", "swap", "id"):
            raise self.err(f"unknown 1D generator {word!r}", tok)
        self.i += 2
        if word in ("ev", "coev"):
            obj = self.obj(self.take("id", "an object id"))
            out = Ev(obj) if word == "ev" else Coev(obj)
        elif word == "interval":
            m = self.mor(self.take("id", "a morphism id"))
            self.take(",", "','")
            out = Interval(m, self.sign())
        elif word == "circle":
            out = Circle(self.mor(self.take("id", "a morphism id")))
        else:
            pts = [self.point()]
            while self.peek()[0] == ",":
                self.i += 1
                pts.append(self.point())
            if word == "swap":
                if len(pts) != 2:
                    raise self.err(f"swap takes 2 points, got {len(pts)}", tok)
                out = PointSwap(*pts)
            else:
                out = PointId(tuple(pts))
        self.take(")", "')'")
        return out


def parse_1d(text: str, groupoid: Groupoid | None = None) -> Expr:
    return _Parser1D(text, groupoid).parse()


def _gen_signature(gen, g: Groupoid) -> tuple[tuple[Point, ...], tuple[Point, ...]]:
    def obj(x):
        if x not in g.objects:
            raise SurfaceTypeError(f"unknown object {x!r}")
        return x

    if isinstance(gen, Ev):
        y = obj(gen.obj)
        return ((y, 1), (y, -1)), ()
    if isinstance(gen, Coev):
        y = obj(gen.obj)
        return (), ((y, -1), (y, 1))
    if isinstance(gen, (Interval, Circle)):
        try:
            m = resolve(g, gen.mor)
        except GroupoidError as e:
            raise SurfaceTypeError(str(e)) from None
        if isinstance(gen, Circle):
            if not m.is_loop:
                raise SurfaceTypeError(f"circle label {m.id!r} is not a loop")
            return (), ()
        return ((m.src, gen.sign),), ((m.tgt, gen.sign),)
    if isinstance(gen, PointSwap):
        a, b = (obj(gen.a[0]), gen.a[1]), (obj(gen.b[0]), gen.b[1])
        return (a, b), (b, a)
    if isinstance(gen, PointId):
        pts = tuple((obj(x), s) for x, s in gen.points)
        return pts, pts
    raise TypeError(f"not a 1D generator: {gen!r}")


def typecheck_1d(e: Expr, g: Groupoid):
    if isinstance(e, Tensor):
        li, lo = typecheck_1d(e.left, g)
        ri, ro = typecheck_1d(e.right, g)
        return li + ri, lo + ro
    if isinstance(e, Glue):
        li, lo = typecheck_1d(e.left, g)
        ri, ro = typecheck_1d(e.right, g)
        if lo != ri:
            idx = next((k for k, (x, y) in enumerate(zip(lo, ri)) if x != y), min(len(lo), len(ri)))
            raise GlueMismatch(f"cannot glue output [{', '.join(map(_pt, lo))}] to input "
                               f"[{', '.join(map(_pt, ri))}]: first disagreement at index {idx}", idx)
        return li, ro
    return _gen_signature(e, g)


def _std_ev(n: int, field) -> ExactMatrix:
    return ExactMatrix(1, n * n, [field.one if k // n == k % n else field.zero for k in range(n * n)], field)


def circle_expr(loop: MorRef) -> Expr:
    """The circle cut open at its base point: coev, transport, swap, ev."""
    y = loop.src
    return Glue(Glue(Glue(Coev(y), Tensor(PointId(((y, -1),)), Interval(loop.id, 1))),
                     PointSwap((y, -1), (y, 1))), Ev(y))


def _eval_gen(gen, r: DualizableRep) -> ExactMatrix:
    g, f = r.groupoid, r.field
    if isinstance(gen, Ev):
        return _std_ev(r.dims[gen.obj], f)
    if isinstance(gen, Coev):
        return _std_ev(r.dims[gen.obj], f).transpose()
    if isinstance(gen, Interval):
        m = resolve(g, gen.mor)
        return r(m) if gen.sign > 0 else r(g.inverse(m)).transpose()
    if isinstance(gen, Circle):
        return evaluate_1d(circle_expr(resolve(g, gen.mor)), r)
    if isinstance(gen, PointSwap):
        return symmetry(r.dim(gen.a), r.dim(gen.b), f)
    if isinstance(gen, PointId):
        n = 1
        for p in gen.points:
            n *= r.dim(p)
        return identity(n, f)
    raise TypeError(f"not a 1D generator: {gen!r}")


def evaluate_1d(e: Expr, r: DualizableRep, check: bool = True) -> ExactMatrix:
    if check:
        typecheck_1d(e, r.groupoid)
    if isinstance(e, Glue):
        return compose(evaluate_1d(e.left, r, False), evaluate_1d(e.right, r, False))
    if isinstance(e, Tensor):
        return tensor(evaluate_1d(e.left, r, False), evaluate_1d(e.right, r, False))
    return _eval_gen(e, r)

