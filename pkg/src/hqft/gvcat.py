"""Groupoid-graded Frobenius categories and crossed loop data.

A graded category assigns a finite-dimensional space ``L_a`` to every graded
morphism ``a`` of a groupoid (every morphism, or only the loops) together
with structure maps stored as exact matrices:

==========  ======================================  =========================
block       map                                     shape
==========  ======================================  =========================
m[a,b]      L_a (x) L_b -> L_ab                     d_ab x (d_a d_b)
j[x]        I -> L_1x                               d_1x x 1
delta[a,b]  L_ab -> L_a (x) L_b                     (d_a d_b) x d_ab
nu[x]       L_1x -> I                               1 x d_1x
eta[a]      L_a (x) L_a^-1 -> I                     1 x (d_a d_a^-1)
coev[a]     I -> L_a^-1 (x) L_a                     (d_a^-1 d_a) x 1
phi[a,b]    L_a -> L_(b a b^-1)                     d_bab^-1 x d_a
==========  ======================================  =========================

Groupoid products are diagrammatic (``ab`` is a then b). Every identity below
is written with :func:`seq`, which lists maps in the order they are applied.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field, replace
from typing import Iterable, Mapping

from .exactlin import (
    ExactLinError, ExactMatrix, FieldSpec, compose, identity, matrix_from_json,
    matrix_to_json, permutation, symmetry, tensor,
)
from .groupoid import Groupoid, GroupoidError, MorRef
from .report import Report

ALL = "all"
LOOPS = "loops"

MODES = ("category", "opcategory", "frobenius", "inner_product", "symmetry",
         "lemma_identities", "coev_unique", "consistency")

_REQUIRES = {
    "category": ("m", "j"),
    "opcategory": ("delta", "nu"),
    "frobenius": ("m", "delta"),
    "inner_product": ("m", "eta", "coev"),
    "symmetry": ("eta", "coev"),
    "lemma_identities": ("m", "eta", "coev"),
    "coev_unique": ("eta", "coev"),
    "consistency": ("delta", "nu", "eta", "coev"),
}


class CategoryError(ValueError):
    """Malformed or incomplete graded category data."""


class MissingBlock(CategoryError):
    pass


def seq(*maps: ExactMatrix) -> ExactMatrix:
    """Composite of ``maps`` applied left to right."""
    if len(maps) == 1:
        return maps[0]
    return compose(*maps)


def tp(*maps: ExactMatrix) -> ExactMatrix:
    return tensor(*maps) if len(maps) > 1 else maps[0]


def _key(m) -> str:
    return m.id if isinstance(m, MorRef) else str(m)


@dataclass(eq=False)
class GVCategory:
    groupoid: Groupoid
    grading: str
    field: FieldSpec
    dims: dict[str, int]
    m: dict[tuple[str, str], ExactMatrix]
    j: dict[str, ExactMatrix]
    delta: dict[tuple[str, str], ExactMatrix] | None = None
    nu: dict[str, ExactMatrix] | None = None
    eta: dict[str, ExactMatrix] | None = None
    coev: dict[str, ExactMatrix] | None = None

    def __post_init__(self):
        if self.grading not in (ALL, LOOPS):
            raise CategoryError(f"grading must be {ALL!r} or {LOOPS!r}, got {self.grading!r}")
        self._check_shapes()

    # -- grading --------------------------------------------------------

    @property
    def loops_only(self) -> bool:
        return self.grading == LOOPS

    def graded(self) -> list[MorRef]:
        return self.groupoid.loops() if self.loops_only else list(self.groupoid.morphisms)

    def pairs(self):
        return self.groupoid.composable_pairs(self.loops_only)

    def triples(self):
        return self.groupoid.composable_triples(self.loops_only)

    def mor(self, a) -> MorRef:
        return self.groupoid.mor(a)

    def mul(self, a, b) -> MorRef:
        return self.groupoid.compose(a, b)

    def inv(self, a) -> MorRef:
        return self.groupoid.inverse(a)

    def unit(self, x: str) -> MorRef:
        return self.groupoid.identity(x)

    # -- blocks ---------------------------------------------------------

    def dim(self, a) -> int:
        try:
            return self.dims[_key(a)]
        except KeyError:
            raise CategoryError(f"no dimension for {_key(a)!r}") from None

    def id(self, *labels) -> ExactMatrix:
        """Identity on ``L_a1 (x) ... (x) L_ak``."""
        n = 1
        for a in labels:
            n *= self.dim(a)
        return identity(n, self.field)

    def sigma(self, a, b) -> ExactMatrix:
        """The swap ``L_a (x) L_b -> L_b (x) L_a``."""
        return symmetry(self.dim(a), self.dim(b), self.field)

    def _get(self, block: str, key):
        table = getattr(self, block)
        if table is None:
            raise MissingBlock(f"category has no {block!r} block")
        try:
            return table[key]
        except KeyError:
            raise CategoryError(f"{block} has no entry for {key!r}") from None

    def M(self, a, b) -> ExactMatrix:
        return self._get("m", (_key(a), _key(b)))

    def J(self, x: str) -> ExactMatrix:
        return self._get("j", x)

    def D(self, a, b) -> ExactMatrix:
        return self._get("delta", (_key(a), _key(b)))

    def N(self, x: str) -> ExactMatrix:
        return self._get("nu", x)

    def E(self, a) -> ExactMatrix:
        return self._get("eta", _key(a))

    def C(self, a) -> ExactMatrix:
        return self._get("coev", _key(a))

    def has(self, *blocks: str) -> bool:
        return all(getattr(self, b) is not None for b in blocks)

    def require(self, *blocks: str) -> None:
        missing = [b for b in blocks if getattr(self, b) is None]
        if missing:
            raise MissingBlock(f"category is missing block(s): {', '.join(missing)}")

    # -- shape validation -----------------------------------------------

    def _check_shapes(self) -> None:
        g = self.groupoid
        graded = self.graded()
        for a in graded:
            d = self.dims.get(a.id)
            if not isinstance(d, int) or isinstance(d, bool) or d < 0:
                raise CategoryError(f"dims[{a.id!r}] must be a natural number, got {d!r}")
        gids = {a.id for a in graded}
        for k in self.dims:
            if k not in gids:
                raise CategoryError(f"dims has entry for ungraded morphism {k!r}")

        def expect(block, key, shape):
            table = getattr(self, block)
            if table is None:
                return
            if key not in table:
                raise CategoryError(f"{block} is missing entry {key!r}")
            mat = table[key]
            if mat.field != self.field:
                raise CategoryError(f"{block}[{key!r}] is over {mat.field}, expected {self.field}")
            if mat.shape != shape:
                raise CategoryError(f"{block}[{key!r}] has shape {mat.shape}, expected {shape}")

        pairs = [(a.id, b.id) for a, b in self.pairs()]
        for block in ("m", "delta"):
            table = getattr(self, block)
            if table is not None:
                extra = set(table) - set(pairs)
                if extra:
                    raise CategoryError(f"{block} has entries for non-composable pairs {sorted(extra)}")
        for a, b in self.pairs():
            dab = self.dim(g.compose(a, b))
            expect("m", (a.id, b.id), (dab, self.dim(a) * self.dim(b)))
            expect("delta", (a.id, b.id), (self.dim(a) * self.dim(b), dab))
        for x in g.objects:
            d1 = self.dim(g.identity(x))
            expect("j", x, (d1, 1))
            expect("nu", x, (1, d1))
        for a in graded:
            ai = g.inverse(a)
            if self.eta is not None and self.dim(a) != self.dim(ai):
                raise CategoryError(f"d({a.id}) != d({ai.id}) but an inner product is present")
            expect("eta", a.id, (1, self.dim(a) * self.dim(ai)))
            expect("coev", a.id, (self.dim(ai) * self.dim(a), 1))


@dataclass(eq=False)
class CrossedFrobData:
    base: GVCategory
    phi: dict[tuple[str, str], ExactMatrix] = dc_field(default_factory=dict)

    def __post_init__(self):
        b = self.base
        if b.grading != LOOPS:
            raise CategoryError("crossed data needs a loops-only category")
        b.require("m", "j", "delta", "nu", "eta", "coev")
        for a, beta in self.crossing_pairs():
            key = (a.id, beta.id)
            if key not in self.phi:
                raise CategoryError(f"phi is missing entry {key!r}")
            mat = self.phi[key]
            shape = (b.dim(self.groupoid.conjugate(a, beta)), b.dim(a))
            if mat.field != b.field or mat.shape != shape:
                raise CategoryError(f"phi[{key!r}] has shape {mat.shape}, expected {shape}")

    @property
    def groupoid(self) -> Groupoid:
        return self.base.groupoid

    @property
    def field(self) -> FieldSpec:
        return self.base.field

    def crossing_pairs(self):
        """Every (loop a at x, b: y -> x)."""
        g = self.groupoid
        for a in g.loops():
            for beta in g.into(a.src):
                yield a, beta

    def P(self, a, b) -> ExactMatrix:
        try:
            return self.phi[(_key(a), _key(b))]
        except KeyError:
            raise CategoryError(f"phi has no entry for ({_key(a)}, {_key(b)})") from None


# -- axiom checks ------------------------------------------------------------

def _check_category(c: GVCategory, rep: Report) -> None:
    for a, b, g in c.triples():
        ab, bg = c.mul(a, b), c.mul(b, g)
        lhs = seq(tp(c.M(a, b), c.id(g)), c.M(ab, g))
        rhs = seq(tp(c.id(a), c.M(b, g)), c.M(a, bg))
        rep.expect_equal("category.associativity", (a, b, g), lhs, rhs)
    for a in c.graded():
        rep.expect_equal("category.unit_left", (a,),
                         seq(tp(c.J(a.src), c.id(a)), c.M(c.unit(a.src), a)), c.id(a))
        rep.expect_equal("category.unit_right", (a,),
                         seq(tp(c.id(a), c.J(a.tgt)), c.M(a, c.unit(a.tgt))), c.id(a))


def _check_opcategory(c: GVCategory, rep: Report) -> None:
    for a, b, g in c.triples():
        ab, bg = c.mul(a, b), c.mul(b, g)
        lhs = seq(c.D(ab, g), tp(c.D(a, b), c.id(g)))
        rhs = seq(c.D(a, bg), tp(c.id(a), c.D(b, g)))
        rep.expect_equal("opcategory.coassociativity", (a, b, g), lhs, rhs)
    for a in c.graded():
        rep.expect_equal("opcategory.counit_left", (a,),
                         seq(c.D(c.unit(a.src), a), tp(c.N(a.src), c.id(a))), c.id(a))
        rep.expect_equal("opcategory.counit_right", (a,),
                         seq(c.D(a, c.unit(a.tgt)), tp(c.id(a), c.N(a.tgt))), c.id(a))


def _check_frobenius(c: GVCategory, rep: Report) -> None:
    for a, b, g in c.triples():
        ab, bg = c.mul(a, b), c.mul(b, g)
        lhs = seq(c.M(ab, g), c.D(a, bg))
        rhs = seq(tp(c.D(a, b), c.id(g)), tp(c.id(a), c.M(b, g)))
        rep.expect_equal("frobenius.fc3_left", (a, b, g), lhs, rhs)
        lhs = seq(c.M(a, bg), c.D(ab, g))
        rhs = seq(tp(c.id(a), c.D(b, g)), tp(c.M(a, b), c.id(g)))
        rep.expect_equal("frobenius.fc3_right", (a, b, g), lhs, rhs)


def _check_inner_product(c: GVCategory, rep: Report) -> None:
    for a in c.graded():
        ai = c.inv(a)
        rep.expect_equal("inner_product.zigzag_left", (a,),
                         seq(tp(c.id(a), c.C(a)), tp(c.E(a), c.id(a))), c.id(a))
        rep.expect_equal("inner_product.zigzag_right", (a,),
                         seq(tp(c.C(a), c.id(ai)), tp(c.id(ai), c.E(a))), c.id(ai))
    for a, b in c.pairs():
        ab = c.mul(a, b)
        gm = c.inv(ab)
        lhs = seq(tp(c.M(a, b), c.id(gm)), c.E(ab))
        rhs = seq(tp(c.id(a), c.M(b, gm)), c.E(a))
        rep.expect_equal("inner_product.invariance", (a, b), lhs, rhs)


def _check_symmetry(c: GVCategory, rep: Report) -> None:
    for a in c.graded():
        ai = c.inv(a)
        rep.expect_equal("symmetry.eta", (a,), c.E(a), seq(c.sigma(a, ai), c.E(ai)))
        rep.expect_equal("symmetry.coev", (a,), seq(c.C(a), c.sigma(ai, a)), c.C(ai))


def _check_lemma(c: GVCategory, rep: Report) -> None:
    for a, b in c.pairs():
        ab = c.mul(a, b)
        abi, bi = c.inv(ab), c.inv(b)
        mab = c.M(a, b)
        lm1 = seq(tp(c.C(abi), c.id(a, b)), tp(c.id(ab, abi), mab), tp(c.id(ab), c.E(abi)))
        lm2 = seq(tp(c.C(abi), c.id(a, b)), tp(c.id(ab), c.M(abi, a), c.id(b)),
                  tp(c.id(ab), c.E(bi)))
        lm3 = seq(tp(c.id(a, b), c.C(ab)), tp(mab, c.id(abi, ab)), tp(c.E(ab), c.id(ab)))
        lm4 = seq(tp(c.id(a, b), c.C(ab)), tp(c.id(a), c.M(b, abi), c.id(ab)),
                  tp(c.E(a), c.id(ab)))
        for name, val in (("lm1", lm1), ("lm2", lm2), ("lm3", lm3), ("lm4", lm4)):
            rep.expect_equal(f"lemma_identities.{name}", (a, b), val, mab)


def _zigzag_system(c: GVCategory, a: MorRef) -> tuple[ExactMatrix, ExactMatrix]:
    """The zig-zag equations as a linear system ``A x = b`` in the coev entries."""
    ai = c.inv(a)
    n = c.dim(ai) * c.dim(a)
    f = c.field
    cols, rhs_cols = [], None
    for k in range(n):
        e = ExactMatrix(n, 1, [f.one if i == k else f.zero for i in range(n)], f)
        z1 = seq(tp(c.id(a), e), tp(c.E(a), c.id(a)))
        z2 = seq(tp(e, c.id(ai)), tp(c.id(ai), c.E(a)))
        cols.append(z1.entries + z2.entries)
    rhs_cols = c.id(a).entries + c.id(ai).entries
    rows = len(rhs_cols)
    A = ExactMatrix(rows, n, [cols[k][i] for i in range(rows) for k in range(n)], f)
    b = ExactMatrix(rows, 1, rhs_cols, f)
    return A, b


def _check_coev_unique(c: GVCategory, rep: Report) -> None:
    for a in c.graded():
        A, b = _zigzag_system(c, a)
        stored = ExactMatrix(A.cols, 1, c.C(a).entries, c.field)
        solves = (A @ stored) == b
        unique = A.rank() == A.cols
        note = "" if unique else f"zig-zag solution space has dimension {A.cols - A.rank()}"
        rep.add("coev_unique", (a,), solves and unique, A @ stored, b, note)


def _check_consistency(c: GVCategory, rep: Report) -> None:
    eta, coev = derive_eta_coev(c)
    delta, nu = derive_delta_nu(c)
    for a in c.graded():
        rep.expect_equal("consistency.eta", (a,), eta[a.id], c.E(a))
        rep.expect_equal("consistency.coev", (a,), coev[a.id], c.C(a))
    for a, b in c.pairs():
        rep.expect_equal("consistency.delta", (a, b), delta[(a.id, b.id)], c.D(a, b))
    for x in c.groupoid.objects:
        rep.expect_equal("consistency.nu", (x,), nu[x], c.N(x))


_CHECKERS = {
    "category": _check_category,
    "opcategory": _check_opcategory,
    "frobenius": _check_frobenius,
    "inner_product": _check_inner_product,
    "symmetry": _check_symmetry,
    "lemma_identities": _check_lemma,
    "coev_unique": _check_coev_unique,
    "consistency": _check_consistency,
}


def check_axioms(cat: GVCategory | CrossedFrobData, which: Iterable[str] = MODES) -> Report:
    """Check every instance of the requested axiom families exactly."""
    c = cat.base if isinstance(cat, CrossedFrobData) else cat
    which = list(dict.fromkeys(which))
    for mode in which:
        if mode not in _CHECKERS:
            raise CategoryError(f"unknown check mode {mode!r}; expected one of {', '.join(MODES)}")
        c.require(*_REQUIRES[mode])
    rep = Report()
    for mode in which:
        _CHECKERS[mode](c, rep)
    return rep


def available_modes(cat: GVCategory) -> list[str]:
    return [m for m in MODES if cat.has(*_REQUIRES[m])]


# -- conversions ------------------------------------------------------------

def derive_eta_coev(cat: GVCategory) -> tuple[dict, dict]:
    """Inner product and copairing from (m, j, delta, nu)."""
    cat.require("m", "j", "delta", "nu")
    eta, coev = {}, {}
    for a in cat.graded():
        ai = cat.inv(a)
        eta[a.id] = seq(cat.M(a, ai), cat.N(a.src))
        coev[a.id] = seq(cat.J(a.tgt), cat.D(ai, a))
    return eta, coev


def derive_delta_nu(cat: GVCategory) -> tuple[dict, dict]:
    """Comultiplication and counit from (m, j, eta, coev)."""
    cat.require("m", "j", "eta", "coev")
    delta, nu = {}, {}
    for a, b in cat.pairs():
        ab, ai = cat.mul(a, b), cat.inv(a)
        delta[(a.id, b.id)] = seq(tp(cat.C(ai), cat.id(ab)), tp(cat.id(a), cat.M(ai, ab)))
    for x in cat.groupoid.objects:
        u = cat.unit(x)
        nu[x] = seq(tp(cat.J(x), cat.id(u)), cat.E(u))
    return delta, nu


def delta_alternative(cat: GVCategory, a, b) -> ExactMatrix:
    """The comultiplication built from the right: (L_ab (x) coev_b) then (m_{ab,b^-1} (x) L_b)."""
    ab = cat.mul(a, b)
    return seq(tp(cat.id(ab), cat.C(b)), tp(cat.M(ab, cat.inv(b)), cat.id(b)))


def with_eta_coev(cat: GVCategory) -> GVCategory:
    eta, coev = derive_eta_coev(cat)
    return replace(cat, eta=eta, coev=coev)


def with_delta_nu(cat: GVCategory) -> GVCategory:
    delta, nu = derive_delta_nu(cat)
    return replace(cat, delta=delta, nu=nu)


def complete(cat: GVCategory) -> GVCategory:
    """Fill whichever of (delta, nu) / (eta, coev) is missing."""
    if not cat.has("eta", "coev"):
        cat = with_eta_coev(cat)
    if not cat.has("delta", "nu"):
        cat = with_delta_nu(cat)
    return cat


# -- traces and duals ---------------------------------------------------------

def partial_trace(cfd: CrossedFrobData | GVCategory, alpha, beta, f: ExactMatrix) -> ExactMatrix:
    """Close the ``L_beta`` factor of ``f: L_alpha (x) L_beta -> L_beta``."""
    c = cfd.base if isinstance(cfd, CrossedFrobData) else cfd
    da, db = c.dim(alpha), c.dim(beta)
    if f.shape != (db, da * db):
        raise ExactLinError(f"partial trace needs shape {(db, da * db)}, got {f.shape}")
    bi = c.inv(beta)
    return seq(tp(c.id(alpha), c.C(bi)), tp(f, c.id(bi)), c.E(beta))


def zigzag_ok(ev: ExactMatrix, coev: ExactMatrix, d: int, dstar: int) -> bool:
    """``ev: A (x) A* -> I`` and ``coev: I -> A* (x) A`` satisfy both zig-zags."""
    f = ev.field
    try:
        z1 = seq(tp(identity(d, f), coev), tp(ev, identity(d, f)))
        z2 = seq(tp(coev, identity(dstar, f)), tp(identity(dstar, f), ev))
    except ExactLinError:
        return False
    return z1 == identity(d, f) and z2 == identity(dstar, f)


def _duality_dims(pair) -> tuple[int, int]:
    ev, coev = pair
    n = ev.cols
    if coev.rows != n or coev.cols != 1 or ev.rows != 1:
        raise ExactLinError("duality pair has inconsistent shapes")
    return n, n


def dual_morphism(f: ExactMatrix, dualityA, dualityB, dims=None) -> ExactMatrix:
    """Transpose ``f: A -> B`` through duality pairs, giving ``f*: B* -> A*``.

    Each duality is ``(ev: X (x) X* -> I, coev: I -> X* (x) X)``. ``dims``
    gives ``((dA, dA*), (dB, dB*))``; by default they are read off ``f``.
    """
    evA, coevA = dualityA
    evB, coevB = dualityB
    fld = f.field
    if dims is None:
        dA, dB = f.cols, f.rows
        dims = ((dA, evA.cols // dA if dA else coevA.rows), (dB, evB.cols // dB if dB else coevB.rows))
    (dA, dAs), (dB, dBs) = dims
    if f.shape != (dB, dA):
        raise ExactLinError(f"f has shape {f.shape}, expected {(dB, dA)}")
    if not zigzag_ok(evA, coevA, dA, dAs) or not zigzag_ok(evB, coevB, dB, dBs):
        raise ExactLinError("duality pair violates the zig-zag identities")
    IAs, IBs = identity(dAs, fld), identity(dBs, fld)
    return seq(tp(coevA, IBs), tp(IAs, f, IBs), tp(IAs, evB))


# -- crossing checks ------------------------------------------------------------

def check_crossing(cfd: CrossedFrobData) -> Report:
    c, g, rep = cfd.base, cfd.groupoid, Report()
    P = cfd.P
    conj = g.conjugate
    for x in g.objects:
        loops = g.loops_at(x)
        u = g.identity(x)
        for beta in g.into(x):
            y = beta.src
            for a in loops:
                for a2 in loops:
                    aa = g.compose(a, a2)
                    ca, ca2 = conj(a, beta), conj(a2, beta)
                    rep.expect_equal("LF1.m", (a, a2, beta),
                                     seq(c.M(a, a2), P(aa, beta)),
                                     seq(tp(P(a, beta), P(a2, beta)), c.M(ca, ca2)))
                    rep.expect_equal("LF1.delta", (a, a2, beta),
                                     seq(c.D(a, a2), tp(P(a, beta), P(a2, beta))),
                                     seq(P(aa, beta), c.D(ca, ca2)))
            rep.expect_equal("LF1.j", (x, beta), seq(c.J(x), P(u, beta)), c.J(y))
            rep.expect_equal("LF1.nu", (x, beta), seq(P(u, beta), c.N(y)), c.N(x))
            for a in loops:
                ca = conj(a, beta)
                for gam in g.into(y):
                    rep.expect_equal("LF2.compose", (a, beta, gam),
                                     seq(P(a, beta), P(ca, gam)), P(a, g.compose(gam, beta)))
                # shared with the cylinder generators
                cai = g.inverse(ca)
                rep.expect_equal("derived.cylinder_eta", (a, beta),
                                 seq(tp(c.id(a), P(cai, g.inverse(beta))), c.E(a)),
                                 seq(tp(P(a, beta), c.id(cai)), c.E(ca)))
                rep.expect_equal("derived.cylinder_coev", (a, beta),
                                 seq(c.C(a), tp(P(g.inverse(a), beta), c.id(a))),
                                 seq(c.C(ca), tp(c.id(cai), P(ca, g.inverse(beta)))))
        for a in loops:
            rep.expect_equal("LF2.unit", (a,), P(a, u), c.id(a))
            rep.expect_equal("LF3.dehn", (a,), P(a, a), c.id(a))
            ai = g.inverse(a)
            rep.expect_equal("derived.eta_symmetric", (a,), c.E(a), seq(c.sigma(a, ai), c.E(ai)))
            rep.expect_equal("derived.coev_symmetric", (a,), seq(c.C(a), c.sigma(ai, a)), c.C(ai))
            rep.expect_equal("derived.m_commutative", (a,), seq(c.sigma(a, a), c.M(a, a)), c.M(a, a))
            for b in loops:
                rep.expect_equal("LF3.swap", (a, b),
                                 seq(c.sigma(a, b), c.M(b, a)),
                                 seq(tp(P(a, b), c.id(b)), c.M(conj(a, b), b)))
                lhs, rhs = torus_traces(cfd, a, b)
                rep.expect_equal("LF3.torus", (a, b), lhs, rhs)
        for b in loops:
            for b2 in loops:
                rep.expect_equal("derived.action", (x, b, b2),
                                 seq(P(u, b), P(u, b2)), P(u, g.compose(b2, b)))
    return rep


def commutator(g: Groupoid, a, b) -> MorRef:
    """``a b a^-1 b^-1`` for loops at one object."""
    return g.compose(a, b, g.inverse(a), g.inverse(b))


def torus_traces(cfd: CrossedFrobData, a, b) -> tuple[ExactMatrix, ExactMatrix]:
    """Both sides of the punctured-torus identity, as maps ``L_k -> I`` with ``k = [a, b]``."""
    c, g = cfd.base, cfd.groupoid
    k = commutator(g, a, b)
    f_a = seq(tp(c.id(k), cfd.P(a, b)), c.M(k, g.conjugate(a, b)))
    f_b = seq(c.M(k, b), cfd.P(g.conjugate(b, a), g.inverse(a)))
    return partial_trace(c, k, a, f_a), partial_trace(c, k, b, f_b)


# -- constructions --------------------------------------------------------------

def groupoid_algebra_category(g: Groupoid, field: FieldSpec, grading: str = ALL) -> GVCategory:
    """The groupoid algebra: one basis vector ``l_a`` per graded morphism."""
    rep = g.validate()
    if not rep.passed:
        raise GroupoidError(f"groupoid fails validation: {rep.failures[0].check} {rep.failures[0].instance}")
    one = ExactMatrix.scalar(1, field)
    loops = grading == LOOPS
    graded = g.loops() if loops else g.morphisms
    pairs = [(a.id, b.id) for a, b in g.composable_pairs(loops)]
    return GVCategory(
        groupoid=g, grading=grading, field=field,
        dims={a.id: 1 for a in graded},
        m={p: one for p in pairs},
        j={x: one for x in g.objects},
        delta={p: one for p in pairs},
        nu={x: one for x in g.objects},
        eta={a.id: one for a in graded},
        coev={a.id: one for a in graded},
    )


def groupoid_algebra(g: Groupoid, field: FieldSpec) -> CrossedFrobData:
    """Loops-only groupoid algebra with the relabelling crossing ``l_a -> l_(b a b^-1)``."""
    base = groupoid_algebra_category(g, field, LOOPS)
    one = ExactMatrix.scalar(1, field)
    phi = {(a.id, b.id): one for a in g.loops() for b in g.into(a.src)}
    return CrossedFrobData(base, phi)


def identity_crossing(cfd: CrossedFrobData) -> CrossedFrobData:
    """Replace the crossing by the graded block of the identity on the sum of all ``L_a``.

    ``phi[a, b]`` becomes the identity when ``b a b^-1 = a`` and zero otherwise.
    """
    g, c = cfd.groupoid, cfd.base
    phi = {}
    for a, b in cfd.crossing_pairs():
        ca = g.conjugate(a, b)
        phi[(a.id, b.id)] = (c.id(a) if ca == a
                             else ExactMatrix.zeros(c.dim(ca), c.dim(a), c.field))
    return CrossedFrobData(c, phi)


def gauge(cfd: CrossedFrobData, isos: Mapping[str, ExactMatrix]) -> CrossedFrobData:
    """Transport all structure along invertible maps ``T_a: L_a -> L'_a``.

    The result is isomorphic to the input, so it satisfies exactly the same
    identities, but its matrices are dense and non-symmetric.
    """
    c, g = cfd.base, cfd.groupoid
    T = {a.id: isos[a.id] for a in c.graded()}
    Ti = {k: v.inverse() for k, v in T.items()}

    def conj_in(*labels):  # inverse transport on a tensor of labels
        return tp(*[Ti[_key(x)] for x in labels])

    def conj_out(*labels):
        return tp(*[T[_key(x)] for x in labels])

    m, delta = {}, {}
    for a, b in c.pairs():
        ab = g.compose(a, b)
        m[(a.id, b.id)] = seq(conj_in(a, b), c.M(a, b), conj_out(ab))
        delta[(a.id, b.id)] = seq(conj_in(ab), c.D(a, b), conj_out(a, b))
    j, nu = {}, {}
    for x in g.objects:
        u = g.identity(x)
        j[x] = seq(c.J(x), T[u.id])
        nu[x] = seq(Ti[u.id], c.N(x))
    eta, coev = {}, {}
    for a in c.graded():
        ai = g.inverse(a)
        eta[a.id] = seq(conj_in(a, ai), c.E(a))
        coev[a.id] = seq(c.C(a), conj_out(ai, a))
    phi = {(a.id, b.id): seq(Ti[a.id], cfd.P(a, b), T[g.conjugate(a, b).id])
           for a, b in cfd.crossing_pairs()}
    base = replace(c, m=m, j=j, delta=delta, nu=nu, eta=eta, coev=coev)
    return CrossedFrobData(base, phi)


def random_invertible(n: int, field: FieldSpec, rng: random.Random, lo: int = -3, hi: int = 3) -> ExactMatrix:
    while True:
        m = ExactMatrix(n, n, [rng.randint(lo, hi) for _ in range(n * n)], field)
        if m.rank() == n:
            return m


def random_gauge(cfd: CrossedFrobData, seed: int = 0) -> CrossedFrobData:
    rng = random.Random(seed)
    isos = {a.id: random_invertible(cfd.base.dim(a), cfd.field, rng) for a in cfd.base.graded()}
    return gauge(cfd, isos)


def _shuffle(d1: int, d2: int, e1: int, e2: int, field) -> ExactMatrix:
    """``(A1 (x) A2) (x) (B1 (x) B2) -> (A1 (x) B1) (x) (A2 (x) B2)``."""
    return permutation([d1, d2, e1, e2], [0, 2, 1, 3], field)


def tensor_product(p: CrossedFrobData, q: CrossedFrobData) -> CrossedFrobData:
    """Label-wise tensor product ``L_a = P_a (x) Q_a`` of two crossed data on one groupoid."""
    if p.groupoid is not q.groupoid and p.groupoid.to_json() != q.groupoid.to_json():
        raise CategoryError("tensor product needs a common groupoid")
    if p.field != q.field:
        raise CategoryError("tensor product needs a common field")
    P, Q, g, f = p.base, q.base, p.groupoid, p.field
    dims = {a.id: P.dim(a) * Q.dim(a) for a in P.graded()}

    def sh(a, b):
        return _shuffle(P.dim(a), Q.dim(a), P.dim(b), Q.dim(b), f)

    def unsh(a, b):
        return _shuffle(P.dim(a), P.dim(b), Q.dim(a), Q.dim(b), f)

    m, delta, eta, coev = {}, {}, {}, {}
    for a, b in P.pairs():
        m[(a.id, b.id)] = seq(sh(a, b), tp(P.M(a, b), Q.M(a, b)))
        delta[(a.id, b.id)] = seq(tp(P.D(a, b), Q.D(a, b)), unsh(a, b))
    for a in P.graded():
        ai = g.inverse(a)
        eta[a.id] = seq(sh(a, ai), tp(P.E(a), Q.E(a)))
        coev[a.id] = seq(tp(P.C(a), Q.C(a)), unsh(ai, a))
    j = {x: tp(P.J(x), Q.J(x)) for x in g.objects}
    nu = {x: tp(P.N(x), Q.N(x)) for x in g.objects}
    base = GVCategory(g, LOOPS, f, dims, m, j, delta, nu, eta, coev)
    phi = {(a.id, b.id): tp(p.P(a, b), q.P(a, b)) for a, b in p.crossing_pairs()}
    return CrossedFrobData(base, phi)


def diagonal_frobenius(weights, field: FieldSpec) -> tuple[ExactMatrix, ...]:
    """``K^n`` with idempotent basis and counit ``e_i -> w_i``; returns (m, j, delta, nu)."""
    n = len(weights)
    z, one = field.zero, field.one
    w = [field.coerce(x) for x in weights]
    if any(x == z for x in w):
        raise CategoryError("diagonal Frobenius weights must be non-zero")
    m = ExactMatrix(n, n * n, [one if (c // n == c % n == r) else z for r in range(n) for c in range(n * n)], field)
    j = ExactMatrix(n, 1, [one] * n, field)
    delta = ExactMatrix(n * n, n, [field.inv(w[c]) if r // n == r % n == c else z
                                   for r in range(n * n) for c in range(n)], field)
    nu = ExactMatrix(1, n, w, field)
    return m, j, delta, nu


def constant_crossed(g: Groupoid, m: ExactMatrix, j: ExactMatrix, delta: ExactMatrix,
                     nu: ExactMatrix) -> CrossedFrobData:
    """Put one commutative Frobenius algebra on every loop, crossing by the identity."""
    f, n = m.field, m.rows
    loops = g.loops()
    pairs = [(a.id, b.id) for a, b in g.composable_pairs(True)]
    base = GVCategory(g, LOOPS, f, {a.id: n for a in loops},
                      {p: m for p in pairs}, {x: j for x in g.objects},
                      {p: delta for p in pairs}, {x: nu for x in g.objects})
    base = with_eta_coev(base)
    phi = {(a.id, b.id): identity(n, f) for a in loops for b in g.into(a.src)}
    return CrossedFrobData(base, phi)


def twisted_example(g: Groupoid, field: FieldSpec, weights=(1, 2), seed: int = 0) -> CrossedFrobData:
    """A multi-dimensional crossed structure: groupoid algebra times a diagonal
    Frobenius algebra, then gauged by random invertible matrices."""
    alg = constant_crossed(g, *diagonal_frobenius(weights, field))
    return random_gauge(tensor_product(groupoid_algebra(g, field), alg), seed)


# -- JSON -----------------------------------------------------------------------

def _pair_key(k: tuple[str, str], sep: str) -> str:
    return f"{k[0]}{sep}{k[1]}"


def category_to_json(cat: GVCategory | CrossedFrobData, embed_groupoid: bool = False) -> dict:
    c = cat.base if isinstance(cat, CrossedFrobData) else cat
    out: dict = {"field": c.field.to_json(), "grading": c.grading, "dims": dict(c.dims)}
    if embed_groupoid:
        out["groupoid"] = c.groupoid.to_json()
    out["m"] = {_pair_key(k, ","): matrix_to_json(v) for k, v in c.m.items()}
    out["j"] = {k: matrix_to_json(v) for k, v in c.j.items()}
    if c.delta is not None:
        out["delta"] = {_pair_key(k, ","): matrix_to_json(v) for k, v in c.delta.items()}
    for name in ("nu", "eta", "coev"):
        table = getattr(c, name)
        if table is not None:
            out[name] = {k: matrix_to_json(v) for k, v in table.items()}
    if isinstance(cat, CrossedFrobData):
        out["phi"] = {_pair_key(k, "|"): matrix_to_json(v) for k, v in cat.phi.items()}
    return out


def _split(key: str, sep: str) -> tuple[str, str]:
    parts = key.split(sep)
    if len(parts) != 2 or not all(parts):
        raise CategoryError(f"malformed pair key {key!r}; expected 'a{sep}b'")
    return parts[0], parts[1]


def load_blocks(data: dict, groupoid: Groupoid | None = None):
    """Parse category JSON as stored, without deriving anything.

    Returns ``(category, phi)`` where ``phi`` is ``None`` when absent.
    """
    if not isinstance(data, dict):
        raise CategoryError("category JSON must be an object")
    try:
        if groupoid is None:
            if "groupoid" not in data:
                raise CategoryError("no groupoid supplied and none embedded in the category JSON")
            groupoid = Groupoid.from_json(data["groupoid"])
        fld = FieldSpec.from_json(data.get("field", "rationals"))
        grading = data.get("grading", LOOPS if "phi" in data else ALL)
        dims = data["dims"]
        if not isinstance(dims, dict):
            raise CategoryError("dims must be an object")

        def mats(name, pair_sep=None):
            if name not in data:
                return None
            block = data[name]
            if not isinstance(block, dict):
                raise CategoryError(f"{name} must be an object")
            return {(_split(k, pair_sep) if pair_sep else k): matrix_from_json(v, fld)
                    for k, v in block.items()}

        kw = dict(m=mats("m", ","), j=mats("j"), delta=mats("delta", ","), nu=mats("nu"),
                  eta=mats("eta"), coev=mats("coev"))
        if kw["m"] is None or kw["j"] is None:
            raise MissingBlock("category JSON needs 'm' and 'j'")
        return GVCategory(groupoid, grading, fld, dict(dims), **kw), mats("phi", "|")
    except CategoryError:
        raise
    except (KeyError, TypeError, ValueError, GroupoidError) as e:
        raise CategoryError(f"malformed category JSON: {e}") from e


def category_from_json(data: dict, groupoid: Groupoid | None = None) -> GVCategory | CrossedFrobData:
    """Parse category JSON. With a ``phi`` block the result is crossed data,
    and a missing (eta, coev) or (delta, nu) pair is derived."""
    cat, phi = load_blocks(data, groupoid)
    if phi is None:
        return cat
    return CrossedFrobData(complete(cat), phi)
