"""Evaluation of surface expressions as exact linear maps, plus the move harness.

Generator dictionary (maps listed in application order, ``c = b a b^-1``):

* ``B+(x) = j_x``, ``B-(x) = nu_x``
* ``C(-,+)(a;b) = phi[a,b]``
* ``C(-,-)(a;b) = (phi[a,b] (x) 1) ; eta_c``
* ``C(+,+)(a;b) = coev_a ; (phi[a^-1,b] (x) 1)``
* ``C(+,-)(a;b) = C(-,+)(c;b^-1)``
* ``D(-,-,+) = (phi (x) phi) ; m``
* ``D(-,-,-) = (phi (x) phi (x) 1) ; (m (x) 1) ; eta``
* ``D(+,+,-) = delta ; (phi (x) phi)``
* ``D(+,+,+) = coev ; (delta (x) 1) ; (phi (x) phi (x) 1)``

Other disc sign patterns are rotated into one of these four and the result is
conjugated by the permutations relating the two boundary orders.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable

from .exactlin import ExactMatrix, compose, identity, permutation, tensor
from .groupoid import Groupoid, MorRef
from .gvcat import CategoryError, CrossedFrobData, seq, tp
from .report import Report
from .surface import (
    ROTATION_ROLES, B, C, D, Expr, Generator, Glue, Id, Swap, Tensor, boundary_roles,
    canonical_rotation, dual_signature, generator_signature, ids, outer_label, par, resolve,
    then, typecheck,
)


class EvaluationError(ValueError):
    pass


def _canonical_disc(d: D, cfd: CrossedFrobData) -> ExactMatrix:
    c, g = cfd.base, cfd.groupoid
    P = cfd.P
    a, b = resolve(g, d.alpha), resolve(g, d.beta)
    r, dl = resolve(g, d.rho), resolve(g, d.delta)
    ra, db = g.conjugate(a, r), g.conjugate(b, dl)
    signs = d.signs
    if signs == (-1, -1, 1):
        return seq(tp(P(a, r), P(b, dl)), c.M(ra, db))
    if signs == (-1, -1, -1):
        gam = g.inverse(g.compose(ra, db))
        return seq(tp(P(a, r), P(b, dl), c.id(gam)), tp(c.M(ra, db), c.id(gam)),
                   c.E(g.inverse(gam)))
    back = tp(P(db, g.inverse(dl)), P(ra, g.inverse(r)))
    if signs == (1, 1, -1):
        return seq(c.D(db, ra), back)
    gam = g.inverse(g.compose(db, ra))
    return seq(c.C(gam), tp(c.D(db, ra), c.id(gam)), tp(back, c.id(gam)))


def _reorder(src_roles, dst_roles, dims_by_role, field) -> ExactMatrix:
    """Permutation taking factors ordered by ``src_roles`` to ``dst_roles``."""
    dims = [dims_by_role[r] for r in src_roles]
    return permutation(dims, [src_roles.index(r) for r in dst_roles], field)


def eval_disc(d: D, cfd: CrossedFrobData) -> ExactMatrix:
    g = cfd.groupoid
    k, canon = canonical_rotation(d, g)
    if k == 0:
        return _canonical_disc(d, cfd)
    ins, outs = boundary_roles(d, g)
    cins, couts = boundary_roles(canon, g)
    # role names of the rotated disc, translated back to the original disc
    back = {"S": "S", "T": "T", "U": "U"}
    for _ in range(k):
        back = {new: back[old] for old, new in ROTATION_ROLES.items()}
    cin_roles = [back[r] for r, _ in cins]
    cout_roles = [back[r] for r, _ in couts]
    dims = {r: cfd.base.dim(m) for r, m in ins + outs}
    f = cfd.field
    return seq(_reorder([r for r, _ in ins], cin_roles, dims, f),
               _canonical_disc(canon, cfd),
               _reorder(cout_roles, [r for r, _ in outs], dims, f))


def eval_generator(gen: Generator, cfd: CrossedFrobData) -> ExactMatrix:
    c, g = cfd.base, cfd.groupoid
    ins, outs = generator_signature(gen, g)
    try:
        if isinstance(gen, B):
            return c.J(gen.obj) if gen.sign > 0 else c.N(gen.obj)
        if isinstance(gen, Id):
            return c.id(*ins)
        if isinstance(gen, Swap):
            return c.sigma(*ins)
        if isinstance(gen, C):
            a, b = resolve(g, gen.alpha), resolve(g, gen.beta)
            ca = g.conjugate(a, b)
            key = (gen.eps, gen.mu)
            if key == (-1, 1):
                return cfd.P(a, b)
            if key == (1, -1):
                return cfd.P(ca, g.inverse(b))
            if key == (-1, -1):
                return seq(tp(cfd.P(a, b), c.id(g.inverse(ca))), c.E(ca))
            ai = g.inverse(a)
            return seq(c.C(a), tp(cfd.P(ai, b), c.id(a)))
        if isinstance(gen, D):
            return eval_disc(gen, cfd)
    except CategoryError as e:
        raise EvaluationError(f"cannot evaluate {gen}: {e}") from e
    raise TypeError(f"not a generator: {gen!r}")


def evaluate(e: Expr, cfd: CrossedFrobData, check: bool = True) -> ExactMatrix:
    """The linear map assigned to ``e``; typechecks first unless ``check`` is false."""
    if check:
        typecheck(e, cfd.groupoid)
    return _eval(e, cfd, {})


def _eval(e: Expr, cfd, memo) -> ExactMatrix:
    if isinstance(e, Glue):
        return compose(_eval(e.left, cfd, memo), _eval(e.right, cfd, memo))
    if isinstance(e, Tensor):
        return tensor(_eval(e.left, cfd, memo), _eval(e.right, cfd, memo))
    if e not in memo:
        memo[e] = eval_generator(e, cfd)
    return memo[e]


# -- independent contraction oracle --------------------------------------------------

def _wire_graph(e: Expr, g: Groupoid):
    """Flatten ``e`` into boxes joined by wires.

    Returns (boxes, inputs, outputs, nwires) where every box is
    ``(generator, in_wires, out_wires)`` and identities and swaps are pure
    rewirings. Glued wires are merged with a union-find.
    """
    parent: list[int] = []

    def new() -> int:
        parent.append(len(parent))
        return len(parent) - 1

    def find(w):
        while parent[w] != w:
            parent[w] = parent[parent[w]]
            w = parent[w]
        return w

    boxes = []

    def walk(x):
        if isinstance(x, Tensor):
            li, lo = walk(x.left)
            ri, ro = walk(x.right)
            return li + ri, lo + ro
        if isinstance(x, Glue):
            li, lo = walk(x.left)
            ri, ro = walk(x.right)
            for a, b in zip(lo, ri):
                parent[find(a)] = find(b)
            return li, ro
        ins, outs = generator_signature(x, g)
        if isinstance(x, Id):
            ws = [new() for _ in ins]
            return ws, list(ws)
        if isinstance(x, Swap):
            a, b = new(), new()
            return [a, b], [b, a]
        wi, wo = [new() for _ in ins], [new() for _ in outs]
        boxes.append((x, wi, wo))
        return wi, wo

    typecheck(e, g)
    ins, outs = walk(e)
    boxes = [(x, [find(w) for w in wi], [find(w) for w in wo]) for x, wi, wo in boxes]
    return boxes, [find(w) for w in ins], [find(w) for w in outs]


def _wire_dims(e: Expr, cfd) -> dict[int, int]:
    # dims per wire come from the labels at each box or boundary
    g = cfd.groupoid
    boxes, ins, outs = _wire_graph(e, g)
    i_sig, o_sig = typecheck(e, g)
    dims = {}
    for w, m in itertools.chain(zip(ins, i_sig), zip(outs, o_sig)):
        dims[w] = cfd.base.dim(m)
    for x, wi, wo in boxes:
        si, so = generator_signature(x, g)
        for w, m in itertools.chain(zip(wi, si), zip(wo, so)):
            dims[w] = cfd.base.dim(m)
    return dims


def contraction_oracle(e: Expr, cfd: CrossedFrobData) -> ExactMatrix:
    """Evaluate ``e`` by summing generator entries over every internal wire value.

    Uses only the generator matrices, never matrix products or Kronecker
    products, so it independently checks how ``evaluate`` folds a tree.
    """
    g, f = cfd.groupoid, cfd.field
    boxes, ins, outs = _wire_graph(e, g)
    dims = _wire_dims(e, cfd)
    mats = [eval_generator(x, cfd) for x, _, _ in boxes]
    boundary = set(ins) | set(outs)
    internal = sorted({w for _, wi, wo in boxes for w in wi + wo} - boundary)

    def index(ws, val):
        k = 0
        for w in ws:
            k = k * dims[w] + val[w]
        return k

    n_out = 1
    for w in outs:
        n_out *= dims[w]
    n_in = 1
    for w in ins:
        n_in *= dims[w]
    data = [[f.zero] * n_in for _ in range(n_out)]
    bwires = sorted(boundary)
    for bvals in itertools.product(*[range(dims[w]) for w in bwires]):
        val = dict(zip(bwires, bvals))
        total = f.zero
        for ivals in itertools.product(*[range(dims[w]) for w in internal]):
            val.update(zip(internal, ivals))
            term = f.one
            for m, (_, wi, wo) in zip(mats, boxes):
                term = f.reduce(term * m[index(wo, val), index(wi, val)])
                if term == f.zero:
                    break
            total = f.reduce(total + term)
        data[index(outs, val)][index(ins, val)] = total
    return ExactMatrix(n_out, n_in, [x for row in data for x in row], f)


# -- named surfaces -------------------------------------------------------------------

def commutator_label(g: Groupoid, a, b) -> MorRef:
    a, b = resolve(g, a), resolve(g, b)
    return g.compose(a, b, g.inverse(a), g.inverse(b))


def punctured_torus(g: Groupoid, alpha, beta, form: str = "alpha") -> Expr:
    """Torus with one input circle labelled ``a b a^-1 b^-1``.

    ``form="alpha"`` closes the ``a`` strand of ``D(-,-,+)(k,a;1,b)``;
    ``form="beta"`` closes the ``b`` strand of ``D(-,-,+)(k,b;a^-1,a^-1)``.
    """
    a, b = resolve(g, alpha), resolve(g, beta)
    if not (a.is_loop and b.is_loop and a.src == b.src):
        raise EvaluationError(f"{a.id} and {b.id} must be loops at one object")
    one = g.identity(a.src).id
    k = commutator_label(g, a, b)
    if form == "alpha":
        closed, disc = a, D(-1, -1, 1, k.id, a.id, one, b.id)
    elif form == "beta":
        ai = g.inverse(a).id
        closed, disc = b, D(-1, -1, 1, k.id, b.id, ai, ai)
    else:
        raise ValueError("form must be 'alpha' or 'beta'")
    ci = g.inverse(closed)
    return then(par(Id((k.id,)), C(1, 1, ci.id, one)),
                par(disc, Id((ci.id,))),
                C(-1, -1, closed.id, one))


def torus(g: Groupoid, alpha, beta, form: str = "alpha") -> Expr:
    """Closed torus; needs ``a`` and ``b`` to commute."""
    a = resolve(g, alpha)
    if not g.is_identity(commutator_label(g, alpha, beta)):
        raise EvaluationError("closed torus needs commuting labels")
    return then(B(1, a.src), punctured_torus(g, alpha, beta, form))


def sphere(obj: str) -> Expr:
    return Glue(B(1, obj), B(-1, obj))


def duality_matrices(cfd: CrossedFrobData, sig) -> tuple[ExactMatrix, ExactMatrix]:
    """Nested (ev, coev) for a boundary signature, assembled from eta and coev directly."""
    c, g, f = cfd.base, cfd.groupoid, cfd.field
    sig = [resolve(g, m) for m in sig]
    ev = identity(1, f)
    coev = identity(1, f)
    for k in range(len(sig) - 1, -1, -1):
        a, rest = sig[k], sig[k + 1:]
        ev = seq(tp(c.id(a), ev, c.id(g.inverse(a))), c.E(a))
        coev = seq(coev, tp(c.id(*dual_signature(rest, g)), c.C(a), c.id(*rest)))
    return ev, coev


# -- move harness ---------------------------------------------------------------------

class _Moves:
    def __init__(self, cfd: CrossedFrobData, seed: int, trials: int, cap: int):
        self.cfd, self.g = cfd, cfd.groupoid
        self.rng = random.Random(seed)
        self.trials, self.cap = trials, cap
        self.rep = Report(meta={"seed": seed, "trials": trials, "cap": cap, "sampled": {}})

    def tuples(self, name: str, space: list[tuple]) -> Iterable[tuple]:
        if len(space) <= self.cap:
            return space
        self.rep.meta["sampled"][name] = {"space": len(space), "checked": self.trials}
        return self.rng.sample(space, self.trials)

    def check(self, name: str, instance, lhs: Expr, rhs: Expr) -> None:
        g = self.g
        sl, sr = typecheck(lhs, g), typecheck(rhs, g)
        if sl != sr:
            self.rep.add(name, instance, False, note=f"signatures differ: {lhs} vs {rhs}")
            return
        self.rep.expect_equal(name, instance, evaluate(lhs, self.cfd, False),
                              evaluate(rhs, self.cfd, False))

    # label spaces
    def loops(self):
        return self.g.loops()

    def loop_path(self):
        return [(a, b) for a in self.loops() for b in self.g.into(a.src)]

    def same_base(self, n):
        out = []
        for x in self.g.objects:
            out.extend(itertools.product(self.g.loops_at(x), repeat=n))
        return out

    def disc_labels(self):
        """(a, b, r, d) with r: u -> base(a), d: u -> base(b)."""
        g, out = self.g, []
        for a in self.loops():
            for b in self.loops():
                for r in g.into(a.src):
                    for d in g.hom(r.src, b.src):
                        out.append((a, b, r, d))
        return out


def _ids(*ms):
    return ids(ms)


def check_moves(cfd: CrossedFrobData, seed: int = 0, trials: int = 200, cap: int = 1000) -> Report:
    """Check every surface move and gluing identity on all (or sampled) label tuples."""
    h = _Moves(cfd, seed, trials, cap)
    g = h.g
    inv, conj, comp = g.inverse, g.conjugate, g.compose

    def one(x):
        return g.identity(x).id

    # Dehn twist on every cylinder pattern
    for eps, mu in itertools.product((-1, 1), repeat=2):
        name = f"dehn_twist.C{'+' if eps > 0 else '-'}{'+' if mu > 0 else '-'}"
        for a, b in h.tuples(name, h.loop_path()):
            h.check(name, (a, b), C(eps, mu, a.id, b.id), C(eps, mu, a.id, comp(b, a).id))

    # cylinder reflections
    for a, b in h.tuples("reflection.C--", h.loop_path()):
        c = conj(inv(a), b)
        h.check("reflection.C--", (a, b),
                then(Swap(a.id, c.id), C(-1, -1, c.id, inv(b).id)), C(-1, -1, a.id, b.id))
        h.check("reflection.C++", (a, b),
                then(C(1, 1, c.id, inv(b).id), Swap(a.id, c.id)), C(1, 1, a.id, b.id))

    # cylinder pairings agree with their one-sided forms
    for a, b in h.tuples("cylinder.forms", h.loop_path()):
        ca, cai = conj(a, b), conj(inv(a), b)
        h.check("cylinder.C--_form", (a, b),
                then(par(_ids(a), C(-1, 1, cai.id, inv(b).id)), C(-1, -1, a.id, one(a.src))),
                C(-1, -1, a.id, b.id))
        h.check("cylinder.C++_form", (a, b),
                then(C(1, 1, ca.id, one(b.src)), par(_ids(cai), C(-1, 1, ca.id, inv(b).id))),
                C(1, 1, a.id, b.id))

    # cylinder-cylinder gluing, four sign cases
    space = [(a, b, d) for a, b in h.loop_path() for d in g.into(b.src)]
    for a, b, d in h.tuples("glue.CC", space):
        db = comp(d, b)
        ca, cai = conj(a, b), conj(inv(a), b)
        far = conj(inv(ca), d)  # d b a^-1 b^-1 d^-1
        h.check("glue.CC.-+", (a, b, d),
                then(C(-1, 1, a.id, b.id), C(-1, 1, ca.id, d.id)), C(-1, 1, a.id, db.id))
        h.check("glue.CC.--", (a, b, d),
                then(par(C(-1, 1, a.id, b.id), _ids(far)), C(-1, -1, ca.id, d.id)),
                C(-1, -1, a.id, db.id))
        h.check("glue.CC.++", (a, b, d),
                then(C(1, 1, a.id, b.id), par(C(-1, 1, cai.id, d.id), _ids(a))),
                C(1, 1, a.id, db.id))
        top = conj(ca, d)  # d b a b^-1 d^-1
        h.check("glue.CC.+-", (a, b, d),
                then(par(_ids(top), C(1, 1, a.id, b.id)),
                     par(Swap(top.id, cai.id), _ids(a)),
                     par(C(-1, -1, cai.id, d.id), _ids(a))),
                C(1, -1, a.id, db.id))

    # disc-cylinder gluing along the outer circle
    space = [(a, b, r, d, x) for a, b, r, d in h.disc_labels() for x in g.into(r.src)]
    for a, b, r, d, x in h.tuples("glue.DC", space):
        xr, xd = comp(x, r).id, comp(x, d).id
        t = (a, b, r, d, x)
        gm = outer_label(-1, -1, -1, a, b, r, d, g)
        far = conj(inv(gm), x)
        h.check("glue.DC.---/++", t,
                then(par(_ids(a, b), C(1, 1, gm.id, x.id)),
                     par(_ids(a, b), Swap(far.id, gm.id)),
                     par(D(-1, -1, -1, a.id, b.id, r.id, d.id), _ids(far))),
                D(-1, -1, 1, a.id, b.id, xr, xd))
        gp = outer_label(-1, -1, 1, a, b, r, d, g)
        farp = conj(inv(gp), x)
        h.check("glue.DC.--+/--", t,
                then(par(D(-1, -1, 1, a.id, b.id, r.id, d.id), _ids(farp)), C(-1, -1, gp.id, x.id)),
                D(-1, -1, -1, a.id, b.id, xr, xd))
        g3 = outer_label(1, 1, 1, a, b, r, d, g)
        far3 = conj(inv(g3), x)
        h.check("glue.DC.+++/--", t,
                then(par(D(1, 1, 1, a.id, b.id, r.id, d.id), _ids(far3)),
                     par(_ids(b, a), C(-1, -1, g3.id, x.id))),
                D(1, 1, -1, a.id, b.id, xr, xd))
        g4 = outer_label(1, 1, -1, a, b, r, d, g)
        far4 = conj(inv(g4), x)
        h.check("glue.DC.++-/++", t,
                then(C(1, 1, g4.id, x.id),
                     par(_ids(far4), D(1, 1, -1, a.id, b.id, r.id, d.id)),
                     par(Swap(far4.id, b.id), _ids(a)),
                     par(_ids(b), Swap(far4.id, a.id))),
                D(1, 1, 1, a.id, b.id, xr, xd))

    # disc reflections (rotation by one third)
    for a, b, r, d in h.tuples("reflection.D", h.disc_labels()):
        gm = outer_label(-1, -1, -1, a, b, r, d, g)
        ri = inv(r)
        rot = (b.id, gm.id, comp(ri, d).id, ri.id)
        h.check("reflection.D---", (a, b, r, d),
                D(-1, -1, -1, a.id, b.id, r.id, d.id),
                then(par(Swap(a.id, b.id), _ids(gm)), par(_ids(b), Swap(a.id, gm.id)),
                     D(-1, -1, -1, *rot)))
        gp = outer_label(1, 1, 1, a, b, r, d, g)
        rot = (b.id, gp.id, comp(ri, d).id, ri.id)
        h.check("reflection.D+++", (a, b, r, d),
                D(1, 1, 1, a.id, b.id, r.id, d.id),
                then(D(1, 1, 1, *rot), par(Swap(gp.id, b.id), _ids(a)),
                     par(_ids(b), Swap(gp.id, a.id))))

    # switching the inner circles
    for a, b in h.tuples("inner_switch", h.same_base(2)):
        u = one(a.src)
        h.check("inner_switch", (a, b),
                D(-1, -1, 1, a.id, b.id, u, u),
                then(Swap(a.id, b.id), D(-1, -1, 1, b.id, a.id, u, inv(b).id)))

    # three holes, and the two Frobenius decompositions
    for a, b, c in h.tuples("three_hole", h.same_base(3)):
        u = one(a.src)
        ab, bc = comp(a, b), comp(b, c)
        abc = comp(ab, c)
        t = (a, b, c)
        h.check("three_hole.associativity", t,
                then(par(D(-1, -1, 1, a.id, b.id, u, u), C(-1, 1, c.id, u)),
                     D(-1, -1, 1, ab.id, c.id, u, u)),
                then(par(C(-1, 1, a.id, u), D(-1, -1, 1, b.id, c.id, u, u)),
                     D(-1, -1, 1, a.id, bc.id, u, u)))
        h.check("frobenius.split_right", t,
                then(D(-1, -1, 1, a.id, bc.id, u, u), D(-1, 1, 1, abc.id, c.id, u, u)),
                then(par(C(-1, 1, a.id, u), D(-1, 1, 1, bc.id, c.id, u, u)),
                     par(_ids(a), Swap(c.id, b.id)),
                     par(D(-1, -1, 1, a.id, b.id, u, u), C(-1, 1, c.id, u)),
                     Swap(ab.id, c.id)))
        h.check("frobenius.split_left", t,
                then(D(-1, -1, 1, ab.id, c.id, u, u), D(1, 1, -1, bc.id, a.id, u, u)),
                then(par(D(1, 1, -1, b.id, a.id, u, u), C(-1, 1, c.id, u)),
                     par(C(-1, 1, a.id, u), D(-1, -1, 1, b.id, c.id, u, u))))

    # the punctured torus closes either strand
    for a, b in h.tuples("torus", h.same_base(2)):
        h.check("punctured_torus", (a, b),
                punctured_torus(g, a, b, "alpha"), punctured_torus(g, a, b, "beta"))
    return h.rep.sorted()
