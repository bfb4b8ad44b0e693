"""Finite groupoids given by explicit composition tables.

Composition is diagrammatic throughout: ``compose(a, b)`` is "a then b" and
requires ``tgt(a) == src(b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product as iproduct
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .report import Report


class GroupoidError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class MorRef:
    id: str
    src: str
    tgt: str

    @property
    def is_loop(self) -> bool:
        return self.src == self.tgt

    def __str__(self):
        return self.id


class Groupoid:
    def __init__(self, objects: Sequence[str], morphisms: Iterable[MorRef | tuple],
                 compose_table: Mapping[tuple[str, str], str], identities: Mapping[str, str],
                 inverses: Mapping[str, str] | None = None):
        self.objects = tuple(objects)
        self._mor: dict[str, MorRef] = {}
        for m in morphisms:
            m = m if isinstance(m, MorRef) else MorRef(*m)
            if m.id in self._mor:
                raise GroupoidError(f"duplicate morphism id {m.id!r}")
            self._mor[m.id] = m
        self._table = {(str(a), str(b)): str(c) for (a, b), c in compose_table.items()}
        self._ids = dict(identities)
        self._inv_supplied = inverses is not None
        self._inv = dict(inverses) if inverses is not None else self._derive_inverses()

    def _derive_inverses(self) -> dict[str, str]:
        inv = {}
        for f in self._mor.values():
            unit = self._ids.get(f.src)
            for g in self._mor.values():
                if g.src == f.tgt and g.tgt == f.src and self._table.get((f.id, g.id)) == unit:
                    inv[f.id] = g.id
                    break
        return inv

    # -- lookup -----------------------------------------------------------

    @property
    def morphisms(self) -> tuple[MorRef, ...]:
        return tuple(self._mor.values())

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self._mor)

    def __contains__(self, mid) -> bool:
        return str(mid) in self._mor

    def mor(self, m: MorRef | str) -> MorRef:
        key = m.id if isinstance(m, MorRef) else m
        try:
            return self._mor[key]
        except KeyError:
            raise GroupoidError(f"unknown morphism {key!r}") from None

    def identity(self, x: str) -> MorRef:
        if x not in self._ids:
            raise GroupoidError(f"unknown object {x!r}")
        return self.mor(self._ids[x])

    def is_identity(self, m: MorRef | str) -> bool:
        m = self.mor(m)
        return self._ids.get(m.src) == m.id

    def compose(self, a: MorRef | str, b: MorRef | str, *more: MorRef | str) -> MorRef:
        """``a`` then ``b``."""
        a, b = self.mor(a), self.mor(b)
        if a.tgt != b.src:
            raise GroupoidError(f"{a.id}: {a.src}->{a.tgt} and {b.id}: {b.src}->{b.tgt} are not composable")
        try:
            out = self.mor(self._table[(a.id, b.id)])
        except KeyError:
            raise GroupoidError(f"composition table has no entry for ({a.id}, {b.id})") from None
        for c in more:
            out = self.compose(out, c)
        return out

    def inverse(self, a: MorRef | str) -> MorRef:
        a = self.mor(a)
        try:
            return self.mor(self._inv[a.id])
        except KeyError:
            raise GroupoidError(f"{a.id!r} has no inverse") from None

    def conjugate(self, alpha: MorRef | str, beta: MorRef | str) -> MorRef:
        """The loop ``beta alpha beta^-1`` for a loop ``alpha`` at x and ``beta: y -> x``."""
        alpha, beta = self.mor(alpha), self.mor(beta)
        if not alpha.is_loop:
            raise GroupoidError(f"{alpha.id!r} is not a loop")
        if beta.tgt != alpha.src:
            raise GroupoidError(f"{beta.id!r} does not end at the base {alpha.src!r} of {alpha.id!r}")
        return self.compose(beta, alpha, self.inverse(beta))

    def power(self, alpha: MorRef | str, n: int) -> MorRef:
        alpha = self.mor(alpha)
        if not alpha.is_loop:
            raise GroupoidError(f"{alpha.id!r} is not a loop")
        base = alpha if n >= 0 else self.inverse(alpha)
        out = self.identity(alpha.src)
        for _ in range(abs(n)):
            out = self.compose(out, base)
        return out

    def loops_at(self, x: str) -> list[MorRef]:
        if x not in self.objects:
            raise GroupoidError(f"unknown object {x!r}")
        return [m for m in self._mor.values() if m.src == x and m.tgt == x]

    def loops(self) -> list[MorRef]:
        return [m for m in self._mor.values() if m.is_loop]

    def hom(self, x: str, y: str) -> list[MorRef]:
        return [m for m in self._mor.values() if m.src == x and m.tgt == y]

    def into(self, x: str) -> list[MorRef]:
        return [m for m in self._mor.values() if m.tgt == x]

    def composable_pairs(self, loops_only: bool = False):
        ms = self.loops() if loops_only else self.morphisms
        for a in ms:
            for b in ms:
                if a.tgt == b.src:
                    yield a, b

    def composable_triples(self, loops_only: bool = False):
        ms = self.loops() if loops_only else self.morphisms
        for a, b in self.composable_pairs(loops_only):
            for c in ms:
                if b.tgt == c.src:
                    yield a, b, c

    def __repr__(self):
        return f"Groupoid({len(self.objects)} objects, {len(self._mor)} morphisms)"

    # -- validation -------------------------------------------------------

    def validate(self) -> Report:
        rep = Report()
        T = self._table
        M = self._mor
        for x in self.objects:
            i = self._ids.get(x)
            ok = i in M and M[i].src == x and M[i].tgt == x
            rep.add("groupoid.identity_declared", (x,), ok, note="" if ok else f"identity {i!r}")
        for m in M.values():
            ok = m.src in self.objects and m.tgt in self.objects
            rep.add("groupoid.endpoints", (m.id,), ok)
        for (a, b), c in sorted(T.items()):
            ok = a in M and b in M and c in M and M[a].tgt == M[b].src
            rep.add("groupoid.table_wellformed", (a, b), ok,
                    note="" if ok else f"entry {a},{b} -> {c}")
        for a in M.values():
            for b in M.values():
                if a.tgt != b.src:
                    continue
                c = T.get((a.id, b.id))
                ok = c in M and M[c].src == a.src and M[c].tgt == b.tgt
                rep.add("groupoid.totality", (a.id, b.id), ok,
                        note="" if ok else f"entry {c!r}")
        for a in M.values():
            for b in M.values():
                if a.tgt != b.src:
                    continue
                ab = T.get((a.id, b.id))
                for c in M.values():
                    if b.tgt != c.src:
                        continue
                    bc = T.get((b.id, c.id))
                    left = T.get((ab, c.id))
                    right = T.get((a.id, bc))
                    ok = left is not None and left == right
                    rep.add("groupoid.associativity", (a.id, b.id, c.id), ok,
                            note="" if ok else f"(ab)c={left} a(bc)={right}")
        for f in M.values():
            one_s, one_t = self._ids.get(f.src), self._ids.get(f.tgt)
            rep.add("groupoid.left_identity", (f.id,), T.get((one_s, f.id)) == f.id)
            rep.add("groupoid.right_identity", (f.id,), T.get((f.id, one_t)) == f.id)
            g = self._inv.get(f.id)
            declared = g in M and M[g].src == f.tgt and M[g].tgt == f.src
            rep.add("groupoid.inverse_declared", (f.id,), declared,
                    note="" if declared else f"inverse {g!r}")
            rep.add("groupoid.inverse_right", (f.id,), declared and T.get((f.id, g)) == one_s)
            rep.add("groupoid.inverse_left", (f.id,), declared and T.get((g, f.id)) == one_t)
        return rep

    # -- serialisation ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "morphisms": [{"id": m.id, "src": m.src, "tgt": m.tgt} for m in self._mor.values()],
            "compose": [[a, b, c] for (a, b), c in self._table.items()],
            "identities": dict(self._ids),
            "inverses": dict(self._inv),
        }

    @classmethod
    def from_json(cls, data: dict) -> Groupoid:
        try:
            objects = [str(o) for o in data["objects"]]
            morphisms = [MorRef(str(m["id"]), str(m["src"]), str(m["tgt"])) for m in data["morphisms"]]
            table = {}
            for triple in data["compose"]:
                a, b, c = triple
                table[(str(a), str(b))] = str(c)
            identities = {str(k): str(v) for k, v in data["identities"].items()}
            inverses = data.get("inverses")
            if inverses is not None:
                inverses = {str(k): str(v) for k, v in inverses.items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise GroupoidError(f"malformed groupoid description: {exc}") from exc
        return cls(objects, morphisms, table, identities, inverses)


# -- constructors -------------------------------------------------------------


def from_group(elements: Sequence[Hashable], mult: Callable, names: Callable = str,
               obj: str = "x") -> Groupoid:
    """One-object groupoid; ``mult(g, h)`` is "g then h"."""
    elements = list(elements)
    name = {g: names(g) for g in elements}
    table = {}
    unit = None
    for g in elements:
        for h in elements:
            table[(name[g], name[h])] = name[mult(g, h)]
    for g in elements:
        if all(mult(g, h) == h for h in elements):
            unit = g
    if unit is None:
        raise GroupoidError("group has no identity element")
    return Groupoid([obj], [MorRef(name[g], obj, obj) for g in elements], table, {obj: name[unit]})


def cyclic_group(n: int, obj: str = "x", gen: str = "a") -> Groupoid:
    """Z_n on one object; elements ``e, a, a2, ..., a{n-1}``."""
    def nm(k):
        return "e" if k == 0 else gen if k == 1 else f"{gen}{k}"
    return from_group(range(n), lambda i, j: (i + j) % n, nm, obj)


def perm_name(p: tuple[int, ...]) -> str:
    """Cycle-notation id of a permutation of ``0..n-1``, e.g. ``c012`` or ``c01``."""
    seen, cycles = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        cycles.append("".join(str(k) for k in cyc))
    return "e" if not cycles else "_".join("c" + c for c in cycles)


def perm_then(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Apply ``p`` then ``q`` (points act on the right)."""
    return tuple(q[p[i]] for i in range(len(p)))


def symmetric_group(n: int, obj: str = "x") -> Groupoid:
    return from_group(list(permutations(range(n))), perm_then, perm_name, obj)


def trivial_group(obj: str = "x") -> Groupoid:
    return cyclic_group(1, obj)


def pair_groupoid(objects: Sequence[str]) -> Groupoid:
    """Exactly one arrow ``x -> y`` for every pair, with id ``x_y``."""
    mors = [MorRef(f"{x}_{y}", x, y) for x in objects for y in objects]
    table = {(f"{x}_{y}", f"{y}_{z}"): f"{x}_{z}" for x in objects for y in objects for z in objects}
    return Groupoid(objects, mors, table, {x: f"{x}_{x}" for x in objects})


def _join(a: str, b: str, single_a: bool, single_b: bool) -> str:
    if single_b:
        return a
    if single_a:
        return b
    return f"{a}.{b}"


def product(g: Groupoid, h: Groupoid) -> Groupoid:
    """Cartesian product; morphism ids are ``f.k``."""
    sg, sh = len(g.objects) == 1, len(h.objects) == 1
    objs = [_join(x, y, sg, sh) for x in g.objects for y in h.objects]
    mors, table = [], {}
    for f, k in iproduct(g.morphisms, h.morphisms):
        mors.append(MorRef(f"{f.id}.{k.id}", _join(f.src, k.src, sg, sh), _join(f.tgt, k.tgt, sg, sh)))
    for (f1, f2), (k1, k2) in iproduct(g.composable_pairs(), h.composable_pairs()):
        table[(f"{f1.id}.{k1.id}", f"{f2.id}.{k2.id}")] = f"{g.compose(f1, f2).id}.{h.compose(k1, k2).id}"
    ids = {_join(x, y, sg, sh): f"{g.identity(x).id}.{h.identity(y).id}" for x in g.objects for y in h.objects}
    return Groupoid(objs, mors, table, ids)


def disjoint_union(g: Groupoid, h: Groupoid, tags: tuple[str, str] = ("L", "R")) -> Groupoid:
    """Coproduct; every object and morphism id gets a ``tag_`` prefix."""
    objs, mors, table, ids = [], [], {}, {}
    for tag, part in zip(tags, (g, h)):
        p = f"{tag}_"
        objs += [p + x for x in part.objects]
        mors += [MorRef(p + m.id, p + m.src, p + m.tgt) for m in part.morphisms]
        for a, b in part.composable_pairs():
            table[(p + a.id, p + b.id)] = p + part.compose(a, b).id
        ids.update({p + x: p + part.identity(x).id for x in part.objects})
    return Groupoid(objs, mors, table, ids)


def two_object_z2() -> Groupoid:
    """Pair groupoid on {x, y} times Z_2: eight morphisms, vertex groups Z_2."""
    return product(pair_groupoid(["x", "y"]), cyclic_group(2))
