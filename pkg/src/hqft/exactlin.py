"""Exact scalar fields and the strict symmetric monoidal category of matrices.

A morphism ``f: A -> B`` between spaces of dimension ``a`` and ``b`` is a
``b x a`` matrix acting on column vectors.  ``compose(f, g)`` means "apply f,
then g" and equals the product ``g @ f``.  Tensor products are Kronecker
products with the left factor most significant, and the empty tensor product
is the one-dimensional unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence


class ExactLinError(ValueError):
    pass


class DimensionMismatch(ExactLinError):
    pass


class FieldMismatch(ExactLinError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    kind: str = "rationals"
    p: int | None = None

    def __post_init__(self):
        if self.kind == "rationals":
            if self.p is not None:
                raise ValueError("rationals take no characteristic")
        elif self.kind == "prime-field":
            if not isinstance(self.p, int) or not _is_prime(self.p):
                raise ValueError(f"prime-field needs a prime p, got {self.p!r}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def is_rational(self) -> bool:
        return self.kind == "rationals"

    def coerce(self, x):
        """Return the canonical representative of ``x`` in this field."""
        if self.is_rational:
            if isinstance(x, str):
                return Fraction(x.strip())
            return Fraction(x)
        p = self.p
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({p})")
            return x.numerator * pow(x.denominator, -1, p) % p
        if isinstance(x, bool) or not isinstance(x, int):
            raise TypeError(f"cannot coerce {x!r} into GF({p})")
        return x % p

    def reduce(self, x):
        return x if self.is_rational else x % self.p

    @property
    def zero(self):
        return Fraction(0) if self.is_rational else 0

    @property
    def one(self):
        return Fraction(1) if self.is_rational else 1

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational:
            return 1 / x
        return pow(x, -1, self.p)

    def format(self, x) -> str | int:
        if self.is_rational:
            return str(x)
        return int(x)

    def to_json(self):
        if self.is_rational:
            return "rationals"
        return {"kind": "prime-field", "p": self.p}

    @classmethod
    def from_json(cls, data) -> FieldSpec:
        if data in (None, "rationals", "Q", "QQ"):
            return cls()
        if isinstance(data, dict):
            return cls(data.get("kind", "prime-field"), data.get("p"))
        if isinstance(data, str) and data.startswith("GF(") and data.endswith(")"):
            return cls("prime-field", int(data[3:-1]))
        raise ValueError(f"unrecognised field {data!r}")

    def __str__(self):
        return "Q" if self.is_rational else f"GF({self.p})"


QQ = FieldSpec()


def GF(p: int) -> FieldSpec:
    return FieldSpec("prime-field", p)


class ExactMatrix:
    """Dense immutable matrix with exact entries."""

    __slots__ = ("rows", "cols", "field", "_data", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable, field: FieldSpec = QQ):
        entries = tuple(field.coerce(x) for x in entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise DimensionMismatch(f"{len(entries)} entries for a {rows}x{cols} matrix")
        self.rows = rows
        self.cols = cols
        self.field = field
        self._data = tuple(entries[i * cols:(i + 1) * cols] for i in range(rows))
        self._hash = None

    @classmethod
    def _raw(cls, rows, cols, data, field):
        # data is a tuple of canonical row tuples
        m = object.__new__(cls)
        m.rows, m.cols, m.field, m._data, m._hash = rows, cols, field, data, None
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: FieldSpec = QQ, cols: int | None = None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls(len(rows), cols, [x for r in rows for x in r], field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: FieldSpec = QQ):
        z = field.zero
        return cls._raw(rows, cols, tuple((z,) * cols for _ in range(rows)), field)

    @classmethod
    def scalar(cls, x, field: FieldSpec = QQ):
        return cls(1, 1, [x], field)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> tuple:
        return tuple(x for r in self._data for x in r)

    def to_rows(self) -> list[list]:
        return [list(r) for r in self._data]

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.field == other.field
                and self._data == other._data)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.field, self._data))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(str(self.field.format(x)) for x in r) for r in self._data)
        return f"ExactMatrix({self.rows}x{self.cols} over {self.field}: [{body}])"

    def _check_field(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        """Ordinary matrix product ``self @ other`` (apply ``other`` first)."""
        self._check_field(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        red = self.field.reduce
        zero = self.field.zero
        ocols = list(zip(*other._data)) if other.rows else [()] * other.cols
        data = []
        for row in self._data:
            nz = [(k, a) for k, a in enumerate(row) if a]
            out = []
            for col in ocols:
                s = zero
                for k, a in nz:
                    b = col[k]
                    if b:
                        s += a * b
                out.append(red(s))
            data.append(tuple(out))
        return ExactMatrix._raw(self.rows, other.cols, tuple(data), self.field)

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        red = self.field.reduce
        data = tuple(tuple(red(a + b) for a, b in zip(r, s)) for r, s in zip(self._data, other._data))
        return ExactMatrix._raw(self.rows, self.cols, data, self.field)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self + (-other)

    def scale(self, c) -> ExactMatrix:
        c = self.field.coerce(c)
        red = self.field.reduce
        data = tuple(tuple(red(c * a) for a in r) for r in self._data)
        return ExactMatrix._raw(self.rows, self.cols, data, self.field)

    def transpose(self) -> ExactMatrix:
        data = tuple(zip(*self._data)) if self.rows else tuple(() for _ in range(self.cols))
        return ExactMatrix._raw(self.cols, self.rows, data, self.field)

    T = property(transpose)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._data)

    # -- elimination -------------------------------------------------------

    def _rref(self):
        """Reduced row echelon form and pivot columns."""
        f = self.field
        m = [list(r) for r in self._data]
        pivots = []
        r = 0
        for c in range(self.cols):
            piv = next((i for i in range(r, self.rows) if m[i][c]), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = f.inv(m[r][c])
            m[r] = [f.reduce(x * inv) for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c]:
                    k = m[i][c]
                    m[i] = [f.reduce(a - k * b) for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return m, pivots

    def rank(self) -> int:
        return len(self._rref()[1])

    def nullspace(self) -> list[ExactMatrix]:
        """Basis of the kernel, as column vectors."""
        m, pivots = self._rref()
        f = self.field
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [f.zero] * self.cols
            v[fc] = f.one
            for i, pc in enumerate(pivots):
                v[pc] = f.reduce(-m[i][fc])
            basis.append(ExactMatrix(self.cols, 1, v, f))
        return basis

    def inverse(self) -> ExactMatrix:
        if self.rows != self.cols:
            raise DimensionMismatch(f"non-square {self.shape} has no inverse")
        n = self.rows
        aug = hstack(self, identity(n, self.field))
        m, pivots = aug._rref()
        if pivots[:n] != list(range(n)):
            raise ExactLinError("matrix is singular")
        return ExactMatrix.from_rows([row[n:] for row in m], self.field, cols=n)


def hstack(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    a._check_field(b)
    if a.rows != b.rows:
        raise DimensionMismatch("row counts differ")
    return ExactMatrix._raw(a.rows, a.cols + b.cols,
                            tuple(r + s for r, s in zip(a._data, b._data)), a.field)


def identity(n: int, field: FieldSpec = QQ) -> ExactMatrix:
    z, o = field.zero, field.one
    return ExactMatrix._raw(n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), field)


def compose(f: ExactMatrix, g: ExactMatrix, *more: ExactMatrix) -> ExactMatrix:
    """Apply ``f``, then ``g`` (then each of ``more``)."""
    if f.field != g.field:
        raise FieldMismatch(f"{f.field} vs {g.field}")
    if f.rows != g.cols:
        raise DimensionMismatch(f"codomain {f.rows} of first map != domain {g.cols} of second")
    out = g @ f
    for h in more:
        out = compose(out, h)
    return out


def tensor(f: ExactMatrix, g: ExactMatrix, *more: ExactMatrix) -> ExactMatrix:
    """Kronecker product, left factor most significant."""
    f._check_field(g)
    red = f.field.reduce
    data = []
    for frow in f._data:
        for grow in g._data:
            data.append(tuple(red(a * b) for a in frow for b in grow))
    out = ExactMatrix._raw(f.rows * g.rows, f.cols * g.cols, tuple(data), f.field)
    for h in more:
        out = tensor(out, h)
    return out


def tensor_all(maps: Sequence[ExactMatrix], field: FieldSpec = QQ) -> ExactMatrix:
    out = identity(1, field)
    for m in maps:
        out = tensor(out, m)
    return out


def permutation(dims: Sequence[int], perm: Sequence[int], field: FieldSpec = QQ) -> ExactMatrix:
    """Reorder tensor factors.

    The source is ``dims[0] (x) ... (x) dims[k-1]``; output factor ``t`` is
    source factor ``perm[t]``.
    """
    k = len(dims)
    if sorted(perm) != list(range(k)):
        raise ExactLinError(f"{perm} is not a permutation of {k} factors")
    total = 1
    for d in dims:
        total *= d
    out_dims = [dims[p] for p in perm]
    z, o = field.zero, field.one
    data = [[z] * total for _ in range(total)]
    for idx in product(*[range(d) for d in dims]):
        src = 0
        for i, d in zip(idx, dims):
            src = src * d + i
        tgt = 0
        for p, d in zip(perm, out_dims):
            tgt = tgt * d + idx[p]
        data[tgt][src] = o
    return ExactMatrix._raw(total, total, tuple(tuple(r) for r in data), field)


def symmetry(m: int, n: int, field: FieldSpec = QQ) -> ExactMatrix:
    """The braiding ``m (x) n -> n (x) m``, e_i (x) e_j |-> e_j (x) e_i."""
    return permutation([m, n], [1, 0], field)


def format_scalar(x, field: FieldSpec):
    return field.format(x)


def matrix_to_json(m: ExactMatrix) -> list[list]:
    return [[m.field.format(x) for x in r] for r in m._data]


def matrix_from_json(data, field: FieldSpec, shape: tuple[int, int] | None = None) -> ExactMatrix:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ValueError("matrix must be an array of arrays")
    cols = shape[1] if shape is not None and not data else None
    m = ExactMatrix.from_rows(data, field, cols=cols)
    if shape is not None and m.shape != tuple(shape):
        raise DimensionMismatch(f"expected shape {tuple(shape)}, got {m.shape}")
    return m
