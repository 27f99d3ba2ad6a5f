"""Exact rational matrices and subspaces of Q^n.

Everything here works over :class:`fractions.Fraction`; nothing is ever
rounded.  A :class:`Subspace` keeps its basis in reduced row echelon form
(rows are the basis vectors), which is the transpose of the reduced column
echelon form of the column-basis matrix.  Either way the representative is
unique, so two subspaces are equal exactly when their stored bases are.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionMismatch

Vector = tuple  # tuple[Fraction, ...]


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats are accepted only when they are exactly representable
        return Fraction(x)
    return Fraction(x)


def _integer_row(row) -> list[int]:
    if all(type(x) is int for x in row):
        return list(row)
    fr = [to_fraction(x) for x in row]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    return [x.numerator * (den // x.denominator) for x in fr]


def _primitive_row(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    return [x // g for x in row] if g > 1 else row


def _echelon(rows: Sequence[Sequence], ncols: int | None):
    # fraction-free Gauss-Jordan on integer rows; much faster than Fraction arithmetic
    m = [_integer_row(r) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
        row = _primitive_row(m[r])
        m[r] = row
        a = row[c]
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    m[i] = _primitive_row([a * x - f * y for x, y in zip(m[i], row)])
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form.

    Returns ``(reduced_rows, pivot_columns)`` where ``reduced_rows`` holds only
    the nonzero rows.  The input is not modified.
    """
    m, pivots = _echelon(rows, ncols)
    return [[Fraction(x, row[c]) for x in row] for row, c in zip(m, pivots)], pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(_echelon(rows, ncols)[1])


def kernel(rows: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Basis of ``{x : A x = 0}`` for the matrix given by ``rows``."""
    red, pivots = rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            x[pc] = -red[r][f]
        basis.append(tuple(x))
    return basis


def solve_linear(A: "RationalMatrix", b: Sequence):
    """Solve ``A x = b`` exactly.

    Returns ``(particular_solution, kernel_basis)`` or ``None`` when the
    system is inconsistent.
    """
    if len(b) != A.nrows:
        raise DimensionMismatch(f"right-hand side has length {len(b)}, expected {A.nrows}")
    n = A.ncols
    aug = [list(row) + [to_fraction(bi)] for row, bi in zip(A.to_rows(), b)]
    red, pivots = rref(aug, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = [Fraction(0)] * n
    for r, pc in enumerate(pivots):
        x[pc] = red[r][n]
    return tuple(x), kernel(A.to_rows(), n)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list[Fraction]]:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    if a and len(a[0]) != inner:
        raise DimensionMismatch("inner dimensions differ")
    bt = list(zip(*b)) if b else [()] * cols
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def identity_rows(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class RationalMatrix:
    """Dense exact matrix, row-major."""

    nrows: int
    ncols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.nrows * self.ncols:
            raise DimensionMismatch("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: int | None = None) -> "RationalMatrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged rows")
        return cls(len(rows), ncols, tuple(to_fraction(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "RationalMatrix":
        rows = [[c[i] for c in cols] for i in range(nrows)]
        return cls.from_rows(rows, len(cols))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_rows(identity_rows(n), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls(nrows, ncols, (Fraction(0),) * (nrows * ncols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.ncols + j]

    def to_rows(self) -> list[list[Fraction]]:
        n = self.ncols
        return [list(self.entries[i * n:(i + 1) * n]) for i in range(self.nrows)]

    def columns(self) -> list[Vector]:
        rows = self.to_rows()
        return [tuple(rows[i][j] for i in range(self.nrows)) for j in range(self.ncols)]

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix.from_rows([list(c) for c in self.columns()], self.nrows)

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch("inner dimensions differ")
            return RationalMatrix.from_rows(mat_mul(self.to_rows(), other.to_rows()), other.ncols)
        return tuple(mat_vec(self.to_rows(), other))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("shapes differ")
        return RationalMatrix(self.nrows, self.ncols,
                              tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "RationalMatrix":
        c = to_fraction(c)
        return RationalMatrix(self.nrows, self.ncols, tuple(c * a for a in self.entries))

    def rank(self) -> int:
        return rank(self.to_rows(), self.ncols)

    def trace(self) -> Fraction:
        return sum((self[i, i] for i in range(min(self.nrows, self.ncols))), Fraction(0))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __repr__(self):
        rows = ["[" + ", ".join(str(x) for x in r) + "]" for r in self.to_rows()]
        return f"RationalMatrix({self.nrows}x{self.ncols}: " + ", ".join(rows) + ")"


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient_dim stored by its canonical (RREF) basis."""

    ambient_dim: int
    rows: tuple  # tuple[Vector, ...], reduced echelon, nonzero

    @property
    def dim(self) -> int:
        return len(self.rows)

    @cached_property
    def int_rows(self) -> tuple:
        """The basis rows scaled to primitive integer vectors (same span)."""
        return tuple(tuple(_primitive_row(_integer_row(r))) for r in self.rows)

    @property
    def basis(self) -> RationalMatrix:
        """Column-basis matrix (ambient_dim x dim)."""
        return RationalMatrix.from_columns(self.rows, self.ambient_dim)

    def vectors(self) -> list[Vector]:
        return list(self.rows)

    def is_zero(self) -> bool:
        return not self.rows

    def is_full(self) -> bool:
        return len(self.rows) == self.ambient_dim

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}")

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if not other.rows:
            return self
        if not self.rows:
            return other
        return span(self.ambient_dim, self.int_rows + other.int_rows)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: reduce [[u | u], [v | 0]]; zero-left rows give u ∩ v."""
        self._check(other)
        n = self.ambient_dim
        if not self.rows or not other.rows:
            return zero(n)
        if self.contains(other):
            return other
        if other.contains(self):
            return self
        block = ([list(u) + list(u) for u in self.int_rows]
                 + [list(v) + [0] * n for v in other.int_rows])
        red, pivots = rref(block, 2 * n)
        inter = [row[n:] for row, p in zip(red, pivots) if p >= n]
        return span(n, inter)

    def contains(self, other: "Subspace") -> bool:
        self._check(other)
        if other.dim > self.dim:
            return False
        if not other.rows:
            return True
        return rank(self.int_rows + other.int_rows, self.ambient_dim) == self.dim

    def contains_vector(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length differs from ambient dimension")
        return rank(self.int_rows + (v,), self.ambient_dim) == self.dim

    def _pivots(self) -> list[int]:
        out = []
        for row in self.rows:
            for j, x in enumerate(row):
                if x:
                    out.append(j)
                    break
        return out

    def perp(self) -> "Subspace":
        """Orthogonal complement for the standard bilinear form."""
        n = self.ambient_dim
        if not self.rows:
            return full(n)
        return span(n, kernel(self.rows, n))

    def image(self, C: RationalMatrix) -> "Subspace":
        """``C(self)`` for a matrix ``C`` with ``ncols == ambient_dim``."""
        if C.ncols != self.ambient_dim:
            raise DimensionMismatch("matrix does not act on this space")
        cr = C.to_rows()
        return span(C.nrows, [mat_vec(cr, v) for v in self.rows])

    def __add__(self, other):
        return self.sum(other)

    def __and__(self, other):
        return self.intersect(other)

    def __le__(self, other):
        return other.contains(self)

    def __ge__(self, other):
        return self.contains(other)

    def __repr__(self):
        vecs = ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in self.rows)
        return f"Subspace(Q^{self.ambient_dim}; <{vecs}>)"


def span(ambient_dim: int, generators: Iterable[Sequence]) -> Subspace:
    gens = [list(g) for g in generators]
    for g in gens:
        if len(g) != ambient_dim:
            raise DimensionMismatch(
                f"generator of length {len(g)} in ambient dimension {ambient_dim}")
    if not gens:
        return Subspace(ambient_dim, ())
    red, _ = rref(gens, ambient_dim)
    return Subspace(ambient_dim, tuple(tuple(r) for r in red))


def zero(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, ())


def full(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, tuple(tuple(r) for r in identity_rows(ambient_dim)))


def unit_vector(n: int, i: int) -> Vector:
    """``e_i`` in Q^n with 1-based ``i``."""
    return tuple(Fraction(int(j == i - 1)) for j in range(n))


def sum_all(ambient_dim: int, spaces: Iterable[Subspace]) -> Subspace:
    gens = []
    for s in spaces:
        if s.ambient_dim != ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        gens.extend(s.rows)
    return span(ambient_dim, gens)
