"""Linear representations of posets over Q.

A representation is an ambient space Q^n together with one subspace per
poset element, nested along the order.  This module handles validation,
dimension vectors, direct sums, morphism spaces, the brick / indecomposable
decision, randomized equivalence testing, quite-sincerity, duals and the
one-point extended families.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

import sympy

from .errors import (DependentVectors, DimensionMismatch, NestingViolation, NotAComplement,
                     PosetMismatch, ProbeConditionFailed)
from .linalg import (RationalMatrix, Subspace, kernel, rref, solve_linear, span, sum_all,
                     to_fraction, zero)
from .poset import Poset, extend_poset, is_isomorphism

GENERIC_BOUND = 10**6
GENERIC_TRIALS = 8


@dataclass(frozen=True)
class DimVector:
    d0: int
    quotient_dims: tuple

    def as_tuple(self) -> tuple:
        return (self.d0,) + tuple(self.quotient_dims)


@dataclass(frozen=True)
class RawDimProfile:
    d0: int
    raw_dims: tuple

    def as_tuple(self) -> tuple:
        return (self.d0,) + tuple(self.raw_dims)


@dataclass(frozen=True)
class SubspaceRep:
    poset: Poset
    ambient_dim: int
    spaces: tuple  # Subspace per element, in poset element order
    name: str = field(default="", compare=False)

    def __getitem__(self, element) -> Subspace:
        return self.spaces[self.poset.index(element)]

    def items(self):
        return zip(self.poset.elements, self.spaces)

    @property
    def raw_dims(self) -> tuple:
        return tuple(s.dim for s in self.spaces)

    def relabel(self, target: Poset, mapping: Mapping | None = None) -> "SubspaceRep":
        """Transport along an order isomorphism ``mapping: self.poset -> target``.

        Without a mapping, elements are matched by name (useful for reordering).
        """
        if mapping is None:
            mapping = {x: x for x in self.poset.elements}
        if not is_isomorphism(dict(mapping), self.poset, target):
            raise PosetMismatch("mapping is not an order isomorphism")
        inv = {v: k for k, v in mapping.items()}
        return make_rep(target, self.ambient_dim, [self[inv[y]] for y in target.elements],
                        name=self.name)

    def transform(self, C: RationalMatrix) -> "SubspaceRep":
        """Image of the representation under an invertible matrix."""
        if C.rank() != self.ambient_dim or C.nrows != C.ncols:
            raise DimensionMismatch("transform must be invertible")
        return make_rep(self.poset, self.ambient_dim, [s.image(C) for s in self.spaces],
                        name=self.name)

    def __repr__(self):
        body = "; ".join(f"{x}: {s.dim}" for x, s in self.items())
        return f"SubspaceRep({self.name or self.poset.name} in Q^{self.ambient_dim}; {body})"


def make_rep(poset: Poset, ambient_dim: int, spaces, name: str = "") -> SubspaceRep:
    """Validated representation.  ``spaces`` is a mapping or a sequence in
    element order."""
    if isinstance(spaces, Mapping):
        missing = [x for x in poset.elements if x not in spaces]
        if missing:
            raise ValueError(f"no space given for {missing}")
        spaces = [spaces[x] for x in poset.elements]
    spaces = tuple(spaces)
    if len(spaces) != len(poset):
        raise DimensionMismatch(f"{len(spaces)} spaces for a poset of size {len(poset)}")
    for s in spaces:
        if s.ambient_dim != ambient_dim:
            raise DimensionMismatch(
                f"subspace lives in Q^{s.ambient_dim}, ambient is Q^{ambient_dim}")
    idx = {x: k for k, x in enumerate(poset.elements)}
    for (a, b) in sorted(poset.strict_lt, key=lambda e: (idx[e[0]], idx[e[1]])):
        if not spaces[idx[b]].contains(spaces[idx[a]]):
            raise NestingViolation(a, b)
    return SubspaceRep(poset, ambient_dim, spaces, name=name)


def zero_rep(poset: Poset, ambient_dim: int = 0) -> SubspaceRep:
    return make_rep(poset, ambient_dim, [zero(ambient_dim)] * len(poset))


def dim_vector(rep: SubspaceRep) -> DimVector:
    """``(dim V; dim V_i / sum_{j<i} V_j)``."""
    out = []
    for x, s in rep.items():
        below = rep.poset.below(x)
        lower = sum_all(rep.ambient_dim, (rep[y] for y in below))
        out.append(s.dim - lower.dim)
    return DimVector(rep.ambient_dim, tuple(out))


def raw_profile(rep: SubspaceRep) -> RawDimProfile:
    return RawDimProfile(rep.ambient_dim, rep.raw_dims)


def direct_sum(r1: SubspaceRep, r2: SubspaceRep) -> SubspaceRep:
    if r1.poset != r2.poset:
        raise PosetMismatch("direct sum of representations of different posets")
    n, m = r1.ambient_dim, r2.ambient_dim
    spaces = []
    for s, t in zip(r1.spaces, r2.spaces):
        gens = [tuple(v) + (Fraction(0),) * m for v in s.rows]
        gens += [(Fraction(0),) * n + tuple(w) for w in t.rows]
        spaces.append(span(n + m, gens))
    return make_rep(r1.poset, n + m, spaces)


# --------------------------------------------------------------------------
# morphisms

@dataclass(frozen=True)
class HomSpace:
    source: SubspaceRep
    target: SubspaceRep
    basis: tuple  # RationalMatrix, target.ambient_dim x source.ambient_dim

    @property
    def dim(self) -> int:
        return len(self.basis)

    def combination(self, coeffs: Sequence) -> RationalMatrix:
        m, n = self.target.ambient_dim, self.source.ambient_dim
        acc = RationalMatrix.zeros(m, n)
        for c, b in zip(coeffs, self.basis):
            if c:
                acc = acc + b.scale(c)
        return acc


def hom_space(r1: SubspaceRep, r2: SubspaceRep) -> HomSpace:
    """Basis of ``{C : C(V_i) ⊆ W_i for all i}``.

    Each condition is ``L_i C A_i = 0`` with ``L_i`` spanning the left
    annihilator of ``W_i`` and ``A_i`` a basis of ``V_i``.
    """
    if r1.poset != r2.poset:
        raise PosetMismatch("Hom between representations of different posets")
    n, m = r1.ambient_dim, r2.ambient_dim
    nunk = m * n
    if nunk == 0:
        return HomSpace(r1, r2, ())
    constraints = []
    for v_space, w_space in zip(r1.spaces, r2.spaces):
        if v_space.is_zero() or w_space.is_full():
            continue
        for ell in w_space.perp().rows:
            for a in v_space.rows:
                constraints.append([ell[p] * a[q] for p in range(m) for q in range(n)])
    if constraints:
        null = kernel(constraints, nunk)
    else:
        null = [tuple(Fraction(int(k == j)) for k in range(nunk)) for j in range(nunk)]
    basis = tuple(RationalMatrix(m, n, tuple(v)) for v in null)
    return HomSpace(r1, r2, basis)


def is_morphism(C: RationalMatrix, r1: SubspaceRep, r2: SubspaceRep) -> bool:
    return all(w.contains(v.image(C)) for v, w in zip(r1.spaces, r2.spaces))


# --------------------------------------------------------------------------
# endomorphism algebra analysis

class Kind(str, Enum):
    BRICK = "Brick"
    INDECOMPOSABLE = "Indecomposable"
    DECOMPOSABLE = "Decomposable"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    end_dim: int
    radical_dim: int | None = None
    witness: RationalMatrix | None = None  # idempotent when Decomposable

    @property
    def is_indecomposable(self) -> bool | None:
        if self.kind in (Kind.BRICK, Kind.INDECOMPOSABLE):
            return True
        if self.kind is Kind.DECOMPOSABLE:
            return False
        return None


def _trace_product(a: RationalMatrix, b: RationalMatrix) -> Fraction:
    n = a.nrows
    ae, be = a.entries, b.entries
    return sum((ae[i * n + k] * be[k * n + i] for i in range(n) for k in range(n)), Fraction(0))


def radical_basis(basis: Sequence[RationalMatrix]) -> list[RationalMatrix]:
    """Jacobson radical of a matrix algebra over Q given by a basis.

    In characteristic zero this is the kernel of the trace form
    ``(x, y) -> tr(xy)`` restricted to the algebra.
    """
    d = len(basis)
    if d == 0:
        return []
    gram = [[_trace_product(basis[a], basis[b]) for b in range(d)] for a in range(d)]
    out = []
    for coeffs in kernel(gram, d):
        n = basis[0].nrows
        acc = RationalMatrix.zeros(n, basis[0].ncols)
        for c, b in zip(coeffs, basis):
            if c:
                acc = acc + b.scale(c)
        out.append(acc)
    return out


def minimal_polynomial(x: RationalMatrix) -> list[Fraction]:
    """Monic minimal polynomial, coefficients from degree 0 upwards."""
    n = x.nrows
    powers = [RationalMatrix.identity(n)]
    while True:
        nxt = powers[-1] @ x
        k = len(powers)
        # solve sum_j c_j x^j = x^k
        cols = [p.entries for p in powers]
        rows = [[c[t] for c in cols] + [nxt.entries[t]] for t in range(n * n)]
        red, piv = rref(rows, k + 1)
        if not piv or piv[-1] != k:
            coeffs = [Fraction(0)] * k
            for r, pc in enumerate(piv):
                coeffs[pc] = red[r][k]
            return [-c for c in coeffs] + [Fraction(1)]
        powers.append(nxt)


def poly_at_matrix(coeffs: Sequence[Fraction], x: RationalMatrix) -> RationalMatrix:
    n = x.nrows
    acc = RationalMatrix.zeros(n, n)
    ident = RationalMatrix.identity(n)
    for c in reversed(list(coeffs)):
        acc = acc @ x + ident.scale(c)
    return acc


_T = sympy.Symbol("t")


def _split_idempotent(x: RationalMatrix) -> RationalMatrix | None:
    """Nontrivial idempotent in Q[x] if the minimal polynomial of ``x`` has
    two coprime nonconstant factors, else None."""
    mp = minimal_polynomial(x)
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(mp)],
                      _T, domain="QQ")
    _, factors = poly.factor_list()
    if len(factors) < 2:
        return None
    f = factors[0][0] ** factors[0][1]
    g = poly.quo(f)
    _, t, h = f.gcdex(g)  # s f + t g = h = 1 since f, g are coprime
    e_poly = (t * g).rem(poly)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(e_poly.all_coeffs())]
    return poly_at_matrix(coeffs, x)


def _is_nontrivial_idempotent(e: RationalMatrix) -> bool:
    n = e.nrows
    return (e @ e == e and not e.is_zero() and e != RationalMatrix.identity(n))


def _candidate_elements(basis: Sequence[RationalMatrix], rng: random.Random):
    """Structured elements first (sparse ones tend to be zero divisors),
    then small random combinations."""
    yield from basis
    d = len(basis)
    for a in range(d):
        for b in range(a + 1, d):
            yield basis[a] + basis[b]
            yield basis[a] - basis[b]
    for a in range(d):
        for b in range(d):
            yield basis[a] @ basis[b]
    for _ in range(4 * d):
        coeffs = [rng.randint(-3, 3) for _ in range(d)]
        yield _combine(basis, coeffs)


def _combine(basis, coeffs) -> RationalMatrix:
    n = basis[0].nrows
    acc = RationalMatrix.zeros(n, basis[0].ncols)
    for c, b in zip(coeffs, basis):
        if c:
            acc = acc + b.scale(c)
    return acc


def classify(rep: SubspaceRep, seed: int = 0, trials: int = GENERIC_TRIALS,
             bound: int = GENERIC_BOUND) -> Classification:
    """Brick / Indecomposable / Decomposable / Unknown.

    Decomposable verdicts carry an exactly verified idempotent; Unknown is
    returned only when no idempotent shows up and the semisimple quotient
    of End has dimension > 1.
    """
    end = hom_space(rep, rep)
    d = end.dim
    if d == 1:
        return Classification(Kind.BRICK, 1, 0)
    if d == 0:
        # only the zero representation on a zero space
        return Classification(Kind.DECOMPOSABLE, 0, 0)
    rad = radical_basis(end.basis)
    if d - len(rad) == 1:
        return Classification(Kind.INDECOMPOSABLE, d, len(rad))
    rng = random.Random(seed)
    seen = set()
    for x in _candidate_elements(end.basis, rng):
        if x.entries in seen:
            continue
        seen.add(x.entries)
        e = _split_idempotent(x)
        if e is not None and _is_nontrivial_idempotent(e) and is_morphism(e, rep, rep):
            return Classification(Kind.DECOMPOSABLE, d, len(rad), e)
    for _ in range(trials):
        x = _combine(end.basis, [rng.randint(-bound, bound) for _ in range(d)])
        e = _split_idempotent(x)
        if e is not None and _is_nontrivial_idempotent(e) and is_morphism(e, rep, rep):
            return Classification(Kind.DECOMPOSABLE, d, len(rad), e)
    return Classification(Kind.UNKNOWN, d, len(rad))


def split_by_idempotent(rep: SubspaceRep, e: RationalMatrix):
    """The two summands ``(im e, im(1-e))`` as representations in their own
    coordinates."""
    n = rep.ambient_dim
    one_minus = RationalMatrix.identity(n) - e
    parts = []
    for proj in (e, one_minus):
        img = span(n, proj.columns())
        coords = img.rows  # basis of the image
        k = len(coords)
        spaces = []
        for s in rep.spaces:
            sub = s.image(proj)
            # express sub in coordinates of img
            local = []
            for v in sub.rows:
                sol = _coordinates(coords, v, n)
                local.append(sol)
            spaces.append(span(k, local))
        parts.append(make_rep(rep.poset, k, spaces))
    return tuple(parts)


def _coordinates(basis_rows, v, n):
    A = RationalMatrix.from_columns(basis_rows, n)
    res = solve_linear(A, v)
    if res is None:
        raise ValueError("vector outside the span")
    return res[0]


# --------------------------------------------------------------------------
# equivalence

class Verdict(str, Enum):
    EQUIVALENT = "Equivalent"
    INEQUIVALENT = "Inequivalent"
    PROBABLY_INEQUIVALENT = "ProbablyInequivalent"


@dataclass(frozen=True)
class Equivalence:
    verdict: Verdict
    witness: RationalMatrix | None = None
    error_bound: float | None = None  # probability bound for ProbablyInequivalent
    hom_dim: int | None = None

    @property
    def equivalent(self) -> bool:
        return self.verdict is Verdict.EQUIVALENT


def _is_isomorphism(C: RationalMatrix, r1: SubspaceRep, r2: SubspaceRep) -> bool:
    if C.nrows != C.ncols or C.rank() != C.nrows:
        return False
    return all(v.image(C) == w for v, w in zip(r1.spaces, r2.spaces))


def linearly_equivalent(r1: SubspaceRep, r2: SubspaceRep, seed: int = 0,
                        trials: int = GENERIC_TRIALS, bound: int = GENERIC_BOUND) -> Equivalence:
    if r1.poset != r2.poset:
        raise PosetMismatch("comparing representations of different posets")
    if r1.ambient_dim != r2.ambient_dim or r1.raw_dims != r2.raw_dims:
        return Equivalence(Verdict.INEQUIVALENT)
    n = r1.ambient_dim
    if n == 0:
        return Equivalence(Verdict.EQUIVALENT, RationalMatrix.identity(0), hom_dim=0)
    hom = hom_space(r1, r2)
    if hom.dim == 0:
        return Equivalence(Verdict.INEQUIVALENT, hom_dim=0)
    if hom.dim == 1:
        C = hom.basis[0]
        if _is_isomorphism(C, r1, r2):
            return Equivalence(Verdict.EQUIVALENT, C, hom_dim=1)
        # every morphism is a multiple of C
        return Equivalence(Verdict.INEQUIVALENT, hom_dim=1)
    for C in hom.basis:
        if _is_isomorphism(C, r1, r2):
            return Equivalence(Verdict.EQUIVALENT, C, hom_dim=hom.dim)
    rng = random.Random(seed)
    for _ in range(trials):
        C = hom.combination([rng.randint(-bound, bound) for _ in range(hom.dim)])
        if _is_isomorphism(C, r1, r2):
            return Equivalence(Verdict.EQUIVALENT, C, hom_dim=hom.dim)
    # det of a generic combination is a polynomial of degree <= n
    per_trial = n / (2 * bound + 1)
    return Equivalence(Verdict.PROBABLY_INEQUIVALENT, error_bound=per_trial ** trials,
                       hom_dim=hom.dim)


# --------------------------------------------------------------------------
# quite sincere

@dataclass(frozen=True)
class QuiteSincere:
    ok: bool | None
    clause: str | None = None  # first violated clause
    element: object = None

    def __bool__(self):
        return bool(self.ok)


def is_quite_sincere(rep: SubspaceRep, seed: int = 0) -> QuiteSincere:
    for x, s in rep.items():
        if s.is_zero():
            return QuiteSincere(False, "nonzero", x)
    for x, s in rep.items():
        if s.is_full():
            return QuiteSincere(False, "proper", x)
    for (a, b) in sorted(rep.poset.strict_lt, key=lambda e: (rep.poset.index(e[0]),
                                                            rep.poset.index(e[1]))):
        if rep[a] == rep[b]:
            return QuiteSincere(False, "strict", (a, b))
    c = classify(rep, seed=seed)
    if c.is_indecomposable is None:
        return QuiteSincere(None, "indecomposable")
    if not c.is_indecomposable:
        return QuiteSincere(False, "indecomposable")
    return QuiteSincere(True)


# --------------------------------------------------------------------------
# duals and one-point extensions

def dual_rep(rep: SubspaceRep, complements="canonical") -> SubspaceRep:
    """Representation of the opposite poset built from complements of the V_i.

    ``"canonical"`` takes orthogonal complements for the standard form.
    """
    n = rep.ambient_dim
    out = []
    for x, s in rep.items():
        if complements == "canonical":
            out.append(s.perp())
            continue
        c = complements[x]
        if c.ambient_dim != n or c.dim + s.dim != n or not (c & s).is_zero():
            raise NotAComplement(x)
        out.append(c)
    return make_rep(rep.poset.opposite(), n, out, name=f"{rep.name}'" if rep.name else "")


def extended_rep(rep: SubspaceRep, I, v1: Sequence, v2: Sequence, lam,
                 new: str = "p~") -> SubspaceRep:
    """Add the element ``new`` above ``I`` with space ``sum_I V_i + <v1 + lam v2>``."""
    n = rep.ambient_dim
    v1 = tuple(to_fraction(a) for a in v1)
    v2 = tuple(to_fraction(a) for a in v2)
    if len(v1) != n or len(v2) != n:
        raise DimensionMismatch("probe vectors must live in the ambient space")
    if span(n, [v1, v2]).dim != 2:
        raise DependentVectors("v1 and v2 must be linearly independent")
    lam = to_fraction(lam)
    base = sum_all(n, (rep[i] for i in I))

    def line(mu):
        return base + span(n, [tuple(a + mu * b for a, b in zip(v1, v2))])

    probe_a, probe_b = lam, lam + 1
    if (line(probe_a) & line(probe_b)).dim != base.dim:
        raise ProbeConditionFailed(
            "the lines <v1 + mu v2> do not separate modulo the sum over I")
    poset = extend_poset(rep.poset, I, new=new)
    return make_rep(poset, n, list(rep.spaces) + [line(lam)])


def direct_sum_many(reps: Sequence[SubspaceRep]) -> SubspaceRep:
    out = reps[0]
    for r in reps[1:]:
        out = direct_sum(out, r)
    return out


__all__ = [
    "DimVector", "RawDimProfile", "SubspaceRep", "make_rep", "zero_rep", "dim_vector",
    "raw_profile", "direct_sum", "HomSpace", "hom_space", "Kind", "Classification",
    "classify", "Verdict", "Equivalence", "linearly_equivalent", "QuiteSincere",
    "is_quite_sincere", "dual_rep", "extended_rep", "direct_sum_many",
]
