"""Exact χ-stability: slopes, subdimension vectors, the stability matrix and
its cone of weights.

A weight assigns a positive rational to every poset element (in element
order).  The slope of a representation is ``sum(alpha_i * dim V_i) / dim V``
with raw (not quotient) dimensions.  The representation is stable when every
proper nonzero subspace ``U`` has strictly smaller slope after intersecting
each ``V_i`` with ``U``; it suffices to check the maximal subdimension vectors.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import (BudgetExceeded, DimensionMismatch, EmptyList, NotStable,
                     ZeroAmbient, ZeroGap, ZeroSubspace)
from .linalg import Subspace, full, kernel, rank, span, to_fraction
from .reps import SubspaceRep, make_rep

DEFAULT_BUDGET = 4096
MIN_LEVELS = 2          # generators plus one level of sums and intersections
OPS_PER_BUDGET = 4      # pair operations allowed per unit of budget


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Weight:
    alphas: tuple

    def __post_init__(self):
        vals = tuple(to_fraction(a) for a in self.alphas)
        object.__setattr__(self, "alphas", vals)
        if any(a <= 0 for a in vals):
            raise ValueError("weights must be strictly positive")

    @classmethod
    def of(cls, values) -> "Weight":
        if isinstance(values, Weight):
            return values
        return cls(tuple(values))

    def __len__(self):
        return len(self.alphas)

    def __iter__(self):
        return iter(self.alphas)

    def scaled(self, t) -> "Weight":
        t = to_fraction(t)
        return Weight(tuple(t * a for a in self.alphas))


def _alphas(rep: SubspaceRep, chi) -> tuple:
    """Weight entries as Fractions, allowing non-positive entries."""
    vals = tuple(to_fraction(a) for a in (chi.alphas if isinstance(chi, Weight) else chi))
    if len(vals) != len(rep.poset):
        raise DimensionMismatch(f"weight has {len(vals)} entries for {len(rep.poset)} elements")
    return vals


@dataclass(frozen=True)
class SubdimVector:
    """``(k; c_1, ..., c_n)`` with ``k = dim U`` and ``c_i = dim(V_i ∩ U)``."""

    k: int
    c: tuple
    witness: Subspace | None = field(default=None, compare=False, hash=False)

    def as_tuple(self) -> tuple:
        return (self.k,) + tuple(self.c)

    def slope(self, alphas: Sequence) -> Fraction:
        return sum((Fraction(a) * ci for a, ci in zip(alphas, self.c)), Fraction(0)) / self.k

    def dominates(self, other: "SubdimVector") -> bool:
        """Smaller-or-equal k and larger-or-equal c, not identical."""
        if self.k > other.k or any(a < b for a, b in zip(self.c, other.c)):
            return False
        return self.as_tuple() != other.as_tuple()

    def __repr__(self):
        return "(" + f"{self.k}; " + ",".join(map(str, self.c)) + ")"


class Status(str, Enum):
    STABLE = "Stable"
    STRICTLY_SEMISTABLE = "StrictlySemistable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class StabilityVerdict:
    status: Status
    slope: Fraction                  # λ_χ(π)
    vector: SubdimVector | None      # tight or violating vector (worst one)
    vector_slope: Fraction | None
    tight: tuple = ()                # every vector with slope >= λ_χ(π)

    @property
    def stable(self) -> bool:
        return self.status is Status.STABLE

    @property
    def semistable(self) -> bool:
        return self.status is not Status.UNSTABLE


# --------------------------------------------------------------------------
# slopes and restriction


def lambda_chi(rep: SubspaceRep, chi) -> Fraction:
    if rep.ambient_dim == 0:
        raise ZeroAmbient("slope of a representation on the zero space")
    alphas = _alphas(rep, chi)
    return sum((a * d for a, d in zip(alphas, rep.raw_dims)), Fraction(0)) / rep.ambient_dim


def _intersection_dims(rep: SubspaceRep, U: Subspace) -> tuple:
    # dim(V ∩ U) = dim V + dim U - dim(V + U)
    out = []
    for _, s in rep.items():
        if s.is_zero():
            out.append(0)
        else:
            out.append(s.dim + U.dim - rank(s.int_rows + U.int_rows, rep.ambient_dim))
    return tuple(out)


def restrict(rep: SubspaceRep, U: Subspace) -> SubdimVector:
    if U.ambient_dim != rep.ambient_dim:
        raise DimensionMismatch("subspace lives in a different ambient space")
    if U.is_zero():
        raise ZeroSubspace("restriction to the zero subspace")
    return SubdimVector(U.dim, _intersection_dims(rep, U), U)


def restricted_rep(rep: SubspaceRep, U: Subspace) -> SubspaceRep:
    """``π ∩ U`` as a representation on U, in coordinates of U's canonical basis."""
    coords = U.rows
    k = len(coords)

    def to_u(vec):
        # U's basis is in reduced echelon form, so coordinates are read at pivots
        piv = [next(j for j, x in enumerate(r) if x) for r in coords]
        return [vec[p] for p in piv]

    spaces = [span(k, [to_u(v) for v in (s & U).rows]) for _, s in rep.items()]
    return make_rep(rep.poset, k, spaces)


def is_stable(rep: SubspaceRep, chi, subdims: Sequence[SubdimVector]) -> StabilityVerdict:
    if not subdims:
        raise EmptyList("no subdimension vectors to check")
    alphas = _alphas(rep, chi)
    lam = lambda_chi(rep, alphas)
    worst, worst_slope = None, None
    for d in subdims:
        s = d.slope(alphas)
        if worst_slope is None or s > worst_slope:
            worst, worst_slope = d, s
    tight = tuple(d for d in subdims if d.slope(alphas) >= lam)
    if worst_slope < lam:
        status = Status.STABLE
    elif worst_slope == lam:
        status = Status.STRICTLY_SEMISTABLE
    else:
        status = Status.UNSTABLE
    return StabilityVerdict(status, lam, worst, worst_slope, tight)


# --------------------------------------------------------------------------
# search for maximal subdimension vectors


def maximal_vectors(vectors: Iterable[SubdimVector]) -> list[SubdimVector]:
    """Drop dominated and duplicate vectors; canonical sort by (k, c)."""
    best: dict = {}
    for v in vectors:
        key = v.as_tuple()
        if key not in best or (best[key].witness is None and v.witness is not None):
            best[key] = v
    vs = list(best.values())
    out = [v for v in vs if not any(w.dominates(v) for w in vs)]
    return sorted(out, key=lambda v: v.as_tuple())


def subspace_lattice(rep: SubspaceRep, depth: int = 3, budget: int = DEFAULT_BUDGET,
                     extra: Iterable[Subspace] = ()) -> list[list[Subspace]]:
    """Sum/intersection closure of the V_i (and ``extra``), level by level.

    Level 0 holds the generators; level L+1 holds the new subspaces obtained
    by combining a level-L member with any earlier one.  The full closure is
    infinite in general (four points in general position in a plane already
    generate infinitely many), so the levels are cut at ``depth``.
    """
    return list(itertools.islice(_lattice_levels(rep, budget, extra), depth + 1))


def _lattice_levels(rep: SubspaceRep, budget: int, extra: Iterable[Subspace] = ()):
    seen: dict = {}
    allx: list[Subspace] = []
    work = [0]

    def fresh(cands):
        out = []
        for s in cands:
            if s.rows not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded(f"subspace lattice exceeds {budget} elements")
                seen[s.rows] = s
                out.append(s)
        return out

    cur = fresh([s for _, s in rep.items()] + list(extra))
    while cur:
        allx += cur
        yield cur
        cur = fresh(z for x in cur for y in allx for z in _combine(x, y, work, budget))


def _combine(x: Subspace, y: Subspace, work: list, budget: int):
    # pairs cost far more than members, so they get their own cap
    work[0] += 1
    if work[0] > OPS_PER_BUDGET * budget:
        raise BudgetExceeded(f"more than {OPS_PER_BUDGET * budget} sum/intersection steps")
    return (x + y, x & y)


def _generic_subspaces(base: Subspace, within: Subspace, rng: random.Random) -> list[Subspace]:
    """``base`` plus 1, 2, ... random vectors of ``within`` (strictly inside)."""
    out = []
    cur = base
    vecs = within.int_rows
    while cur.dim < within.dim - 1:
        coefs = [rng.randint(-9, 9) for _ in vecs]
        v = [sum(c * r[j] for c, r in zip(coefs, vecs)) for j in range(within.ambient_dim)]
        nxt = cur + span(within.ambient_dim, [v])
        if nxt.dim == cur.dim:
            continue
        cur = nxt
        out.append(cur)
    return out


def search_subdims(rep: SubspaceRep, budget: int = DEFAULT_BUDGET,
                   witnesses: Iterable[Subspace] = (), seed: int = 0,
                   generic: bool = True, max_depth: int = 8,
                   patience: int = 2) -> list[SubdimVector]:
    """Maximal subdimension vectors found among a pool of candidate subspaces.

    The pool grows with the sum/intersection levels of the V_i and of
    ``witnesses``; alongside each level come random subspaces squeezed
    between two lattice members (stand-ins for generic choices).  The search
    stops once the maximal set has not changed for ``patience`` levels.
    Every returned vector carries an exact witness; completeness is not
    guaranteed.
    """
    n = rep.ambient_dim
    if n == 0:
        raise ZeroAmbient("no proper subspaces in the zero space")
    witnesses = tuple(w for w in witnesses if not w.is_zero() and w.dim < n)
    key = (rep.poset, rep.spaces, budget, witnesses, seed, generic, max_depth, patience)
    if key not in _SEARCH_MEMO:
        _SEARCH_MEMO[key] = tuple(_search(rep, budget, witnesses, seed, generic, max_depth, patience))
    return list(_SEARCH_MEMO[key])


_SEARCH_MEMO: dict = {}


def _search(rep, budget, witnesses, seed, generic, max_depth, patience) -> list[SubdimVector]:
    n = rep.ambient_dim
    rng = random.Random(seed)
    top_space = full(n)
    members: list[Subspace] = []
    vectors = [restrict(rep, w) for w in witnesses]
    best = None
    quiet = 0
    generated = 0
    levels = _lattice_levels(rep, budget, witnesses)
    for depth in itertools.count():
        try:
            level = next(levels, None)
        except BudgetExceeded:
            # the first combination level is mandatory; deeper ones are a bonus
            if depth < MIN_LEVELS:
                raise
            break
        if level is None:
            break
        level = [s for s in level if not s.is_zero() and s.dim < n]
        old = list(members)
        members += level
        vectors += [restrict(rep, s) for s in level]
        if generic:
            pairs = [(top, bot) for top in level + ([top_space] if depth == 0 else [])
                     for bot in [None] + members]
            pairs += [(top, bot) for top in old + [top_space] for bot in level]
            for top, bot in pairs:
                if bot is not None and (bot.dim >= top.dim - 1 or not top.contains(bot)):
                    continue
                base = bot if bot is not None else Subspace(n, ())
                for s in _generic_subspaces(base, top, rng):
                    vectors.append(restrict(rep, s))
                    generated += 1
            if generated > OPS_PER_BUDGET * budget:
                if depth < MIN_LEVELS:
                    raise BudgetExceeded("too many generic candidates")
                break
        current = maximal_vectors(vectors)
        vectors = list(current)
        keys = [v.as_tuple() for v in current]
        quiet = quiet + 1 if keys == best else 0
        best = keys
        if quiet >= patience or depth >= max_depth:
            break
    if not vectors:
        # every V_i is 0 or V; any line is as good as any other
        line = span(n, [[Fraction(int(j == 0)) for j in range(n)]])
        vectors = [restrict(rep, line)]
    return maximal_vectors(vectors)


def verify_witness(rep: SubspaceRep, vector: SubdimVector) -> bool:
    return vector.witness is not None and restrict(rep, vector.witness).as_tuple() == vector.as_tuple()


# --------------------------------------------------------------------------
# stability matrix and cone


@dataclass(frozen=True)
class StabilityMatrix:
    rows: tuple          # tuple of tuples of Fractions
    m: int               # number of subdimension rows (the rest is -I)
    subdims: tuple = ()

    @property
    def n(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def subdim_rows(self) -> tuple:
        return self.rows[:self.m]

    def apply(self, x) -> tuple:
        x = [to_fraction(v) for v in x]
        if len(x) != self.n:
            raise DimensionMismatch(f"vector of length {len(x)} for a matrix with {self.n} columns")
        return tuple(sum((a * b for a, b in zip(r, x)), Fraction(0)) for r in self.rows)


def normalized(k: int, c: Sequence) -> tuple:
    return tuple(Fraction(ci, k) for ci in c)


def build_A_matrix(rep: SubspaceRep, subdims: Sequence[SubdimVector]) -> StabilityMatrix:
    if not subdims:
        raise EmptyList("no subdimension vectors")
    n = len(rep.poset)
    base = normalized(rep.ambient_dim, rep.raw_dims)
    ordered = sorted(subdims, key=lambda v: v.as_tuple())
    rows = [tuple(a - b for a, b in zip(normalized(d.k, d.c), base)) for d in ordered]
    rows += [tuple(Fraction(-int(i == j)) for j in range(n)) for i in range(n)]
    return StabilityMatrix(tuple(rows), len(ordered), tuple(ordered))


def primitive_integer(v: Sequence[Fraction]) -> tuple:
    """Positive multiple of ``v`` with coprime integer entries."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints) if g else tuple(ints)


@dataclass(frozen=True)
class WeightCone:
    rays: tuple
    matrix: StabilityMatrix

    def extreme_points(self) -> tuple:
        # a cone cut out by homogeneous inequalities has the origin as its only vertex
        return (tuple(0 for _ in range(self.matrix.n)),)


def _dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _double_description(rows: Sequence[Sequence[Fraction]], n: int) -> list[tuple]:
    """Extreme rays of ``{x >= 0 : r.x <= 0 for r in rows}``.

    Starts from the orthant and adds one inequality at a time; two rays are
    combined only when they are adjacent (their common tight constraints have
    rank n - 2).
    """
    cons: list = [tuple(Fraction(-int(i == j)) for j in range(n)) for i in range(n)]
    rays = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    for r in rows:
        r = tuple(r)
        vals = [_dot(r, x) for x in rays]
        neg = [x for x, v in zip(rays, vals) if v < 0]
        zer = [x for x, v in zip(rays, vals) if v == 0]
        pos = [(x, v) for x, v in zip(rays, vals) if v > 0]
        negv = [(x, v) for x, v in zip(rays, vals) if v < 0]
        tight = {x: frozenset(i for i, c in enumerate(cons) if _dot(c, x) == 0) for x in rays}
        new = []
        for (p, vp), (q, vq) in itertools.product(pos, negv):
            common = tight[p] & tight[q]
            if len(common) < n - 2:
                continue
            if rank([cons[i] for i in common], n) != n - 2:
                continue
            comb = tuple(vp * a - vq * b for a, b in zip(q, p))
            new.append(tuple(Fraction(x) for x in primitive_integer(comb)))
        cons.append(r)
        merged = {}
        for x in neg + zer + new:
            merged[tuple(Fraction(v) for v in primitive_integer(x))] = None
        rays = list(merged)
        if not rays:
            break
    return rays


def _brute_force_rays(rows: Sequence[Sequence[Fraction]], n: int) -> list[tuple]:
    """Rays as 1-dimensional kernels of (rank - 1) independent rows."""
    allrows = [tuple(r) for r in rows] + [tuple(Fraction(-int(i == j)) for j in range(n))
                                         for i in range(n)]
    rk = rank(allrows, n)
    found = {}
    for subset in itertools.combinations(range(len(allrows)), rk - 1):
        sub = [allrows[i] for i in subset]
        if rank(sub, n) != rk - 1:
            continue
        ker = kernel(sub, n)
        if len(ker) != 1:
            continue
        v = ker[0]
        for sgn in (1, -1):
            x = tuple(sgn * a for a in v)
            if all(_dot(r, x) <= 0 for r in allrows) and any(x):
                found[primitive_integer(x)] = None
    return [tuple(Fraction(a) for a in r) for r in found]


def extremal_rays(A: StabilityMatrix, method: str = "dd") -> WeightCone:
    n = A.n
    if method == "dd":
        rays = _double_description(A.subdim_rows(), n)
    elif method == "brute":
        rays = _brute_force_rays(A.subdim_rows(), n)
    else:
        raise ValueError(f"unknown method {method!r}")
    canon = sorted({primitive_integer(r) for r in rays})
    return WeightCone(tuple(canon), A)


class Membership(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


def cone_membership(cone: WeightCone, chi) -> Membership:
    vals = cone.matrix.apply(chi.alphas if isinstance(chi, Weight) else chi)
    x = [to_fraction(v) for v in (chi.alphas if isinstance(chi, Weight) else chi)]
    if any(v > 0 for v in vals) or any(v <= 0 for v in x):
        return Membership.OUTSIDE
    if all(v < 0 for v in vals[:cone.matrix.m]):
        return Membership.INTERIOR
    return Membership.BOUNDARY


def weight_cone(rep: SubspaceRep, budget: int = DEFAULT_BUDGET, seed: int = 0,
                witnesses: Iterable[Subspace] = (), method: str = "dd") -> WeightCone:
    subdims = search_subdims(rep, budget=budget, witnesses=witnesses, seed=seed)
    return extremal_rays(build_A_matrix(rep, subdims), method=method)


# --------------------------------------------------------------------------
# adding a subspace to a stable system


@dataclass(frozen=True)
class ExtendedSystem:
    rep: SubspaceRep
    weight: Weight
    gap: Fraction
    verdict: StabilityVerdict


def _fresh_name(poset, base="u") -> str:
    i = 1
    while f"{base}{i}" in poset:
        i += 1
    return f"{base}{i}"


def extend_weight(rep: SubspaceRep, chi, U: Subspace,
                  subdims: Sequence[SubdimVector] | None = None,
                  name: str | None = None, budget: int = DEFAULT_BUDGET,
                  seed: int = 0) -> ExtendedSystem:
    """Append U as a new incomparable element with weight R/2, where R is the
    smallest slope gap of the stable system."""
    n = rep.ambient_dim
    if U.ambient_dim != n:
        raise DimensionMismatch("subspace lives in a different ambient space")
    if U.is_zero() or U.dim >= n:
        raise ValueError("the added subspace must be proper and nonzero")
    if subdims is None:
        subdims = search_subdims(rep, budget=budget, seed=seed)
    alphas = _alphas(rep, chi)
    verdict = is_stable(rep, alphas, subdims)
    if not verdict.stable:
        raise NotStable(f"system is {verdict.status.value} under the given weight")
    lam = verdict.slope
    gap = min(lam - d.slope(alphas) for d in subdims)
    if gap <= 0:
        raise ZeroGap("stability gap is zero")
    new = name or _fresh_name(rep.poset)
    poset = rep.poset.add_element(new)
    spaces = [s for _, s in rep.items()] + [U]
    ext = make_rep(poset, n, spaces)
    w = Weight(tuple(alphas) + (gap / 2,))
    ext_subdims = search_subdims(ext, budget=budget, seed=seed)
    return ExtendedSystem(ext, w, gap, is_stable(ext, w, ext_subdims))
