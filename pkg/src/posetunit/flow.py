"""Moment-map gradient flow towards a χ-balanced metric.

The flow moves a basis change ``g``; the subspaces ``g V_i`` are
orthonormalised with QR and

    M(g) = sum_i chi_i Q_i Q_i^H - lambda I

is the moment map at ``g``.  Each step replaces ``g`` by ``exp(-s M) g``.
When the system is stable M tends to zero and ``G = g^H g`` is a balanced
metric: the G-orthogonal projections P_i onto V_i satisfy
``sum chi_i P_i = lambda I``.  Otherwise ``g`` runs off to infinity along the
directions that destabilise, which is where hints for a destabilising
subspace come from.  Everything here is floating point; hints are always
re-checked exactly.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import NumericalBreakdown, SingularGram
from .linalg import Subspace, span
from .reps import SubspaceRep
from .stability import _alphas, lambda_chi, restrict


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def basis_matrix(s: Subspace) -> np.ndarray:
    """Columns spanning ``s`` as a complex array (n x dim)."""
    if s.is_zero():
        return np.zeros((s.ambient_dim, 0), dtype=complex)
    return np.array([[float(x) for x in row] for row in s.rows], dtype=complex).T


@dataclass(frozen=True)
class Metric:
    gram: np.ndarray

    def __post_init__(self):
        G = np.asarray(self.gram, dtype=complex)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError("Gram matrix must be square")
        scale = max(1.0, float(np.abs(G).max()))
        if np.abs(G - G.conj().T).max() > 1e-12 * scale:
            raise ValueError("Gram matrix is not Hermitian")
        if np.linalg.eigvalsh((G + G.conj().T) / 2).min() <= 0:
            raise ValueError("Gram matrix is not positive definite")
        object.__setattr__(self, "gram", G)

    @classmethod
    def identity(cls, n: int) -> "Metric":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def from_transform(cls, g: np.ndarray) -> "Metric":
        G = g.conj().T @ g
        return cls((G + G.conj().T) / 2)


def projections(rep: SubspaceRep, G) -> list[np.ndarray]:
    """G-orthogonal projections onto the V_i, in element order."""
    G = G.gram if isinstance(G, Metric) else np.asarray(G, dtype=complex)
    n = rep.ambient_dim
    out = []
    for _, s in rep.items():
        B = basis_matrix(s)
        if B.shape[1] == 0:
            out.append(np.zeros((n, n), dtype=complex))
            continue
        gram = B.conj().T @ G @ B
        if np.linalg.cond(gram) > 1e14:
            raise SingularGram("restricted Gram matrix is numerically singular")
        out.append(B @ np.linalg.solve(gram, B.conj().T @ G))
    return out


# --------------------------------------------------------------------------
# the flow


class FlowStatus(str, Enum):
    CONVERGED = "Converged"
    DIVERGED = "Diverged"
    MAX_ITERS = "MaxIters"


@dataclass(frozen=True)
class FlowParams:
    step: float = 0.1
    tol: float = 1e-10
    max_iters: int = 100_000
    plateau_window: int = 500
    plateau_rtol: float = 1e-12
    grow_after: int = 10
    grow: float = 1.2
    max_cond: float = 1e12


@dataclass(frozen=True)
class FlowReport:
    status: FlowStatus
    iterations: int
    final_residual: float
    metric: Metric | None
    transform: np.ndarray
    slope: Fraction
    hints: tuple = ()                      # candidate destabilising subspaces (n x k arrays)
    residuals: tuple = field(default=(), repr=False)
    reason: str = ""

    @property
    def converged(self) -> bool:
        return self.status is FlowStatus.CONVERGED

    @property
    def destabilizer_hint(self):
        return self.hints[0] if self.hints else None

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.transform))

    def to_json(self, fingerprint=None) -> dict:
        out = {"status": self.status.value, "iterations": self.iterations,
               "residual": _fmt(self.final_residual), "reason": self.reason}
        if self.metric is not None:
            G = self.metric.gram
            out["gram"] = [[[_fmt(z.real), _fmt(z.imag)] for z in row] for row in G]
        if fingerprint is not None:
            out["fingerprint"] = [["".join(w) if all(len(x) == 1 for x in w) else list(w), _fmt(v)]
                                  for w, v in fingerprint]
        return out

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(**kw), sort_keys=True)


class _Moment:
    def __init__(self, rep: SubspaceRep, alphas: Sequence[float], lam: float):
        self.n = rep.ambient_dim
        self.items = [(a, basis_matrix(s)) for a, (_, s) in zip(alphas, rep.items())
                      if not s.is_zero()]
        self.lam = lam

    def __call__(self, g: np.ndarray) -> np.ndarray:
        S = -self.lam * np.eye(self.n, dtype=complex)
        for a, B in self.items:
            Q, _ = np.linalg.qr(g @ B)
            S += a * (Q @ Q.conj().T)
        return (S + S.conj().T) / 2


def _exp_herm(M: np.ndarray, s: float) -> np.ndarray:
    w, V = np.linalg.eigh(M)
    return (V * np.exp(-s * w)) @ V.conj().T


def flow(rep: SubspaceRep, chi, params: FlowParams | None = None,
         record: bool = False) -> FlowReport:
    """Run the flow from g = I; see the module docstring."""
    p = params or FlowParams()
    alphas = _alphas(rep, chi)
    lam = lambda_chi(rep, alphas)
    n = rep.ambient_dim
    moment = _Moment(rep, [float(a) for a in alphas], float(lam))
    g = np.eye(n, dtype=complex)
    M = moment(g)
    res = float(np.linalg.norm(M))
    history = [res]
    step = p.step
    accepted = 0
    status, reason = FlowStatus.MAX_ITERS, "iteration budget exhausted"
    it = 0
    while it < p.max_iters:
        if res <= p.tol:
            status, reason = FlowStatus.CONVERGED, "moment map below tolerance"
            break
        it += 1
        g_new = _exp_herm(M, step) @ g
        M_new = moment(g_new)
        res_new = float(np.linalg.norm(M_new))
        if not np.isfinite(res_new) or not np.all(np.isfinite(g_new)):
            raise NumericalBreakdown("flow produced non-finite values")
        if res_new <= res:
            g, M, res = g_new, M_new, res_new
            accepted += 1
            if accepted % p.grow_after == 0:
                step *= p.grow
        else:
            step /= 2
            accepted = 0
            if step < 1e-300:
                status, reason = FlowStatus.DIVERGED, "step size underflow"
                break
        history.append(res)
        if it % 50 == 0:
            sv = np.linalg.svd(g, compute_uv=False)
            if sv[-1] <= 0 or sv[0] / sv[-1] > p.max_cond:
                status, reason = FlowStatus.DIVERGED, "basis change escapes to infinity"
                break
        w = p.plateau_window
        if len(history) > w and res > p.tol:
            old = history[-1 - w]
            if old - res <= p.plateau_rtol * res:
                status, reason = FlowStatus.DIVERGED, "moment map norm plateaued"
                break
    metric = Metric.from_transform(g) if status is FlowStatus.CONVERGED else None
    hints = () if status is FlowStatus.CONVERGED else _hints(g, M)
    return FlowReport(status, it, res, metric, g, lam, hints,
                      tuple(history) if record else (), reason)


def _hints(g: np.ndarray, M: np.ndarray) -> tuple:
    """Candidate destabilising subspaces, most promising first.

    The flow contracts destabilising directions, so they show up as the
    bottom eigenvectors of G = g^H g, and as the pull-back of the top
    eigenvectors of M.
    """
    n = g.shape[0]
    G = g.conj().T @ g
    wG, VG = np.linalg.eigh((G + G.conj().T) / 2)
    logs = np.log(np.maximum(wG, np.finfo(float).tiny))
    wM, VM = np.linalg.eigh(M)
    ginv = np.linalg.inv(g)
    out = []
    # order dimensions by the size of the spectral gap they sit on
    gaps = sorted(range(1, n), key=lambda k: logs[k - 1] - logs[k])
    for k in gaps:
        out.append(VG[:, :k])
    for k in range(1, n):
        out.append(ginv @ VM[:, n - k:])
    return tuple(out)


# --------------------------------------------------------------------------
# from a numerical hint to an exact certificate


@dataclass(frozen=True)
class Destabilizer:
    subspace: Subspace
    sub_slope: Fraction
    slope: Fraction

    @property
    def strict(self) -> bool:
        """True when the subspace violates semistability, not just stability."""
        return self.sub_slope > self.slope


DENOMINATOR_STEPS = (1, 2, 3, 4, 5, 6, 8, 10, 12, 20, 30, 60, 100, 1000)


def _real_basis(H: np.ndarray) -> np.ndarray:
    """Real basis of the smallest real subspace close to span(H)."""
    k = H.shape[1]
    stacked = np.hstack([H.real, H.imag])
    U, _, _ = np.linalg.svd(stacked, full_matrices=False)
    return U[:, :k]


def _candidates(H: np.ndarray, max_den: int):
    n, k = H.shape
    if k == 0 or k >= n:
        return
    R = _real_basis(H)
    # pivoted normalisation: choose k well-conditioned rows and make them the identity
    _, _, piv = sla.qr(R.T, pivoting=True)
    rows = sorted(piv[:k])
    X = R @ np.linalg.inv(R[rows, :])
    for den in DENOMINATOR_STEPS:
        if den > max_den:
            break
        vecs = [[Fraction(float(x)).limit_denominator(den) for x in X[:, j]] for j in range(k)]
        yield span(n, vecs)


def rationalize_destabilizer(hint, rep: SubspaceRep, chi, max_den: int = 1000):
    """Round a hint (or a list of hints) to rational subspaces and certify.

    Returns the first :class:`Destabilizer` with ``λ(π ∩ U) >= λ(π)`` for a
    proper nonzero ``U``, or ``None``.
    """
    hints = hint if isinstance(hint, (list, tuple)) else [hint]
    alphas = _alphas(rep, chi)
    lam = lambda_chi(rep, alphas)
    n = rep.ambient_dim
    seen = set()
    for H in hints:
        if H is None:
            continue
        H = np.asarray(H, dtype=complex)
        if H.ndim == 1:
            H = H[:, None]
        for U in _candidates(H, max_den):
            if U.rows in seen or U.is_zero() or U.dim >= n:
                continue
            seen.add(U.rows)
            s = restrict(rep, U).slope(alphas)
            if s >= lam:
                return Destabilizer(U, s, lam)
    return None


# --------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class BalanceReport:
    residual: float
    trace_sum: float
    trace_target: float
    per_subspace: tuple     # (element, trace, idempotence error, self-adjointness error)

    @property
    def trace_error(self) -> float:
        return abs(self.trace_sum - self.trace_target)


def balanced_check(rep: SubspaceRep, chi, G) -> BalanceReport:
    G = G.gram if isinstance(G, Metric) else np.asarray(G, dtype=complex)
    alphas = [float(a) for a in _alphas(rep, chi)]
    lam = float(lambda_chi(rep, chi))
    n = rep.ambient_dim
    Ps = projections(rep, G)
    S = sum((a * P for a, P in zip(alphas, Ps)), np.zeros((n, n), dtype=complex))
    residual = float(np.linalg.norm(S - lam * np.eye(n)))
    diag = []
    for x, P in zip(rep.poset.elements, Ps):
        idem = float(np.abs(P @ P - P).max())
        adj = float(np.abs(G @ P - P.conj().T @ G).max())
        diag.append((x, float(np.trace(P).real), idem, adj))
    trace_sum = float(sum(a * np.trace(P).real for a, P in zip(alphas, Ps)))
    return BalanceReport(residual, trace_sum, lam * n, tuple(diag))


def _canonical_word(word: tuple) -> tuple:
    rots = [word[i:] + word[:i] for i in range(len(word))]
    return min(rots)


def cyclic_words(letters: Sequence, max_len: int) -> list[tuple]:
    """Words up to rotation with no two cyclically adjacent equal letters."""
    out = set()
    for k in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=k):
            if k > 1 and any(w[i] == w[(i + 1) % k] for i in range(k)):
                continue
            out.add(_canonical_word(w))
    order = {x: i for i, x in enumerate(letters)}
    return sorted(out, key=lambda w: (len(w), [order[x] for x in w]))


def trace_fingerprint(rep: SubspaceRep, G, max_word_len: int = 4) -> list[tuple]:
    """Real parts of tr(P_{i1} ... P_{ik}) over cyclic words, in a G-orthonormal frame."""
    G = G.gram if isinstance(G, Metric) else np.asarray(G, dtype=complex)
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise SingularGram("metric is not positive definite") from exc
    Ps = projections(rep, G)
    # with G = L L^H, L^H P L^{-H} is the orthogonal projection in the new frame
    Linv = np.linalg.inv(L.conj().T)
    frame = {x: L.conj().T @ P @ Linv for x, P in zip(rep.poset.elements, Ps)}
    out = []
    for w in cyclic_words(rep.poset.elements, max_word_len):
        prod = np.eye(rep.ambient_dim, dtype=complex)
        for x in w:
            prod = prod @ frame[x]
        out.append((w, float(np.trace(prod).real)))
    return out


def fingerprint_distance(f1, f2) -> float:
    d1, d2 = dict(f1), dict(f2)
    if d1.keys() != d2.keys():
        return float("inf")
    return max(abs(d1[w] - d2[w]) for w in d1)
