import numpy as np
import pytest

from posetunit.errors import SingularGram
from posetunit.flow import (FlowParams, FlowStatus, Metric, balanced_check, flow,
                            fingerprint_distance, projections, rationalize_destabilizer,
                            trace_fingerprint)
from posetunit.linalg import RationalMatrix, span
from posetunit.poset import primitive
from posetunit.reps import make_rep


def three_lines():
    return make_rep(primitive(1, 1, 1), 2,
                    [span(2, [(1, 0)]), span(2, [(0, 1)]), span(2, [(1, 1)])])


def random_metric(n, rng):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return A.conj().T @ A + 0.1 * np.eye(n)


def test_metric_validation():
    with pytest.raises(ValueError):
        Metric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        Metric(np.array([[1.0, 0.0], [0.0, -1.0]]))
    assert np.allclose(Metric.identity(3).gram, np.eye(3))


def test_projection_examples():
    pi = three_lines()
    P = projections(pi, np.eye(2))
    assert np.allclose(P[0], np.diag([1, 0]))
    assert np.allclose(P[2], np.full((2, 2), 0.5))


def test_projection_identities_under_random_metrics(catalog):
    rng = np.random.default_rng(7)
    rep = catalog["P1"].rep()
    for _ in range(20):
        G = random_metric(rep.ambient_dim, rng)
        for P, s in zip(projections(rep, G), rep.spaces):
            assert np.abs(P @ P - P).max() < 1e-10
            assert np.abs(G @ P - P.conj().T @ G).max() < 1e-10 * np.abs(G).max()
            assert abs(np.trace(P).real - s.dim) < 1e-10


def test_singular_gram():
    with pytest.raises(SingularGram):
        projections(three_lines(), np.zeros((2, 2)))


def test_flow_balances_three_lines():
    r = flow(three_lines(), (1, 1, 1), record=True)
    assert r.status is FlowStatus.CONVERGED and r.final_residual < 1e-10
    P = projections(three_lines(), r.metric)
    assert np.allclose(sum(P), 1.5 * np.eye(2), atol=1e-9)
    # the balanced lines are pairwise equiangular
    angles = [np.trace(P[i] @ P[j]).real for i, j in [(0, 1), (0, 2), (1, 2)]]
    assert max(angles) - min(angles) < 1e-9
    assert all(b <= a for a, b in zip(r.residuals, r.residuals[1:]))


def test_flow_detects_instability_and_certifies():
    pi = three_lines()
    r = flow(pi, (3, 1, 1))
    assert r.status is FlowStatus.DIVERGED
    cert = rationalize_destabilizer(list(r.hints), pi, (3, 1, 1))
    assert cert.subspace == span(2, [(1, 0)])
    assert cert.strict


def test_flow_on_catalog_row(catalog):
    e = catalog["(1,2,3)#1"]
    r = flow(e.rep(), e.weight)
    assert r.converged and r.final_residual < 1e-8


def test_rationalize_examples(catalog):
    pi = catalog["pi_alpha"].rep(1)
    hint = np.zeros((4, 2))
    hint[0, 0] = hint[2, 1] = 1.0
    hint += 1e-9 * np.random.default_rng(0).normal(size=hint.shape)
    cert = rationalize_destabilizer(hint, pi, (1, 1, 1, 1))
    assert cert.subspace == span(4, [(1, 0, 0, 0), (0, 0, 1, 0)])
    assert cert.sub_slope == cert.slope == 2 and not cert.strict
    # a stable system has nothing to certify
    noise = np.random.default_rng(1).normal(size=(2, 1))
    assert rationalize_destabilizer(noise, three_lines(), (1, 1, 1)) is None
    # a hint spanning everything is not proper
    assert rationalize_destabilizer(np.eye(2), three_lines(), (3, 1, 1)) is None


def test_balanced_check_at_identity():
    b = balanced_check(three_lines(), (1, 1, 1), np.eye(2))
    assert abs(b.residual - 1 / np.sqrt(2)) < 1e-12
    assert b.trace_error < 1e-12


def test_trace_identity_for_arbitrary_metrics(catalog):
    rng = np.random.default_rng(3)
    e = catalog["(1,2,4)#7"]
    rep = e.rep()
    for _ in range(10):
        b = balanced_check(rep, e.weight, random_metric(rep.ambient_dim, rng))
        assert b.trace_error < 1e-10


def test_fingerprint_single_letters_are_dimensions():
    pi = three_lines()
    r = flow(pi, (1, 1, 1))
    fp = dict(trace_fingerprint(pi, r.metric, max_word_len=1))
    assert all(abs(v - 1) < 1e-10 for v in fp.values())


def test_fingerprint_invariant_under_change_of_basis():
    pi = three_lines()
    other = pi.transform(RationalMatrix.from_rows([[2, 1], [1, 1]]))
    f1 = trace_fingerprint(pi, flow(pi, (1, 1, 1)).metric)
    f2 = trace_fingerprint(other, flow(other, (1, 1, 1)).metric)
    assert fingerprint_distance(f1, f2) < 1e-8


def test_report_json_is_deterministic():
    pi = three_lines()
    a = flow(pi, (1, 1, 1)).dumps()
    b = flow(pi, (1, 1, 1)).dumps()
    assert a == b and '"status": "Converged"' in a


def test_max_iters_status():
    r = flow(three_lines(), (1, 1, 1), FlowParams(max_iters=3))
    assert r.status is FlowStatus.MAX_ITERS and r.metric is None


def _random_indecomposables(count, seed):
    from posetunit.reps import Kind, classify
    rng = np.random.default_rng(seed)
    shapes = [(1, 1, 1), (1, 1, 1, 1), (1, 2, 2), (2, 2, 2)]
    out = []
    while len(out) < count:
        shape = shapes[rng.integers(len(shapes))]
        n = int(rng.integers(2, 5))
        spaces = []
        for length in shape:
            chain = span(n, [])
            for _ in range(length):
                k = int(rng.integers(0, n))
                chain = chain + span(n, rng.integers(-2, 3, size=(k, n)).tolist())
                spaces.append(chain)
        rep = make_rep(primitive(*shape), n, spaces)
        if classify(rep).kind in (Kind.BRICK, Kind.INDECOMPOSABLE):
            out.append(rep)
    return out


def test_exact_and_flow_agree_on_random_indecomposables():
    from fractions import Fraction
    from posetunit.stability import Status, is_stable, search_subdims
    rng = np.random.default_rng(50)
    checked = 0
    for rep in _random_indecomposables(50, 11):
        while True:
            w = tuple(Fraction(int(rng.integers(1, 60)), 20) for _ in rep.poset)
            v = is_stable(rep, w, search_subdims(rep))
            if v.status is not Status.STRICTLY_SEMISTABLE:
                break
        r = flow(rep, w)
        assert r.converged == v.stable, (rep, w, v.status, r.status)
        checked += 1
    assert checked == 50
