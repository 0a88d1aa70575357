import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cqes.core import CiLabel, CouplingParams, Irrep
from cqes.errors import HyperbolicDivergence, Indeterminate
from cqes.operator import block_dimension
from cqes.solve_analytic import analytic_eigenvectors
from cqes.wavefn import (
    Seed,
    analytic_wavefunctions,
    assemble,
    classify_symmetry,
    evaluate,
    hyperbolic_extent,
    residual,
    second_derivative,
)

VALID = [(irrep, k) for k in range(1, 9) for irrep in Irrep if block_dimension(irrep, k)]
P5 = CouplingParams(-5.0, 1.0)


def test_von_mises_ground_state():
    wf = assemble("trig", Irrep.A1, P5, [1.0])
    th = np.linspace(-2 * np.pi, 2 * np.pi, 401)
    ratio = evaluate(wf, th) / np.exp(-5.0 * np.cos(th))
    assert np.allclose(ratio, ratio[0], rtol=1e-12)
    assert residual(wf, -25.0) < 1e-10
    # global maximum at theta = pi for beta < 0
    grid = np.linspace(0, 2 * np.pi, 10001)
    assert grid[np.argmax(evaluate(wf, grid))] == pytest.approx(np.pi, abs=1e-3)


def test_razavy_sinh_state():
    p = CouplingParams(-5.0, 2.0)
    wf = assemble("hyp", CiLabel.ADOUBLEPRIME, p, [1.0])
    assert wf.seed is Seed.SIN_HALF
    x = np.linspace(-3, 3, 301)
    ref = np.sinh(x / 2) * np.exp(-5.0 * np.cosh(x))
    mask = np.abs(ref) > 1e-300
    r = evaluate(wf, x)[mask] / ref[mask]
    assert np.allclose(r, r[0], rtol=1e-10)
    beta = -5.0
    assert residual(wf, beta * beta - beta - 0.25) < 1e-10
    assert classify_symmetry(wf).inferred_irrep is CiLabel.ADOUBLEPRIME


def test_kappa3_two_term_form():
    beta = -5.0
    p = CouplingParams(beta, 3.0)
    s = np.sqrt(16 * beta**2 + 1)
    for (e, wf), sign in zip(analytic_wavefunctions("trig", Irrep.A1, 3, beta), (1, -1)):
        c0 = (1 + sign * s - 4 * beta) / (8 * beta)
        ref = assemble("trig", Irrep.A1, p, [c0, 1.0])
        th = np.linspace(-6, 6, 97)
        assert np.allclose(evaluate(wf, th), evaluate(ref, th), atol=1e-10)
        assert residual(wf, e) < 1e-10


def test_evaluate_examples():
    p = CouplingParams(-5.0, 3.0)
    a2 = assemble("trig", Irrep.A2, p, [1.0])
    assert evaluate(a2, 0.0) == pytest.approx(0.0, abs=1e-15)
    b1 = assemble("trig", Irrep.B1, CouplingParams(-5.0, 2.0), [1.0])
    assert evaluate(b1, 2 * np.pi - 1e-12) == pytest.approx(-evaluate(b1, 0.0), rel=1e-9)
    # folding mod 4 pi
    assert evaluate(b1, 0.3 + 4 * np.pi) == pytest.approx(evaluate(b1, 0.3), rel=1e-12)


@pytest.mark.parametrize("irrep,k", VALID)
@pytest.mark.parametrize("beta", [-5.0, -0.75])
def test_residuals_both_systems(irrep, k, beta):
    for system in ("trig", "hyp"):
        for e, wf in analytic_wavefunctions(system, irrep, k, beta):
            assert residual(wf, e) < 1e-9


@pytest.mark.parametrize("irrep,k", VALID)
def test_normalization_and_orthogonality(irrep, k):
    pairs = analytic_wavefunctions("trig", irrep, k, -0.75)
    th = np.linspace(-2 * np.pi, 2 * np.pi, 4096, endpoint=False)
    h = 4 * np.pi / len(th)
    vals = [evaluate(wf, th) for _, wf in pairs]
    gram = np.array([[np.sum(a * b) * h for b in vals] for a in vals])
    assert np.allclose(gram, np.eye(len(vals)), atol=1e-8)


@pytest.mark.parametrize("irrep,k", [(i, k) for i, k in VALID if k <= 7])
def test_hyperbolic_normalization_and_decay(irrep, k):
    beta = -0.75
    for _, wf in analytic_wavefunctions("hyp", irrep, k, beta):
        ext = hyperbolic_extent(wf.seed, beta, wf.coefficients)
        x = np.linspace(-3 * ext, 3 * ext, 60001)
        psi2 = evaluate(wf, x) ** 2
        assert np.trapezoid(psi2, x) == pytest.approx(1.0, abs=1e-8)
        tail = np.abs(x) > ext
        assert np.trapezoid(np.where(tail, psi2, 0.0), x) < 1e-10


@pytest.mark.parametrize("irrep,k", VALID)
@pytest.mark.parametrize("beta", [-5.0, -0.75])
def test_node_counts(irrep, k, beta):
    th = np.linspace(0, np.pi, 10001)[1:-1]
    for n, (_, wf) in enumerate(analytic_wavefunctions("trig", irrep, k, beta)):
        v = evaluate(wf, th)
        assert np.sum(np.sign(v[1:]) != np.sign(v[:-1])) == n


@pytest.mark.parametrize("irrep,k", VALID)
def test_symmetry_classification(irrep, k):
    for _, wf in analytic_wavefunctions("trig", irrep, k, -2.0):
        rep = classify_symmetry(wf)
        assert rep.inferred_irrep is irrep
        assert (rep.periodicity, rep.parity0, rep.parity_pi) == (
            irrep.periodicity, irrep.parity, irrep.parity_pi)
    for _, wf in analytic_wavefunctions("hyp", irrep, k, -2.0):
        assert classify_symmetry(wf).inferred_irrep is irrep.ci_label


def test_classify_examples():
    assert classify_symmetry(assemble("trig", "A1", P5, [1.0])).inferred_irrep is Irrep.A1
    p = CouplingParams(-5.0, 2.0)
    assert classify_symmetry(assemble("trig", "B2", p, [1.0])).inferred_irrep is Irrep.B2


def test_indeterminate_for_vanishing_state():
    wf = dataclasses.replace(assemble("trig", Irrep.A1, P5, [1.0]), normalization=0.0)
    with pytest.raises(Indeterminate):
        classify_symmetry(wf)


def test_phase_convention():
    for irrep, k in VALID:
        for _, wf in analytic_wavefunctions("trig", irrep, k, -0.75):
            probes = np.linspace(-2 * np.pi, 2 * np.pi, 1025)[1:-1]
            v = evaluate(wf, probes)
            assert v[np.nonzero(np.abs(v) > 1e-6)[0][0]] > 0


def test_second_derivative_against_finite_differences():
    (e, wf), _ = analytic_wavefunctions("trig", Irrep.A1, 3, -2.0)
    x = np.linspace(-6, 6, 41)
    h = 1e-4
    fd = (evaluate(wf, x + h) - 2 * evaluate(wf, x) + evaluate(wf, x - h)) / h**2
    assert np.allclose(second_derivative(wf, x), fd, atol=1e-4 * np.abs(fd).max())


def test_hyperbolic_divergence():
    with pytest.raises(HyperbolicDivergence):
        assemble("hyp", CiLabel.APRIME, CouplingParams(-5.0, 2.5), [1.0])
    with pytest.raises(HyperbolicDivergence):
        assemble("hyp", Irrep.A1, CouplingParams(-5.0, 3.0), [1.0, 0.5, 0.2])
    with pytest.raises(HyperbolicDivergence):
        assemble("hyp", Irrep.A1, CouplingParams(5.0, 3.0), [1.0])


@given(st.sampled_from(VALID), st.floats(-6, -0.1))
def test_analytic_states_solve_the_equation(case, beta):
    irrep, k = case
    coeffs = analytic_eigenvectors(irrep, k, beta)
    assert coeffs.shape == (block_dimension(irrep, k),) * 2
    for e, wf in analytic_wavefunctions("trig", irrep, k, beta):
        assert residual(wf, e, grid=np.linspace(-2 * np.pi, 2 * np.pi, 801)) < 1e-9
