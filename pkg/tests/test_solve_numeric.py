import numpy as np
import pytest

from cqes.core import CiLabel, CouplingParams, Irrep, SystemKind, potential_features
from cqes.errors import BoxTooSmall, HyperbolicNotSupported, MismatchedParams
from cqes.operator import block_dimension
from cqes.solve_analytic import analytic_spectrum, razavy_spectrum_analytic
from cqes.solve_numeric import (
    FghConfig,
    Method,
    convergence_report,
    fgh_block_levels,
    fgh_eigenpairs,
    fgh_irrep_levels,
    fgh_spectrum,
    kinetic_matrix,
    truncated_eigenvalues,
    truncated_eigenvector,
    truncated_spectrum,
)


def test_truncated_examples():
    r = truncated_spectrum("B", CouplingParams(-5.0, 1.0), n_levels=3)
    assert r.energies == pytest.approx([-25.0, -15.5601, -15.5369], abs=5e-5)
    assert r.method is Method.TRUNCATED_TRIDIAG
    r = truncated_spectrum(Irrep.A1, CouplingParams(-5.0, 3.0), n_levels=2)
    assert r.energies == pytest.approx([-34.5125, -14.4875], abs=5e-5)
    exact = [lv.energy_t for lv in analytic_spectrum(Irrep.A1, 3, -5.0)]
    assert np.allclose(r.energies, exact, atol=1e-8)
    assert all(r.convergence.converged)


def test_truncated_eigenvector_matches_block():
    e, v = truncated_eigenvector(Irrep.A1, CouplingParams(-5.0, 5.0), 0)
    assert e == pytest.approx(analytic_spectrum(Irrep.A1, 5, -5.0)[0].energy_t, abs=1e-9)
    # the analytic state lives entirely in the block
    assert np.all(np.abs(v[3:]) < 1e-9)


def test_hyperbolic_refused():
    with pytest.raises(HyperbolicNotSupported, match="non-normalizable"):
        truncated_spectrum("A", CouplingParams(-5.0, 3.0), system="hyp")


def test_fgh_examples():
    r = fgh_spectrum("hyp", CouplingParams(-5.0, 1.0), FghConfig(n_levels=1))
    assert r.energies[0] == pytest.approx(25.0, abs=1e-6)
    assert r.labels[0] == "A'"
    r = fgh_spectrum("hyp", CouplingParams(-5.0, 3.0), FghConfig(n_levels=3))
    assert r.energies == pytest.approx([14.4875, 24.0, 34.5125], abs=5e-5)
    a = fgh_irrep_levels("trig", CouplingParams(-5.0, 5.0), "A1", n=1)
    assert a[0] == pytest.approx(-44.0681, abs=5e-5)


@pytest.mark.parametrize("kappa", [1.0, 2.5, 5.0, 6.0])
@pytest.mark.parametrize("beta", [-5.0, -0.75, 0.75, 5.0])
def test_truncated_vs_fgh(kappa, beta):
    p = CouplingParams(beta, kappa)
    t = truncated_spectrum("all", p, n_levels=10)
    f = fgh_spectrum("trig", p, FghConfig(n_levels=10))
    assert np.allclose(t.energies, f.energies, atol=1e-4)
    # labels agree wherever the levels are not (near-)degenerate
    e = np.array(f.energies)
    isolated = np.ones(len(e), bool)
    close = np.diff(e) < 1e-6
    isolated[:-1] &= ~close
    isolated[1:] &= ~close
    assert [a for a, ok in zip(t.labels, isolated) if ok] == \
        [b for b, ok in zip(f.labels, isolated) if ok]


@pytest.mark.parametrize("kappa", range(1, 9))
def test_spectrum_union(kappa):
    p = CouplingParams(-2.0, float(kappa))
    for irrep in Irrep:
        if block_dimension(irrep, kappa) is None:
            continue
        full, _ = truncated_eigenvalues(irrep, p, 60)
        for lv in analytic_spectrum(irrep, kappa, -2.0):
            assert np.min(np.abs(full - lv.energy_t)) < 1e-8 * max(1, abs(lv.energy_t))


@pytest.mark.parametrize("system", ["trig", "hyp"])
@pytest.mark.parametrize("kappa", [0.5, 2.5, 4.0, 7.0])
def test_variational_floor(system, kappa):
    p = CouplingParams(-3.0, kappa)
    r = fgh_spectrum(system, p, FghConfig(grid_points=512, n_levels=8))
    vmin = min(v for _, v in potential_features(system, p).minima)
    assert min(r.energies) > vmin
    assert np.all(np.diff(r.energies) >= 0)
    assert len(r.convergence.estimated_error) == len(r.energies)


@pytest.mark.parametrize("kappa", range(1, 8))
@pytest.mark.parametrize("beta", [-5.0, -0.75])
def test_razavy_ground_state(kappa, beta):
    p = CouplingParams(beta, float(kappa))
    r = fgh_spectrum("hyp", p, FghConfig(n_levels=2))
    # the even (A') analytic state of lowest Razavy energy is the ground state
    analytic = razavy_spectrum_analytic(CiLabel.APRIME, kappa, beta)[0].energy_h
    assert r.labels[0] == "A'"
    assert r.energies[0] == pytest.approx(analytic, abs=1e-4)


def test_convergence_examples():
    p = CouplingParams(-5.0, 3.0)
    lo = fgh_spectrum("hyp", p, FghConfig(grid_points=512, n_levels=10))
    hi = fgh_spectrum("hyp", p, FghConfig(grid_points=1024, n_levels=10))
    assert convergence_report(lo, hi).max_shift < 1e-6
    p = CouplingParams(-5.0, 5.0)
    a = truncated_spectrum("all", p, dim=100)
    b = truncated_spectrum("all", p, dim=200)
    rep = convergence_report(a, b)
    assert rep.max_shift < 1e-6 and len(rep.shifts) == 10
    same = convergence_report(a, a)
    assert same.max_shift == 0.0 and same.monotone


def test_convergence_mismatch():
    a = truncated_spectrum("A", CouplingParams(-5.0, 5.0), dim=100)
    b = truncated_spectrum("A", CouplingParams(-5.0, 4.0), dim=200)
    with pytest.raises(MismatchedParams):
        convergence_report(a, b)
    c = fgh_spectrum("trig", CouplingParams(-5.0, 5.0), FghConfig(grid_points=256))
    with pytest.raises(MismatchedParams):
        convergence_report(a, c)
    with pytest.raises(ValueError):
        convergence_report(truncated_spectrum("A", CouplingParams(-5.0, 5.0), dim=200), a)


def test_box_too_small():
    p = CouplingParams(-0.75, 3.0)
    with pytest.raises(BoxTooSmall):
        fgh_spectrum("hyp", p, FghConfig(box_half_width=2.0, n_levels=4))
    with pytest.raises(BoxTooSmall):
        fgh_spectrum("hyp", p, FghConfig(box_half_width=3.2, n_levels=4, grid_points=256))


def test_config_validation():
    with pytest.raises(ValueError):
        FghConfig(grid_points=1000)
    with pytest.raises(ValueError):
        FghConfig(grid_points=32)
    with pytest.raises(ValueError):
        FghConfig(n_levels=0)


def test_kinetic_matrix_plane_waves():
    m, length = 64, 2.0
    h = length / m
    x = np.arange(m) * h
    t = kinetic_matrix(m, h)
    for j in (1, 3, 7):
        k = 2 * np.pi * j / length
        assert np.allclose(t @ np.cos(k * x), k * k * np.cos(k * x), atol=1e-9 * k * k)
    assert np.allclose(t, t.T)


def test_fgh_eigenvectors_carry_symmetry():
    p = CouplingParams(-2.0, 2.5)
    x, e, v = fgh_eigenpairs("trig", p, "B2", n=3)
    m = len(x)
    j = np.arange(m)
    mirror = (-j) % m
    shift = (j + m // 2) % m
    for col in v.T:
        # B2: odd under theta -> -theta, antiperiodic under 2 pi
        assert np.allclose(col[mirror], -col, atol=1e-10)
        assert np.allclose(col[shift], -col, atol=1e-10)
    assert np.allclose(e, fgh_irrep_levels("trig", p, Irrep.B2, n=3))


def test_block_levels_keys():
    t = fgh_block_levels("trig", CouplingParams(-1.0, 2.0), FghConfig(grid_points=256), n=2)
    assert set(t) == {"A1", "B1", "B2", "A2"}
    h = fgh_block_levels(SystemKind.HYPERBOLIC, CouplingParams(-1.0, 2.0), FghConfig(grid_points=256), n=2)
    assert set(h) == {"A'", "A''"}
