"""Eigenfunctions as gauge factor x seed x polynomial in u^2.

Pendulum:  psi(theta) = e^{beta cos theta} seed(theta) sum_l v_l cos^{2l}(theta/2)
Razavy:    psi(x)     = e^{beta cosh x}   seed(x)     sum_l v_l cosh^{2l}(x/2)

The second derivative used by the residual oracle is assembled from the exact
derivatives of the three factors, so discretisation never enters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from cqes.core import CiLabel, CouplingParams, Irrep, SystemKind, is_integer, potential
from cqes.errors import HyperbolicDivergence, Indeterminate
from cqes.operator import block_dimension

TRIG_PANELS = 4096
TAIL_TOL = 1e-12
PHASE_THRESHOLD = 1e-6
SIGN_TOL = 1e-8


class Seed(enum.Enum):
    ONE = "One"
    COS_HALF = "CosHalf"  # cosh(x/2) for the Razavy system
    SIN_HALF = "SinHalf"  # sinh(x/2)
    SIN_FULL = "SinTheta"  # sinh(x)


_SEED_OF = {Irrep.A1: Seed.ONE, Irrep.B1: Seed.COS_HALF, Irrep.B2: Seed.SIN_HALF,
            Irrep.A2: Seed.SIN_FULL}


@dataclass(frozen=True)
class WavefunctionExpr:
    system: SystemKind
    irrep: Irrep  # matrix irrep; for the Razavy system see ``ci_label``
    beta: float
    seed: Seed
    coefficients: tuple[float, ...]
    normalization: float
    params: CouplingParams | None = None

    @property
    def ci_label(self) -> CiLabel:
        return self.irrep.ci_label

    def __call__(self, coord):
        return evaluate(self, coord)


@dataclass(frozen=True)
class SymmetryReport:
    parity0: int
    parity_pi: int | None
    periodicity: int | None
    inferred_irrep: Irrep | CiLabel


# --- factor derivatives -------------------------------------------------------


def _factors(system: SystemKind, seed: Seed, beta: float, coeffs, t):
    """Values and first/second derivatives of gauge, seed and polynomial at ``t``."""
    t = np.asarray(t, dtype=float)
    trig = system is SystemKind.TRIGONOMETRIC
    if trig:
        c, s = np.cos(t), np.sin(t)
        ch, sh = np.cos(t / 2), np.sin(t / 2)
        # d/dt cos = -sin, d/dt sin = cos
        dc, d2c = -s, -c
    else:
        with np.errstate(over="ignore"):
            c, s = np.cosh(t), np.sinh(t)
            ch, sh = np.cosh(t / 2), np.sinh(t / 2)
        dc, d2c = s, c

    with np.errstate(over="ignore", under="ignore"):
        g = np.exp(beta * c)
    g1 = beta * dc
    g2 = beta * d2c + g1 * g1  # g'/g and g''/g

    if seed is Seed.ONE:
        sv, s1, s2 = np.ones_like(t), np.zeros_like(t), np.zeros_like(t)
    elif seed is Seed.COS_HALF:
        sv, s1, s2 = ch, (-0.5 if trig else 0.5) * sh, (-0.25 if trig else 0.25) * ch
    elif seed is Seed.SIN_HALF:
        sv, s1, s2 = sh, 0.5 * ch, (-0.25 if trig else 0.25) * sh
    else:
        sv, s1, s2 = s, c, (-s if trig else s)

    # polynomial in w = u^2 = (1 + c)/2
    w = (1 + c) / 2
    w1, w2 = dc / 2, d2c / 2
    poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    p0 = poly(w)
    dp = poly.deriv(1)(w) if len(coeffs) > 1 else np.zeros_like(w)
    ddp = poly.deriv(2)(w) if len(coeffs) > 2 else np.zeros_like(w)
    p1 = dp * w1
    p2 = ddp * w1 * w1 + dp * w2
    return g, g1, g2, sv, s1, s2, p0, p1, p2


def _raw(system, seed, beta, coeffs, t):
    g, _, _, sv, _, _, p0, _, _ = _factors(system, seed, beta, coeffs, t)
    with np.errstate(invalid="ignore", over="ignore"):
        out = g * sv * p0
    return np.where(g == 0, 0.0, out)


def _raw_second(system, seed, beta, coeffs, t):
    """(psi, psi'') without normalisation."""
    g, g1, g2, sv, s1, s2, p0, p1, p2 = _factors(system, seed, beta, coeffs, t)
    with np.errstate(invalid="ignore", over="ignore"):
        inner = (
            g2 * sv * p0
            + s2 * p0
            + sv * p2
            + 2 * (g1 * s1 * p0 + g1 * sv * p1 + s1 * p1)
        )
        psi = g * sv * p0
        d2 = g * inner
    zero = g == 0
    return np.where(zero, 0.0, psi), np.where(zero, 0.0, d2)


# --- normalisation -------------------------------------------------------------


def _trig_grid(n: int = TRIG_PANELS) -> np.ndarray:
    return -2 * np.pi + 4 * np.pi * np.arange(n) / n


def _hyp_mass(seed, beta, coeffs, half_width: float, n: int) -> float:
    x = np.linspace(-half_width, half_width, n + 1)
    f = _raw(SystemKind.HYPERBOLIC, seed, beta, coeffs, x) ** 2
    return float(np.trapezoid(f, x))


def hyperbolic_extent(seed: Seed, beta: float, coeffs, tol: float = TAIL_TOL) -> float:
    """Half-width beyond which the relative tail mass of |psi|^2 is below ``tol``."""
    half = 2.0
    prev = _hyp_mass(seed, beta, coeffs, half, 4000)
    while True:
        nxt_half = half * 1.5
        nxt = _hyp_mass(seed, beta, coeffs, nxt_half, 6000)
        if nxt > 0 and abs(nxt - prev) / nxt < tol:
            return half
        half, prev = nxt_half, nxt
        if half > 40:
            raise HyperbolicDivergence("Razavy state not normalisable within |x| < 40")


def _norm_factor(system, seed, beta, coeffs) -> tuple[float, float | None]:
    if system is SystemKind.TRIGONOMETRIC:
        t = _trig_grid()
        f = _raw(system, seed, beta, coeffs, t) ** 2
        # periodic trapezoid on 4096 panels
        mass = float(np.sum(f) * (4 * np.pi / len(t)))
        extent = None
    else:
        extent = hyperbolic_extent(seed, beta, coeffs)
        mass = _hyp_mass(seed, beta, coeffs, 1.5 * extent, 20000)
    if not mass > 0:
        raise Indeterminate("wavefunction vanishes identically")
    return 1.0 / math.sqrt(mass), extent


def _phase_probes(system: SystemKind) -> np.ndarray:
    if system is SystemKind.TRIGONOMETRIC:
        return np.linspace(-2 * np.pi, 2 * np.pi, 1025)[1:-1]
    return np.linspace(-8.0, 8.0, 1025)[1:-1]


# --- public operations ------------------------------------------------------------


def assemble(system, irrep, p: CouplingParams, coefficients) -> WavefunctionExpr:
    """Build a normalised expression from monomial coefficients (lowest power first).

    For the Razavy system ``irrep`` may be a C_i label, mapped to the matrix irrep whose
    block carries the analytic states at this kappa.
    """
    system = SystemKind.parse(system)
    coeffs = tuple(float(c) for c in np.atleast_1d(coefficients))
    if system is SystemKind.HYPERBOLIC:
        if isinstance(irrep, CiLabel) or str(irrep).strip().upper().startswith("A'"):
            from cqes.solve_analytic import correlated_irrep

            if not is_integer(p.kappa):
                raise HyperbolicDivergence(
                    "non-integer kappa: the Razavy series does not terminate and "
                    "results in non-normalizable wavefunctions"
                )
            irrep = correlated_irrep(CiLabel.parse(irrep), round(p.kappa))
        irrep = Irrep.parse(irrep)
        n_block = block_dimension(irrep, p.kappa)
        if n_block is None or len(coeffs) > n_block or p.beta >= 0:
            raise HyperbolicDivergence(
                "Razavy assembly needs a terminating polynomial of the analytic block "
                "(truncated coefficient tails give non-normalizable wavefunctions)"
            )
    else:
        irrep = Irrep.parse(irrep)
    seed = _SEED_OF[irrep]
    scale, _ = _norm_factor(system, seed, p.beta, coeffs)
    probe_vals = _raw(system, seed, p.beta, coeffs, _phase_probes(system)) * scale
    big = np.nonzero(np.abs(probe_vals) > PHASE_THRESHOLD)[0]
    if len(big) and probe_vals[big[0]] < 0:
        scale = -scale
    return WavefunctionExpr(system, irrep, p.beta, seed, coeffs, scale, p)


def evaluate(wf: WavefunctionExpr, coord):
    """Normalised value(s); pendular coordinates are folded into [-2pi, 2pi)."""
    c = np.asarray(coord, dtype=float)
    if wf.system is SystemKind.TRIGONOMETRIC:
        c = np.mod(c + 2 * np.pi, 4 * np.pi) - 2 * np.pi
    out = wf.normalization * _raw(wf.system, wf.seed, wf.beta, wf.coefficients, c)
    return float(out) if np.ndim(out) == 0 else out


def second_derivative(wf: WavefunctionExpr, coord):
    _, d2 = _raw_second(wf.system, wf.seed, wf.beta, wf.coefficients, np.asarray(coord, float))
    return wf.normalization * d2


def residual(wf: WavefunctionExpr, energy: float, grid=None) -> float:
    """max |H psi - E psi| / max |psi| on a dense grid, with exact second derivatives."""
    if wf.params is None:
        raise ValueError("wavefunction carries no coupling parameters")
    if grid is None:
        if wf.system is SystemKind.TRIGONOMETRIC:
            grid = np.linspace(-2 * np.pi, 2 * np.pi, 8001)
        else:
            grid = np.linspace(-10.0, 10.0, 8001)
    grid = np.asarray(grid, dtype=float)
    psi, d2 = _raw_second(wf.system, wf.seed, wf.beta, wf.coefficients, grid)
    v = potential(wf.system, wf.params, grid)
    with np.errstate(invalid="ignore", over="ignore"):
        h_psi = -d2 + v * psi
    resid = np.where(psi == 0, np.abs(d2), np.abs(h_psi - energy * psi))
    return float(np.max(resid) / np.max(np.abs(psi)))


def _sign_of_ratio(a: np.ndarray, b: np.ndarray) -> int:
    """+1/-1 if b = +-a at all probes within SIGN_TOL relative to max|a|."""
    scale = np.max(np.abs(a))
    if np.allclose(b, a, rtol=0, atol=SIGN_TOL * scale):
        return 1
    if np.allclose(b, -a, rtol=0, atol=SIGN_TOL * scale):
        return -1
    raise Indeterminate("wavefunction has no definite symmetry under the probe operation")


def classify_symmetry(wf: WavefunctionExpr) -> SymmetryReport:
    probes = np.linspace(0.05, 3.0, 37)
    if wf.system is SystemKind.TRIGONOMETRIC:
        base = evaluate(wf, probes)
        if np.max(np.abs(base)) < 1e-12:
            raise Indeterminate("|psi| < 1e-12 at every probe point")
        par0 = _sign_of_ratio(base, evaluate(wf, -probes))
        period = _sign_of_ratio(base, evaluate(wf, probes + 2 * np.pi))
        par_pi = _sign_of_ratio(base, evaluate(wf, 2 * np.pi - probes))
        return SymmetryReport(par0, par_pi, period, Irrep.from_characters(period, par0))
    probes = np.linspace(0.05, 4.0, 41)
    base = evaluate(wf, probes)
    if np.max(np.abs(base)) < 1e-12:
        raise Indeterminate("|psi| < 1e-12 at every probe point")
    par0 = _sign_of_ratio(base, evaluate(wf, -probes))
    return SymmetryReport(par0, None, None, CiLabel.APRIME if par0 > 0 else CiLabel.ADOUBLEPRIME)


def analytic_wavefunctions(system, irrep, kappa: int, beta: float):
    """(energy, WavefunctionExpr) for every analytic state of one block, ascending energy."""
    from cqes.solve_analytic import analytic_spectrum

    system = SystemKind.parse(system)
    irrep = Irrep.parse(irrep)
    p = CouplingParams(beta, float(kappa))
    levels = analytic_spectrum(irrep, kappa, beta)
    out = []
    for lv in levels:
        wf = assemble(system, irrep, p, lv.coefficients)
        e = lv.energy_t if system is SystemKind.TRIGONOMETRIC else lv.energy_h
        out.append((e, wf))
    if system is SystemKind.HYPERBOLIC:
        out.sort(key=lambda pair: pair[0])
    return out
