"""Numerical spectra: truncated tridiagonal matrices (pendulum) and the Fourier grid
Hamiltonian (both systems).

The FGH Hamiltonian is reduced exactly to symmetry blocks by projecting onto
symmetry-adapted combinations of grid points, so every level carries an exact
label and degenerate doublets from different irreps never mix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from cqes.core import CiLabel, CouplingParams, Irrep, SystemKind, potential
from cqes.errors import BoxTooSmall, HyperbolicNotSupported, MismatchedParams
from cqes.operator import build_operator

IMAG_TOL = 1e-8
CONVERGED_TOL = 1e-6
BOX_TOL = 1e-6
DEFAULT_WALL = 1e5


class Method(enum.Enum):
    ANALYTIC_BLOCK = "AnalyticBlock"
    TRUNCATED_TRIDIAG = "TruncatedTridiag"
    FGH = "FGH"


@dataclass(frozen=True)
class Convergence:
    resolution: int  # matrix dimension or grid points
    box_half_width: float | None
    estimated_error: tuple[float, ...]
    converged: tuple[bool, ...]


@dataclass(frozen=True)
class SpectrumResult:
    system: SystemKind
    params: CouplingParams
    labels: tuple[str, ...]
    energies: tuple[float, ...]
    method: Method
    convergence: Convergence
    discarded: tuple[complex, ...] = field(default=())

    def levels_of(self, label) -> list[float]:
        key = label.value if isinstance(label, (Irrep, CiLabel)) else str(label)
        return [e for lab, e in zip(self.labels, self.energies) if lab == key]

    def rows(self):
        """(n, label, energy, method, error) tuples in ascending energy."""
        return [
            (n, lab, e, self.method.value, err)
            for n, (lab, e, err) in enumerate(
                zip(self.labels, self.energies, self.convergence.estimated_error)
            )
        ]


@dataclass(frozen=True)
class FghConfig:
    grid_points: int = 1024
    box_half_width: float | None = None  # Razavy only; None = automatic
    n_levels: int = 10
    wall: float = DEFAULT_WALL  # automatic box: V_h(L) = wall
    check_box: bool = True  # Razavy: wall-height and box-enlargement checks

    def __post_init__(self):
        m = self.grid_points
        if m < 64 or m & (m - 1):
            raise ValueError("grid_points must be a power of two >= 64")
        if self.n_levels < 1:
            raise ValueError("n_levels must be positive")


def _parse_irreps(irreps) -> list[Irrep]:
    if isinstance(irreps, (Irrep, str)):
        key = irreps.value if isinstance(irreps, Irrep) else str(irreps).strip().upper()
        if key in ("A", "B"):
            return [Irrep.A1, Irrep.A2] if key == "A" else [Irrep.B1, Irrep.B2]
        if key in ("ALL", "*"):
            return list(Irrep)
        return [Irrep.parse(key)]
    return [Irrep.parse(i) for i in irreps]


def _merge(per_label: dict[str, tuple[np.ndarray, np.ndarray]], n_levels: int):
    rows = []
    for lab, (e, err) in per_label.items():
        rows += [(float(v), lab, float(d)) for v, d in zip(e, err)]
    rows.sort(key=lambda r: (r[0], r[1]))
    rows = rows[:n_levels]
    return (
        tuple(r[1] for r in rows),
        tuple(r[0] for r in rows),
        tuple(r[2] for r in rows),
    )


# --- truncated tridiagonal ---------------------------------------------------------


def truncated_eigenvalues(irrep: Irrep, p: CouplingParams, dim: int):
    """Pendular energies (ascending) of the dim x dim truncation, and discarded complex values."""
    op = build_operator(irrep, p, dim)
    lam = scipy.linalg.eigvals(op.dense())
    scale = np.maximum(1.0, np.abs(lam.real))
    real_mask = np.abs(lam.imag) <= IMAG_TOL * scale
    return np.sort(-lam[real_mask].real), tuple(-lam[~real_mask])


def truncated_eigenvector(irrep: Irrep, p: CouplingParams, n: int, dim: int = 100):
    """(energy, monomial coefficients) of the n-th pendular level of one irrep.

    The coefficients refer to the gauge e^{beta cos theta}; the expansion converges for beta < 0.
    """
    op = build_operator(irrep, p, dim)
    lam, vec = scipy.linalg.eig(op.dense())
    scale = np.maximum(1.0, np.abs(lam.real))
    real = np.nonzero(np.abs(lam.imag) <= IMAG_TOL * scale)[0]
    order = real[np.argsort(-lam[real].real)]
    if n >= len(order):
        raise ValueError(f"only {len(order)} real levels at dim={dim}")
    j = order[n]
    v = vec[:, j].real
    return float(-lam[j].real), v / v[np.argmax(np.abs(v))]


_SHIFT_PARTNER = {Irrep.A1: Irrep.A1, Irrep.B1: Irrep.B2, Irrep.B2: Irrep.B1, Irrep.A2: Irrep.A2}


def truncated_spectrum(
    irreps, p: CouplingParams, dim: int | None = None, n_levels: int = 10,
    system: SystemKind | str = SystemKind.TRIGONOMETRIC,
) -> SpectrumResult:
    """Lowest ``n_levels`` pendular energies of one or several irreps, merged and sorted.

    Each level carries |E(dim) - E(2 dim)| as its error estimate.
    """
    if SystemKind.parse(system) is SystemKind.HYPERBOLIC:
        raise HyperbolicNotSupported(
            "the Razavy series beyond the analytic block diverges and results in "
            "non-normalizable wavefunctions; use fgh_spectrum for the hyperbolic system"
        )
    irreps = _parse_irreps(irreps)
    if dim is None:
        dim = max(100, 4 * n_levels)
    # the expansion only converges for beta < 0; theta -> theta + pi maps beta -> -beta,
    # fixes A1, A2 and exchanges B1 <-> B2
    q = CouplingParams(-p.beta, p.kappa) if p.beta > 0 else p
    per_label = {}
    discarded: list[complex] = []
    for irrep in irreps:
        src = _SHIFT_PARTNER[irrep] if p.beta > 0 else irrep
        e1, d1 = truncated_eigenvalues(src, q, dim)
        e2, _ = truncated_eigenvalues(src, q, 2 * dim)
        m = min(n_levels, len(e1), len(e2))
        per_label[irrep.value] = (e1[:m], np.abs(e1[:m] - e2[:m]))
        discarded += list(d1)
    labels, energies, errs = _merge(per_label, n_levels)
    conv = Convergence(dim, None, errs, tuple(e < CONVERGED_TOL for e in errs))
    return SpectrumResult(
        SystemKind.TRIGONOMETRIC, p, labels, energies, Method.TRUNCATED_TRIDIAG, conv,
        tuple(discarded),
    )


# --- Fourier grid Hamiltonian --------------------------------------------------------


def kinetic_matrix(m: int, h: float) -> np.ndarray:
    """Exact periodic spectral representation of -d^2/dx^2 on m points of spacing h."""
    k = 2 * np.pi * np.fft.fftfreq(m, d=h)
    return scipy.linalg.circulant(np.fft.ifft(k * k).real)


def _trig_group(m: int) -> list[np.ndarray]:
    """Index maps of (E, R(2pi), P(0), P(pi)) on theta_j = -2pi + j h."""
    j = np.arange(m)
    return [j, (j + m // 2) % m, (-j) % m, (m // 2 - j) % m]


def _hyp_group(m: int) -> list[np.ndarray]:
    j = np.arange(m)
    return [j, (-j) % m]


def symmetry_basis(maps: list[np.ndarray], chars) -> np.ndarray:
    """Orthonormal columns sum_g chi(g) e_{g j}, one per grid orbit (vanishing ones dropped)."""
    m = len(maps[0])
    seen = np.zeros(m, dtype=bool)
    cols = []
    for j in range(m):
        if seen[j]:
            continue
        v = np.zeros(m)
        for g, chi in zip(maps, chars):
            v[g[j]] += chi
            seen[g[j]] = True
        nrm = np.linalg.norm(v)
        if nrm > 0.5:
            cols.append(v / nrm)
    return np.array(cols).T


def _grid(system: SystemKind, m: int, half_width: float) -> tuple[np.ndarray, float]:
    h = 2 * half_width / m
    return -half_width + h * np.arange(m), h


def auto_box(p: CouplingParams, wall: float = DEFAULT_WALL) -> float:
    """Half-width L with V_h(L) = wall."""
    eta, zeta = p.eta, p.zeta
    c = (-eta + math.sqrt(eta * eta + 4 * zeta * wall)) / (2 * zeta)
    return float(math.acosh(max(c, 1.0)))


def _fgh_blocks(system: SystemKind, p: CouplingParams, m: int, half_width: float,
                n_per_block: int, want_vectors: bool = False):
    x, h = _grid(system, m, half_width)
    ham = kinetic_matrix(m, h) + np.diag(potential(system, p, x))
    if system is SystemKind.TRIGONOMETRIC:
        maps = _trig_group(m)
        labels = {irrep.value: irrep.characters for irrep in Irrep}
    else:
        maps = _hyp_group(m)
        labels = {CiLabel.APRIME.value: (1, 1), CiLabel.ADOUBLEPRIME.value: (1, -1)}
    out = {}
    for lab, chars in labels.items():
        q = symmetry_basis(maps, chars)
        hb = q.T @ ham @ q
        k = min(n_per_block, hb.shape[0]) - 1
        if want_vectors:
            e, c = scipy.linalg.eigh(hb, subset_by_index=[0, k])
            vec = q @ c / math.sqrt(h)  # unit L2 norm in the continuum
            out[lab] = (e, vec)
        else:
            out[lab] = (scipy.linalg.eigh(hb, eigvals_only=True, subset_by_index=[0, k]), None)
    return x, out


def _box(system: SystemKind, p: CouplingParams, cfg: FghConfig) -> float:
    if system is SystemKind.TRIGONOMETRIC:
        return 2 * np.pi
    return cfg.box_half_width if cfg.box_half_width is not None else auto_box(p, cfg.wall)


def fgh_spectrum(system, p: CouplingParams, cfg: FghConfig | None = None) -> SpectrumResult:
    """Lowest ``cfg.n_levels`` levels on a periodic grid, exactly symmetry-labelled.

    Error estimates compare against half the grid points. For the Razavy system the
    box is additionally checked against a much higher wall at equal spacing.
    """
    system = SystemKind.parse(system)
    cfg = cfg or FghConfig()
    half = _box(system, p, cfg)
    m = cfg.grid_points
    _, fine = _fgh_blocks(system, p, m, half, cfg.n_levels)
    _, coarse = _fgh_blocks(system, p, m // 2, half, cfg.n_levels)
    per_label = {}
    for lab, (e, _) in fine.items():
        c = coarse[lab][0]
        k = min(len(e), len(c))
        per_label[lab] = (e[:k], np.abs(e[:k] - c[:k]))
    labels, energies, errs = _merge(per_label, cfg.n_levels)

    if system is SystemKind.HYPERBOLIC and cfg.check_box:
        if potential(system, p, half) < max(energies) + 25:
            raise BoxTooSmall(f"V_h(L={half}) does not exceed the requested levels by 25")
        _check_box(p, cfg, half, m, fine)

    conv = Convergence(m, None if system is SystemKind.TRIGONOMETRIC else half, errs,
                       tuple(e < CONVERGED_TOL for e in errs))
    return SpectrumResult(system, p, labels, energies, Method.FGH, conv)


def _check_box(p, cfg: FghConfig, half: float, m: int, fine) -> None:
    """Refit in a box whose wall is 100x higher at the same spacing; levels must not move."""
    big = auto_box(p, 100 * max(cfg.wall, potential(SystemKind.HYPERBOLIC, p, half)))
    if big <= half:
        return
    m_big = 2 * math.ceil(m * big / half / 2)
    _, wide = _fgh_blocks(SystemKind.HYPERBOLIC, p, m_big, big, cfg.n_levels)
    for lab, (e, _) in fine.items():
        w = wide[lab][0]
        k = min(len(e), len(w), cfg.n_levels)
        shift = float(np.max(np.abs(e[:k] - w[:k]))) if k else 0.0
        scale = max(1.0, float(np.max(np.abs(e[:k]))) if k else 1.0)
        if shift > BOX_TOL * scale:
            raise BoxTooSmall(f"{lab} levels move by {shift:.2e} when the box is enlarged")


def fgh_irrep_levels(system, p: CouplingParams, label, cfg: FghConfig | None = None,
                     n: int | None = None) -> np.ndarray:
    """Lowest ``n`` FGH levels of one irrep (or C_i label)."""
    system = SystemKind.parse(system)
    cfg = cfg or FghConfig()
    n = n or cfg.n_levels
    key = (Irrep.parse(label) if system is SystemKind.TRIGONOMETRIC else CiLabel.parse(label)).value
    return fgh_block_levels(system, p, cfg, n)[key]


def fgh_eigenpairs(system, p: CouplingParams, label, cfg: FghConfig | None = None,
                   n: int | None = None):
    """(grid, energies, vectors) of one symmetry block; vectors are columns normalised on the grid."""
    system = SystemKind.parse(system)
    cfg = cfg or FghConfig()
    n = n or cfg.n_levels
    key = (Irrep.parse(label) if system is SystemKind.TRIGONOMETRIC else CiLabel.parse(label)).value
    x, blocks = _fgh_blocks(system, p, cfg.grid_points, _box(system, p, cfg), n,
                            want_vectors=True)
    e, v = blocks[key]
    return x, e, v


# --- convergence -------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceReport:
    labels: tuple[str, ...]
    shifts: tuple[float, ...]
    extrapolated: tuple[float, ...]
    monotone: bool
    max_shift: float


def convergence_report(r1: SpectrumResult, r2: SpectrumResult) -> ConvergenceReport:
    """Per-level |E(r1) - E(r2)|, matched by label and index within the label.

    Both methods converge exponentially in the resolution, so the finer value
    is reported as the extrapolation.
    """
    if r1.system is not r2.system or r1.params != r2.params:
        raise MismatchedParams("runs describe different systems or couplings")
    if r1.method is not r2.method:
        raise MismatchedParams("runs use different methods")
    if r2.convergence.resolution < r1.convergence.resolution:
        raise ValueError("second run must use the finer resolution")
    labels, shifts, extra, signs = [], [], [], []
    for lab in dict.fromkeys(r1.labels):
        a, b = r1.levels_of(lab), r2.levels_of(lab)
        for e1, e2 in zip(a, b):
            labels.append(lab)
            shifts.append(abs(e1 - e2))
            extra.append(e2)
            signs.append(np.sign(e2 - e1))
    nonzero = [s for s in signs if s != 0]
    monotone = len(set(nonzero)) <= 1
    return ConvergenceReport(tuple(labels), tuple(shifts), tuple(extra), monotone,
                             max(shifts) if shifts else 0.0)


def fgh_block_levels(system, p: CouplingParams, cfg: FghConfig | None = None,
                     n: int | None = None) -> dict[str, np.ndarray]:
    """Lowest ``n`` FGH levels of every symmetry block, keyed by label."""
    system = SystemKind.parse(system)
    cfg = cfg or FghConfig()
    _, blocks = _fgh_blocks(system, p, cfg.grid_points, _box(system, p, cfg), n or cfg.n_levels)
    return {lab: e for lab, (e, _) in blocks.items()}
