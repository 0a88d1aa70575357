"""Cross-system spectral structure: anti-isospectrality, tunnelling doublets,
kappa sweeps with crossing detection, and ordering checks."""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from cqes.core import CiLabel, CouplingParams, Irrep, SystemKind, is_integer, qes_interval
from cqes.errors import NotCQES
from cqes.operator import block_dimension
from cqes.solve_analytic import analytic_spectrum, razavy_spectrum_analytic
from cqes.solve_numeric import (
    FghConfig,
    SpectrumResult,
    _fgh_blocks,
    auto_box,
    fgh_irrep_levels,
)

DEGENERACY_TOL = 1e-6
# gaps below this (relative) are numerically degenerate; their sign carries no information
NOISE_FLOOR = 1e-9


def worker_count() -> int:
    env = os.environ.get("CQES_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


# --- anti-isospectrality ---------------------------------------------------------


@dataclass(frozen=True)
class AisPair:
    label: str  # pendular irrep / C_i label
    n: int  # Razavy quantum number within the C_i label
    energy_t: float
    energy_h: float
    defect: float


@dataclass(frozen=True)
class AisReport:
    kappa: float
    beta: float
    pairs: tuple[AisPair, ...]
    holds: bool
    interval: tuple[float, float]
    inside_interval: bool
    max_defect: float
    source: str

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "beta": self.beta,
            "holds": self.holds,
            "source": self.source,
            "max_defect": self.max_defect,
            "interval": list(self.interval),
            "inside_interval": self.inside_interval,
            "pairs": [
                {"label": p.label, "n": p.n, "E_t": p.energy_t, "E_h": p.energy_h,
                 "defect": p.defect}
                for p in self.pairs
            ],
        }


def _class_irreps(k: int) -> tuple[Irrep, ...]:
    return (Irrep.A1, Irrep.A2) if k % 2 else (Irrep.B1, Irrep.B2)


def verify_ais(kappa: float, beta: float, tol: float = 1e-3, source: str = "fgh",
               cfg: FghConfig | None = None) -> AisReport:
    """Compare pendular levels with sign-flipped, order-reversed Razavy levels.

    ``source="fgh"`` takes the Razavy side from the grid solver; ``"analytic"``
    uses the shared analytic blocks (integer kappa only).
    """
    p = CouplingParams(beta, kappa)
    interval = qes_interval(p)
    cfg = cfg or FghConfig(n_levels=max(1, math.ceil(kappa)) + 1, check_box=False)
    pairs: list[AisPair] = []
    integer = is_integer(kappa) and round(kappa) >= 1
    if integer:
        k = int(round(kappa))
        for irrep in _class_irreps(k):
            if block_dimension(irrep, k) is None:
                continue
            pend = [lv.energy_t for lv in analytic_spectrum(irrep, k, beta)]
            n_block = len(pend)
            label = irrep.ci_label
            if source == "analytic":
                hyp = [lv.energy_h for lv in razavy_spectrum_analytic(label, k, beta)]
            else:
                hyp = list(fgh_irrep_levels("hyp", p, label, cfg, n=n_block))
            for n in range(n_block):
                e_t = pend[n_block - n - 1]
                pairs.append(AisPair(f"{irrep.value}/{label.value}", n, e_t, hyp[n], e_t + hyp[n]))
    else:
        # no analytic block: pair the lowest floor(kappa) levels of the two grid spectra
        m = max(1, int(math.floor(kappa)))
        from cqes.solve_numeric import fgh_spectrum

        tcfg = FghConfig(cfg.grid_points, None, m, cfg.wall, False)
        trig = fgh_spectrum("trig", p, tcfg).energies
        hyp = fgh_spectrum("hyp", p, FghConfig(cfg.grid_points, cfg.box_half_width, m,
                                               cfg.wall, False)).energies
        for n in range(m):
            e_t = trig[m - n - 1]
            pairs.append(AisPair("merged", n, e_t, hyp[n], e_t + hyp[n]))
    max_defect = max((abs(q.defect) for q in pairs), default=math.inf)
    lo, hi = interval
    slack = 1e-9 * max(1.0, abs(lo), abs(hi))
    inside = all(lo - slack <= q.energy_t <= hi + slack for q in pairs)
    holds = integer and max_defect < tol and inside
    return AisReport(float(kappa), float(beta), tuple(pairs), bool(holds), interval, inside,
                     float(max_defect), source)


# --- doublet splittings ------------------------------------------------------------


@dataclass(frozen=True)
class SplittingRecord:
    kappa: int
    index: int  # doublet index counted from the bottom of the Razavy spectrum
    labels: tuple[str, str]
    exact: float
    prediction: float | None
    next_order: int | None  # power of |beta| of the first neglected term

    @property
    def defect(self) -> float | None:
        return None if self.prediction is None else self.exact - self.prediction

    def scaled_defect(self, beta: float) -> float | None:
        if self.prediction is None or self.next_order is None:
            return None
        return self.defect / abs(beta) ** self.next_order


def _prediction(kappa: int, index: int, beta: float) -> tuple[float | None, int | None]:
    b = abs(beta)
    if kappa == 2:
        return 2 * b, None
    if kappa == 3 and index == 0:
        return 4 * b * b, 4
    if kappa == 4:
        # lower doublet tunnels through the full barrier; the upper one sits near its top
        if index == 0:
            return 3 * b**3, 5
        return 4 * b - 3 * b**3, 5
    return None, None


def doublet_splittings(kappa: int, beta: float) -> list[SplittingRecord]:
    """Exact tunnelling splittings of the analytic states, bottom doublet first.

    Doublet d pairs the d-th Razavy level of A' with the d-th of A''; for odd kappa
    the top A' state is single.
    """
    if not is_integer(kappa) or round(kappa) < 2:
        raise NotCQES(f"splittings need an integer kappa >= 2, got {kappa}")
    k = int(round(kappa))
    first, second = _class_irreps(k)
    e1 = [lv.energy_t for lv in analytic_spectrum(first, k, beta)]
    e2 = [lv.energy_t for lv in analytic_spectrum(second, k, beta)]
    n1, n2 = len(e1), len(e2)
    out = []
    for d in range(k // 2):
        a = e1[n1 - 1 - d]
        b = e2[n2 - 1 - d]
        pred, order = _prediction(k, d, beta)
        out.append(SplittingRecord(k, d, (first.value, second.value), abs(a - b), pred, order))
    return out


def splitting_order_ratios(kappa: int, index: int, betas) -> list[float]:
    """Ratios defect(beta_i)/defect(beta_{i+1}) along a halving sequence."""
    defects = [doublet_splittings(kappa, b)[index].defect for b in betas]
    return [d0 / d1 for d0, d1 in zip(defects, defects[1:])]


# --- kappa sweep -------------------------------------------------------------------------


class CrossingKind(enum.Enum):
    GENUINE = "Genuine"
    AVOIDED = "Avoided"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class CrossingEvent:
    kind: CrossingKind
    kappa_location: float
    irreps: tuple[str, str]
    gap: float
    levels: tuple[int, int]
    energy: float


@dataclass
class ScanResult:
    beta: float
    kappas: np.ndarray
    trig: dict[str, np.ndarray]  # irrep -> (steps, n_levels) pendular energies
    hyp: dict[str, np.ndarray]  # C_i label -> (steps, n_levels) of -E_h
    events: list[CrossingEvent] = field(default_factory=list)
    markers: list[tuple[float, str, int, float]] = field(default_factory=list)

    def curve_rows(self):
        """(kappa, level, label, E_t, minus_E_h) rows in a fixed order."""
        rows = []
        for i, k in enumerate(self.kappas):
            for lab, arr in self.trig.items():
                for n, e in enumerate(arr[i]):
                    rows.append((float(k), n, lab, float(e), math.nan))
            for lab, arr in self.hyp.items():
                for n, e in enumerate(arr[i]):
                    rows.append((float(k), n, lab, math.nan, float(e)))
        return rows


def _solve_step(beta: float, kappa: float, n_levels: int, grid: int):
    p = CouplingParams(beta, kappa)
    _, t = _fgh_blocks(SystemKind.TRIGONOMETRIC, p, grid, 2 * np.pi, n_levels)
    _, h = _fgh_blocks(SystemKind.HYPERBOLIC, p, grid, auto_box(p), n_levels)
    return {k: v[0] for k, v in t.items()}, {k: -v[0] for k, v in h.items()}


def _trig_blocks(beta: float, kappa: float, n_levels: int, grid: int) -> dict[str, np.ndarray]:
    _, t = _fgh_blocks(SystemKind.TRIGONOMETRIC, CouplingParams(beta, kappa), grid, 2 * np.pi,
                       n_levels)
    return {lab: v[0] for lab, v in t.items()}


def eta_scan(beta: float, kappa_range: tuple[float, float], n_levels: int = 8, steps: int = 61,
             grid: int = 1024, threads: int | None = None) -> ScanResult:
    """Sweep kappa at fixed beta (eta = kappa beta, zeta = beta^2).

    Integer kappa values inside the range are always included as sweep points.
    Levels are followed by their index within each irrep: the grid blocks carry
    exact labels and same-symmetry levels of a 1D problem never cross.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    lo, hi = kappa_range
    if not 0 <= lo < hi:
        raise ValueError("kappa range must satisfy 0 <= lo < hi")
    kappas = np.linspace(lo, hi, steps)
    ints = np.arange(max(1, math.ceil(lo)), math.floor(hi) + 1, dtype=float)
    kappas = np.unique(np.concatenate([kappas, ints]))
    kappas = kappas[kappas > 0]

    with ThreadPoolExecutor(max_workers=threads or worker_count()) as pool:
        results = list(pool.map(lambda k: _solve_step(beta, float(k), n_levels, grid), kappas))

    trig = {irrep.value: np.array([r[0][irrep.value][:n_levels] for r in results])
            for irrep in Irrep}
    hyp = {lab.value: np.array([r[1][lab.value][:n_levels] for r in results]) for lab in CiLabel}
    scan = ScanResult(beta, kappas, trig, hyp)

    for k in ints:
        for irrep in _class_irreps(int(k)):
            if block_dimension(irrep, k) is None:
                continue
            for lv in analytic_spectrum(irrep, int(k), beta):
                scan.markers.append((float(k), irrep.value, lv.n, lv.energy_t))

    scan.events = _genuine_events(scan, grid) + _avoided_events(scan)
    scan.events.sort(key=lambda ev: (ev.kappa_location, ev.energy))
    return scan


def _genuine_events(scan: ScanResult, grid: int) -> list[CrossingEvent]:
    events = []
    kappas = scan.kappas
    for cls_pair in ((Irrep.A1, Irrep.A2), (Irrep.B1, Irrep.B2)):
        a, b = (scan.trig[i.value] for i in cls_pair)
        labels = (cls_pair[0].value, cls_pair[1].value)
        parity = 1 if cls_pair[0] is Irrep.A1 else 0
        n = a.shape[1]
        for i in range(n):
            for j in range(n):
                diff = a[:, i] - b[:, j]
                for s in range(len(kappas)):
                    k = kappas[s]
                    at_int = is_integer(k) and round(k) % 2 == parity and round(k) >= 1
                    if at_int and abs(diff[s]) < DEGENERACY_TOL:
                        upper = qes_interval(CouplingParams(scan.beta, k))[1]
                        if a[s, i] > upper:
                            events.append(CrossingEvent(CrossingKind.GENUINE, float(k), labels,
                                                        float(abs(diff[s])), (i, j),
                                                        float(a[s, i])))
                        continue
                    if s + 1 < len(kappas) and diff[s] * diff[s + 1] < 0:
                        k_next = kappas[s + 1]
                        if any(is_integer(kk) and abs(diff[t]) < DEGENERACY_TOL
                               for t, kk in ((s, k), (s + 1, k_next))):
                            continue  # already reported at the integer end point
                        floor = NOISE_FLOOR * max(1.0, abs(a[s, i]))
                        if max(abs(diff[s]), abs(diff[s + 1])) < floor:
                            continue  # numerically degenerate throughout the step
                        # same-class irreps may only meet at integer kappa of matching parity;
                        # anything else is reported, not classified
                        loc = _refine_sign_change(scan.beta, cls_pair, i, j, k, k_next, grid)
                        energy = float(np.interp(loc, kappas, a[:, i]))
                        events.append(CrossingEvent(CrossingKind.UNCLASSIFIED, loc, labels, 0.0,
                                                    (i, j), energy))
    return events


def _refine_sign_change(beta, pair, i, j, k0, k1, grid) -> float:
    n = max(i, j) + 1
    cache: dict[float, dict[str, np.ndarray]] = {}

    def f(k):
        if k not in cache:
            cache[k] = _trig_blocks(beta, k, n, grid)
        t = cache[k]
        return t[pair[0].value][i] - t[pair[1].value][j]

    try:
        return float(scipy.optimize.brentq(f, k0, k1, xtol=1e-9, maxiter=60))
    except ValueError:  # end-point signs not reproduced at the reduced level count
        return 0.5 * (k0 + k1)


def _avoided_events(scan: ScanResult) -> list[CrossingEvent]:
    events = []
    k = scan.kappas
    for lab, arr in scan.trig.items():
        gaps = np.diff(arr, axis=1)  # (steps, n_levels-1)
        for i in range(gaps.shape[1]):
            g = gaps[:, i]
            for s in range(1, len(k) - 1):
                if g[s] < g[s - 1] and g[s] < g[s + 1]:
                    kk, gg = _quadratic_min(k[s - 1 : s + 2], g[s - 1 : s + 2])
                    energy = float(arr[s, i] + arr[s, i + 1]) / 2
                    events.append(CrossingEvent(CrossingKind.AVOIDED, kk, (lab, lab),
                                                max(gg, 0.0), (i, i + 1), energy))
    return events


def _quadratic_min(xs, ys) -> tuple[float, float]:
    c2, c1, c0 = np.polyfit(xs, ys, 2)
    if c2 <= 0:
        return float(xs[1]), float(ys[1])
    x = -c1 / (2 * c2)
    x = float(np.clip(x, xs[0], xs[2]))
    return x, float(np.polyval([c2, c1, c0], x))


# --- ordering ------------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderingResult:
    passed: bool
    first_violation: int | None
    message: str
    pattern: tuple[str, ...] = ()
    single_count: int = 0
    degenerate_gaps: tuple[float, ...] = ()


def _trig_class(n: int) -> str:
    return "A" if n % 4 in (0, 3) else "B"


def ordering_check(spectrum: SpectrumResult, tol: float = 1e-8,
                   degeneracy_tol: float = 1e-3) -> OrderingResult:
    """Oscillation-theorem ordering of a merged, labelled spectrum.

    Razavy: labels alternate A', A'', A', ... with strictly rising energies.
    Pendulum: per-class sorted levels follow E(A)0 < E(B)1 <= E(B)2 < E(A)3 <= E(A)4 < ...;
    the first 2 kappa levels (integer kappa; otherwise those below the QES upper bound)
    are single and run A1, B1, B2, A2 for beta > 0 and
    A1, B2, B1, A2 for beta < 0, and for integer kappa the same-class pairs above it are degenerate.
    """
    e = np.asarray(spectrum.energies, dtype=float)
    labels = spectrum.labels
    if spectrum.system is SystemKind.HYPERBOLIC:
        expected = [CiLabel.APRIME.value, CiLabel.ADOUBLEPRIME.value]
        for n, (lab, val) in enumerate(zip(labels, e)):
            if lab != expected[n % 2]:
                return OrderingResult(False, n, f"level {n} is {lab}, expected {expected[n % 2]}",
                                      tuple(labels))
            if n and not val > e[n - 1]:
                return OrderingResult(False, n, f"level {n} not above level {n - 1}", tuple(labels))
        return OrderingResult(True, None, "A'/A'' alternate", tuple(labels))

    by_cls = {"A": [], "B": []}
    for lab, val in zip(labels, e):
        by_cls[lab[0]].append((val, lab))
    for lst in by_cls.values():
        lst.sort()
    seq = []
    idx = {"A": 0, "B": 0}
    n = 0
    while idx[_trig_class(n)] < len(by_cls[_trig_class(n)]):
        c = _trig_class(n)
        seq.append(by_cls[c][idx[c]])
        idx[c] += 1
        n += 1
    pattern = tuple(lab for _, lab in seq)
    for n in range(1, len(seq)):
        if seq[n][0] < seq[n - 1][0] - tol * max(1.0, abs(seq[n][0])):
            return OrderingResult(False, n, f"E_{n} = {seq[n][0]:.10g} below E_{n - 1}", pattern)

    p = spectrum.params
    integer = p.is_integer_kappa() and round(p.kappa) >= 1
    # the spectrum is invariant under beta -> -beta; the interval is defined for beta < 0
    upper = qes_interval(CouplingParams(-abs(p.beta), p.kappa))[1]
    n_single = 2 * int(round(p.kappa)) if integer else None
    # the well sits at theta = pi for beta < 0, where sin(theta/2) (B2) peaks
    b_first, b_second = ("B2", "B1") if p.beta < 0 else ("B1", "B2")
    irrep_cycle = ("A1", b_first, b_second, "A2")
    single = 0
    for n, (val, lab) in enumerate(seq):
        if (n >= n_single) if integer else (val >= upper):
            break
        if lab != irrep_cycle[n % 4]:
            return OrderingResult(False, n, f"level {n} below the QES bound is {lab}, "
                                  f"expected {irrep_cycle[n % 4]}", pattern)
        if n and _trig_class(n) == _trig_class(n - 1) and (
            seq[n][0] - seq[n - 1][0] < degeneracy_tol
        ):
            return OrderingResult(False, n, f"level {n} degenerate inside the QES interval", pattern)
        single += 1

    gaps = []
    if integer:
        k = int(round(p.kappa))
        cls = "A" if k % 2 else "B"
        for n in range(single, len(seq) - 1):
            if n >= 1 and _trig_class(n) == _trig_class(n + 1) == cls and n % 2 == 1:
                gap = seq[n + 1][0] - seq[n][0]
                gaps.append(gap)
                if gap > degeneracy_tol:
                    return OrderingResult(False, n + 1, f"coexisting {cls} pair at levels "
                                          f"{n},{n + 1} split by {gap:.3g}", pattern, single,
                                          tuple(gaps))
    return OrderingResult(True, None, "ordering consistent with the oscillation theorem", pattern,
                          single, tuple(gaps))
