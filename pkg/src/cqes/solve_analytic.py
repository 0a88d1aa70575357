"""Exact spectra of the finite blocks at integer kappa.

Blocks up to N = 4 are solved by closed-form polynomial roots of the
characteristic polynomial (quadratic, trigonometric cubic, Ferrari quartic),
polished by Newton steps on the exact determinant recurrence. The printed
closed forms for N <= 3 (kappa <= 7) are evaluated independently with
complex radicals and must agree.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from cqes.core import CiLabel, Irrep, is_integer
from cqes.errors import AnalyticMismatch, BlockTooLarge, DegenerateBlock, NotCQES
from cqes.operator import block_dimension, element_values

CROSSCHECK_RTOL = 1e-10
MIN_EIGEN_GAP = 1e-12


@dataclass(frozen=True)
class AnalyticLevel:
    irrep: Irrep
    kappa: int
    n: int
    energy_t: float
    energy_h: float
    coefficients: tuple[float, ...]
    method: str = "closed-form"


@dataclass(frozen=True)
class RadicalAuxiliaries:
    a: complex
    b_plus: complex
    b_minus: complex
    c_plus: complex
    c_minus: complex
    d: complex


def _check_cqes(irrep: Irrep, kappa: float) -> tuple[int, int]:
    n = block_dimension(irrep, kappa)
    if n is None:
        raise NotCQES(f"kappa={kappa} admits no analytic block for {irrep.value}")
    return int(round(kappa)), n


def block_entries(irrep: Irrep, kappa: int, beta: float):
    """(diag, sub, sup) of the N x N block, valid for any real beta including 0."""
    irrep = Irrep.parse(irrep)
    _, n = _check_cqes(irrep, kappa)
    ell = np.arange(n, dtype=float)
    diag, sub, sup = element_values(irrep, beta, float(round(kappa)), ell)
    return np.asarray(diag, float), np.asarray(sub, float)[1:], np.asarray(sup, float)[1:]


def block_matrix(irrep: Irrep, kappa: int, beta: float) -> np.ndarray:
    diag, sub, sup = block_entries(irrep, kappa, beta)
    return np.diag(diag) + np.diag(sub, -1) + np.diag(sup, 1)


# --- characteristic polynomial ---------------------------------------------


def char_poly(diag, sub, sup) -> np.ndarray:
    """Coefficients (highest power first) of det(lambda I - T) for a tridiagonal T."""
    prev = np.array([1.0])
    cur = np.array([1.0, -diag[0]])
    for k in range(1, len(diag)):
        nxt = np.polymul([1.0, -diag[k]], cur)
        nxt = np.polysub(nxt, sub[k - 1] * sup[k - 1] * prev)
        prev, cur = cur, nxt
    return cur


def _char_value(lam: float, diag, sub, sup) -> tuple[float, float]:
    """det(lambda I - T) and its derivative by the three-term recurrence."""
    p_prev, p = 1.0, lam - diag[0]
    dp_prev, dp = 0.0, 1.0
    for k in range(1, len(diag)):
        off = sub[k - 1] * sup[k - 1]
        p_next = (lam - diag[k]) * p - off * p_prev
        dp_next = p + (lam - diag[k]) * dp - off * dp_prev
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def _polish(root: float, diag, sub, sup, steps: int = 4) -> float:
    for _ in range(steps):
        f, df = _char_value(root, diag, sub, sup)
        if df == 0 or not math.isfinite(f):
            break
        step = f / df
        root -= step
        if abs(step) <= 1e-16 * max(1.0, abs(root)):
            break
    return root


def _cubic_roots(c: np.ndarray) -> list[complex]:
    """Roots of a x^3 + b x^2 + c x + d by the trigonometric/Cardano formulas."""
    a, b, cc, d = (float(v) for v in c)
    b, cc, d = b / a, cc / a, d / a
    shift = -b / 3
    p = cc - b * b / 3
    q = 2 * b**3 / 27 - b * cc / 3 + d
    if p < 0:
        r = 2 * math.sqrt(-p / 3)
        arg = 3 * q / (p * r)
        if abs(arg) <= 1.0:
            phi = math.acos(arg) / 3
            return [complex(r * math.cos(phi - 2 * math.pi * k / 3) + shift) for k in range(3)]
    # one real root (or p >= 0): Cardano with complex radicals
    disc = cmath.sqrt((q / 2) ** 2 + (p / 3) ** 3)
    u = (-q / 2 + disc) ** (1 / 3) if abs(-q / 2 + disc) > 0 else 0j
    v = -p / (3 * u) if u != 0 else (-q) ** (1 / 3)
    w = complex(-0.5, math.sqrt(3) / 2)
    return [u + v + shift, u * w + v * w.conjugate() + shift, u * w.conjugate() + v * w + shift]


def _quartic_roots(c: np.ndarray) -> list[complex]:
    """Ferrari's method through the resolvent cubic."""
    a, b, cc, d, e = (float(v) for v in c)
    b, cc, d, e = b / a, cc / a, d / a, e / a
    shift = -b / 4
    p = cc - 3 * b * b / 8
    q = d - b * cc / 2 + b**3 / 8
    r = e - b * d / 4 + b * b * cc / 16 - 3 * b**4 / 256
    if abs(q) <= 1e-14 * max(1.0, abs(p), abs(r)):
        # biquadratic
        s = cmath.sqrt(p * p - 4 * r)
        zs = [(-p + s) / 2, (-p - s) / 2]
        roots = []
        for z in zs:
            y = cmath.sqrt(z)
            roots += [y + shift, -y + shift]
        return roots
    # 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0, pick the largest real root (m > 0)
    res = _cubic_roots(np.array([8.0, 8 * p, 2 * p * p - 8 * r, -q * q]))
    m = max(res, key=lambda z: z.real).real
    s = cmath.sqrt(2 * m)
    roots = []
    for sign in (1, -1):
        # y^2 -+ s y + (p/2 + m +- q/(2 s)) = 0
        bb = -sign * s
        c0 = p / 2 + m + sign * q / (2 * s)
        disc = cmath.sqrt(bb * bb - 4 * c0)
        roots += [(-bb + disc) / 2 + shift, (-bb - disc) / 2 + shift]
    return roots


def exact_block_eigenvalues(diag, sub, sup, exact_roots: bool = True) -> tuple[np.ndarray, str]:
    """Eigenvalues of a small tridiagonal block, ascending, and the route used."""
    n = len(diag)
    if n == 1:
        return np.array([float(diag[0])]), "closed-form"
    if n == 2:
        half_tr = (diag[0] + diag[1]) / 2
        rad = math.sqrt(max(((diag[0] - diag[1]) / 2) ** 2 + sub[0] * sup[0], 0.0))
        return np.array([half_tr - rad, half_tr + rad]), "closed-form"
    if n > 4:
        if exact_roots:
            raise BlockTooLarge(f"no radical solution requested for N={n} > 4")
        t = np.diag(diag) + np.diag(sub, -1) + np.diag(sup, 1)
        return np.sort(scipy.linalg.eigvals(t).real), "numeric-exact-block"
    coeffs = char_poly(diag, sub, sup)
    raw = _cubic_roots(coeffs) if n == 3 else _quartic_roots(coeffs)
    scale = max(1.0, float(np.max(np.abs(diag))))
    for z in raw:
        if abs(z.imag) > 1e-6 * scale:
            raise AnalyticMismatch(f"characteristic root {z} is not real")
    roots = np.sort([_polish(z.real, diag, sub, sup) for z in raw])
    return roots, "closed-form"


# --- printed closed forms -----------------------------------------------------


def _cbrt(z: complex) -> complex:
    """Principal complex cube root."""
    return complex(z) ** (1.0 / 3.0) if z != 0 else 0j


def radical_auxiliaries(beta: float) -> RadicalAuxiliaries:
    b = beta
    a = _cbrt(6 * cmath.sqrt(3 * (-1024 * b**6 - 64 * b**4 - 412 * b**2 - 9)) + 288 * b**2 - 35)
    c_plus = cmath.sqrt(
        3 * (-256 * b**6 + 384 * b**5 - 448 * b**4 + 432 * b**3 - 477 * b**2 + 144 * b - 36)
    )
    c_minus = cmath.sqrt(
        3 * (-256 * b**6 - 384 * b**5 - 448 * b**4 - 432 * b**3 - 477 * b**2 - 144 * b - 36)
    )
    b_plus = _cbrt(288 * b**2 + 36 * b - 80 + 12 * c_minus)
    b_minus = _cbrt(288 * b**2 - 36 * b - 80 + 12 * c_plus)
    d = _cbrt(12 * cmath.sqrt(3 * (-256 * b**6 - 592 * b**4 - 991 * b**2 - 225)) + 288 * b**2 - 143)
    return RadicalAuxiliaries(a, b_plus, b_minus, c_plus, c_minus, d)


def _three_roots(rad: complex, q: float, const: complex) -> list[complex]:
    s3 = math.sqrt(3)
    return [
        const - (rad * rad + q) / (3 * rad),
        const + (rad * rad + q) / (6 * rad) - 1j * s3 / (6 * rad) * (-rad * rad + q),
        const + (rad * rad + q) / (6 * rad) + 1j * s3 / (6 * rad) * (-rad * rad + q),
    ]


def closed_form_cases() -> list[tuple[int, Irrep]]:
    """(kappa, irrep) pairs with printed closed forms."""
    return [
        (1, Irrep.A1),
        (2, Irrep.B1),
        (2, Irrep.B2),
        (3, Irrep.A1),
        (3, Irrep.A2),
        (4, Irrep.B1),
        (4, Irrep.B2),
        (5, Irrep.A1),
        (5, Irrep.A2),
        (6, Irrep.B1),
        (6, Irrep.B2),
        (7, Irrep.A2),
    ]


def closed_form_energies(irrep: Irrep, kappa: int, beta: float) -> list[complex]:
    """Pendular energies from the printed closed forms, in the printed n order.

    Values are complex; their imaginary parts vanish up to rounding.
    """
    irrep = Irrep.parse(irrep)
    k = int(round(kappa))
    b = beta
    b2 = b * b
    key = (k, irrep)
    if key == (1, Irrep.A1):
        return [complex(-b2)]
    if key == (2, Irrep.B1):
        return [complex(-b2 - b + 0.25)]
    if key == (2, Irrep.B2):
        return [complex(-b2 + b + 0.25)]
    if key == (3, Irrep.A1):
        s = math.sqrt(16 * b2 + 1)
        return [complex(-b2 - s / 2 + 0.5), complex(-b2 + s / 2 + 0.5)]
    if key == (3, Irrep.A2):
        return [complex(-b2 + 1)]
    if key == (4, Irrep.B1):
        s = math.sqrt(4 * b2 + 2 * b + 1)
        return [complex(-b2 - b - s + 1.25), complex(-b2 - b + s + 1.25)]
    if key == (4, Irrep.B2):
        s = math.sqrt(4 * b2 - 2 * b + 1)
        return [complex(-b2 + b - s + 1.25), complex(-b2 + b + s + 1.25)]
    if key == (5, Irrep.A2):
        s = math.sqrt(16 * b2 + 9)
        return [complex(-b2 - s / 2 + 2.5), complex(-b2 + s / 2 + 2.5)]
    aux = radical_auxiliaries(beta)
    if key == (5, Irrep.A1):
        return _three_roots(aux.a, 48 * b2 + 13, -b2 + 5 / 3)
    if key == (6, Irrep.B1):
        return _three_roots(aux.b_plus, 48 * b2 + 24 * b + 28, -b2 - b + 35 / 12)
    if key == (6, Irrep.B2):
        return _three_roots(aux.b_minus, 48 * b2 - 24 * b + 28, -b2 + b + 35 / 12)
    if key == (7, Irrep.A2):
        return _three_roots(aux.d, 48 * b2 + 49, -b2 + 14 / 3)
    raise KeyError(f"no printed closed form for {irrep.value} at kappa={kappa}")


@dataclass(frozen=True)
class ClosedFormCheck:
    irrep: Irrep
    kappa: int
    beta: float
    formula: tuple[float, ...]  # real parts in printed order
    exact: tuple[float, ...]  # ascending
    max_imag: float
    max_rel_defect: float
    printed_order_ascending: bool


def closed_form_check(irrep: Irrep, kappa: int, beta: float) -> ClosedFormCheck:
    irrep = Irrep.parse(irrep)
    vals = closed_form_energies(irrep, kappa, beta)
    diag, sub, sup = block_entries(irrep, kappa, beta)
    lam, _ = exact_block_eigenvalues(diag, sub, sup)
    exact = np.sort(-lam)
    formula = np.array([v.real for v in vals])
    max_imag = max(abs(v.imag) / (1 + abs(v.real)) for v in vals)
    rel = np.abs(np.sort(formula) - exact) / np.maximum(1.0, np.abs(exact))
    return ClosedFormCheck(
        irrep,
        int(round(kappa)),
        beta,
        tuple(float(v) for v in formula),
        tuple(float(v) for v in exact),
        float(max_imag),
        float(rel.max()),
        bool(np.all(np.diff(formula) >= 0)),
    )


# --- public operations ------------------------------------------------------


def _eigvec_back_substitution(lam: float, diag, sub, sup) -> np.ndarray:
    """Null vector of (T - lam I) with the last entry fixed to 1."""
    n = len(diag)
    v = np.zeros(n)
    v[-1] = 1.0
    for i in range(n - 1, 0, -1):
        acc = (diag[i] - lam) * v[i]
        if i + 1 < n:
            acc += sup[i] * v[i + 1]
        v[i - 1] = -acc / sub[i - 1]
    return v


def _eigvec_null_space(lam: float, diag, sub, sup) -> np.ndarray:
    t = np.diag(diag) + np.diag(sub, -1) + np.diag(sup, 1)
    _, _, vh = np.linalg.svd(t - lam * np.eye(len(diag)))
    v = vh[-1]
    nz = np.nonzero(np.abs(v) > 1e-12 * np.abs(v).max())[0]
    return v / v[nz[-1]]


def _solve_block(irrep: Irrep, kappa: int, beta: float, exact_roots: bool):
    diag, sub, sup = block_entries(irrep, kappa, beta)
    lam, method = exact_block_eigenvalues(diag, sub, sup, exact_roots=exact_roots)
    if len(lam) > 1:
        gap = float(np.min(np.diff(lam)))
        if gap <= MIN_EIGEN_GAP * max(1.0, float(np.max(np.abs(lam)))):
            raise DegenerateBlock(f"block eigenvalues not simple (gap {gap:.3e})")
    return diag, sub, sup, lam, method


def analytic_eigenvectors(
    irrep: Irrep,
    kappa: int,
    beta: float,
    normalization: str = "highest",
    exact_roots: bool = False,
) -> np.ndarray:
    """Rows are monomial coefficients of the levels in ascending pendular energy."""
    irrep = Irrep.parse(irrep)
    diag, sub, sup, lam, _ = _solve_block(irrep, kappa, beta, exact_roots)
    rows = []
    # ascending pendular energy = descending operator eigenvalue
    for value in lam[::-1]:
        if len(diag) <= 4 and np.all(sub != 0):
            v = _eigvec_back_substitution(value, diag, sub, sup)
        else:
            v = _eigvec_null_space(value, diag, sub, sup)
        if normalization == "l2":
            v = v / np.linalg.norm(v)
        elif normalization != "highest":
            raise ValueError("normalization must be 'highest' or 'l2'")
        rows.append(v)
    return np.array(rows)


def analytic_spectrum(
    irrep: Irrep, kappa: int, beta: float, exact_roots: bool = False
) -> list[AnalyticLevel]:
    """Analytic pendular levels of one irrep, ascending in energy.

    For the printed cases the radical formulas are evaluated as an independent
    cross-check; a relative disagreement above 1e-10 raises AnalyticMismatch.
    """
    irrep = Irrep.parse(irrep)
    k, n = _check_cqes(irrep, kappa)
    diag, sub, sup, lam, method = _solve_block(irrep, k, beta, exact_roots)
    energies = np.sort(-lam)

    if (k, irrep) in closed_form_cases() and beta != 0:
        raw = closed_form_energies(irrep, k, beta)
        imag = max(abs(v.imag) / (1 + abs(v.real)) for v in raw)
        if imag > CROSSCHECK_RTOL:
            raise AnalyticMismatch(f"closed forms keep an imaginary part {imag:.2e}")
        printed = np.sort([v.real for v in raw])
        rel = np.abs(printed - energies) / np.maximum(1.0, np.abs(energies))
        if rel.max() > CROSSCHECK_RTOL:
            raise AnalyticMismatch(
                f"{irrep.value} kappa={k} beta={beta}: closed forms differ by {rel.max():.2e}"
            )

    vecs = analytic_eigenvectors(irrep, k, beta, exact_roots=exact_roots) if beta != 0 else None
    levels = []
    for i, e in enumerate(energies):
        coeffs = tuple(float(c) for c in vecs[i]) if vecs is not None else ()
        levels.append(AnalyticLevel(irrep, k, i, float(e), float(-e), coeffs, method))
    return levels


def correlated_irrep(label: CiLabel, kappa: int) -> Irrep:
    """Pendular irrep whose block carries the Razavy analytic states of ``label``."""
    label = CiLabel.parse(label)
    if not is_integer(kappa) or round(kappa) < 1:
        raise NotCQES(f"kappa={kappa} is not a positive integer")
    odd = int(round(kappa)) % 2 == 1
    if label is CiLabel.APRIME:
        return Irrep.A1 if odd else Irrep.B1
    return Irrep.A2 if odd else Irrep.B2


def razavy_spectrum_analytic(irrep_ci: CiLabel, kappa: int, beta: float) -> list[AnalyticLevel]:
    """Razavy analytic levels ascending; level n mirrors pendular level N-n-1."""
    if not beta < 0:
        raise ValueError("the Razavy gauge factor needs beta < 0")
    irrep = correlated_irrep(irrep_ci, kappa)
    pend = analytic_spectrum(irrep, kappa, beta)
    n_block = len(pend)
    out = []
    for n in range(n_block):
        src = pend[n_block - n - 1]
        out.append(
            AnalyticLevel(irrep, src.kappa, n, src.energy_t, -src.energy_t, src.coefficients,
                          src.method)
        )
    return out


def field_free_levels(irrep: Irrep, kappa: int) -> list[float]:
    """Energies (nu/2)^2 of the beta -> 0 limit carried by one irrep's block."""
    irrep = Irrep.parse(irrep)
    k, _ = _check_cqes(irrep, kappa)
    if irrep is Irrep.A1:
        nus = range(0, k, 2)
    elif irrep is Irrep.A2:
        nus = range(2, k, 2)
    else:
        nus = range(1, k, 2)
    return [(nu / 2) ** 2 for nu in nus]


def merged_analytic(kappa: int, beta: float) -> list[AnalyticLevel]:
    """All kappa analytic pendular levels (both irreps of the matching class), ascending."""
    k = int(round(kappa))
    irreps = (Irrep.A1, Irrep.A2) if k % 2 else (Irrep.B1, Irrep.B2)
    levels = []
    for irrep in irreps:
        if block_dimension(irrep, k) is not None:
            levels += analytic_spectrum(irrep, k, beta)
    return sorted(levels, key=lambda lv: lv.energy_t)
