"""Symmetry-adapted tridiagonal Schroedinger operators in the even-monomial basis.

For each C_2v irrep the gauge-transformed operator acts on {1, u^2, u^4, ...}
with u = cos(theta/2) (pendulum) or u = cosh(x/2) (Razavy) as a tridiagonal
matrix. The same four matrices serve both systems; pendular energies are the
negated eigenvalues, Razavy energies the eigenvalues themselves.

Entry conventions: ``sub[i]`` is the element in row i+1, column i
(<u^{2l}|T|u^{2l-2}> with l = i+1); ``sup[i]`` is row i, column i+1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from cqes.core import KAPPA_INT_TOL, CiLabel, CouplingParams, Irrep, SystemKind
from cqes.errors import DimensionTooSmall, NoSplit

# per-irrep constants of the diagonal: -l^2 - LINEAR*l - CONST + 4 beta l - (kappa - KSHIFT) beta
_DIAG_LINEAR = {Irrep.A1: 0.0, Irrep.B1: 1.0, Irrep.B2: 1.0, Irrep.A2: 2.0}
_DIAG_CONST = {Irrep.A1: 0.0, Irrep.B1: 0.25, Irrep.B2: 0.25, Irrep.A2: 1.0}
_DIAG_KSHIFT = {Irrep.A1: 1.0, Irrep.B1: 3.0, Irrep.B2: 1.0, Irrep.A2: 3.0}
# zero of the subdiagonal sits at l = (kappa + _SUB_SHIFT) / 2
_SUB_SHIFT = {Irrep.A1: 1.0, Irrep.B1: 0.0, Irrep.B2: 0.0, Irrep.A2: -1.0}
_SUP_SIGN = {Irrep.A1: -1.0, Irrep.B1: 1.0, Irrep.B2: -1.0, Irrep.A2: 1.0}


def element_values(irrep: Irrep, beta: float, kappa: float, ell):
    """Diagonal, subdiagonal and superdiagonal closed forms at index ``ell`` (scalar or array).

    Works for any real beta, including the field-free value 0.
    """
    ell = np.asarray(ell, dtype=float)
    diag = (
        beta * beta
        - ell * ell
        - _DIAG_LINEAR[irrep] * ell
        - _DIAG_CONST[irrep]
        + 4 * beta * ell
        - (kappa - _DIAG_KSHIFT[irrep]) * beta
    )
    sub = 4 * beta * (-ell + (kappa + _SUB_SHIFT[irrep]) / 2)
    sup = ell * ell + _SUP_SIGN[irrep] * ell / 2
    return diag, sub, sup


def matrix_elements(irrep: Irrep, p: CouplingParams, ell: int) -> tuple[float, float, float]:
    """(diag at ell, sub into row ell, sup from row ell-1); off-diagonals need ell >= 1."""
    irrep = Irrep.parse(irrep)
    if ell < 0:
        raise ValueError("ell must be non-negative")
    d, s, u = element_values(irrep, p.beta, p.kappa, ell)
    if ell == 0:
        return float(d), float("nan"), float("nan")
    return float(d), float(s), float(u)


def block_dimension(irrep: Irrep, kappa: float, tol: float = KAPPA_INT_TOL) -> int | None:
    """Size N of the finite upper-left block, or None if kappa admits no split for this irrep."""
    irrep = Irrep.parse(irrep)
    k = round(kappa)
    if abs(kappa - k) > tol or k < 1:
        return None
    if irrep in (Irrep.A1, Irrep.A2):
        if k % 2 == 0:
            return None
        if irrep is Irrep.A1:
            return (k + 1) // 2
        return (k - 1) // 2 if k >= 3 else None
    if k % 2 == 1:
        return None
    return k // 2


@dataclass(frozen=True)
class TridiagOperator:
    irrep: Irrep
    params: CouplingParams
    dim: int
    diag: np.ndarray = field(repr=False)
    sub: np.ndarray = field(repr=False)
    sup: np.ndarray = field(repr=False)
    split_index: int | None = None
    is_block: bool = False

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)

    def check_invariants(self) -> None:
        """Raise AssertionError if the sign/zero structure is violated.

        The subdiagonal carries the sign of beta inside the finite block and the
        opposite sign beyond it.
        """
        if self.dim > 1:
            assert np.all(self.sup > 0), "superdiagonal must be positive"
        if self.split_index is None:
            return
        n = self.split_index
        sgn = np.sign(self.params.beta)
        if n - 1 < len(self.sub):
            assert self.sub[n - 1] == 0.0, "subdiagonal must vanish at the split"
        assert np.all(sgn * self.sub[: n - 1] > 0), "block subdiagonal has wrong sign"
        assert np.all(sgn * self.sub[n:] < 0), "remainder subdiagonal has wrong sign"

    def to_dict(self) -> dict:
        return {
            "irrep": self.irrep.value,
            "beta": self.params.beta,
            "kappa": self.params.kappa,
            "dim": self.dim,
            "diag": [float(v) for v in self.diag],
            "sub": [float(v) for v in self.sub],
            "sup": [float(v) for v in self.sup],
            "split_index": self.split_index,
        }


def default_dim(irrep: Irrep, kappa: float) -> int:
    n = block_dimension(irrep, kappa) or 0
    return max(200, 4 * n)


def build_operator(irrep: Irrep, p: CouplingParams, dim: int | None = None) -> TridiagOperator:
    irrep = Irrep.parse(irrep)
    if dim is None:
        dim = default_dim(irrep, p.kappa)
    if dim < 1:
        raise DimensionTooSmall("dim must be >= 1")
    ell = np.arange(dim, dtype=float)
    diag, sub, sup = element_values(irrep, p.beta, p.kappa, ell)
    sub = np.array(sub[1:], dtype=float)
    sup = np.array(sup[1:], dtype=float)
    split = block_dimension(irrep, p.kappa)
    if split is not None:
        # the zero is exact by construction; pin it against rounding of near-integer kappa
        if split - 1 < len(sub):
            sub[split - 1] = 0.0
    return TridiagOperator(irrep, p, dim, np.array(diag, dtype=float), sub, sup, split)


def extract_block(op: TridiagOperator) -> TridiagOperator:
    if op.split_index is None:
        raise NoSplit(f"no finite block for {op.irrep.value} at kappa={op.params.kappa}")
    n = op.split_index
    if op.dim < n:
        raise DimensionTooSmall(f"operator dim {op.dim} smaller than block size {n}")
    return TridiagOperator(
        op.irrep,
        op.params,
        n,
        op.diag[:n].copy(),
        op.sub[: n - 1].copy(),
        op.sup[: n - 1].copy(),
        n,
        is_block=True,
    )


def block_operator(irrep: Irrep, p: CouplingParams) -> TridiagOperator:
    irrep = Irrep.parse(irrep)
    n = block_dimension(irrep, p.kappa)
    if n is None:
        raise NoSplit(f"no finite block for {irrep.value} at kappa={p.kappa}")
    return extract_block(build_operator(irrep, p, dim=n + 1))


class ExponentParity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class MonomialBasis:
    system: SystemKind
    exponent_parity: str  # "even-only" for the pendulum, "all" for the Razavy system

    @property
    def u_definition(self) -> str:
        return "cos(theta/2)" if self.system is SystemKind.TRIGONOMETRIC else "cosh(x/2)"


def monomial_basis(system: SystemKind) -> MonomialBasis:
    system = SystemKind.parse(system)
    return MonomialBasis(system, "even-only" if system is SystemKind.TRIGONOMETRIC else "all")


_HYP_MAP = {
    (CiLabel.APRIME, ExponentParity.EVEN): Irrep.A1,
    (CiLabel.APRIME, ExponentParity.ODD): Irrep.B1,
    (CiLabel.ADOUBLEPRIME, ExponentParity.EVEN): Irrep.B2,
    (CiLabel.ADOUBLEPRIME, ExponentParity.ODD): Irrep.A2,
}


def hyperbolic_block_map(irrep_h: CiLabel, exponent_parity: ExponentParity | str) -> Irrep:
    """Pendular matrix that represents a Razavy C_i block on even/odd monomials of cosh(x/2)."""
    return _HYP_MAP[(CiLabel.parse(irrep_h), ExponentParity(exponent_parity))]


def hyperbolic_operator_dense(
    irrep_h: CiLabel, p: CouplingParams, dim: int
) -> np.ndarray:
    """Razavy C_i operator on the full monomial basis {1, u, u^2, ...} (first ``dim`` powers).

    Even rows/columns carry the even-parity pendular matrix, odd ones the odd-parity
    matrix; even and odd powers never couple.
    """
    irrep_h = CiLabel.parse(irrep_h)
    t = np.zeros((dim, dim))
    for parity, offset in ((ExponentParity.EVEN, 0), (ExponentParity.ODD, 1)):
        idx = np.arange(offset, dim, 2)
        if len(idx) == 0:
            continue
        m = build_operator(hyperbolic_block_map(irrep_h, parity), p, len(idx)).dense()
        t[np.ix_(idx, idx)] = m
    return t
