"""Parameter algebra, symmetry labels and potentials of the pendular and Razavy systems.

All energies are in units of the rotational constant B. The pendulum lives on
theta in [-2pi, 2pi) (4pi-periodic so that 2pi-antiperiodic states are
representable), the Razavy system on the whole real line.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from cqes.errors import NonPositiveZeta, NotDoubleWell, PotentialOverflowWarning

# absolute tolerance for deciding that kappa is an integer
KAPPA_INT_TOL = 1e-9


class SystemKind(enum.Enum):
    TRIGONOMETRIC = "trig"
    HYPERBOLIC = "hyp"

    @classmethod
    def parse(cls, value: str | SystemKind) -> SystemKind:
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        aliases = {
            "trig": cls.TRIGONOMETRIC,
            "trigonometric": cls.TRIGONOMETRIC,
            "pendulum": cls.TRIGONOMETRIC,
            "hyp": cls.HYPERBOLIC,
            "hyperbolic": cls.HYPERBOLIC,
            "razavy": cls.HYPERBOLIC,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown system {value!r}") from None


class CiLabel(enum.Enum):
    """Irreps of the C_i group of the Razavy potential (parity x -> -x)."""

    APRIME = "A'"
    ADOUBLEPRIME = "A''"

    @property
    def parity(self) -> int:
        return 1 if self is CiLabel.APRIME else -1

    @classmethod
    def parse(cls, value: str | CiLabel) -> CiLabel:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        if key in ("a'", "aprime", "a_prime", "ap", "even"):
            return cls.APRIME
        if key in ("a''", "adoubleprime", "a_doubleprime", "app", "odd"):
            return cls.ADOUBLEPRIME
        raise ValueError(f"unknown C_i label {value!r}")


# characters under (E, R(2pi), P(0), P(pi))
_CHARACTERS = {
    "A1": (1, 1, 1, 1),
    "B1": (1, -1, 1, -1),
    "B2": (1, -1, -1, 1),
    "A2": (1, 1, -1, -1),
}


class Irrep(enum.Enum):
    """C_2v irreps of the pendulum on the 4pi domain."""

    A1 = "A1"
    B1 = "B1"
    B2 = "B2"
    A2 = "A2"

    @property
    def characters(self) -> tuple[int, int, int, int]:
        return _CHARACTERS[self.value]

    @property
    def periodicity(self) -> int:
        """+1 for 2pi-periodic, -1 for 2pi-antiperiodic."""
        return self.characters[1]

    @property
    def parity(self) -> int:
        """Sign under theta -> -theta."""
        return self.characters[2]

    @property
    def parity_pi(self) -> int:
        return self.characters[3]

    @property
    def ci_label(self) -> CiLabel:
        return CiLabel.APRIME if self in (Irrep.A1, Irrep.B1) else CiLabel.ADOUBLEPRIME

    @property
    def symmetry_class(self) -> str:
        """'A' (2pi-periodic) or 'B' (2pi-antiperiodic)."""
        return self.value[0]

    @classmethod
    def parse(cls, value: str | Irrep) -> Irrep:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise ValueError(f"unknown irrep {value!r}") from None

    @classmethod
    def from_characters(cls, periodicity: int, parity: int) -> Irrep:
        for irrep in cls:
            if irrep.periodicity == periodicity and irrep.parity == parity:
                return irrep
        raise ValueError("characters must be +1/-1")


def irreps_of_class(cls: str) -> tuple[Irrep, Irrep]:
    cls = cls.upper()
    if cls == "A":
        return (Irrep.A1, Irrep.A2)
    if cls == "B":
        return (Irrep.B1, Irrep.B2)
    raise ValueError(f"symmetry class must be 'A' or 'B', got {cls!r}")


@dataclass(frozen=True)
class CouplingParams:
    """Couplings in the (beta, kappa) form; eta = kappa*beta and zeta = beta**2."""

    beta: float
    kappa: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and math.isfinite(self.kappa)):
            raise ValueError("beta and kappa must be finite")
        if self.beta == 0.0:
            raise NonPositiveZeta("beta = 0 gives zeta = 0; zeta must be positive")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")

    @property
    def eta(self) -> float:
        return self.kappa * self.beta

    @property
    def zeta(self) -> float:
        return self.beta * self.beta

    def is_integer_kappa(self, tol: float = KAPPA_INT_TOL) -> bool:
        return is_integer(self.kappa, tol)

    def to_dict(self) -> dict[str, float]:
        return {"beta": self.beta, "kappa": self.kappa, "eta": self.eta, "zeta": self.zeta}

    @classmethod
    def from_dict(cls, d: dict) -> CouplingParams:
        if "beta" in d and "kappa" in d:
            return cls(float(d["beta"]), float(d["kappa"]))
        return params_from_eta_zeta(float(d["eta"]), float(d["zeta"]))


def is_integer(x: float, tol: float = KAPPA_INT_TOL) -> bool:
    return abs(x - round(x)) <= tol


def params_from_eta_zeta(eta: float, zeta: float) -> CouplingParams:
    if not zeta > 0:
        raise NonPositiveZeta(f"zeta must be positive, got {zeta}")
    root = math.sqrt(zeta)
    beta = math.copysign(root, eta) if eta != 0 else -root
    return CouplingParams(beta=beta, kappa=abs(eta) / root)


# --- potentials -------------------------------------------------------------


def potential(system: SystemKind, p: CouplingParams, coords):
    """Vectorised V_t(theta) = -eta cos - zeta cos^2 or V_h(x) = eta cosh + zeta cosh^2."""
    system = SystemKind.parse(system)
    c = np.asarray(coords, dtype=float)
    if system is SystemKind.TRIGONOMETRIC:
        cs = np.cos(c)
        return -p.eta * cs - p.zeta * cs * cs
    with np.errstate(over="ignore"):
        ch = np.cosh(c)
        return p.eta * ch + p.zeta * ch * ch


def potential_value(system: SystemKind, p: CouplingParams, coord: float) -> float:
    system = SystemKind.parse(system)
    if system is SystemKind.TRIGONOMETRIC:
        theta = math.fmod(coord, 4 * math.pi)
        c = math.cos(theta)
        return -p.eta * c - p.zeta * c * c
    try:
        ch = math.cosh(coord)
        value = p.eta * ch + p.zeta * ch * ch
    except OverflowError:
        value = math.inf
    if math.isinf(value):
        warnings.warn(
            f"V_h saturated at x={coord}: cosh overflow", PotentialOverflowWarning, stacklevel=2
        )
        return math.inf
    return value


def potential_derivative(system: SystemKind, p: CouplingParams, coord: float) -> float:
    system = SystemKind.parse(system)
    if system is SystemKind.TRIGONOMETRIC:
        return math.sin(coord) * (p.eta + 2 * p.zeta * math.cos(coord))
    return math.sinh(coord) * (p.eta + 2 * p.zeta * math.cosh(coord))


class Shape(enum.Enum):
    SINGLE_WELL = "SingleWell"
    ASYMMETRIC_DOUBLE_WELL = "AsymmetricDoubleWell"
    SYMMETRIC_DOUBLE_WELL = "SymmetricDoubleWell"
    FLAT_BOTTOM = "FlatBottom"
    FLAT_TOP = "FlatTop"


@dataclass(frozen=True)
class PotentialFeatures:
    shape: Shape
    minima: tuple[tuple[float, float], ...]
    maxima: tuple[tuple[float, float], ...]
    qes_lower: float
    qes_upper: float


def qes_interval(p: CouplingParams) -> tuple[float, float]:
    """[V_t(theta_min,g), -V_h(x_min)]; every analytic pendular energy lies inside."""
    eta, zeta = p.eta, p.zeta
    lower = -abs(eta) - zeta
    if eta < 0 and -eta > 2 * zeta:
        upper = eta * eta / (4 * zeta)
    else:
        upper = -(eta + zeta)
    return lower, upper


def potential_features(system: SystemKind, p: CouplingParams) -> PotentialFeatures:
    system = SystemKind.parse(system)
    eta, zeta = p.eta, p.zeta
    lower, upper = qes_interval(p)
    # |eta| = 2 zeta decided on kappa = 2|beta| with the integrality tolerance
    boundary = abs(p.kappa - 2 * abs(p.beta)) <= KAPPA_INT_TOL * max(1.0, p.kappa)
    v_0, v_pi = -eta - zeta, eta - zeta

    if system is SystemKind.TRIGONOMETRIC:
        # well at pi for eta < 0, at 0 for eta > 0 (theta -> theta + pi maps one onto the other)
        deep, shallow = (math.pi, 0.0) if eta < 0 else (0.0, math.pi)
        v_deep, v_shallow = (v_pi, v_0) if eta < 0 else (v_0, v_pi)
        if boundary:
            return PotentialFeatures(
                Shape.FLAT_TOP, ((deep, v_deep),), ((shallow, v_shallow),), lower, upper
            )
        if abs(eta) < 2 * zeta:
            t_max = math.acos(-eta / (2 * zeta))
            v_max = eta * eta / (4 * zeta)
            return PotentialFeatures(
                Shape.ASYMMETRIC_DOUBLE_WELL,
                ((deep, v_deep), (shallow, v_shallow)),
                ((-t_max, v_max), (t_max, v_max)),
                lower,
                upper,
            )
        return PotentialFeatures(
            Shape.SINGLE_WELL, ((deep, v_deep),), ((shallow, v_shallow),), lower, upper
        )

    v_origin = eta + zeta
    if eta < 0 and boundary:
        return PotentialFeatures(Shape.FLAT_BOTTOM, ((0.0, v_origin),), (), lower, upper)
    if eta < 0 and -eta > 2 * zeta:
        x_min = math.acosh(-eta / (2 * zeta))
        v_min = -eta * eta / (4 * zeta)
        return PotentialFeatures(
            Shape.SYMMETRIC_DOUBLE_WELL,
            ((-x_min, v_min), (x_min, v_min)),
            ((0.0, v_origin),),
            lower,
            upper,
        )
    return PotentialFeatures(Shape.SINGLE_WELL, ((0.0, v_origin),), (), lower, upper)


def double_morse_separation(p: CouplingParams) -> float:
    """Well separation 2 ln(kappa/|beta|) of the small-beta double-Morse limit."""
    if p.beta > 0 or p.kappa <= 2 * abs(p.beta):
        raise NotDoubleWell(
            f"Razavy potential is not a double well for beta={p.beta}, kappa={p.kappa}"
        )
    return 2.0 * math.log(p.kappa / abs(p.beta))


def double_morse_dissociation(p: CouplingParams) -> float:
    return p.kappa**2 / 4.0


def double_morse_potential(p: CouplingParams, x):
    """Limiting double-Morse form of V_h as beta -> 0 at fixed kappa."""
    x = np.asarray(x, dtype=float)
    shift = math.log(p.kappa / abs(p.beta))
    depth = p.kappa**2 / 4.0
    return (
        depth * (1 - np.exp(-(x + shift))) ** 2
        + depth * (1 - np.exp(x - shift)) ** 2
        - 2 * depth
    )
