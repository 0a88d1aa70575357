"""Conditional quasi-exact solvability of the planar quantum pendulum and the Razavy system."""

__version__ = "1.0.0"

from cqes.core import (  # noqa: E402
    CiLabel,
    CouplingParams,
    Irrep,
    SystemKind,
    params_from_eta_zeta,
    potential,
    potential_features,
    qes_interval,
)
from cqes.operator import block_dimension, build_operator, extract_block  # noqa: E402
from cqes.solve_analytic import (  # noqa: E402
    analytic_eigenvectors,
    analytic_spectrum,
    field_free_levels,
    razavy_spectrum_analytic,
)
from cqes.solve_numeric import FghConfig, fgh_spectrum, truncated_spectrum  # noqa: E402
from cqes.spectra import doublet_splittings, eta_scan, ordering_check, verify_ais  # noqa: E402
from cqes.wavefn import assemble, classify_symmetry, evaluate, residual  # noqa: E402

__all__ = [
    "CiLabel",
    "CouplingParams",
    "FghConfig",
    "Irrep",
    "SystemKind",
    "analytic_eigenvectors",
    "analytic_spectrum",
    "assemble",
    "block_dimension",
    "build_operator",
    "classify_symmetry",
    "doublet_splittings",
    "eta_scan",
    "evaluate",
    "extract_block",
    "fgh_spectrum",
    "field_free_levels",
    "ordering_check",
    "params_from_eta_zeta",
    "potential",
    "potential_features",
    "qes_interval",
    "razavy_spectrum_analytic",
    "residual",
    "truncated_spectrum",
    "verify_ais",
]
