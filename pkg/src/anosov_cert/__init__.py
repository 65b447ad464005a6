"""Certification toolkit for Anosov subgroups of SL(d, R).

Symmetric-space geometry, explicit local-to-global inequality systems and
perturbation neighborhoods of known Anosov representations.
"""

from anosov_cert.logscalar import LogScalar
from anosov_cert.symspace import (
    CartanVector,
    ModelConstants,
    SpdPoint,
    TangentSym,
    cartan_vector,
    midpoint,
    model_constants,
    regularity_margin,
    riem_distance,
    vector_distance,
    zeta_angle,
    zeta_direction,
)

__version__ = "0.1.0"

__all__ = [
    "CartanVector",
    "LogScalar",
    "ModelConstants",
    "SpdPoint",
    "TangentSym",
    "cartan_vector",
    "midpoint",
    "model_constants",
    "regularity_margin",
    "riem_distance",
    "vector_distance",
    "zeta_angle",
    "zeta_direction",
]
