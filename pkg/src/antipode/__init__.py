"""Margin certificates, constructions, and search for antipodal point sets."""

__version__ = "0.1.0"

from .spaces import (
    CylinderSpace,
    DimensionMismatchError,
    Functional,
    LpSpace,
    NormSpace,
    PolytopeFSpace,
    PolytopeVSpace,
    SpaceError,
    Vector,
    ZeroVectorError,
    dual_norm,
    dual_support_point,
    lp_space,
    normalize,
    primal_norm,
    space_from_json,
    space_to_json,
)
from .certify import (
    Certificate,
    CertifyError,
    Classification,
    IterationLimitError,
    NonUnitPointError,
    PairWitness,
    PointSet,
    SeparationReport,
    Tolerances,
    WitnessRejectedError,
    certificate_from_json,
    certificate_to_json,
    certify_set,
    certify_with_witnesses,
    max_margin_pair,
    separation_matrix,
    verify_witness,
)

__all__ = [name for name in dir() if not name.startswith("_")]
