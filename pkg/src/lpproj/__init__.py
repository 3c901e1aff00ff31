"""Generalized and standard metric projections in finite l_p spaces.

Closed-form projections onto balls, masked balls, cylinders and coordinate
subspaces, their Gateaux directional derivatives, and independent numerical
oracles (brute-force minimization, finite differences, variational-inequality
certificates) that verify every formula.
"""

from .backend import BACKEND_NAME, IS_COMPILED
from .core import (
    IndexMask,
    LpParams,
    LpVector,
    decompose_duality,
    duality_map,
    full_mask,
    lyapunov,
    norm,
    pair,
    psi,
    split,
)
from .derivatives import (
    DerivativeResult,
    DirectionClass,
    classify_direction,
    d_gpi_ball,
    d_gpi_masked_ball,
    d_mpi_cylinder,
    d_mpi_masked_ball,
)
from .oracles import (
    CertificateReport,
    OracleConfig,
    brute_gpi,
    brute_mpi,
    fd_derivative,
    vi_certificate,
)
from .sets import (
    ConvexSetSpec,
    ProjectionResult,
    RegionLabel,
    RegionTag,
    SetKind,
    classify_region,
    condition_618,
    cylinder_aux_b,
    gpi_ball,
    gpi_cylinder_l3,
    gpi_masked_ball,
    gpi_subspace,
    mpi_cylinder,
    mpi_masked_ball,
    project,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "IS_COMPILED",
    "CertificateReport",
    "ConvexSetSpec",
    "DerivativeResult",
    "DirectionClass",
    "IndexMask",
    "LpParams",
    "LpVector",
    "OracleConfig",
    "ProjectionResult",
    "RegionLabel",
    "RegionTag",
    "SetKind",
    "brute_gpi",
    "brute_mpi",
    "classify_direction",
    "classify_region",
    "condition_618",
    "cylinder_aux_b",
    "d_gpi_ball",
    "d_gpi_masked_ball",
    "d_mpi_cylinder",
    "d_mpi_masked_ball",
    "decompose_duality",
    "duality_map",
    "fd_derivative",
    "full_mask",
    "gpi_ball",
    "gpi_cylinder_l3",
    "gpi_masked_ball",
    "gpi_subspace",
    "lyapunov",
    "mpi_cylinder",
    "mpi_masked_ball",
    "norm",
    "pair",
    "project",
    "psi",
    "split",
    "vi_certificate",
]
