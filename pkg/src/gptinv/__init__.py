"""Conductivity inclusions from generalized polarization tensors.

Forward GPTs by Nystrom discretization or by the Grunsky factorization,
and recovery of the contrast and exterior conformal map from GPT data.
"""

from .conformal import (
    ConformalMap,
    FaberMatrix,
    GrunskyTables,
    faber_matrix,
    grunsky_tables,
    joukowski,
    map_boundary,
    random_map,
    scaling_matrices,
)
from .errors import ConvergenceError, DataError, GptError, SingularSystemError
from .forward import (
    FptSet,
    GptSet,
    Material,
    assemble_np,
    fpt_analytic,
    gpt_analytic,
    gpt_nystrom,
    monotone_combination,
    scattered_field,
)
from .geometry import BoundaryCurve, is_star_shaped, shape_distance
from .inversion import (
    ReconstructionOptions,
    ReconstructionResult,
    modified_gpts,
    reconstruct,
    recover_extreme,
    recover_map,
    solve_lambda,
)
from .shapes import ShapeSpec, make_curve, sample_boundary

__all__ = [
    "BoundaryCurve",
    "ConformalMap",
    "ConvergenceError",
    "DataError",
    "FaberMatrix",
    "FptSet",
    "GptError",
    "GptSet",
    "GrunskyTables",
    "Material",
    "ReconstructionOptions",
    "ReconstructionResult",
    "ShapeSpec",
    "SingularSystemError",
    "assemble_np",
    "faber_matrix",
    "fpt_analytic",
    "gpt_analytic",
    "gpt_nystrom",
    "grunsky_tables",
    "is_star_shaped",
    "joukowski",
    "make_curve",
    "map_boundary",
    "modified_gpts",
    "monotone_combination",
    "random_map",
    "reconstruct",
    "recover_extreme",
    "recover_map",
    "sample_boundary",
    "scaling_matrices",
    "scattered_field",
    "shape_distance",
    "solve_lambda",
]
