"""beamloewner: analytic beam-shaker transfer function and Loewner fits.

Evaluates the exact (irrational) frequency response of a damped hinged
beam coupled to a spring-mass shaker, samples it on frequency grids,
and fits reduced rational descriptor models from the samples via the
Loewner framework, with tooling for stability, accuracy and
noise-robustness studies.
"""

from .beam import (
    BeamParams,
    BoundaryConstants,
    KrylovQuad,
    SpectralParams,
    krylov_z,
    sample_grid,
    spectral_params,
    transfer_function,
)
from .data import FrequencyDataSet
from .exceptions import (
    BeamLoewnerError,
    ConfigError,
    DegenerateParameter,
    ImaginaryResidue,
    InconsistentConjugate,
    NodeCollision,
    OverTruncation,
    SingularMatrix,
)
from .fd import oracle_fd, snap_to_grid
from .loewner import (
    LoewnerPencil,
    PartitionedData,
    SvdReport,
    build_pencil,
    conjugate_close,
    partition,
    realify,
    reduce,
    select_order,
    stagnation_index,
    svd_augmented,
    verify_pencil,
)
from .noise import NoiseSpec, perturb
from .rom import ErrorReport, PoleReport, ReducedModel, error_report, eval_tf, eval_tf_grid, poles

__version__ = "0.1.0"

__all__ = [
    "BeamParams",
    "BoundaryConstants",
    "KrylovQuad",
    "SpectralParams",
    "krylov_z",
    "sample_grid",
    "spectral_params",
    "transfer_function",
    "FrequencyDataSet",
    "BeamLoewnerError",
    "ConfigError",
    "DegenerateParameter",
    "ImaginaryResidue",
    "InconsistentConjugate",
    "NodeCollision",
    "OverTruncation",
    "SingularMatrix",
    "oracle_fd",
    "snap_to_grid",
    "LoewnerPencil",
    "PartitionedData",
    "SvdReport",
    "build_pencil",
    "conjugate_close",
    "partition",
    "realify",
    "reduce",
    "select_order",
    "stagnation_index",
    "svd_augmented",
    "verify_pencil",
    "NoiseSpec",
    "perturb",
    "ErrorReport",
    "PoleReport",
    "ReducedModel",
    "error_report",
    "eval_tf",
    "eval_tf_grid",
    "poles",
    "__version__",
]
