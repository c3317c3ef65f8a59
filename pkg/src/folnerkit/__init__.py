"""Følner-sequence and Szegő-type diagnostics for banded operators on l2."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    DSLError,
    EstimationError,
    FolnerError,
    PreconditionError,
    ResourceError,
    StructureError,
    UnsupportedStructureError,
)
from .operators import (
    Adjoint,
    AlmostMathieu,
    CuntzIsometry,
    Diagonal,
    DiagonalRule,
    DirectSum,
    FiniteRankPerturbation,
    Lattice,
    OperatorSpec,
    Product,
    Scale,
    Shift,
    Sum,
    Toeplitz,
    bandwidth,
    entry,
    fold,
    identity,
    is_selfadjoint,
    norm_bound,
    unfold,
)
from .windows import CommutatorBlocks, CompressionMatrix, WindowProjection, boundary_blocks, compress
from .dsl import parse_operator, to_json

__all__ = [
    "Adjoint", "AlmostMathieu", "CommutatorBlocks", "CompressionMatrix", "CuntzIsometry", "DSLError",
    "Diagonal", "DiagonalRule", "DirectSum", "DomainError", "EstimationError", "FiniteRankPerturbation",
    "FolnerError", "Lattice", "OperatorSpec", "PreconditionError", "Product", "ResourceError", "Scale",
    "Shift", "StructureError", "Sum", "Toeplitz", "UnsupportedStructureError", "WindowProjection",
    "bandwidth", "boundary_blocks", "compress", "entry", "fold", "identity", "is_selfadjoint",
    "norm_bound", "parse_operator", "to_json", "unfold",
]
