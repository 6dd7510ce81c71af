"""Small-bias XOR-mask randomness extraction against quantum side information."""

from .cqstate import CqState, DensityMatrix
from .errors import BiasmaskError, CapacityError, ConditioningError, DimensionError, FormatError
from .gf2 import BinMatrix, BitString
from .smallbias import BiasedFamily, WeightedSpace

__version__ = "0.1.0"

__all__ = [
    "BiasedFamily",
    "BiasmaskError",
    "BinMatrix",
    "BitString",
    "CapacityError",
    "ConditioningError",
    "CqState",
    "DensityMatrix",
    "DimensionError",
    "FormatError",
    "WeightedSpace",
]
