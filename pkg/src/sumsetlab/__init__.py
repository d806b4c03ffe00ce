"""Finite, exact experiments on polynomial patterns in sumsets of subsets of N."""

from .bitwindow import BitWindow
from .errors import (CoverageError, FormatError, InputError, LabError, OutOfWindowError,
                     PolyOverflowError, PreconditionError)
from .poly import Poly
from .seqgen import NormalizedSeq, normalize, parse_spec

__all__ = [
    "BitWindow", "Poly", "NormalizedSeq", "normalize", "parse_spec",
    "LabError", "InputError", "PreconditionError", "FormatError",
    "CoverageError", "OutOfWindowError", "PolyOverflowError",
]
__version__ = "0.1.0"
