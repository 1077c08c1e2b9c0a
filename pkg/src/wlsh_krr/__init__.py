"""Kernel ridge regression with weighted locality-sensitive-hashing sketches."""

from .errors import IngestionError, InvalidArgument, NumericFailure
from .hashing import LshParams, hash_point, residual, sample_lsh
from .kernels import KernelSpec, kernel_matrix, kernel_value, parse_kernel, wlsh_1d
from .krr import KrrModel, fit_exact, fit_wlsh, predict, rmse
from .rng import RandomStream
from .shapes import BucketShape, make_box_convolution, make_rect, parse_shape
from .sketch import WlshSketch, build_sketch, estimate_entry, matvec
from .solver import SolveStats, conjugate_gradient
from .widths import WidthDistribution, gamma, parse_dist

__version__ = "0.1.0"

__all__ = [
    "BucketShape", "IngestionError", "InvalidArgument", "KernelSpec", "KrrModel", "LshParams",
    "NumericFailure", "RandomStream", "SolveStats", "WidthDistribution", "WlshSketch", "build_sketch",
    "conjugate_gradient", "estimate_entry", "fit_exact", "fit_wlsh", "gamma", "hash_point", "kernel_matrix",
    "kernel_value", "make_box_convolution", "make_rect", "matvec", "parse_dist", "parse_kernel",
    "parse_shape", "predict", "residual", "rmse", "sample_lsh", "wlsh_1d",
]
