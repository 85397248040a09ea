"""gpucast: analytical GPU kernel execution-time prediction.

Three model families share one profile and workload format: a stage-based
model for NVIDIA tensor-core GPUs, a wavefront-overlap model for AMD CDNA
GPUs, and a calibrated roofline that any workload can fall back to.
"""

from . import blackwell, cdna, roofline, validation, workload
from .core import (
    CalibrationRefused,
    GemmDims,
    GpucastError,
    HardwareProfile,
    KernelCase,
    KernelClass,
    ModelPath,
    Precision,
    PredictionBreakdown,
    ProfileError,
    TileDims,
    WorkloadError,
    cycles_to_seconds,
    load_profile,
    serialize_profile,
    shipped_profile_names,
    shipped_profile_path,
)

__version__ = "0.1.0"

__all__ = [
    "blackwell",
    "cdna",
    "roofline",
    "validation",
    "workload",
    "CalibrationRefused",
    "GemmDims",
    "GpucastError",
    "HardwareProfile",
    "KernelCase",
    "KernelClass",
    "ModelPath",
    "Precision",
    "PredictionBreakdown",
    "ProfileError",
    "TileDims",
    "WorkloadError",
    "cycles_to_seconds",
    "load_profile",
    "serialize_profile",
    "shipped_profile_names",
    "shipped_profile_path",
    "__version__",
]
