"""Roofline-style predictors: a naive datasheet baseline and a calibrated
generic path.

The naive form is the classic upper bound, max(flops/peak, bytes/peak_bw),
with no launch or overhead terms; it exists as the comparison baseline.
The generic path uses sustained rates, per-class scale factors, per-
precision efficiency multipliers, a working-set bandwidth blend, and
launch accounting, and is what workload segments fall back to when no
architecture-specific path applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (
    HardwareProfile,
    KernelCase,
    KernelClass,
    ModelPath,
    Precision,
    PredictionBreakdown,
)

__all__ = [
    "GenericPathParams",
    "naive_roofline",
    "working_set_bandwidth",
    "generic_predict",
    "memcpy_time",
    "host_sync_time",
]


@dataclass(frozen=True)
class GenericPathParams:
    """Calibration knobs for the generic path.

    class_scales multiply the roofline max() only, never the launch terms.
    w0_bytes <= 0 disables the working-set bandwidth blend (pure sustained).
    """
    class_scales: dict[KernelClass, float] = field(default_factory=dict)
    precision_multipliers: dict[Precision, float] = field(default_factory=dict)
    w0_bytes: float = -1.0

    def __post_init__(self) -> None:
        for cls, scale in self.class_scales.items():
            if scale <= 0:
                raise ValueError(f"class scale for {cls.value} must be > 0")
        for prec, mult in self.precision_multipliers.items():
            if not 0.0 < mult <= 1.0:
                raise ValueError(
                    f"precision multiplier for {prec.value} must lie in (0, 1]"
                )

    def scale_for(self, kernel_class: KernelClass) -> float:
        return self.class_scales.get(kernel_class, 1.0)

    def multiplier_for(self, precision: Precision) -> float:
        return self.precision_multipliers.get(precision, 1.0)

    @classmethod
    def from_profile(cls, profile: HardwareProfile) -> "GenericPathParams":
        return cls(w0_bytes=profile.w0_bytes)


def naive_roofline(flops: float, byte_count: float, profile: HardwareProfile,
                   precision: Precision = Precision.fp64) -> PredictionBreakdown:
    """Datasheet roofline bound: max(flops/peak, bytes/peak HBM bandwidth),
    nothing else."""
    if flops < 0 or byte_count < 0:
        raise ValueError("flops and bytes must be >= 0")
    t_compute = flops / profile.peak_flops(precision)
    t_memory = byte_count / profile.hbm_bw_peak
    return PredictionBreakdown(
        model_path=ModelPath.naive_roofline,
        total_s=max(t_compute, t_memory),
        t_compute_s=t_compute,
        t_memory_or_io_s=t_memory,
    )


def working_set_bandwidth(working_set_bytes: float, profile: HardwareProfile,
                          w0_bytes: float) -> float:
    """Effective bandwidth between sustained and peak.

    Small working sets earn part of the cache-resident headroom:
    sustained + (peak - sustained) * exp(-W/w0).  A non-positive w0
    disables the blend and returns the sustained bandwidth.
    """
    if working_set_bytes < 0:
        raise ValueError("working_set_bytes must be >= 0")
    if w0_bytes <= 0:
        return profile.hbm_bw_sustained
    return profile.hbm_bw_sustained + (
        profile.hbm_bw_peak - profile.hbm_bw_sustained
    ) * math.exp(-working_set_bytes / w0_bytes)


def generic_predict(case: KernelCase, profile: HardwareProfile,
                    params: GenericPathParams | None = None) -> PredictionBreakdown:
    """Calibrated roofline for one kernel.

    scale_class * max(flops / (sustained * precision multiplier),
    bytes / blended bandwidth) + n_kernels launch latencies, plus any
    multi-stream or multi-device interference.
    """
    if params is None:
        params = GenericPathParams.from_profile(profile)
    scale = params.scale_for(case.kernel_class)
    mult = params.multiplier_for(case.precision)
    p_eff = profile.sustained_flops(case.precision) * mult
    bw = working_set_bandwidth(case.working_set, profile, params.w0_bytes)
    t_compute = scale * (case.flops / p_eff)
    t_memory = scale * (case.bytes / bw)
    t_launch = case.n_kernels * profile.launch_latency_s
    t_interf = (case.n_concurrent - 1) * profile.tau_interf_s + (
        case.n_devices - 1
    ) * profile.tau_interf_gpu_s
    total = max(t_compute, t_memory) + t_launch + t_interf
    return PredictionBreakdown(
        model_path=ModelPath.generic_roofline,
        total_s=total,
        t_compute_s=t_compute,
        t_memory_or_io_s=t_memory,
        t_launch_s=t_launch,
        t_interference_s=t_interf,
    )


def memcpy_time(byte_count: float, direction: str, profile: HardwareProfile) -> float:
    """Host/device transfer: bytes over the directional link bandwidth plus
    a fixed per-call launch constant."""
    if byte_count < 0:
        raise ValueError("byte_count must be >= 0")
    if direction == "h2d":
        bw = profile.memcpy_bw_h2d
    elif direction == "d2h":
        bw = profile.memcpy_bw_d2h
    else:
        raise ValueError(f"direction must be 'h2d' or 'd2h' (got {direction!r})")
    return byte_count / bw + profile.tau_memcpy_s


def host_sync_time(n_syncs: int, profile: HardwareProfile) -> float:
    """Host synchronisation cost: n_syncs * per-sync constant."""
    if n_syncs < 0:
        raise ValueError("n_syncs must be >= 0")
    return n_syncs * profile.tau_sync_s
