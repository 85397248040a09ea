"""Shared model types, hardware profiles, and unit discipline.

Everything downstream works in SI base units: seconds, bytes, bytes/s,
FLOP/s.  The only non-SI quantities allowed anywhere are latencies stored
as clock cycles (fields named ``*_cycles``) and the core clock in GHz;
both are converted to seconds through :func:`cycles_to_seconds` at the
point of use and nowhere else.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

__all__ = [
    "GpucastError",
    "ProfileError",
    "WorkloadError",
    "CalibrationRefused",
    "Precision",
    "KernelClass",
    "ModelPath",
    "GemmDims",
    "TileDims",
    "HardwareProfile",
    "KernelCase",
    "PredictionBreakdown",
    "PRECISION_BYTES",
    "cycles_to_seconds",
    "load_profile",
    "load_profile_dict",
    "serialize_profile",
    "shipped_profile_path",
    "shipped_profile_names",
]


class GpucastError(Exception):
    """Base class for input and data errors raised by this package."""


class ProfileError(GpucastError):
    """A hardware profile failed validation; the message names the field."""


class WorkloadError(GpucastError):
    """A segment file or measured-time file failed validation."""


class CalibrationRefused(GpucastError):
    """A calibration fit was rejected because it degrades holdout accuracy."""


class Precision(str, Enum):
    fp64 = "fp64"
    fp32 = "fp32"
    tf32 = "tf32"
    fp16 = "fp16"
    fp8 = "fp8"
    fp4 = "fp4"

    @property
    def is_sub_byte(self) -> bool:
        return self is Precision.fp4


# storage size of one element, in bytes
PRECISION_BYTES: dict[Precision, float] = {
    Precision.fp64: 8.0,
    Precision.fp32: 4.0,
    Precision.tf32: 4.0,
    Precision.fp16: 2.0,
    Precision.fp8: 1.0,
    Precision.fp4: 0.5,
}


class KernelClass(str, Enum):
    memory_bound = "memory_bound"
    compute_bound = "compute_bound"
    balanced = "balanced"
    stencil = "stencil"


class ModelPath(str, Enum):
    blackwell_stage = "blackwell_stage"
    cdna_wavefront = "cdna_wavefront"
    cdna_occupancy_tile = "cdna_occupancy_tile"
    generic_roofline = "generic_roofline"
    naive_roofline = "naive_roofline"


@dataclass(frozen=True)
class GemmDims:
    m: int
    n: int
    k: int

    def __post_init__(self) -> None:
        for name in ("m", "n", "k"):
            if getattr(self, name) < 1:
                raise ValueError(f"gemm dimension {name} must be >= 1")

    @property
    def flops(self) -> float:
        return 2.0 * self.m * self.n * self.k


@dataclass(frozen=True)
class TileDims:
    b_m: int
    b_n: int
    b_k: int

    def __post_init__(self) -> None:
        for name in ("b_m", "b_n", "b_k"):
            if getattr(self, name) < 1:
                raise ValueError(f"tile dimension {name} must be >= 1")


def cycles_to_seconds(cycles: float, clock_ghz: float) -> float:
    """Convert a cycle count to seconds at the given core clock."""
    if clock_ghz <= 0:
        raise ValueError("clock_ghz must be > 0")
    if cycles < 0:
        raise ValueError("cycles must be >= 0")
    return cycles / (clock_ghz * 1e9)


@dataclass(frozen=True)
class HardwareProfile:
    """One GPU, described by datasheet peaks, measured sustained values,
    instruction/latency constants in cycles, and tunable overheads.

    ``tensor_peak`` / ``tensor_sustained`` map precision names to device-wide
    FLOP/s.  Sustained values that were absent from the source file are
    defaulted to the datasheet peak and recorded in ``defaulted_sustained``.
    """

    name: str
    vendor: str                      # "nvidia" | "amd"
    clock_ghz: float
    num_sm_or_cu: int
    warp_size: int
    max_resident_warps: int
    # capacity / geometry
    hbm_capacity: float
    llc_size: float
    tmem_or_lds_per_sm: float
    vgpr_file_per_cu: int
    # bandwidths (bytes/s)
    hbm_bw_peak: float
    hbm_bw_sustained: float
    llc_bw: float
    tmem_bw_read: float
    tmem_bw_write: float
    tma_bw: float
    memcpy_bw_h2d: float
    memcpy_bw_d2h: float
    link_bw: float
    decomp_rate: float
    # throughputs (FLOP/s, device-wide)
    tensor_peak: dict[Precision, float]
    tensor_sustained: dict[Precision, float]
    # latencies in cycles
    tma_latency_cycles: float
    mma_latency_cycles: dict[Precision, float]
    mbar_latency_cycles: float
    commit_latency_cycles: float
    cache_latency_cycles: dict[str, float]   # keys l1, l2, llc, hbm
    # scalar timing constants (seconds) and dimensionless tunables
    launch_latency_s: float
    s_2sm: float
    tau_memcpy_s: float
    tau_sync_s: float
    tau_interf_s: float
    tau_interf_gpu_s: float
    alpha_default: float
    de_efficiency: float
    epsilon_pipeline_s: float
    coherence_s: float
    cross_xcd_s: float
    store_setup_s: float
    decomp_setup_s: float
    mfma_utilization_default: float
    cache_alpha_exp: float
    cache_beta_exp: float
    h_l1_default: float
    h_l2_default: float
    w0_bytes: float
    tmem_alloc_cycles: float
    tmem_dealloc_cycles: float
    meta: dict[str, Any] = field(default_factory=dict, compare=True)
    defaulted_sustained: tuple[str, ...] = ()

    def cycles(self, cycles: float) -> float:
        """Seconds for ``cycles`` at this profile's clock."""
        return cycles_to_seconds(cycles, self.clock_ghz)

    def peak_flops(self, precision: Precision) -> float:
        try:
            return self.tensor_peak[precision]
        except KeyError:
            raise ProfileError(
                f"profile {self.name!r} has no datasheet tensor throughput for "
                f"precision {precision.value}"
            ) from None

    def sustained_flops(self, precision: Precision) -> float:
        try:
            return self.tensor_sustained[precision]
        except KeyError:
            raise ProfileError(
                f"profile {self.name!r} has no sustained tensor throughput for "
                f"precision {precision.value}"
            ) from None

    def mma_latency(self, precision: Precision) -> float:
        """Issue latency (cycles) of one tensor instruction at a precision."""
        if precision in self.mma_latency_cycles:
            return self.mma_latency_cycles[precision]
        raise ProfileError(
            f"profile {self.name!r} has no mma latency for precision {precision.value}"
        )

    def with_overrides(self, **kwargs: Any) -> "HardwareProfile":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class KernelCase:
    """One kernel to predict.  Only the fields relevant to the chosen model
    path need to be meaningful; the rest keep their defaults."""

    kernel_class: KernelClass
    flops: float = 0.0
    bytes: float = 0.0
    working_set: float = 0.0
    precision: Precision = Precision.fp32
    gemm: GemmDims | None = None
    tile: TileDims | None = None
    k_tiles: float = 1.0
    tma_participants: int = 1
    tma_participants_b: int | None = None    # separate multicast width for the B stream
    overlap_alpha: float | None = None       # None -> profile default
    n_bar: int = 1
    use_2sm: bool = False
    pipelined: bool = True
    use_decompression: bool = False
    compression_ratio: float = 1.0
    accum_precision: Precision | None = None
    use_tma_store: bool = False
    vgpr_per_wavefront: int = 512
    h_l1: float | None = None
    h_l2: float | None = None
    n_loads: float = 0.0
    mfma_utilization: float | None = None
    n_concurrent: int = 1
    n_devices: int = 1
    n_kernels: int = 1

    def __post_init__(self) -> None:
        if self.flops < 0 or self.bytes < 0 or self.working_set < 0:
            raise ValueError("flops, bytes and working_set must be >= 0")
        if self.k_tiles < 0:
            raise ValueError("k_tiles must be >= 0")
        if self.tma_participants < 1:
            raise ValueError("tma_participants must be >= 1")
        if self.tma_participants_b is not None and self.tma_participants_b < 1:
            raise ValueError("tma_participants_b must be >= 1")
        if self.overlap_alpha is not None and not 0.0 <= self.overlap_alpha <= 1.0:
            raise ValueError("overlap_alpha must lie in [0, 1]")
        if self.n_bar < 0:
            raise ValueError("n_bar must be >= 0")
        if self.compression_ratio < 1.0:
            raise ValueError("compression_ratio must be >= 1")
        if self.vgpr_per_wavefront < 1:
            raise ValueError("vgpr_per_wavefront must be >= 1")
        for name in ("h_l1", "h_l2"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.n_loads < 0:
            raise ValueError("n_loads must be >= 0")
        if self.mfma_utilization is not None and not 0.0 < self.mfma_utilization <= 1.0:
            raise ValueError("mfma_utilization must lie in (0, 1]")
        for name in ("n_concurrent", "n_devices", "n_kernels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class PredictionBreakdown:
    """Predicted kernel time with its additive/overlapped components.

    The total is always re-derivable from the stored terms via
    :meth:`recompose`; which terms are summed and which sit under a max()
    depends on ``model_path``.  For paths that overlap compute with memory
    (CDNA wavefront), the compute and memory terms are stored after the
    overlap divisor so that plain summation recomposes the total.
    """

    model_path: ModelPath
    total_s: float
    t_compute_s: float = 0.0
    t_memory_or_io_s: float = 0.0
    t_sync_s: float = 0.0
    t_launch_s: float = 0.0
    t_writeback_s: float = 0.0
    t_overhead_s: float = 0.0
    t_interference_s: float = 0.0
    t_memcpy_s: float = 0.0
    flags: tuple[str, ...] = ()

    def recompose(self) -> float:
        """Recombine the stored terms according to the model path."""
        linear = (
            self.t_sync_s
            + self.t_launch_s
            + self.t_writeback_s
            + self.t_overhead_s
            + self.t_interference_s
            + self.t_memcpy_s
        )
        if self.model_path is ModelPath.cdna_wavefront:
            return self.t_compute_s + self.t_memory_or_io_s + linear
        if self.model_path is ModelPath.naive_roofline:
            return max(self.t_compute_s, self.t_memory_or_io_s) + linear
        # stage/occupancy/generic paths: bound by the slower of compute and IO
        return max(self.t_compute_s, self.t_memory_or_io_s) + linear

    def scaled(self, factor: float) -> "PredictionBreakdown":
        """A copy with every time term multiplied by ``factor``, so that a
        calibration multiplier preserves the recomposition invariant."""
        if factor <= 0:
            raise ValueError("scale factor must be > 0")
        return replace(
            self,
            total_s=self.total_s * factor,
            t_compute_s=self.t_compute_s * factor,
            t_memory_or_io_s=self.t_memory_or_io_s * factor,
            t_sync_s=self.t_sync_s * factor,
            t_launch_s=self.t_launch_s * factor,
            t_writeback_s=self.t_writeback_s * factor,
            t_overhead_s=self.t_overhead_s * factor,
            t_interference_s=self.t_interference_s * factor,
            t_memcpy_s=self.t_memcpy_s * factor,
        )


# ---------------------------------------------------------------------------
# profile files
# ---------------------------------------------------------------------------

_PROFILE_DIR = Path(__file__).parent / "profiles"

_REQUIRED_TOP = ("meta", "datasheet", "measured", "latencies_cycles", "tunables")

# measured bandwidth fields that fall back to a datasheet value when absent
_SUSTAINED_DEFAULTS = {
    "hbm_bw": "hbm_bw",
}


def shipped_profile_names() -> list[str]:
    return sorted(p.stem for p in _PROFILE_DIR.glob("*.json"))


def shipped_profile_path(name: str) -> Path:
    path = _PROFILE_DIR / f"{name}.json"
    if not path.exists():
        raise ProfileError(
            f"unknown shipped profile {name!r}; available: {', '.join(shipped_profile_names())}"
        )
    return path


def _require(mapping: dict[str, Any], key: str, where: str) -> Any:
    if key not in mapping:
        raise ProfileError(f"profile field missing: {where}.{key}")
    return mapping[key]


def _positive(value: Any, where: str) -> float:
    v = _number(value, where)
    if v <= 0:
        raise ProfileError(f"profile field must be > 0: {where} (got {value!r})")
    return v


def _non_negative(value: Any, where: str) -> float:
    v = _number(value, where)
    if v < 0:
        raise ProfileError(f"profile field must be >= 0: {where} (got {value!r})")
    return v


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProfileError(f"profile field must be numeric: {where} (got {value!r})")
    if isinstance(value, float) and math.isnan(value):
        raise ProfileError(f"profile field must not be NaN: {where}")
    return float(value)


def _precision_map(raw: Any, where: str, positive: bool = True) -> dict[Precision, float]:
    if not isinstance(raw, dict):
        raise ProfileError(f"profile field must be a mapping: {where}")
    out: dict[Precision, float] = {}
    for key, value in raw.items():
        try:
            prec = Precision(key)
        except ValueError:
            raise ProfileError(f"unknown precision {key!r} in {where}") from None
        out[prec] = _positive(value, f"{where}.{key}") if positive else _non_negative(
            value, f"{where}.{key}"
        )
    if not out:
        raise ProfileError(f"profile field must not be empty: {where}")
    return out


def load_profile_dict(raw: dict[str, Any], origin: str = "<dict>") -> HardwareProfile:
    """Build a validated :class:`HardwareProfile` from a parsed profile dict."""
    for key in _REQUIRED_TOP:
        if key not in raw:
            raise ProfileError(f"profile section missing: {key} (in {origin})")

    meta = raw["meta"]
    sheet = raw["datasheet"]
    meas = raw["measured"]
    lat = raw["latencies_cycles"]
    tun = raw["tunables"]
    for section, val in (("meta", meta), ("datasheet", sheet), ("measured", meas),
                         ("latencies_cycles", lat), ("tunables", tun)):
        if not isinstance(val, dict):
            raise ProfileError(f"profile section must be an object: {section}")

    name = _require(meta, "name", "meta")
    vendor = _require(meta, "vendor", "meta")
    if vendor not in ("nvidia", "amd"):
        raise ProfileError(f"meta.vendor must be 'nvidia' or 'amd' (got {vendor!r})")

    defaulted: list[str] = []
    hbm_peak = _positive(_require(sheet, "hbm_bw", "datasheet"), "datasheet.hbm_bw")
    if "hbm_bw" in meas:
        hbm_sust = _positive(meas["hbm_bw"], "measured.hbm_bw")
    else:
        hbm_sust = hbm_peak
        defaulted.append("hbm_bw")
    if hbm_sust > hbm_peak:
        raise ProfileError(
            f"measured.hbm_bw ({hbm_sust}) exceeds datasheet.hbm_bw ({hbm_peak})"
        )

    tensor_peak = _precision_map(_require(sheet, "tensor_flops", "datasheet"),
                                 "datasheet.tensor_flops")
    if "tensor_flops" in meas:
        tensor_sust = _precision_map(meas["tensor_flops"], "measured.tensor_flops")
    else:
        tensor_sust = dict(tensor_peak)
        defaulted.append("tensor_flops")
    for prec, value in tensor_sust.items():
        if prec not in tensor_peak:
            raise ProfileError(
                f"measured.tensor_flops has precision {prec.value} absent from datasheet"
            )
        if value > tensor_peak[prec]:
            raise ProfileError(
                f"measured.tensor_flops.{prec.value} ({value}) exceeds datasheet value "
                f"({tensor_peak[prec]})"
            )
    for prec in tensor_peak:
        if prec not in tensor_sust:
            tensor_sust[prec] = tensor_peak[prec]
            defaulted.append(f"tensor_flops.{prec.value}")

    cache_raw = _require(lat, "cache", "latencies_cycles")
    if not isinstance(cache_raw, dict):
        raise ProfileError("latencies_cycles.cache must be a mapping")
    cache = {}
    for level in ("l1", "l2", "llc", "hbm"):
        cache[level] = _non_negative(
            _require(cache_raw, level, "latencies_cycles.cache"),
            f"latencies_cycles.cache.{level}",
        )

    mma_raw = _require(lat, "mma", "latencies_cycles")
    mma = _precision_map(mma_raw, "latencies_cycles.mma", positive=False)

    profile = HardwareProfile(
        name=str(name),
        vendor=str(vendor),
        clock_ghz=_positive(_require(sheet, "clock_ghz", "datasheet"), "datasheet.clock_ghz"),
        num_sm_or_cu=int(_positive(_require(sheet, "num_sm_or_cu", "datasheet"),
                                   "datasheet.num_sm_or_cu")),
        warp_size=int(_positive(_require(sheet, "warp_size", "datasheet"),
                                "datasheet.warp_size")),
        max_resident_warps=int(_positive(_require(sheet, "max_resident_warps", "datasheet"),
                                         "datasheet.max_resident_warps")),
        hbm_capacity=_positive(_require(sheet, "hbm_capacity", "datasheet"),
                               "datasheet.hbm_capacity"),
        llc_size=_positive(_require(sheet, "llc_size", "datasheet"), "datasheet.llc_size"),
        tmem_or_lds_per_sm=_positive(_require(sheet, "tmem_or_lds_per_sm", "datasheet"),
                                     "datasheet.tmem_or_lds_per_sm"),
        vgpr_file_per_cu=int(_positive(_require(sheet, "vgpr_file_per_cu", "datasheet"),
                                       "datasheet.vgpr_file_per_cu")),
        hbm_bw_peak=hbm_peak,
        hbm_bw_sustained=hbm_sust,
        llc_bw=_positive(_require(meas, "llc_bw", "measured"), "measured.llc_bw"),
        tmem_bw_read=_positive(_require(meas, "tmem_bw_read", "measured"),
                               "measured.tmem_bw_read"),
        tmem_bw_write=_positive(_require(meas, "tmem_bw_write", "measured"),
                                "measured.tmem_bw_write"),
        tma_bw=_positive(_require(meas, "tma_bw", "measured"), "measured.tma_bw"),
        memcpy_bw_h2d=_positive(_require(meas, "memcpy_bw_h2d", "measured"),
                                "measured.memcpy_bw_h2d"),
        memcpy_bw_d2h=_positive(_require(meas, "memcpy_bw_d2h", "measured"),
                                "measured.memcpy_bw_d2h"),
        link_bw=_positive(_require(meas, "link_bw", "measured"), "measured.link_bw"),
        decomp_rate=_positive(_require(meas, "decomp_rate", "measured"),
                              "measured.decomp_rate"),
        tensor_peak=tensor_peak,
        tensor_sustained=tensor_sust,
        tma_latency_cycles=_non_negative(_require(lat, "tma", "latencies_cycles"),
                                         "latencies_cycles.tma"),
        mma_latency_cycles=mma,
        mbar_latency_cycles=_non_negative(_require(lat, "mbar", "latencies_cycles"),
                                          "latencies_cycles.mbar"),
        commit_latency_cycles=_non_negative(_require(lat, "commit", "latencies_cycles"),
                                            "latencies_cycles.commit"),
        cache_latency_cycles=cache,
        launch_latency_s=_non_negative(_require(meas, "launch_latency_s", "measured"),
                                       "measured.launch_latency_s"),
        s_2sm=_positive(_require(meas, "s_2sm", "measured"), "measured.s_2sm"),
        tau_memcpy_s=_non_negative(_require(tun, "tau_memcpy_s", "tunables"),
                                   "tunables.tau_memcpy_s"),
        tau_sync_s=_non_negative(_require(tun, "tau_sync_s", "tunables"),
                                 "tunables.tau_sync_s"),
        tau_interf_s=_non_negative(_require(tun, "tau_interf_s", "tunables"),
                                   "tunables.tau_interf_s"),
        tau_interf_gpu_s=_non_negative(_require(tun, "tau_interf_gpu_s", "tunables"),
                                       "tunables.tau_interf_gpu_s"),
        alpha_default=_non_negative(_require(tun, "alpha_default", "tunables"),
                                    "tunables.alpha_default"),
        de_efficiency=_positive(_require(tun, "de_efficiency", "tunables"),
                                "tunables.de_efficiency"),
        epsilon_pipeline_s=_non_negative(_require(tun, "epsilon_pipeline_s", "tunables"),
                                         "tunables.epsilon_pipeline_s"),
        coherence_s=_non_negative(_require(tun, "coherence_s", "tunables"),
                                  "tunables.coherence_s"),
        cross_xcd_s=_non_negative(_require(tun, "cross_xcd_s", "tunables"),
                                  "tunables.cross_xcd_s"),
        store_setup_s=_non_negative(_require(tun, "store_setup_s", "tunables"),
                                    "tunables.store_setup_s"),
        decomp_setup_s=_non_negative(_require(tun, "decomp_setup_s", "tunables"),
                                     "tunables.decomp_setup_s"),
        mfma_utilization_default=_positive(_require(tun, "mfma_utilization", "tunables"),
                                           "tunables.mfma_utilization"),
        cache_alpha_exp=_positive(_require(tun, "cache_alpha_exp", "tunables"),
                                  "tunables.cache_alpha_exp"),
        cache_beta_exp=_positive(_require(tun, "cache_beta_exp", "tunables"),
                                 "tunables.cache_beta_exp"),
        h_l1_default=_non_negative(_require(tun, "h_l1", "tunables"), "tunables.h_l1"),
        h_l2_default=_non_negative(_require(tun, "h_l2", "tunables"), "tunables.h_l2"),
        w0_bytes=_number(_require(tun, "w0_bytes", "tunables"), "tunables.w0_bytes"),
        tmem_alloc_cycles=_non_negative(_require(tun, "tmem_alloc_cycles", "tunables"),
                                        "tunables.tmem_alloc_cycles"),
        tmem_dealloc_cycles=_non_negative(_require(tun, "tmem_dealloc_cycles", "tunables"),
                                          "tunables.tmem_dealloc_cycles"),
        meta=dict(meta),
        defaulted_sustained=tuple(defaulted),
    )
    for hname in ("h_l1_default", "h_l2_default"):
        if getattr(profile, hname) > 1.0:
            raise ProfileError(f"tunables.{hname.removesuffix('_default')} must be <= 1")
    if profile.alpha_default > 1.0:
        raise ProfileError("tunables.alpha_default must be <= 1")
    if profile.mfma_utilization_default > 1.0:
        raise ProfileError("tunables.mfma_utilization must be <= 1")
    if profile.de_efficiency > 1.0:
        raise ProfileError("tunables.de_efficiency must be <= 1")
    return profile


def load_profile(path: str | Path) -> HardwareProfile:
    """Load and validate a hardware profile JSON file.

    A bare name (no path separator, no .json suffix) selects a shipped
    profile, e.g. ``load_profile("b200")``.
    """
    p = Path(path)
    if p.suffix != ".json" and not p.exists():
        p = shipped_profile_path(str(path))
    try:
        raw = json.loads(p.read_text())
    except FileNotFoundError:
        raise ProfileError(f"profile file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise ProfileError(f"profile file is not valid JSON: {p} ({exc})") from None
    if not isinstance(raw, dict):
        raise ProfileError(f"profile file must contain a JSON object: {p}")
    return load_profile_dict(raw, origin=str(p))


def serialize_profile(profile: HardwareProfile) -> dict[str, Any]:
    """Render a profile back into the on-disk JSON layout.

    ``load_profile_dict(serialize_profile(p))`` compares equal to ``p``
    except for the bookkeeping of which sustained fields were defaulted.
    """
    return {
        "meta": dict(profile.meta),
        "datasheet": {
            "clock_ghz": profile.clock_ghz,
            "num_sm_or_cu": profile.num_sm_or_cu,
            "warp_size": profile.warp_size,
            "max_resident_warps": profile.max_resident_warps,
            "hbm_bw": profile.hbm_bw_peak,
            "hbm_capacity": profile.hbm_capacity,
            "llc_size": profile.llc_size,
            "tmem_or_lds_per_sm": profile.tmem_or_lds_per_sm,
            "vgpr_file_per_cu": profile.vgpr_file_per_cu,
            "tensor_flops": {p.value: v for p, v in profile.tensor_peak.items()},
        },
        "measured": {
            "hbm_bw": profile.hbm_bw_sustained,
            "llc_bw": profile.llc_bw,
            "tensor_flops": {p.value: v for p, v in profile.tensor_sustained.items()},
            "tmem_bw_read": profile.tmem_bw_read,
            "tmem_bw_write": profile.tmem_bw_write,
            "tma_bw": profile.tma_bw,
            "memcpy_bw_h2d": profile.memcpy_bw_h2d,
            "memcpy_bw_d2h": profile.memcpy_bw_d2h,
            "link_bw": profile.link_bw,
            "decomp_rate": profile.decomp_rate,
            "launch_latency_s": profile.launch_latency_s,
            "s_2sm": profile.s_2sm,
        },
        "latencies_cycles": {
            "tma": profile.tma_latency_cycles,
            "mma": {p.value: v for p, v in profile.mma_latency_cycles.items()},
            "mbar": profile.mbar_latency_cycles,
            "commit": profile.commit_latency_cycles,
            "cache": dict(profile.cache_latency_cycles),
        },
        "tunables": {
            "tau_memcpy_s": profile.tau_memcpy_s,
            "tau_sync_s": profile.tau_sync_s,
            "tau_interf_s": profile.tau_interf_s,
            "tau_interf_gpu_s": profile.tau_interf_gpu_s,
            "alpha_default": profile.alpha_default,
            "de_efficiency": profile.de_efficiency,
            "epsilon_pipeline_s": profile.epsilon_pipeline_s,
            "coherence_s": profile.coherence_s,
            "cross_xcd_s": profile.cross_xcd_s,
            "store_setup_s": profile.store_setup_s,
            "decomp_setup_s": profile.decomp_setup_s,
            "mfma_utilization": profile.mfma_utilization_default,
            "cache_alpha_exp": profile.cache_alpha_exp,
            "cache_beta_exp": profile.cache_beta_exp,
            "h_l1": profile.h_l1_default,
            "h_l2": profile.h_l2_default,
            "w0_bytes": profile.w0_bytes,
            "tmem_alloc_cycles": profile.tmem_alloc_cycles,
            "tmem_dealloc_cycles": profile.tmem_dealloc_cycles,
        },
    }
