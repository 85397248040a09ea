"""Wavefront-overlap execution-time model for AMD CDNA-class GPUs.

Latency hiding is driven by resident-wavefront occupancy: extra wavefronts
overlap memory time with compute up to full overlap.  Memory cost comes
either from a per-load hierarchy walk (L1/L2/LLC/HBM latencies weighted by
hit rates) or from bytes over an effective bandwidth that blends LLC and
HBM by the working-set hit rate.  A second, coarser path prices whole CTAs
against occupancy for tile-size studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .core import (
    HardwareProfile,
    KernelCase,
    ModelPath,
    Precision,
    PRECISION_BYTES,
    PredictionBreakdown,
    TileDims,
)

__all__ = [
    "CdnaOccupancy",
    "CacheModelParams",
    "TileCandidate",
    "TileSelection",
    "MIB",
    "vgpr_occupancy",
    "overlap_factor",
    "llc_hit_rate",
    "llc_256_edge_values",
    "effective_bandwidth",
    "memory_time",
    "mfma_time",
    "step_time",
    "kernel_time",
    "occupancy_tile_kernel_time",
    "select_tile",
    "fused_time",
]

MIB = float(2 ** 20)

# piecewise working-set thresholds, in MiB of last-level cache reach
_CACHE_FULL_MIB = 205.0
_CACHE_EDGE_MIB = 256.0
_CACHE_TAPER_MIB = _CACHE_EDGE_MIB - _CACHE_FULL_MIB  # 51


@dataclass(frozen=True)
class CdnaOccupancy:
    n_wf_active: int
    mwp: int | None
    cwp: int | None
    n_wf_eff: int


@dataclass(frozen=True)
class CacheModelParams:
    """Calibratable cache-behaviour knobs for the CDNA memory model."""
    alpha_exp: float = 1.0
    beta_exp: float = 1.0
    h_l1: float = 0.8
    h_l2: float = 0.6

    def __post_init__(self) -> None:
        if self.alpha_exp <= 0 or self.beta_exp <= 0:
            raise ValueError("alpha_exp and beta_exp must be > 0")
        for name in ("h_l1", "h_l2"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @classmethod
    def from_profile(cls, profile: HardwareProfile) -> "CacheModelParams":
        return cls(alpha_exp=profile.cache_alpha_exp, beta_exp=profile.cache_beta_exp,
                   h_l1=profile.h_l1_default, h_l2=profile.h_l2_default)


def vgpr_occupancy(vgpr_per_wavefront: int, mwp: int | None = None,
                   cwp: int | None = None, vgpr_file: int = 65536,
                   max_wavefronts: int = 32) -> CdnaOccupancy:
    """Resident wavefronts per CU under the register-file limit, clamped by
    memory- and compute-warp parallelism limits when given."""
    if vgpr_per_wavefront < 1:
        raise ValueError("vgpr_per_wavefront must be >= 1")
    if vgpr_file < 1 or max_wavefronts < 1:
        raise ValueError("vgpr_file and max_wavefronts must be >= 1")
    n_active = min(max_wavefronts, vgpr_file // vgpr_per_wavefront)
    if n_active < 1:
        raise ValueError(
            f"vgpr_per_wavefront={vgpr_per_wavefront} exceeds the register file; "
            "no wavefront fits"
        )
    n_eff = n_active
    for limit in (mwp, cwp):
        if limit is not None:
            if limit < 1:
                raise ValueError("mwp/cwp limits must be >= 1")
            n_eff = min(n_eff, limit)
    return CdnaOccupancy(n_wf_active=n_active, mwp=mwp, cwp=cwp, n_wf_eff=n_eff)


def overlap_factor(occupancy: CdnaOccupancy, t_compute_s: float,
                   t_memory_s: float) -> float:
    """Fraction of memory time hidden by the other resident wavefronts:
    min(1, (n_eff - 1) * t_compute / t_memory).  Zero memory time counts
    as fully hidden."""
    if t_compute_s < 0 or t_memory_s < 0:
        raise ValueError("stage times must be >= 0")
    if t_memory_s == 0.0:
        return 1.0
    return min(1.0, (occupancy.n_wf_eff - 1) * t_compute_s / t_memory_s)


def llc_hit_rate(working_set_bytes: float, params: CacheModelParams) -> float:
    """Last-level-cache hit rate as a function of working-set size.

    Full reuse below 205 MiB, a taper (1 - (W-205)/51)^alpha through the
    cache capacity, and a streaming tail (256/W)^beta above it.  The
    piecewise form is intentionally kept as calibrated, including its jump
    at the 256 MiB edge; see :func:`llc_256_edge_values`.
    """
    if working_set_bytes < 0:
        raise ValueError("working_set_bytes must be >= 0")
    w = working_set_bytes / MIB
    if w < _CACHE_FULL_MIB:
        return 1.0
    if w <= _CACHE_EDGE_MIB:
        return (1.0 - (w - _CACHE_FULL_MIB) / _CACHE_TAPER_MIB) ** params.alpha_exp
    return (_CACHE_EDGE_MIB / w) ** params.beta_exp


def llc_256_edge_values(params: CacheModelParams) -> tuple[float, float]:
    """One-sided hit-rate values at the 256 MiB edge (taper side, streaming
    side); the gap between them is the model's built-in discontinuity."""
    taper_side = (1.0 - (_CACHE_EDGE_MIB - _CACHE_FULL_MIB) / _CACHE_TAPER_MIB) \
        ** params.alpha_exp
    streaming_side = 1.0  # limit of (256/W)^beta as W -> 256 from above
    return taper_side, streaming_side


def effective_bandwidth(h_llc: float, profile: HardwareProfile) -> float:
    """Bandwidth blend: h_llc * LLC bandwidth + (1 - h_llc) * HBM sustained."""
    if not 0.0 <= h_llc <= 1.0:
        raise ValueError("h_llc must lie in [0, 1]")
    return h_llc * profile.llc_bw + (1.0 - h_llc) * profile.hbm_bw_sustained


def memory_time(n_loads: float, params: CacheModelParams, h_llc: float,
                profile: HardwareProfile) -> float:
    """Average hierarchy latency for n_loads memory operations.

    Each load pays L1 on an L1 hit, L2 on an L1 miss that hits L2, the LLC
    latency on an L2 miss that hits LLC, and HBM latency for the remainder.
    """
    if n_loads < 0:
        raise ValueError("n_loads must be >= 0")
    if not 0.0 <= h_llc <= 1.0:
        raise ValueError("h_llc must lie in [0, 1]")
    lat = profile.cache_latency_cycles
    h1, h2 = params.h_l1, params.h_l2
    h_total = h1 + (1.0 - h1) * h2 + (1.0 - h1) * (1.0 - h2) * h_llc
    per_load_cycles = (
        h1 * lat["l1"]
        + (1.0 - h1) * h2 * lat["l2"]
        + (1.0 - h1) * (1.0 - h2) * h_llc * lat["llc"]
        + (1.0 - h_total) * lat["hbm"]
    )
    return n_loads * profile.cycles(per_load_cycles)


def mfma_time(n_mfma_inst: float, utilization: float, profile: HardwareProfile,
              precision: Precision, flops_per_inst: float = 1.0) -> float:
    """Matrix-instruction issue time: n_inst / (CUs * per-CU throughput * util).

    Per-CU instruction throughput is derived from the sustained tensor rate;
    with the default flops_per_inst of 1 the instruction count is simply a
    FLOP count.
    """
    if n_mfma_inst < 0:
        raise ValueError("n_mfma_inst must be >= 0")
    if not 0.0 < utilization <= 1.0:
        raise ValueError("utilization must lie in (0, 1]")
    if flops_per_inst <= 0:
        raise ValueError("flops_per_inst must be > 0")
    inst_rate_per_cu = profile.sustained_flops(precision) / (
        profile.num_sm_or_cu * flops_per_inst
    )
    return n_mfma_inst / (profile.num_sm_or_cu * inst_rate_per_cu * utilization)


def step_time(t_memory_s: float, t_compute_s: float, eta: float) -> float:
    """Overlapped step: (memory + compute) / (1 + eta)."""
    if t_memory_s < 0 or t_compute_s < 0:
        raise ValueError("stage times must be >= 0")
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    return (t_memory_s + t_compute_s) / (1.0 + eta)


def _fixed_overheads(profile: HardwareProfile) -> float:
    return profile.coherence_s + profile.cross_xcd_s


def _interference(case: KernelCase, profile: HardwareProfile) -> float:
    return (case.n_concurrent - 1) * profile.tau_interf_s + (
        case.n_devices - 1
    ) * profile.tau_interf_gpu_s


def kernel_time(case: KernelCase, profile: HardwareProfile,
                params: CacheModelParams | None = None,
                mwp: int | None = None, cwp: int | None = None) -> PredictionBreakdown:
    """Total wavefront-model time for one CDNA-class kernel.

    launch + k_tiles * overlapped step + writeback + coherence + cross-die
    overheads + interference.  Memory cost uses the latency walk when a
    load count is characterised, otherwise bytes over the working-set
    effective bandwidth.
    """
    if params is None:
        params = CacheModelParams.from_profile(profile)
    if case.h_l1 is not None or case.h_l2 is not None:
        params = replace(
            params,
            h_l1=params.h_l1 if case.h_l1 is None else case.h_l1,
            h_l2=params.h_l2 if case.h_l2 is None else case.h_l2,
        )
    if case.k_tiles == 0 and (case.flops > 0 or case.bytes > 0 or case.n_loads > 0):
        raise ValueError("k_tiles = 0 is inconsistent with nonzero work")

    occ = vgpr_occupancy(case.vgpr_per_wavefront, mwp, cwp,
                         vgpr_file=profile.vgpr_file_per_cu,
                         max_wavefronts=profile.max_resident_warps)
    h_llc = llc_hit_rate(case.working_set, params)
    util = case.mfma_utilization
    if util is None:
        util = profile.mfma_utilization_default

    t_compute_total = mfma_time(case.flops, util, profile, case.precision)
    if case.n_loads > 0:
        t_memory_total = memory_time(case.n_loads, params, h_llc, profile)
    else:
        t_memory_total = case.bytes / effective_bandwidth(h_llc, profile)

    if case.k_tiles > 0:
        t_c_step = t_compute_total / case.k_tiles
        t_m_step = t_memory_total / case.k_tiles
        eta = overlap_factor(occ, t_c_step, t_m_step)
        core = case.k_tiles * step_time(t_m_step, t_c_step, eta)
    else:
        eta = 1.0
        core = 0.0

    out_bytes = 0.0
    if case.gemm is not None:
        out_bytes = case.gemm.m * case.gemm.n * PRECISION_BYTES[case.precision]
    t_writeback = out_bytes / profile.hbm_bw_sustained + (
        profile.store_setup_s if out_bytes > 0 else 0.0
    )

    t_launch = profile.launch_latency_s
    t_overhead = _fixed_overheads(profile)
    t_interf = _interference(case, profile)
    total = t_launch + core + t_writeback + t_overhead + t_interf
    return PredictionBreakdown(
        model_path=ModelPath.cdna_wavefront,
        total_s=total,
        t_compute_s=t_compute_total / (1.0 + eta),
        t_memory_or_io_s=t_memory_total / (1.0 + eta),
        t_launch_s=t_launch,
        t_writeback_s=t_writeback,
        t_overhead_s=t_overhead,
        t_interference_s=t_interf,
    )


@dataclass(frozen=True)
class TileCandidate:
    """One tile configuration for the occupancy-based CTA costing path.

    w_eff and tau_cta_s ship uncalibrated (1.0 and 0.0); fit them against
    measured sweeps before trusting absolute times from this path.
    """
    name: str
    flops_per_cta: float
    bytes_per_cta: float
    n_ctas: int
    w_eff: float = 1.0
    tau_cta_s: float = 0.0
    precision: Precision = Precision.fp64
    working_set_bytes: float = 0.0
    tile: TileDims | None = None

    def __post_init__(self) -> None:
        if self.flops_per_cta < 0 or self.bytes_per_cta < 0:
            raise ValueError("per-CTA work must be >= 0")
        if self.n_ctas < 1:
            raise ValueError("n_ctas must be >= 1")
        if self.w_eff <= 0:
            raise ValueError("w_eff must be > 0")
        if self.tau_cta_s < 0:
            raise ValueError("tau_cta_s must be >= 0")
        if self.working_set_bytes < 0:
            raise ValueError("working_set_bytes must be >= 0")


@dataclass(frozen=True)
class TileSelection:
    best: TileCandidate
    best_time_s: float
    evaluated: tuple[tuple[str, float], ...]


def occupancy_tile_kernel_time(candidate: TileCandidate, profile: HardwareProfile,
                               params: CacheModelParams | None = None) -> PredictionBreakdown:
    """CTA-granularity kernel time.

    Each CTA costs the slower of its FLOPs at a per-CU share of sustained
    throughput and its bytes at a per-CU share of effective bandwidth; CTAs
    spread over CUs with w_eff wavefront slots each, plus a per-CTA
    scheduling constant.
    """
    if params is None:
        params = CacheModelParams.from_profile(profile)
    h_llc = llc_hit_rate(candidate.working_set_bytes, params)
    n_cu = profile.num_sm_or_cu
    peak_cu = profile.sustained_flops(candidate.precision) / n_cu
    bw_cu = effective_bandwidth(h_llc, profile) / n_cu

    compute_cta = candidate.flops_per_cta / peak_cu
    memory_cta = candidate.bytes_per_cta / bw_cu
    t_step_cta = max(compute_cta, memory_cta)
    denom = n_cu * candidate.w_eff
    scheduled = candidate.n_ctas * t_step_cta / denom

    t_launch = profile.launch_latency_s
    t_sched = candidate.tau_cta_s * candidate.n_ctas
    t_overhead = t_sched + _fixed_overheads(profile)
    total = t_launch + scheduled + t_overhead
    return PredictionBreakdown(
        model_path=ModelPath.cdna_occupancy_tile,
        total_s=total,
        t_compute_s=candidate.n_ctas * compute_cta / denom,
        t_memory_or_io_s=candidate.n_ctas * memory_cta / denom,
        t_launch_s=t_launch,
        t_overhead_s=t_overhead,
    )


def select_tile(candidates: list[TileCandidate], profile: HardwareProfile,
                params: CacheModelParams | None = None) -> TileSelection:
    """Pick the candidate with the lowest predicted time (first wins ties)."""
    if not candidates:
        raise ValueError("select_tile requires at least one candidate")
    evaluated: list[tuple[str, float]] = []
    best: TileCandidate | None = None
    best_time = math.inf
    for cand in candidates:
        t = occupancy_tile_kernel_time(cand, profile, params).total_s
        evaluated.append((cand.name, t))
        if t < best_time:
            best, best_time = cand, t
    assert best is not None
    return TileSelection(best=best, best_time_s=best_time, evaluated=tuple(evaluated))


def fused_time(kernels: list[KernelCase], tau_fusion_s: float,
               profile: HardwareProfile,
               params: CacheModelParams | None = None) -> PredictionBreakdown:
    """Predict a fused kernel: summed FLOPs, bytes and loads, one launch,
    plus a fixed fusion overhead."""
    if len(kernels) < 2:
        raise ValueError("fused_time requires at least two kernels")
    if tau_fusion_s < 0:
        raise ValueError("tau_fusion_s must be >= 0")
    first = kernels[0]
    combined = KernelCase(
        kernel_class=first.kernel_class,
        flops=sum(k.flops for k in kernels),
        bytes=sum(k.bytes for k in kernels),
        working_set=max(k.working_set for k in kernels),
        precision=first.precision,
        k_tiles=first.k_tiles,
        vgpr_per_wavefront=first.vgpr_per_wavefront,
        h_l1=first.h_l1,
        h_l2=first.h_l2,
        n_loads=sum(k.n_loads for k in kernels),
        mfma_utilization=first.mfma_utilization,
        n_concurrent=first.n_concurrent,
        n_devices=first.n_devices,
    )
    base = kernel_time(combined, profile, params)
    return PredictionBreakdown(
        model_path=base.model_path,
        total_s=base.total_s + tau_fusion_s,
        t_compute_s=base.t_compute_s,
        t_memory_or_io_s=base.t_memory_or_io_s,
        t_sync_s=base.t_sync_s,
        t_launch_s=base.t_launch_s,
        t_writeback_s=base.t_writeback_s,
        t_overhead_s=base.t_overhead_s + tau_fusion_s,
        t_interference_s=base.t_interference_s,
        flags=base.flags,
    )
