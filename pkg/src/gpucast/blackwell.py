"""Stage-based execution-time model for NVIDIA Blackwell-class GPUs.

A tiled tensor-core kernel is decomposed into per-K-step stages: tensor
instruction issue, accumulator traffic through tensor memory (TMEM),
asynchronous bulk copies (TMA), optional decompression, and barrier
synchronisation.  A kernel is launch + k_tiles steps + writeback, where a
step is either the serial form max(compute, residual IO) + sync + misc,
or, for software-pipelined kernels, the steady-state form
max(stage times) + epsilon with one-shot issue latencies amortised over
the K loop.
"""

from __future__ import annotations

from dataclasses import dataclass

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
    "TmemTime",
    "CtaPairTraffic",
    "BlackwellStageTimes",
    "tmem_tile_time",
    "tensor_compute_time",
    "tma_time",
    "decompression_time",
    "sync_time",
    "cta_pair_memory",
    "effective_io_time",
    "writeback_time",
    "step_time",
    "kernel_time",
    "accum_precision_for",
]


@dataclass(frozen=True)
class TmemTime:
    seconds: float
    spilled: bool


@dataclass(frozen=True)
class CtaPairTraffic:
    traffic_bytes: float
    t_memory_s: float
    t_commit_s: float


@dataclass(frozen=True)
class BlackwellStageTimes:
    """Per-step stage times feeding :func:`step_time`."""
    t_compute_s: float
    t_tma_s: float
    t_decomp_s: float
    t_sync_s: float


def accum_precision_for(precision: Precision) -> Precision:
    """Default accumulator precision: fp64 stays fp64, everything else fp32."""
    return Precision.fp64 if precision is Precision.fp64 else Precision.fp32


def tmem_tile_time(accum_bytes: float, profile: HardwareProfile,
                   precision: Precision) -> TmemTime:
    """Accumulator read + instruction issue + accumulator write for one step.

    accum_bytes/bw_read + mma_latency + accum_bytes/bw_write.  If the
    accumulator tile exceeds per-SM tensor-memory capacity, the result is
    still computed but flagged as spilled.
    """
    if accum_bytes < 0:
        raise ValueError("accum_bytes must be >= 0")
    t = (
        accum_bytes / profile.tmem_bw_read
        + profile.cycles(profile.mma_latency(precision))
        + accum_bytes / profile.tmem_bw_write
    )
    return TmemTime(seconds=t, spilled=accum_bytes > profile.tmem_or_lds_per_sm)


def _mgmt_amortized(profile: HardwareProfile, k_tiles: float) -> float:
    # allocate/deallocate once per kernel, spread across the K loop
    if k_tiles <= 0:
        return 0.0
    return profile.cycles(profile.tmem_alloc_cycles + profile.tmem_dealloc_cycles) / k_tiles


def tensor_compute_time(tile: TileDims, profile: HardwareProfile,
                        precision: Precision, use_2sm: bool = False,
                        k_tiles: float = 0.0,
                        accum_precision: Precision | None = None) -> float:
    """Per-step compute time for one output tile's K-slice.

    2*b_m*b_n*b_k / (per-SM tensor throughput * pair speedup) plus the
    tensor-memory tile time and the amortised TMEM management cost.
    Tensor throughput is the datasheet peak for the precision; losses the
    stage model accounts for explicitly (TMEM, TMA, sync) must not be
    double-counted through a sustained value here.
    """
    r_sm = profile.peak_flops(precision) / profile.num_sm_or_cu
    s_mode = profile.s_2sm if use_2sm else 1.0
    mma = 2.0 * tile.b_m * tile.b_n * tile.b_k / (r_sm * s_mode)
    acc = accum_precision or accum_precision_for(precision)
    accum_bytes = tile.b_m * tile.b_n * PRECISION_BYTES[acc]
    tmem = tmem_tile_time(accum_bytes, profile, precision)
    return mma + tmem.seconds + _mgmt_amortized(profile, k_tiles)


def tma_time(tile_bytes: float, participants: int, profile: HardwareProfile) -> float:
    """One TMA transfer: issue latency plus bytes over the multicast width."""
    if participants < 1:
        raise ValueError("participants must be >= 1")
    if tile_bytes < 0:
        raise ValueError("tile_bytes must be >= 0")
    return profile.cycles(profile.tma_latency_cycles) + tile_bytes / (
        participants * profile.tma_bw
    )


def decompression_time(uncompressed_bytes: float, compression_ratio: float,
                       profile: HardwareProfile,
                       precision: Precision | None = None) -> float:
    """Time to move and expand a compressed tile.

    The compressed payload (uncompressed/ratio) crosses the die link at
    link_bw derated by the decompressor efficiency, bounded below by the
    decompressor's own throughput: max of the two.  Sub-byte formats add
    an unpack pass at the decompressor rate.
    """
    if uncompressed_bytes < 0:
        raise ValueError("uncompressed_bytes must be >= 0")
    if compression_ratio < 1.0:
        raise ValueError("compression_ratio must be >= 1")
    compressed = uncompressed_bytes / compression_ratio
    t = max(
        compressed / (profile.link_bw * profile.de_efficiency),
        compressed / profile.decomp_rate,
    )
    if precision is not None and precision.is_sub_byte:
        t += compressed / profile.decomp_rate + profile.decomp_setup_s
    return t


def sync_time(n_barriers: int, profile: HardwareProfile) -> float:
    """Barrier cost per step: n_barriers * mbarrier latency."""
    if n_barriers < 0:
        raise ValueError("n_barriers must be >= 0")
    return n_barriers * profile.cycles(profile.mbar_latency_cycles)


def cta_pair_memory(m_a_bytes: float, m_b_bytes: float, profile: HardwareProfile,
                    k_tiles: float) -> CtaPairTraffic:
    """Shared-operand traffic for a 2-CTA pair.

    The pair loads the A operand per CTA but shares B: 2*M_A + M_B, versus
    2*(M_A + M_B) for two independent CTAs.  Transfer time uses the bulk
    copy bandwidth; commit barriers cost k_tiles * commit latency.
    """
    if m_a_bytes < 0 or m_b_bytes < 0:
        raise ValueError("operand byte counts must be >= 0")
    if k_tiles < 0:
        raise ValueError("k_tiles must be >= 0")
    traffic = 2.0 * m_a_bytes + m_b_bytes
    return CtaPairTraffic(
        traffic_bytes=traffic,
        t_memory_s=traffic / profile.tma_bw,
        t_commit_s=k_tiles * profile.cycles(profile.commit_latency_cycles),
    )


def effective_io_time(t_tma_s: float, t_decomp_s: float, t_sync_s: float,
                      alpha: float) -> float:
    """Residual IO time after overlapping a fraction alpha with compute."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    for name, v in (("t_tma_s", t_tma_s), ("t_decomp_s", t_decomp_s),
                    ("t_sync_s", t_sync_s)):
        if v < 0:
            raise ValueError(f"{name} must be >= 0")
    return (1.0 - alpha) * (t_tma_s + t_decomp_s) + t_sync_s


def writeback_time(result_bytes: float, profile: HardwareProfile,
                   via_tma: bool = False) -> float:
    """Result store cost: bulk TMA store, or global stores at sustained HBM
    bandwidth plus a store-setup constant."""
    if result_bytes < 0:
        raise ValueError("result_bytes must be >= 0")
    if via_tma:
        return profile.cycles(profile.tma_latency_cycles) + result_bytes / profile.tma_bw
    return result_bytes / profile.hbm_bw_sustained + profile.store_setup_s


def step_time(stages: BlackwellStageTimes, profile: HardwareProfile,
              alpha: float, pipelined: bool = False,
              o_misc_s: float = 0.0) -> float:
    """One K-step.

    Serial form: max(compute, residual IO) + sync + misc.  Pipelined form:
    the step is the slowest stage plus a small residual epsilon.
    """
    if o_misc_s < 0:
        raise ValueError("o_misc_s must be >= 0")
    if pipelined:
        return max(stages.t_tma_s, stages.t_decomp_s, stages.t_compute_s,
                   stages.t_sync_s) + profile.epsilon_pipeline_s
    io_eff = effective_io_time(stages.t_tma_s, stages.t_decomp_s, stages.t_sync_s, alpha)
    return max(stages.t_compute_s, io_eff) + stages.t_sync_s + o_misc_s


def _operand_bytes(tile: TileDims, precision: Precision) -> tuple[float, float]:
    size = PRECISION_BYTES[precision]
    return tile.b_m * tile.b_k * size, tile.b_k * tile.b_n * size


def kernel_time(case: KernelCase, profile: HardwareProfile) -> PredictionBreakdown:
    """Total stage-model time for one Blackwell-class kernel.

    launch + k_tiles * step + writeback + interference.  Pipelined kernels
    amortise the one-shot TMA and instruction issue latencies over the K
    loop before taking the steady-state max; serial kernels charge them
    every step.
    """
    if case.tile is None:
        raise ValueError("blackwell path requires tile dimensions")
    if case.k_tiles <= 0:
        raise ValueError("blackwell path requires k_tiles > 0")
    tile = case.tile
    alpha = profile.alpha_default if case.overlap_alpha is None else case.overlap_alpha
    flags: list[str] = []

    # compute stage
    acc_prec = case.accum_precision or accum_precision_for(case.precision)
    accum_bytes = tile.b_m * tile.b_n * PRECISION_BYTES[acc_prec]
    tmem = tmem_tile_time(accum_bytes, profile, case.precision)
    if tmem.spilled:
        flags.append(
            f"tmem_spill: accumulator tile {accum_bytes:.0f} B exceeds "
            f"{profile.tmem_or_lds_per_sm:.0f} B per SM"
        )
    t_compute = tensor_compute_time(tile, profile, case.precision, case.use_2sm,
                                    case.k_tiles, acc_prec)
    l_mma = profile.cycles(profile.mma_latency(case.precision))

    # IO stage: operand tiles per step, pair-shared when 2-SM mode is on
    a_bytes, b_bytes = _operand_bytes(tile, case.precision)
    commit_s = 0.0
    if case.use_2sm:
        # the pair shares the B operand: per-CTA traffic (2*M_A + M_B)/2
        pair = cta_pair_memory(a_bytes, b_bytes, profile, case.k_tiles)
        commit_s = pair.t_commit_s / case.k_tiles
        a_share, b_share = a_bytes, b_bytes / 2.0
    else:
        a_share, b_share = a_bytes, b_bytes

    l_tma = profile.cycles(profile.tma_latency_cycles)
    if case.tma_participants_b is None:
        t_tma = tma_time(a_share + b_share, case.tma_participants, profile)
        tma_transfer = t_tma - l_tma
        n_tma_issues = 1.0
    else:
        t_a = tma_time(a_share, case.tma_participants, profile)
        t_b = tma_time(b_share, case.tma_participants_b, profile)
        if case.pipelined:
            t_tma = max(t_a, t_b)
            tma_transfer = t_tma - l_tma
            n_tma_issues = 1.0
        else:
            t_tma = t_a + t_b
            tma_transfer = t_tma - 2.0 * l_tma
            n_tma_issues = 2.0

    t_decomp = 0.0
    if case.use_decompression or case.precision.is_sub_byte:
        t_decomp = decompression_time(a_share + b_share, case.compression_ratio,
                                      profile, case.precision)

    t_sync = sync_time(case.n_bar, profile) + commit_s

    if case.pipelined:
        # steady state: one-shot issue latencies are pipeline fill, spread
        # over the K loop alongside the TMEM management cost
        steady = BlackwellStageTimes(
            t_compute_s=t_compute - l_mma + l_mma / case.k_tiles,
            t_tma_s=tma_transfer + n_tma_issues * l_tma / case.k_tiles,
            t_decomp_s=t_decomp,
            t_sync_s=t_sync,
        )
        step = step_time(steady, profile, alpha, pipelined=True)
        per_step_sync = 0.0
        per_step_overhead = profile.epsilon_pipeline_s
        io_term = max(steady.t_tma_s, steady.t_decomp_s, steady.t_sync_s)
        compute_term = steady.t_compute_s
    else:
        stages = BlackwellStageTimes(t_compute_s=t_compute, t_tma_s=t_tma,
                                     t_decomp_s=t_decomp, t_sync_s=t_sync)
        step = step_time(stages, profile, alpha, pipelined=False)
        per_step_sync = t_sync
        per_step_overhead = 0.0
        io_term = effective_io_time(t_tma, t_decomp, t_sync, alpha)
        compute_term = t_compute

    out_bytes = 0.0
    if case.gemm is not None:
        out_bytes = case.gemm.m * case.gemm.n * PRECISION_BYTES[case.precision]
    t_writeback = writeback_time(out_bytes, profile, via_tma=case.use_tma_store)

    t_launch = profile.launch_latency_s
    t_interf = (case.n_concurrent - 1) * profile.tau_interf_s + (
        case.n_devices - 1
    ) * profile.tau_interf_gpu_s

    total = t_launch + case.k_tiles * step + t_writeback + t_interf
    return PredictionBreakdown(
        model_path=ModelPath.blackwell_stage,
        total_s=total,
        t_compute_s=case.k_tiles * compute_term,
        t_memory_or_io_s=case.k_tiles * io_term,
        t_sync_s=case.k_tiles * per_step_sync,
        t_launch_s=t_launch,
        t_writeback_s=t_writeback,
        t_overhead_s=case.k_tiles * per_step_overhead,
        t_interference_s=t_interf,
        flags=tuple(flags),
    )
