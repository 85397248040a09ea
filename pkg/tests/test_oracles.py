"""Hand-evaluation oracles for every model operation.

Each check below re-derives one operation as straight-line arithmetic,
independent of the package implementation, and compares on randomized
inputs at a relative tolerance of 1e-12.  The whole sweep runs on every
operation with a fixed per-operation seed; run_all() is reused by the
acceptance suite to time it.
"""

from __future__ import annotations

import math
import random
import time
from typing import Callable

import pytest

from conftest import random_profile

from gpucast import blackwell, cdna, roofline, validation, workload
from gpucast.core import (
    GemmDims,
    HardwareProfile,
    KernelCase,
    KernelClass,
    PRECISION_BYTES,
    Precision,
    TileDims,
    cycles_to_seconds,
)

REL_TOL = 1e-12
TRIALS_PER_OP = 60

ORACLE_CHECKS: list[tuple[str, Callable[[random.Random], None]]] = []


def oracle_check(fn: Callable[[random.Random], None]) -> Callable[[random.Random], None]:
    ORACLE_CHECKS.append((fn.__name__.removeprefix("check_"), fn))
    return fn


def agree(got: float, want: float) -> None:
    assert math.isclose(got, want, rel_tol=REL_TOL), f"got {got!r}, oracle says {want!r}"


def sec(cycles: float, profile: HardwareProfile) -> float:
    return cycles / (profile.clock_ghz * 1e9)


# ---------------------------------------------------------------------------
# oracle formulas, written out independently of the package
# ---------------------------------------------------------------------------

def oracle_tmem(accum_bytes: float, p: HardwareProfile, prec: Precision) -> float:
    return (accum_bytes / p.tmem_bw_read + sec(p.mma_latency_cycles[prec], p)
            + accum_bytes / p.tmem_bw_write)


def oracle_tensor_compute(tile: TileDims, p: HardwareProfile, prec: Precision,
                          use_2sm: bool, k_tiles: float, acc: Precision) -> float:
    r_sm = p.tensor_peak[prec] / p.num_sm_or_cu
    s = p.s_2sm if use_2sm else 1.0
    t = (2.0 * tile.b_m * tile.b_n * tile.b_k / (r_sm * s)
         + oracle_tmem(tile.b_m * tile.b_n * PRECISION_BYTES[acc], p, prec))
    if k_tiles > 0:
        t += sec(p.tmem_alloc_cycles + p.tmem_dealloc_cycles, p) / k_tiles
    return t


def oracle_decomp(uncompressed: float, ratio: float, p: HardwareProfile,
                  prec: Precision | None) -> float:
    compressed = uncompressed / ratio
    t = max(compressed / (p.link_bw * p.de_efficiency), compressed / p.decomp_rate)
    if prec is Precision.fp4:
        t += compressed / p.decomp_rate + p.decomp_setup_s
    return t


def oracle_blackwell_kernel(case: KernelCase, p: HardwareProfile) -> float:
    tile = case.tile
    alpha = p.alpha_default if case.overlap_alpha is None else case.overlap_alpha
    acc = case.accum_precision or (
        Precision.fp64 if case.precision is Precision.fp64 else Precision.fp32
    )
    elem = PRECISION_BYTES[case.precision]
    t_compute = oracle_tensor_compute(tile, p, case.precision, case.use_2sm,
                                      case.k_tiles, acc)
    l_mma = sec(p.mma_latency_cycles[case.precision], p)
    a_bytes = tile.b_m * tile.b_k * elem
    b_bytes = tile.b_k * tile.b_n * elem
    commit = 0.0
    a_share, b_share = a_bytes, b_bytes
    if case.use_2sm:
        commit = case.k_tiles * sec(p.commit_latency_cycles, p) / case.k_tiles
        b_share = b_bytes / 2.0
    l_tma = sec(p.tma_latency_cycles, p)
    if case.tma_participants_b is None:
        t_tma = l_tma + (a_share + b_share) / (case.tma_participants * p.tma_bw)
        transfer = t_tma - l_tma
        n_issue = 1.0
    else:
        t_a = l_tma + a_share / (case.tma_participants * p.tma_bw)
        t_b = l_tma + b_share / (case.tma_participants_b * p.tma_bw)
        if case.pipelined:
            t_tma = max(t_a, t_b)
            transfer = t_tma - l_tma
            n_issue = 1.0
        else:
            t_tma = t_a + t_b
            transfer = t_tma - 2.0 * l_tma
            n_issue = 2.0
    t_dec = 0.0
    if case.use_decompression or case.precision is Precision.fp4:
        t_dec = oracle_decomp(a_share + b_share, case.compression_ratio, p,
                              case.precision)
    t_sync = case.n_bar * sec(p.mbar_latency_cycles, p) + commit
    if case.pipelined:
        step = max(transfer + n_issue * l_tma / case.k_tiles,
                   t_dec,
                   t_compute - l_mma + l_mma / case.k_tiles,
                   t_sync) + p.epsilon_pipeline_s
    else:
        io_eff = (1.0 - alpha) * (t_tma + t_dec) + t_sync
        step = max(t_compute, io_eff) + t_sync
    out_bytes = case.gemm.m * case.gemm.n * elem if case.gemm is not None else 0.0
    if case.use_tma_store:
        wb = l_tma + out_bytes / p.tma_bw
    else:
        wb = out_bytes / p.hbm_bw_sustained + p.store_setup_s
    interf = ((case.n_concurrent - 1) * p.tau_interf_s
              + (case.n_devices - 1) * p.tau_interf_gpu_s)
    return p.launch_latency_s + case.k_tiles * step + wb + interf


def oracle_llc(ws_bytes: float, alpha_exp: float, beta_exp: float) -> float:
    w = ws_bytes / 2.0 ** 20
    if w < 205.0:
        return 1.0
    if w <= 256.0:
        return (1.0 - (w - 205.0) / 51.0) ** alpha_exp
    return (256.0 / w) ** beta_exp


def oracle_memory_walk(n_loads: float, h1: float, h2: float, h_llc: float,
                       p: HardwareProfile) -> float:
    lat = p.cache_latency_cycles
    h_total = h1 + (1.0 - h1) * h2 + (1.0 - h1) * (1.0 - h2) * h_llc
    per = (h1 * lat["l1"] + (1.0 - h1) * h2 * lat["l2"]
           + (1.0 - h1) * (1.0 - h2) * h_llc * lat["llc"]
           + (1.0 - h_total) * lat["hbm"])
    return n_loads * sec(per, p)


def oracle_cdna_kernel(case: KernelCase, p: HardwareProfile,
                       mwp: int | None = None, cwp: int | None = None) -> float:
    h1 = p.h_l1_default if case.h_l1 is None else case.h_l1
    h2 = p.h_l2_default if case.h_l2 is None else case.h_l2
    n_eff = min(p.max_resident_warps, p.vgpr_file_per_cu // case.vgpr_per_wavefront)
    for limit in (mwp, cwp):
        if limit is not None:
            n_eff = min(n_eff, limit)
    h_llc = oracle_llc(case.working_set, p.cache_alpha_exp, p.cache_beta_exp)
    util = (case.mfma_utilization if case.mfma_utilization is not None
            else p.mfma_utilization_default)
    t_comp = case.flops / (p.num_sm_or_cu
                           * (p.tensor_sustained[case.precision] / p.num_sm_or_cu)
                           * util)
    if case.n_loads > 0:
        t_mem = oracle_memory_walk(case.n_loads, h1, h2, h_llc, p)
    else:
        t_mem = case.bytes / (h_llc * p.llc_bw + (1.0 - h_llc) * p.hbm_bw_sustained)
    if case.k_tiles > 0:
        tc, tm = t_comp / case.k_tiles, t_mem / case.k_tiles
        eta = 1.0 if tm == 0.0 else min(1.0, (n_eff - 1) * tc / tm)
        core = case.k_tiles * ((tm + tc) / (1.0 + eta))
    else:
        core = 0.0
    out = (case.gemm.m * case.gemm.n * PRECISION_BYTES[case.precision]
           if case.gemm is not None else 0.0)
    wb = out / p.hbm_bw_sustained + (p.store_setup_s if out > 0 else 0.0)
    interf = ((case.n_concurrent - 1) * p.tau_interf_s
              + (case.n_devices - 1) * p.tau_interf_gpu_s)
    return (p.launch_latency_s + core + wb + p.coherence_s + p.cross_xcd_s
            + interf)


def oracle_occupancy_tile(cand: cdna.TileCandidate, p: HardwareProfile) -> float:
    h_llc = oracle_llc(cand.working_set_bytes, p.cache_alpha_exp, p.cache_beta_exp)
    peak_cu = p.tensor_sustained[cand.precision] / p.num_sm_or_cu
    bw_cu = (h_llc * p.llc_bw + (1.0 - h_llc) * p.hbm_bw_sustained) / p.num_sm_or_cu
    per_cta = max(cand.flops_per_cta / peak_cu, cand.bytes_per_cta / bw_cu)
    scheduled = cand.n_ctas * per_cta / (p.num_sm_or_cu * cand.w_eff)
    return (p.launch_latency_s + scheduled + cand.tau_cta_s * cand.n_ctas
            + p.coherence_s + p.cross_xcd_s)


def oracle_generic(case: KernelCase, p: HardwareProfile, scale: float,
                   mult: float, w0: float) -> float:
    if w0 <= 0:
        bw = p.hbm_bw_sustained
    else:
        bw = p.hbm_bw_sustained + (p.hbm_bw_peak - p.hbm_bw_sustained) * math.exp(
            -case.working_set / w0)
    t_compute = scale * (case.flops / (p.tensor_sustained[case.precision] * mult))
    t_memory = scale * (case.bytes / bw)
    return (max(t_compute, t_memory) + case.n_kernels * p.launch_latency_s
            + (case.n_concurrent - 1) * p.tau_interf_s
            + (case.n_devices - 1) * p.tau_interf_gpu_s)


# ---------------------------------------------------------------------------
# randomized inputs
# ---------------------------------------------------------------------------

def random_blackwell_case(rng: random.Random) -> KernelCase:
    gemm = None
    if rng.random() < 0.4:
        gemm = GemmDims(rng.randint(256, 8192), rng.randint(256, 8192),
                        rng.randint(256, 8192))
    return KernelCase(
        kernel_class=KernelClass.compute_bound,
        precision=rng.choice(list(Precision)),
        gemm=gemm,
        tile=TileDims(rng.choice([32, 64, 128]), rng.choice([32, 64, 128, 256]),
                      rng.choice([16, 32, 64])),
        k_tiles=rng.uniform(1.0, 5000.0),
        tma_participants=rng.randint(1, 4),
        tma_participants_b=rng.randint(1, 4) if rng.random() < 0.5 else None,
        overlap_alpha=rng.random() if rng.random() < 0.5 else None,
        n_bar=rng.randint(0, 4),
        use_2sm=rng.random() < 0.5,
        pipelined=rng.random() < 0.7,
        use_decompression=rng.random() < 0.3,
        compression_ratio=rng.uniform(1.0, 8.0),
        use_tma_store=rng.random() < 0.3,
        n_concurrent=rng.randint(1, 8),
        n_devices=rng.randint(1, 4),
    )


def random_cdna_case(rng: random.Random) -> KernelCase:
    gemm = None
    if rng.random() < 0.4:
        gemm = GemmDims(rng.randint(64, 4096), rng.randint(64, 4096),
                        rng.randint(64, 4096))
    return KernelCase(
        kernel_class=KernelClass.compute_bound,
        flops=rng.uniform(1e6, 1e13),
        bytes=rng.uniform(1e3, 1e11),
        working_set=rng.uniform(0.0, 6e8),
        precision=rng.choice(list(Precision)),
        gemm=gemm,
        k_tiles=rng.choice([0.0, rng.uniform(1.0, 2000.0)]) if rng.random() < 0.1
        else rng.uniform(1.0, 2000.0),
        vgpr_per_wavefront=rng.choice([256, 512, 1024, 2048, 4096]),
        h_l1=rng.random() if rng.random() < 0.3 else None,
        h_l2=rng.random() if rng.random() < 0.3 else None,
        n_loads=rng.uniform(1e3, 1e9) if rng.random() < 0.5 else 0.0,
        mfma_utilization=rng.uniform(0.1, 1.0) if rng.random() < 0.5 else None,
        n_concurrent=rng.randint(1, 8),
        n_devices=rng.randint(1, 4),
    )


def _fix_zero_work(case: KernelCase) -> KernelCase:
    # k_tiles = 0 with nonzero work is rejected by the engine; zero the work
    if case.k_tiles == 0.0:
        import dataclasses
        return dataclasses.replace(case, flops=0.0, bytes=0.0, n_loads=0.0)
    return case


# ---------------------------------------------------------------------------
# operation checks
# ---------------------------------------------------------------------------

@oracle_check
def check_cycles_to_seconds(rng: random.Random) -> None:
    c, g = rng.uniform(0.0, 1e4), rng.uniform(0.1, 4.0)
    agree(cycles_to_seconds(c, g), c / (g * 1e9))


@oracle_check
def check_tmem_tile_time(rng: random.Random) -> None:
    p = random_profile(rng)
    prec = rng.choice(list(Precision))
    accum = rng.uniform(0.0, 5e5)
    got = blackwell.tmem_tile_time(accum, p, prec)
    agree(got.seconds, oracle_tmem(accum, p, prec))
    assert got.spilled == (accum > p.tmem_or_lds_per_sm)


@oracle_check
def check_tensor_compute_time(rng: random.Random) -> None:
    p = random_profile(rng)
    prec = rng.choice(list(Precision))
    acc = rng.choice([Precision.fp32, Precision.fp64])
    tile = TileDims(rng.randint(16, 256), rng.randint(16, 256), rng.randint(8, 128))
    use_2sm = rng.random() < 0.5
    k = rng.choice([0.0, rng.uniform(1.0, 1e4)])
    got = blackwell.tensor_compute_time(tile, p, prec, use_2sm, k, acc)
    agree(got, oracle_tensor_compute(tile, p, prec, use_2sm, k, acc))


@oracle_check
def check_tma_time(rng: random.Random) -> None:
    p = random_profile(rng)
    n, part = rng.uniform(0.0, 1e7), rng.randint(1, 8)
    agree(blackwell.tma_time(n, part, p),
          sec(p.tma_latency_cycles, p) + n / (part * p.tma_bw))


@oracle_check
def check_decompression_time(rng: random.Random) -> None:
    p = random_profile(rng)
    n, ratio = rng.uniform(0.0, 1e10), rng.uniform(1.0, 16.0)
    prec = rng.choice([None, Precision.fp16, Precision.fp4])
    agree(blackwell.decompression_time(n, ratio, p, prec),
          oracle_decomp(n, ratio, p, prec))


@oracle_check
def check_sync_time(rng: random.Random) -> None:
    p = random_profile(rng)
    n = rng.randint(0, 16)
    agree(blackwell.sync_time(n, p), n * sec(p.mbar_latency_cycles, p))


@oracle_check
def check_cta_pair_memory(rng: random.Random) -> None:
    p = random_profile(rng)
    a, b, k = rng.uniform(0.0, 1e6), rng.uniform(0.0, 1e6), rng.uniform(0.0, 1e4)
    got = blackwell.cta_pair_memory(a, b, p, k)
    agree(got.traffic_bytes, 2.0 * a + b)
    agree(got.t_memory_s, (2.0 * a + b) / p.tma_bw)
    agree(got.t_commit_s, k * sec(p.commit_latency_cycles, p))


@oracle_check
def check_effective_io_time(rng: random.Random) -> None:
    tma, dec, sync = (rng.uniform(0.0, 1e-3) for _ in range(3))
    alpha = rng.random()
    agree(blackwell.effective_io_time(tma, dec, sync, alpha),
          (1.0 - alpha) * (tma + dec) + sync)


@oracle_check
def check_writeback_time(rng: random.Random) -> None:
    p = random_profile(rng)
    n = rng.uniform(0.0, 1e10)
    agree(blackwell.writeback_time(n, p), n / p.hbm_bw_sustained + p.store_setup_s)
    agree(blackwell.writeback_time(n, p, via_tma=True),
          sec(p.tma_latency_cycles, p) + n / p.tma_bw)


@oracle_check
def check_blackwell_step_time(rng: random.Random) -> None:
    p = random_profile(rng)
    stages = blackwell.BlackwellStageTimes(
        t_compute_s=rng.uniform(0.0, 1e-4), t_tma_s=rng.uniform(0.0, 1e-4),
        t_decomp_s=rng.uniform(0.0, 1e-4), t_sync_s=rng.uniform(0.0, 1e-5))
    alpha, misc = rng.random(), rng.uniform(0.0, 1e-6)
    agree(blackwell.step_time(stages, p, alpha, pipelined=True),
          max(stages.t_tma_s, stages.t_decomp_s, stages.t_compute_s,
              stages.t_sync_s) + p.epsilon_pipeline_s)
    io = (1.0 - alpha) * (stages.t_tma_s + stages.t_decomp_s) + stages.t_sync_s
    agree(blackwell.step_time(stages, p, alpha, pipelined=False, o_misc_s=misc),
          max(stages.t_compute_s, io) + stages.t_sync_s + misc)


@oracle_check
def check_blackwell_kernel_time(rng: random.Random) -> None:
    p = random_profile(rng)
    case = random_blackwell_case(rng)
    agree(blackwell.kernel_time(case, p).total_s, oracle_blackwell_kernel(case, p))


@oracle_check
def check_vgpr_occupancy(rng: random.Random) -> None:
    v = rng.randint(1, 8192)
    vfile, wmax = rng.choice([32768, 65536, 131072]), rng.randint(4, 64)
    mwp = rng.randint(1, 64) if rng.random() < 0.5 else None
    cwp = rng.randint(1, 64) if rng.random() < 0.5 else None
    if vfile // v < 1:
        return
    got = cdna.vgpr_occupancy(v, mwp, cwp, vgpr_file=vfile, max_wavefronts=wmax)
    want_active = min(wmax, vfile // v)
    want_eff = want_active
    for limit in (mwp, cwp):
        if limit is not None:
            want_eff = min(want_eff, limit)
    assert got.n_wf_active == want_active and got.n_wf_eff == want_eff


@oracle_check
def check_overlap_factor(rng: random.Random) -> None:
    occ = cdna.vgpr_occupancy(rng.choice([512, 1024, 2048, 4096]))
    tc, tm = rng.uniform(0.0, 1e-3), rng.choice([0.0, rng.uniform(1e-9, 1e-3)])
    want = 1.0 if tm == 0.0 else min(1.0, (occ.n_wf_eff - 1) * tc / tm)
    agree(cdna.overlap_factor(occ, tc, tm), want)


@oracle_check
def check_llc_hit_rate(rng: random.Random) -> None:
    a_exp, b_exp = rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0)
    params = cdna.CacheModelParams(alpha_exp=a_exp, beta_exp=b_exp)
    ws = rng.uniform(0.0, 1e9)
    agree(cdna.llc_hit_rate(ws, params), oracle_llc(ws, a_exp, b_exp))


@oracle_check
def check_effective_bandwidth(rng: random.Random) -> None:
    p = random_profile(rng)
    h = rng.random()
    agree(cdna.effective_bandwidth(h, p),
          h * p.llc_bw + (1.0 - h) * p.hbm_bw_sustained)


@oracle_check
def check_memory_time(rng: random.Random) -> None:
    p = random_profile(rng)
    h1, h2, h_llc = rng.random(), rng.random(), rng.random()
    params = cdna.CacheModelParams(h_l1=h1, h_l2=h2)
    n = rng.uniform(0.0, 1e9)
    agree(cdna.memory_time(n, params, h_llc, p),
          oracle_memory_walk(n, h1, h2, h_llc, p))


@oracle_check
def check_mfma_time(rng: random.Random) -> None:
    p = random_profile(rng)
    prec = rng.choice(list(Precision))
    n, util, fpi = rng.uniform(0.0, 1e13), rng.uniform(0.1, 1.0), rng.choice(
        [1.0, 64.0, 256.0])
    agree(cdna.mfma_time(n, util, p, prec, flops_per_inst=fpi),
          n * fpi / (p.tensor_sustained[prec] * util))


@oracle_check
def check_cdna_step_time(rng: random.Random) -> None:
    tm, tc, eta = rng.uniform(0.0, 1e-3), rng.uniform(0.0, 1e-3), rng.random()
    agree(cdna.step_time(tm, tc, eta), (tm + tc) / (1.0 + eta))


@oracle_check
def check_cdna_kernel_time(rng: random.Random) -> None:
    p = random_profile(rng)
    case = _fix_zero_work(random_cdna_case(rng))
    mwp = rng.randint(1, 32) if rng.random() < 0.3 else None
    cwp = rng.randint(1, 32) if rng.random() < 0.3 else None
    got = cdna.kernel_time(case, p, mwp=mwp, cwp=cwp)
    agree(got.total_s, oracle_cdna_kernel(case, p, mwp, cwp))


@oracle_check
def check_occupancy_tile_kernel_time(rng: random.Random) -> None:
    p = random_profile(rng)
    cand = cdna.TileCandidate(
        name="t", flops_per_cta=rng.uniform(0.0, 1e9),
        bytes_per_cta=rng.uniform(0.0, 1e7), n_ctas=rng.randint(1, 100000),
        w_eff=rng.uniform(0.5, 4.0), tau_cta_s=rng.uniform(0.0, 1e-7),
        precision=rng.choice(list(Precision)),
        working_set_bytes=rng.uniform(0.0, 6e8))
    agree(cdna.occupancy_tile_kernel_time(cand, p).total_s,
          oracle_occupancy_tile(cand, p))


@oracle_check
def check_fused_time(rng: random.Random) -> None:
    p = random_profile(rng)
    kernels = [
        KernelCase(kernel_class=KernelClass.memory_bound,
                   flops=rng.uniform(1e6, 1e10), bytes=rng.uniform(1e4, 1e9),
                   working_set=rng.uniform(0.0, 4e8), precision=Precision.fp32)
        for _ in range(rng.randint(2, 5))
    ]
    tau = rng.uniform(0.0, 1e-5)
    combined = KernelCase(
        kernel_class=KernelClass.memory_bound,
        flops=sum(k.flops for k in kernels), bytes=sum(k.bytes for k in kernels),
        working_set=max(k.working_set for k in kernels), precision=Precision.fp32)
    agree(cdna.fused_time(kernels, tau, p).total_s,
          oracle_cdna_kernel(combined, p) + tau)


@oracle_check
def check_naive_roofline(rng: random.Random) -> None:
    p = random_profile(rng)
    prec = rng.choice(list(Precision))
    f, n = rng.uniform(0.0, 1e14), rng.uniform(0.0, 1e12)
    got = roofline.naive_roofline(f, n, p, prec)
    agree(got.total_s, max(f / p.tensor_peak[prec], n / p.hbm_bw_peak))


@oracle_check
def check_working_set_bandwidth(rng: random.Random) -> None:
    p = random_profile(rng)
    ws = rng.uniform(0.0, 1e10)
    w0 = rng.choice([-1.0, 0.0, rng.uniform(1e6, 1e9)])
    if w0 <= 0:
        want = p.hbm_bw_sustained
    else:
        want = p.hbm_bw_sustained + (p.hbm_bw_peak - p.hbm_bw_sustained) * math.exp(
            -ws / w0)
    agree(roofline.working_set_bandwidth(ws, p, w0), want)


@oracle_check
def check_generic_predict(rng: random.Random) -> None:
    p = random_profile(rng)
    case = KernelCase(
        kernel_class=rng.choice(list(KernelClass)),
        flops=rng.uniform(0.0, 1e13), bytes=rng.uniform(0.0, 1e11),
        working_set=rng.uniform(0.0, 1e10), precision=rng.choice(list(Precision)),
        n_kernels=rng.randint(1, 5), n_concurrent=rng.randint(1, 8),
        n_devices=rng.randint(1, 4))
    scale, mult = rng.uniform(0.5, 3.0), rng.uniform(0.2, 1.0)
    params = roofline.GenericPathParams(
        class_scales={case.kernel_class: scale},
        precision_multipliers={case.precision: mult},
        w0_bytes=p.w0_bytes)
    agree(roofline.generic_predict(case, p, params).total_s,
          oracle_generic(case, p, scale, mult, p.w0_bytes))


@oracle_check
def check_memcpy_time(rng: random.Random) -> None:
    p = random_profile(rng)
    n = rng.uniform(0.0, 1e11)
    agree(roofline.memcpy_time(n, "h2d", p), n / p.memcpy_bw_h2d + p.tau_memcpy_s)
    agree(roofline.memcpy_time(n, "d2h", p), n / p.memcpy_bw_d2h + p.tau_memcpy_s)


@oracle_check
def check_host_sync_time(rng: random.Random) -> None:
    p = random_profile(rng)
    n = rng.randint(0, 1000)
    agree(roofline.host_sync_time(n, p), n * p.tau_sync_s)


@oracle_check
def check_relative_error_pct(rng: random.Random) -> None:
    pred, meas = rng.uniform(0.0, 10.0), rng.uniform(1e-6, 10.0)
    agree(validation.relative_error_pct(pred, meas),
          abs(pred - meas) / meas * 100.0)


@oracle_check
def check_mae_pct(rng: random.Random) -> None:
    errs = [rng.uniform(0.0, 100.0) for _ in range(rng.randint(1, 20))]
    agree(validation.mae_pct(errs), sum(errs) / len(errs))


@oracle_check
def check_aggregate_generic(rng: random.Random) -> None:
    p = random_profile(rng)
    segments = []
    want = 0.0
    for i in range(rng.randint(1, 4)):
        seg = workload.WorkloadSegment(
            name=f"s{i}", kernel_class=rng.choice(
                [KernelClass.memory_bound, KernelClass.balanced,
                 KernelClass.stencil]),
            flops=rng.uniform(0.0, 1e12), bytes=rng.uniform(0.0, 1e10),
            working_set=rng.uniform(0.0, 1e9),
            n_exec=rng.randint(1, 50), n_kernels=rng.randint(1, 3),
            precision=rng.choice(list(Precision)),
            memcpy=(workload.MemcpyEpisode(
                bytes=rng.uniform(0.0, 1e9),
                direction=rng.choice(["h2d", "d2h"]),
                count=rng.randint(1, 4)),) if rng.random() < 0.5 else (),
            syncs=rng.randint(0, 5))
        segments.append(seg)
        case = KernelCase(kernel_class=seg.kernel_class, flops=seg.flops,
                          bytes=seg.bytes, working_set=seg.working_set,
                          precision=seg.precision, n_kernels=seg.n_kernels)
        kernel = oracle_generic(case, p, 1.0, 1.0, p.w0_bytes)
        memcpy = sum(
            ep.count * (ep.bytes / (p.memcpy_bw_h2d if ep.direction == "h2d"
                                    else p.memcpy_bw_d2h) + p.tau_memcpy_s)
            for ep in seg.memcpy)
        want += seg.n_exec * kernel + seg.n_exec * memcpy + (
            seg.n_exec * seg.syncs * p.tau_sync_s)
    segfile = workload.SegmentFile(benchmark="b", platform="p",
                                   segments=tuple(segments))
    agree(workload.aggregate(segfile, p).total_s, want)


@oracle_check
def check_naive_roofline_total(rng: random.Random) -> None:
    p = random_profile(rng)
    gemm = GemmDims(rng.randint(64, 2048), rng.randint(64, 2048),
                    rng.randint(64, 2048))
    seg_a = workload.WorkloadSegment(
        name="a", kernel_class=KernelClass.memory_bound,
        flops=rng.uniform(1.0, 1e12), bytes=rng.uniform(1.0, 1e10),
        n_exec=rng.randint(1, 20), precision=rng.choice(list(Precision)))
    seg_b = workload.WorkloadSegment(
        name="b", kernel_class=KernelClass.compute_bound, flops=0.0,
        bytes=rng.uniform(1.0, 1e9), gemm=gemm, n_exec=rng.randint(1, 20),
        precision=rng.choice(list(Precision)))
    segfile = workload.SegmentFile(benchmark="b", platform="p",
                                   segments=(seg_a, seg_b))
    want = seg_a.n_exec * max(seg_a.flops / p.tensor_peak[seg_a.precision],
                              seg_a.bytes / p.hbm_bw_peak)
    want += seg_b.n_exec * max(
        2.0 * gemm.m * gemm.n * gemm.k / p.tensor_peak[seg_b.precision],
        seg_b.bytes / p.hbm_bw_peak)
    agree(workload.naive_roofline_total(segfile, p), want)


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def run_all(trials_per_op: int = TRIALS_PER_OP,
            seed: str = "oracle") -> tuple[int, int, float]:
    """Run every oracle sweep; returns (n_ops, trials_per_op, elapsed_s)."""
    start = time.perf_counter()
    for name, check in ORACLE_CHECKS:
        rng = random.Random(f"{seed}:{name}")
        for _ in range(trials_per_op):
            check(rng)
    return len(ORACLE_CHECKS), trials_per_op, time.perf_counter() - start


@pytest.mark.parametrize("name,check", ORACLE_CHECKS,
                         ids=[name for name, _ in ORACLE_CHECKS])
def test_operation_matches_oracle(name: str, check) -> None:
    rng = random.Random(f"oracle:{name}")
    for _ in range(TRIALS_PER_OP):
        check(rng)


def test_every_public_operation_has_an_oracle() -> None:
    covered = {name for name, _ in ORACLE_CHECKS}
    assert len(covered) == len(ORACLE_CHECKS), "duplicate oracle names"
    assert len(covered) >= 28
