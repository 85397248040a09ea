"""Stage-model behaviour with hand-computed expected times.

Expected values are worked out on the synthetic 1 GHz testcard profile
(see conftest) so every constant below can be checked with a pocket
calculator.
"""

from __future__ import annotations

import math

import pytest

from gpucast import blackwell
from gpucast.core import (
    GemmDims,
    KernelCase,
    KernelClass,
    ModelPath,
    Precision,
    TileDims,
    load_profile,
)

REL = 1e-12


def test_accumulator_precision_defaults():
    assert blackwell.accum_precision_for(Precision.fp64) is Precision.fp64
    assert blackwell.accum_precision_for(Precision.fp16) is Precision.fp32
    assert blackwell.accum_precision_for(Precision.fp8) is Precision.fp32


def test_tmem_tile_time_hand_value(testcard):
    # 65536/1.6e13 + 12 cycles + 65536/8e12 = 4.096 + 12 + 8.192 ns
    got = blackwell.tmem_tile_time(65536.0, testcard, Precision.fp32)
    assert got.seconds == pytest.approx(2.4288e-8, rel=REL)
    assert not got.spilled


def test_tmem_spill_is_flagged_but_still_priced(testcard):
    got = blackwell.tmem_tile_time(65537.0, testcard, Precision.fp32)
    assert got.spilled
    assert got.seconds > 2.4288e-8


def test_tensor_compute_time_uses_datasheet_peak(testcard):
    # 2*128*128*64 / (2e14/100) = 1.048576 us at the fp32 datasheet peak;
    # the sustained rate (1.6e14) would give 1.31072 us instead
    tile = TileDims(128, 128, 64)
    got = blackwell.tensor_compute_time(tile, testcard, Precision.fp32)
    assert got == pytest.approx(1.048576e-6 + 2.4288e-8, rel=REL)


def test_tensor_compute_time_2sm_divides_by_pair_speedup(testcard):
    tile = TileDims(128, 128, 64)
    got = blackwell.tensor_compute_time(tile, testcard, Precision.fp32,
                                        use_2sm=True)
    assert got == pytest.approx(1.048576e-6 / 1.3 + 2.4288e-8, rel=REL)


def test_2sm_compute_ratio_is_exactly_the_pair_speedup():
    profile = load_profile("b200").with_overrides(
        tmem_bw_read=math.inf, tmem_bw_write=math.inf,
        mma_latency_cycles={p: 0.0 for p in Precision})
    tile = TileDims(128, 128, 32)
    t_1sm = blackwell.tensor_compute_time(tile, profile, Precision.fp16)
    t_2sm = blackwell.tensor_compute_time(tile, profile, Precision.fp16,
                                          use_2sm=True)
    assert abs(t_1sm / t_2sm - 1.30) <= 1e-12


def test_management_cost_is_amortized_over_the_k_loop(testcard):
    profile = testcard.with_overrides(tmem_alloc_cycles=100.0,
                                      tmem_dealloc_cycles=60.0)
    tile = TileDims(64, 64, 32)
    base = blackwell.tensor_compute_time(tile, profile, Precision.fp16)
    with_loop = blackwell.tensor_compute_time(tile, profile, Precision.fp16,
                                              k_tiles=16.0)
    assert with_loop - base == pytest.approx(160e-9 / 16.0, rel=1e-9)


def test_tma_time_hand_value(testcard):
    # 420 cycles + 1 MiB over two participants at 4 TB/s
    got = blackwell.tma_time(1048576.0, 2, testcard)
    assert got == pytest.approx(4.2e-7 + 1.31072e-7, rel=REL)


def test_tma_time_rejects_bad_inputs(testcard):
    with pytest.raises(ValueError, match="participants"):
        blackwell.tma_time(100.0, 0, testcard)
    with pytest.raises(ValueError, match="tile_bytes"):
        blackwell.tma_time(-1.0, 1, testcard)


def test_decompression_time_link_bound_hand_value(testcard):
    # compressed 2e9 B; link term 2e9/(1e13*0.8) = 250 us beats the
    # decompressor term 2e9/1e13 = 200 us
    got = blackwell.decompression_time(8e9, 4.0, testcard)
    assert got == pytest.approx(2.5e-4, rel=REL)


def test_decompression_sub_byte_unpack_pass(testcard):
    got = blackwell.decompression_time(8e9, 4.0, testcard, Precision.fp4)
    assert got == pytest.approx(2.5e-4 + 2.0e-4 + 5.0e-7, rel=REL)


def test_decompression_rejects_expanding_ratio(testcard):
    with pytest.raises(ValueError, match="compression_ratio"):
        blackwell.decompression_time(1e6, 0.9, testcard)


def test_sync_time_hand_value(testcard):
    assert blackwell.sync_time(2, testcard) == pytest.approx(9.0e-8, rel=REL)
    assert blackwell.sync_time(0, testcard) == 0.0


def test_cta_pair_memory_shares_the_b_operand(testcard):
    got = blackwell.cta_pair_memory(1e4, 2e4, testcard, k_tiles=100.0)
    assert got.traffic_bytes == pytest.approx(4e4, rel=REL)
    assert got.t_memory_s == pytest.approx(4e4 / 4e12, rel=REL)
    assert got.t_commit_s == pytest.approx(100 * 30e-9, rel=REL)


def test_effective_io_time_hand_value():
    got = blackwell.effective_io_time(1.5e-6, 0.0, 1.0e-7, alpha=0.9)
    assert got == pytest.approx(2.5e-7, rel=REL)


def test_effective_io_time_bounds():
    with pytest.raises(ValueError, match="alpha"):
        blackwell.effective_io_time(1e-6, 0.0, 0.0, alpha=1.1)
    with pytest.raises(ValueError, match="t_decomp_s"):
        blackwell.effective_io_time(1e-6, -1e-9, 0.0, alpha=0.5)


def test_writeback_time_hand_values(testcard):
    got = blackwell.writeback_time(524288.0, testcard)
    assert got == pytest.approx(524288 / 1.6e12 + 1e-7, rel=REL)
    via_tma = blackwell.writeback_time(524288.0, testcard, via_tma=True)
    assert via_tma == pytest.approx(4.2e-7 + 1.31072e-7, rel=REL)


def test_step_time_serial_hand_value(testcard):
    stages = blackwell.BlackwellStageTimes(t_compute_s=2e-6, t_tma_s=1e-6,
                                           t_decomp_s=0.0, t_sync_s=1e-7)
    got = blackwell.step_time(stages, testcard, alpha=0.9, o_misc_s=5e-8)
    assert got == pytest.approx(2.15e-6, rel=REL)


def test_step_time_pipelined_is_the_slowest_stage(testcard):
    stages = blackwell.BlackwellStageTimes(t_compute_s=2e-6, t_tma_s=1e-6,
                                           t_decomp_s=0.0, t_sync_s=1e-7)
    got = blackwell.step_time(stages, testcard, alpha=0.9, pipelined=True)
    assert got == pytest.approx(2e-6, rel=REL)


def _serial_case(**overrides) -> KernelCase:
    base = dict(kernel_class=KernelClass.compute_bound,
                tile=TileDims(128, 128, 64), precision=Precision.fp32,
                k_tiles=10.0, pipelined=False)
    base.update(overrides)
    return KernelCase(**base)


def test_kernel_time_serial_hand_total(testcard):
    # compute 1.048576 us + tmem 24.288 ns; tma 420 ns + 65536/4e12;
    # io_eff = 0.1*tma + 45 ns < compute; step = compute + 45 ns
    b = blackwell.kernel_time(_serial_case(), testcard)
    step = (1.048576e-6 + 2.4288e-8) + 4.5e-8
    assert b.total_s == pytest.approx(5e-6 + 10 * step + 1e-7, rel=1e-9)
    assert b.t_compute_s == pytest.approx(10 * (1.048576e-6 + 2.4288e-8), rel=1e-9)
    assert b.t_sync_s == pytest.approx(10 * 4.5e-8, rel=1e-9)
    assert b.t_launch_s == 5e-6
    assert b.t_writeback_s == pytest.approx(1e-7, rel=REL)
    assert b.model_path is ModelPath.blackwell_stage


def test_kernel_time_pipelined_amortizes_one_shot_latencies(testcard):
    serial = blackwell.kernel_time(_serial_case(), testcard)
    pipelined = blackwell.kernel_time(_serial_case(pipelined=True), testcard)
    # steady compute = compute - l_mma + l_mma/k with l_mma = 12 cycles
    step = (1.048576e-6 + 2.4288e-8) - 1.2e-8 + 1.2e-9
    assert pipelined.total_s == pytest.approx(5e-6 + 10 * step + 1e-7, rel=1e-9)
    assert pipelined.total_s < serial.total_s


def test_kernel_time_writes_back_the_gemm_result(testcard):
    with_gemm = blackwell.kernel_time(
        _serial_case(gemm=GemmDims(4096, 4096, 4096)), testcard)
    # 4096*4096 fp32 elements at the sustained HBM rate plus store setup
    assert with_gemm.t_writeback_s == pytest.approx(
        4096 * 4096 * 4.0 / 1.6e12 + 1e-7, rel=REL)


def test_kernel_time_interference_terms(testcard):
    base = blackwell.kernel_time(_serial_case(), testcard)
    loaded = blackwell.kernel_time(_serial_case(n_concurrent=3, n_devices=2),
                                   testcard)
    assert loaded.t_interference_s == pytest.approx(2 * 5e-5 + 1e-4, rel=REL)
    assert loaded.total_s - base.total_s == pytest.approx(2e-4, rel=1e-9)


def test_kernel_time_flags_accumulator_spill(testcard):
    b = blackwell.kernel_time(_serial_case(tile=TileDims(256, 256, 32)),
                              testcard)
    assert any("tmem_spill" in f for f in b.flags)


def test_kernel_time_split_operand_streams(testcard):
    # separate multicast widths: serial kernels pay both issue latencies,
    # pipelined kernels hide the slower stream behind the faster one
    serial = blackwell.kernel_time(
        _serial_case(tma_participants=1, tma_participants_b=2), testcard)
    combined = blackwell.kernel_time(_serial_case(tma_participants=1), testcard)
    assert serial.total_s >= combined.total_s
    pipe_split = blackwell.kernel_time(
        _serial_case(pipelined=True, tma_participants_b=2), testcard)
    pipe_combined = blackwell.kernel_time(_serial_case(pipelined=True), testcard)
    assert pipe_split.total_s <= pipe_combined.total_s


def test_kernel_time_sub_byte_precision_engages_decompression(testcard):
    plain = blackwell.kernel_time(_serial_case(precision=Precision.fp8),
                                  testcard)
    packed = blackwell.kernel_time(_serial_case(precision=Precision.fp4),
                                   testcard)
    # the fp4 operand bytes halve but the decompressor path is charged
    assert packed.t_memory_or_io_s != plain.t_memory_or_io_s


def test_kernel_time_requires_tile_and_k_tiles(testcard):
    with pytest.raises(ValueError, match="tile"):
        blackwell.kernel_time(KernelCase(kernel_class=KernelClass.compute_bound,
                                         k_tiles=4.0), testcard)
    with pytest.raises(ValueError, match="k_tiles"):
        blackwell.kernel_time(
            KernelCase(kernel_class=KernelClass.compute_bound,
                       tile=TileDims(64, 64, 32), k_tiles=0.0), testcard)


def test_b200_large_gemm_regression():
    """Frozen end-to-end prediction for a 16384^3 fp16 GEMM on b200."""
    profile = load_profile("b200")
    gemm = GemmDims(16384, 16384, 16384)
    steps = (16384 / 128) * (16384 / 128) * (16384 / 32) / profile.num_sm_or_cu
    case = KernelCase(kernel_class=KernelClass.compute_bound,
                      flops=gemm.flops, gemm=gemm,
                      tile=TileDims(128, 128, 32), precision=Precision.fp16,
                      k_tiles=steps)
    b = blackwell.kernel_time(case, profile)
    assert b.total_s == pytest.approx(4.253633436e-3, rel=1e-8)
    assert b.t_compute_s == pytest.approx(4.169682e-3, rel=1e-6)
    assert b.t_writeback_s == pytest.approx(7.8952e-5, rel=1e-4)
