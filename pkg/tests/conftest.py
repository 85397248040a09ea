"""Shared test helpers.

The synthetic "testcard" profile below runs at exactly 1 GHz with
power-of-ten bandwidths so the unit tests can state expected times that
were worked out by hand.  random_profile() perturbs every field of it for
the oracle and property suites.
"""

from __future__ import annotations

import random
from typing import Any

import pytest

from gpucast.core import HardwareProfile, Precision, load_profile_dict


def make_testcard_dict() -> dict[str, Any]:
    """Profile JSON for the synthetic hand-checkable device."""
    return {
        "meta": {"name": "testcard", "vendor": "amd"},
        "datasheet": {
            "clock_ghz": 1.0,
            "num_sm_or_cu": 100,
            "warp_size": 64,
            "max_resident_warps": 32,
            "hbm_bw": 2.0e12,
            "hbm_capacity": 6.4e10,
            "llc_size": 2.56e8,
            "tmem_or_lds_per_sm": 65536,
            "vgpr_file_per_cu": 65536,
            "tensor_flops": {
                "fp64": 1.0e14,
                "fp32": 2.0e14,
                "tf32": 2.0e14,
                "fp16": 4.0e14,
                "fp8": 8.0e14,
                "fp4": 1.6e15,
            },
        },
        "measured": {
            "hbm_bw": 1.6e12,
            "llc_bw": 5.0e12,
            "tensor_flops": {
                "fp64": 8.0e13,
                "fp32": 1.6e14,
                "tf32": 1.6e14,
                "fp16": 3.2e14,
                "fp8": 6.4e14,
                "fp4": 1.28e15,
            },
            "tmem_bw_read": 1.6e13,
            "tmem_bw_write": 8.0e12,
            "tma_bw": 4.0e12,
            "memcpy_bw_h2d": 4.5e10,
            "memcpy_bw_d2h": 4.0e10,
            "link_bw": 1.0e13,
            "decomp_rate": 1.0e13,
            "launch_latency_s": 5.0e-6,
            "s_2sm": 1.3,
        },
        "latencies_cycles": {
            "tma": 420,
            "mma": {"fp64": 16, "fp32": 12, "tf32": 12, "fp16": 12,
                    "fp8": 10, "fp4": 10},
            "mbar": 45,
            "commit": 30,
            "cache": {"l1": 30, "l2": 150, "llc": 400, "hbm": 800},
        },
        "tunables": {
            "tau_memcpy_s": 2.0e-6,
            "tau_sync_s": 3.0e-6,
            "tau_interf_s": 5.0e-5,
            "tau_interf_gpu_s": 1.0e-4,
            "alpha_default": 0.9,
            "de_efficiency": 0.8,
            "epsilon_pipeline_s": 0.0,
            "coherence_s": 1.5e-7,
            "cross_xcd_s": 7.5e-8,
            "store_setup_s": 1.0e-7,
            "decomp_setup_s": 5.0e-7,
            "mfma_utilization": 0.55,
            "cache_alpha_exp": 1.0,
            "cache_beta_exp": 1.0,
            "h_l1": 0.8,
            "h_l2": 0.6,
            "w0_bytes": -1.0,
            "tmem_alloc_cycles": 0,
            "tmem_dealloc_cycles": 0,
        },
    }


def make_testcard_profile() -> HardwareProfile:
    return load_profile_dict(make_testcard_dict(), origin="testcard")


@pytest.fixture()
def testcard() -> HardwareProfile:
    return make_testcard_profile()


def random_profile(rng: random.Random) -> HardwareProfile:
    """A fully randomized but internally consistent profile."""
    peak = {p: rng.uniform(1e13, 1e15) for p in Precision}
    sustained = {p: v * rng.uniform(0.4, 1.0) for p, v in peak.items()}
    hbm_peak = rng.uniform(2e12, 9e12)
    return make_testcard_profile().with_overrides(
        clock_ghz=rng.uniform(0.5, 3.0),
        num_sm_or_cu=rng.randint(8, 512),
        max_resident_warps=rng.randint(4, 64),
        vgpr_file_per_cu=rng.choice([32768, 65536, 131072]),
        tmem_or_lds_per_sm=float(rng.choice([65536, 131072, 262144])),
        hbm_bw_peak=hbm_peak,
        hbm_bw_sustained=hbm_peak * rng.uniform(0.6, 1.0),
        llc_bw=rng.uniform(5e12, 3e13),
        tmem_bw_read=rng.uniform(5e12, 3e13),
        tmem_bw_write=rng.uniform(5e12, 3e13),
        tma_bw=rng.uniform(1e12, 5e12),
        memcpy_bw_h2d=rng.uniform(1e10, 1e11),
        memcpy_bw_d2h=rng.uniform(1e10, 1e11),
        link_bw=rng.uniform(1e12, 2e13),
        decomp_rate=rng.uniform(1e11, 1e13),
        tensor_peak=peak,
        tensor_sustained=sustained,
        tma_latency_cycles=rng.uniform(0.0, 600.0),
        mma_latency_cycles={p: rng.uniform(0.0, 32.0) for p in Precision},
        mbar_latency_cycles=rng.uniform(0.0, 100.0),
        commit_latency_cycles=rng.uniform(0.0, 100.0),
        cache_latency_cycles={
            "l1": rng.uniform(1.0, 40.0),
            "l2": rng.uniform(40.0, 200.0),
            "llc": rng.uniform(200.0, 600.0),
            "hbm": rng.uniform(400.0, 1200.0),
        },
        launch_latency_s=rng.uniform(1e-6, 1e-5),
        s_2sm=rng.uniform(1.0, 2.0),
        tau_memcpy_s=rng.uniform(0.0, 5e-6),
        tau_sync_s=rng.uniform(0.0, 5e-6),
        tau_interf_s=rng.uniform(0.0, 1e-4),
        tau_interf_gpu_s=rng.uniform(0.0, 2e-4),
        alpha_default=rng.uniform(0.0, 1.0),
        de_efficiency=rng.uniform(0.5, 1.0),
        epsilon_pipeline_s=rng.uniform(0.0, 1e-7),
        coherence_s=rng.uniform(0.0, 3e-7),
        cross_xcd_s=rng.uniform(0.0, 2e-7),
        store_setup_s=rng.uniform(0.0, 2e-7),
        decomp_setup_s=rng.uniform(0.0, 1e-6),
        mfma_utilization_default=rng.uniform(0.3, 1.0),
        cache_alpha_exp=rng.uniform(0.5, 3.0),
        cache_beta_exp=rng.uniform(0.5, 3.0),
        h_l1_default=rng.uniform(0.0, 1.0),
        h_l2_default=rng.uniform(0.0, 1.0),
        w0_bytes=rng.choice([-1.0, rng.uniform(1e6, 1e9)]),
        tmem_alloc_cycles=rng.uniform(0.0, 200.0),
        tmem_dealloc_cycles=rng.uniform(0.0, 200.0),
    )
