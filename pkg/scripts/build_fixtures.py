#!/usr/bin/env python3
"""Regenerate the shipped workload fixtures.

Each fixture family pairs workload segment files with a measured-times CSV.
Measured values fall into two groups, distinguished per benchmark by
``meta.measured_origin``:

* ``recorded``: published measurements transcribed as-is (streamcluster_1M
  at 157 ms on MI300A, gemm_fp64_16384 at 0.283 s on MI250X).
* ``synthetic``: constructed from the model itself with a documented
  per-benchmark offset, so the validation pipeline sees a known error
  profile.  These exercise reporting, calibration, and the structural gap
  between the model and the naive datasheet roofline; they are not
  hardware measurements.

Running this script rewrites src/gpucast/fixtures/ in place and prints the
resulting validation tables.  It asserts the design targets (model MAE,
roofline MAE, pinned measured values) before writing anything.
"""

from __future__ import annotations

import json
import shutil
import sys
from dataclasses import dataclass, field
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from gpucast import Precision, load_profile, workload  # noqa: E402
from gpucast.validation import relative_error_pct, validate  # noqa: E402

FIXTURES = REPO / "src" / "gpucast" / "fixtures"


@dataclass
class BenchmarkSpec:
    """One benchmark on one platform: segment structure plus the rule for
    deriving its measured time."""

    benchmark: str
    platform: str
    segments: list[dict]
    # signed model error target in percent; measured = predicted / (1 + d/100)
    error_pct: float | None = None
    # fixed measured value (paper-transcribed); error_pct must then be None
    measured_s: float | None = None
    measured_unit: str = "s"
    origin: str = "synthetic"
    source: str = "rocprof_stats"
    notes: str = ""
    write_measured: bool = True
    meta_extra: dict = field(default_factory=dict)


def vec(name: str, byte_count: float, n_exec: int, flops: float = 0.0,
        kclass: str = "memory_bound", precision: str = "fp32",
        working_set: float | None = None) -> dict:
    return {
        "name": name,
        "class": kclass,
        "flops": flops,
        "bytes": byte_count,
        "working_set": byte_count if working_set is None else working_set,
        "n_exec": n_exec,
        "precision": precision,
    }


def gemm_seg(name: str, m: int, n: int, k: int, tile: tuple[int, int, int],
             n_exec: int, precision: str, in_bytes: float | None = None,
             working_set: float | None = None, util: float | None = None) -> dict:
    elem = {"fp64": 8, "fp32": 4, "fp16": 2, "fp8": 1}[precision]
    if in_bytes is None:
        in_bytes = (m * k + k * n) * elem
    if working_set is None:
        working_set = in_bytes + m * n * elem
    seg = {
        "name": name,
        "class": "compute_bound",
        "flops": 2.0 * m * n * k,
        "bytes": float(in_bytes),
        "working_set": float(working_set),
        "n_exec": n_exec,
        "precision": precision,
        "gemm": {"m": m, "n": n, "k": k},
        "tile": {"b_m": tile[0], "b_n": tile[1], "b_k": tile[2]},
    }
    if util is not None:
        seg["mfma_utilization"] = util
    return seg


# ---------------------------------------------------------------------------
# fixture family definitions
# ---------------------------------------------------------------------------

def rodinia_specs() -> list[BenchmarkSpec]:
    """Rodinia 3.1 on b200 and mi300a.

    The mi300a set is the roofline-gap fixture: segments are sized in the
    many-small-launches regime actually observed for these benchmarks, so
    the model (which counts launches) tracks the measured sums within 1%
    while the launch-blind datasheet roofline undershoots by >90%.
    """
    specs: list[BenchmarkSpec] = []

    shared = {
        "hotspot_1024": dict(segs=lambda p: [vec(
            "stencil_step", 80000 if p == "mi300a" else 8.4e6,
            2632 if p == "mi300a" else 1000,
            flops=80000 if p == "mi300a" else 1.05e7, kclass="stencil")],
            err={"b200": 31.0, "mi300a": 0.236}),
        "hotspot_512": dict(segs=lambda p: [vec(
            "stencil_step", 20000 if p == "mi300a" else 2.1e6,
            1317 if p == "mi300a" else 1000,
            flops=20000 if p == "mi300a" else 2.6e6, kclass="stencil")],
            err={"b200": 15.4, "mi300a": 0.016}),
        "bfs_1M": dict(segs=lambda p: [vec("frontier_sweep", 1278000, 9900)],
                       err={"b200": 44.9, "mi300a": 0.409}),
        "backprop_65536": dict(segs=lambda p: [gemm_seg(
            "layer_fused", 65536, 16, 16,
            (128, 16, 16) if p == "b200" else (16, 16, 16),
            500, "fp16" if p == "b200" else "fp32")],
            err={"b200": 33.0, "mi300a": 0.213},
            note="two layers merged into one compute segment so launch "
                 "latency is counted once per execution"),
        "pathfinder_1000": dict(segs=lambda p: [vec(
            "dynproc_step", 26500, 600, flops=265000, kclass="balanced")],
            err={"b200": 0.4, "mi300a": 0.1},
            note="effective per-step flops/bytes reduced to the "
                 "profiler-visible work; n_exec matches profiled launches"),
        "srad_502": dict(segs=lambda p: [vec(
            "srad_aggregate", 26500, 300, flops=132500, kclass="balanced")],
            err={"b200": 0.5, "mi300a": 0.5},
            note="single aggregate segment; traffic taken from the bytes "
                 "column of the profile run"),
    }
    for bench, spec in shared.items():
        for platform in ("b200", "mi300a"):
            specs.append(BenchmarkSpec(
                benchmark=bench, platform=platform,
                segments=spec["segs"](platform),
                error_pct=spec["err"][platform],
                source="nsight_kern_sum" if platform == "b200" else "rocprof_stats",
                notes=spec.get("note", ""),
            ))

    # streamcluster: the mi300a measured value is the published 157 ms;
    # n_exec is the profiled launch count, per-launch traffic back-computed
    # from the published roofline gap (0.005 ms vs 157 ms).  The b200 value
    # is synthetic at the table's 12.4% error (set in main()).
    specs.append(BenchmarkSpec(
        benchmark="streamcluster_1M", platform="b200",
        segments=[vec("pgain_launches", 844, 31390)],
        error_pct=12.4, source="nsight_kern_sum",
        notes="n_exec scaled to the measured launch regime",
    ))
    specs.append(BenchmarkSpec(
        benchmark="streamcluster_1M", platform="mi300a",
        segments=[vec("pgain_launches", 844, 31390)],
        measured_s=0.157, measured_unit="ms", origin="recorded",
        source="rocprof_stats",
        notes="n_exec scaled to the measured launch regime",
    ))
    return specs


def spechpc_specs() -> list[BenchmarkSpec]:
    """SPEChpc 2021 Tiny on b200 and mi300a; segment flops/bytes follow the
    profiler-counter characterization convention.  528.pot3d_t ships with
    no b200 measured row, exercising the uncovered-case reporting."""
    base = {
        "505.lbm_t": dict(segs=lambda p: [vec("collide_stream", 3.2e8, 2000)],
                          err={"b200": 14.9, "mi300a": 0.1}),
        "513.soma_t": dict(segs=lambda p: [vec(
            "mc_sweep", 2.0e7, 1500, flops=4.0e8, kclass="balanced")],
            err={"b200": 0.3, "mi300a": 1.3}),
        "518.tealeaf_t": dict(segs=lambda p: [vec("cg_solve", 1.5e8, 3000)],
                              err={"b200": 0.2, "mi300a": 1.6}),
        "519.clvleaf_t": dict(segs=lambda p: [vec("hydro_step", 2.5e8, 2500)],
                              err={"b200": 18.5, "mi300a": 1.5}),
        "521.miniswp_t": dict(segs=lambda p: [gemm_seg(
            "sweep_plane", 4096, 256, 256,
            (128, 128, 32) if p == "b200" else (16, 16, 16),
            5000, "fp32")],
            err={"b200": 32.8, "mi300a": 0.8}),
        "528.pot3d_t": dict(segs=lambda p: [vec("cg_matvec", 1.8e8, 4000)],
                            err={"b200": None, "mi300a": 7.0}),
        "532.sph_exa_t": dict(segs=lambda p: [vec(
            "particle_step", 4.0e7, 2200, flops=8.0e8, kclass="balanced")],
            err={"b200": 0.03, "mi300a": 0.6}),
        "534.hpgmgfv_t": dict(segs=lambda p: [vec("mg_smooth", 1.2e8, 3500)],
                              err={"b200": 0.3, "mi300a": 0.8}),
    }
    specs = []
    for bench, spec in base.items():
        for platform in ("b200", "mi300a"):
            err = spec["err"][platform]
            specs.append(BenchmarkSpec(
                benchmark=bench, platform=platform,
                segments=spec["segs"](platform),
                error_pct=err if err is not None else 0.0,
                write_measured=err is not None,
                source="nsight_kern_sum" if platform == "b200" else "rocprof_stats",
                notes="" if err is not None else
                      "no measured kernel sum available on this platform",
            ))
    return specs


def micro_specs() -> list[BenchmarkSpec]:
    """Single-kernel microbenchmarks (100 timed repetitions each).

    The mi300a set covers the tiny-transfer regime where launch latency
    dominates; its roofline-error column averages ~99.6%.  The mi250x set
    includes the large FP64 GEMM whose published measured time (0.283 s)
    the model reproduces through a calibrated MFMA utilization.
    """
    specs = []
    mi300a = [
        ("vector_add_1k", vec("add", 12288.0, 100), 0.05),
        ("vector_copy_2k", vec("copy", 16384.0, 100), 0.08),
        ("vector_add_4k", vec("add", 49152.0, 100), 0.03),
        ("reduction_8k", vec("reduce", 32768.0, 100), 0.12),
        ("transpose_64", vec("transpose", 32768.0, 100), 0.06),
        ("transpose_128", vec("transpose", 131072.0, 100), 0.15),
        ("gemv_256", vec("gemv", 264192.0, 100, flops=131072.0,
                         kclass="balanced"), 0.10),
        ("gemm_fp64_128", gemm_seg("dgemm", 128, 128, 128, (16, 16, 16),
                                   100, "fp64"), 0.13),
        ("spmv_4k", vec("spmv", 65536.0, 100, flops=32768.0,
                        kclass="balanced"), 0.09),
    ]
    for bench, seg, err in mi300a:
        seg["name"] = bench
        specs.append(BenchmarkSpec(
            benchmark=bench, platform="mi300a", segments=[seg], error_pct=err))

    # mi250x: the utilization for the pinned GEMM is solved by the builder
    mi250x = [
        ("gemm_fp64_16384", None, None),   # placeholder, filled in main()
        ("vector_add_1m", vec("add", 1.2582912e7, 100), 8.0),
        ("vector_copy_4m", vec("copy", 3.3554432e7, 100), -6.2),
        ("transpose_1k", vec("transpose", 8388608.0, 100), 5.5),
        ("reduction_512k", vec("reduce", 2097152.0, 100), -3.7),
    ]
    for bench, seg, err in mi250x:
        if seg is None:
            continue
        seg["name"] = bench
        specs.append(BenchmarkSpec(
            benchmark=bench, platform="mi250x", segments=[seg], error_pct=err))
    return specs


def solve_mi250x_gemm() -> BenchmarkSpec:
    """Build the 16384^3 FP64 GEMM segment so the wavefront path lands on
    the published 0.283 s.  The free parameter is the MFMA utilization."""
    profile = load_profile("mi250x")
    m = n = k = 16384
    target = 0.283
    elem = 8
    in_bytes = float((m * k + k * n) * elem)
    working_set = in_bytes + m * n * elem

    from gpucast import cdna
    params = cdna.CacheModelParams.from_profile(profile)
    h = cdna.llc_hit_rate(working_set, params)
    t_m = in_bytes / cdna.effective_bandwidth(h, profile)
    writeback = m * n * elem / profile.hbm_bw_sustained + profile.store_setup_s
    fixed = profile.launch_latency_s + writeback + profile.coherence_s \
        + profile.cross_xcd_s
    # overlap saturates (eta = 1) for this compute-heavy case, so
    # target = fixed + (t_m + t_c) / 2  ->  t_c follows directly
    t_c = 2.0 * (target - fixed) - t_m
    flops = 2.0 * m * n * k
    util = flops / (t_c * profile.sustained_flops(Precision.fp64))
    assert 0.0 < util <= 1.0, f"solved utilization out of range: {util}"

    seg = gemm_seg("gemm_fp64_16384", m, n, k, (16, 16, 16), 1, "fp64",
                   in_bytes=in_bytes, working_set=working_set,
                   util=round(util, 9))
    return BenchmarkSpec(
        benchmark="gemm_fp64_16384", platform="mi250x", segments=[seg],
        measured_s=target, origin="recorded",
        notes="published measured time; mfma_utilization calibrated so the "
              "wavefront path reproduces it",
    )


# ---------------------------------------------------------------------------
# building
# ---------------------------------------------------------------------------

def build_family(name: str, specs: list[BenchmarkSpec]) -> None:
    profiles = {p: load_profile(p) for p in sorted({s.platform for s in specs})}
    family_dir = FIXTURES / name
    if family_dir.exists():
        shutil.rmtree(family_dir)

    csv_rows: dict[str, list[str]] = {p: [] for p in profiles}
    segfiles: dict[str, list] = {p: [] for p in profiles}
    records: dict[str, list] = {p: [] for p in profiles}

    for spec in specs:
        profile = profiles[spec.platform]
        raw = {
            "schema_version": workload.SEGMENT_SCHEMA_VERSION,
            "benchmark": spec.benchmark,
            "platform": spec.platform,
            "meta": {
                "measured_origin": spec.origin,
                **({"notes": spec.notes} if spec.notes else {}),
                **spec.meta_extra,
            },
            "segments": spec.segments,
        }
        segfile = workload.parse_segments_dict(raw, origin=spec.benchmark)
        predicted = workload.aggregate(segfile, profile).total_s

        if spec.measured_s is not None:
            measured = spec.measured_s
        else:
            measured = predicted / (1.0 + spec.error_pct / 100.0)
        err = relative_error_pct(predicted, measured)
        if spec.measured_s is None:
            assert abs(err - abs(spec.error_pct)) < 0.05, \
                f"{spec.benchmark}/{spec.platform}: err {err} vs {spec.error_pct}"

        out = family_dir / spec.platform
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{spec.benchmark}.json").write_text(
            json.dumps(raw, indent=2, sort_keys=True) + "\n")

        segfiles[spec.platform].append(segfile)
        if spec.write_measured:
            if spec.measured_unit == "ms":
                value = measured * 1e3
            elif spec.measured_unit == "us":
                value = measured * 1e6
            else:
                value = measured
            csv_rows[spec.platform].append(
                f"{spec.benchmark},{spec.platform},{value!r},"
                f"{spec.measured_unit},{spec.source}")
            records[spec.platform].append(measured)

    header = "benchmark,platform,time,unit,source"
    combined = [header]
    for platform in sorted(profiles):
        lines = [header] + csv_rows[platform]
        (family_dir / f"measured_{platform}.csv").write_text(
            "\n".join(lines) + "\n")
        combined.extend(csv_rows[platform])
    (family_dir / "measured.csv").write_text("\n".join(combined) + "\n")

    # report the resulting tables
    for platform in sorted(profiles):
        measured = workload.ingest_measured(family_dir / f"measured_{platform}.csv")
        report = validate(segfiles[platform], measured, profiles[platform])
        print(f"--- {name}/{platform}: model MAE "
              f"{report.suite_mae_pct if report.suite_mae_pct is not None else float('nan'):.4f}% "
              f"roofline MAE "
              f"{report.roofline_mae_pct if report.roofline_mae_pct is not None else float('nan'):.4f}%")
        for row in report.rows:
            print(f"    {row.benchmark:<20} pred {row.predicted_s:.6e} "
                  f"meas {row.measured_s:.6e} err {row.error_pct:7.3f}% "
                  f"roofline err {row.roofline_error_pct:7.3f}%")
        for tag in report.uncovered_segments:
            print(f"    uncovered (no measured row): {tag}")

        if name == "rodinia" and platform == "mi300a":
            assert report.suite_mae_pct < 1.0, report.suite_mae_pct
            assert report.roofline_mae_pct > 90.0, report.roofline_mae_pct
        if name == "micro" and platform == "mi300a":
            assert report.suite_mae_pct < 1.0, report.suite_mae_pct
            assert 99.0 < report.roofline_mae_pct < 100.0, report.roofline_mae_pct
        if name == "micro" and platform == "mi250x":
            gemm_row = [r for r in report.rows if r.benchmark == "gemm_fp64_16384"]
            assert gemm_row and gemm_row[0].error_pct < 0.05, gemm_row
        if name == "spechpc" and platform == "b200":
            assert any("pot3d" in tag for tag in report.uncovered_segments)


def main() -> None:
    build_family("rodinia", rodinia_specs())
    build_family("spechpc", spechpc_specs())
    build_family("micro", micro_specs() + [solve_mi250x_gemm()])
    print("fixtures written to", FIXTURES)


if __name__ == "__main__":
    main()
