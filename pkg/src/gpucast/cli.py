"""Command-line front end.

Subcommands: predict, validate, calibrate, compare, sweep-tiles, fuse.
Every run that writes files also writes a ``run_manifest.json`` recording
the argv, package version, sha256 of each input file, and any environment
overrides, so results can be traced back to their exact inputs.  Report
CSVs are byte-deterministic: repeated runs over the same inputs produce
identical files (the timestamp lives only in the manifest).

Exit codes: 0 on success, 1 for bad input (missing/invalid files, bad
flags, refused calibration), 2 for an internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, blackwell, cdna, roofline, workload
from .core import (
    PRECISION_BYTES,
    GemmDims,
    GpucastError,
    HardwareProfile,
    KernelCase,
    KernelClass,
    Precision,
    TileDims,
    load_profile,
    shipped_profile_names,
    shipped_profile_path,
)
from .validation import (
    _CSV_HEADER,
    CalibrationSet,
    fit_calibration,
    load_calibration,
    report_to_csv,
    report_to_table,
    save_calibration,
    validate,
)

# environment variables honoured by every subcommand; each maps onto one
# profile tunable and is recorded in the run manifest when set
ENV_OVERRIDES = {
    "ANALYTICAL_T_MEMCPY_LAUNCH_S": "tau_memcpy_s",
    "ANALYTICAL_T_SYNC_S": "tau_sync_s",
}

# profile tunables a calibration file may override
_CALIBRATABLE_TAUS = (
    "tau_memcpy_s",
    "tau_sync_s",
    "tau_interf_s",
    "tau_interf_gpu_s",
    "launch_latency_s",
)


class UsageError(GpucastError):
    """Raised for malformed command lines so they exit with code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# run manifest
# ---------------------------------------------------------------------------

def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Provenance record written beside every file-producing run."""

    command: str
    argv: list[str]
    inputs: list[dict[str, str]] = field(default_factory=list)
    env_overrides: dict[str, float] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)

    def add_input(self, role: str, path: Path) -> None:
        self.inputs.append(
            {"role": role, "path": str(path), "sha256": _sha256(path)}
        )

    def write(self, out_dir: Path) -> Path:
        doc = {
            "command": self.command,
            "argv": self.argv,
            "version": __version__,
            "generated_utc": datetime.now(timezone.utc).isoformat(),
            "inputs": self.inputs,
            "env_overrides": self.env_overrides,
            "outputs": sorted(self.outputs),
        }
        path = out_dir / "run_manifest.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return path


def _emit(out_dir: Path | None, manifest: RunManifest, name: str,
          content: str) -> None:
    if out_dir is None:
        return
    (out_dir / name).write_text(content)
    manifest.outputs.append(name)


# ---------------------------------------------------------------------------
# shared argument plumbing
# ---------------------------------------------------------------------------

def _resolve_profile_path(name_or_path: str) -> Path:
    p = Path(name_or_path)
    if p.suffix != ".json" and not p.exists():
        return shipped_profile_path(name_or_path)
    return p


def _profile_for_run(name_or_path: str, manifest: RunManifest,
                     calibration: CalibrationSet | None) -> HardwareProfile:
    """Load a profile and apply calibration/environment tunable overrides.

    Environment overrides win over calibration overrides; both are
    recorded (environment in the manifest, calibration via its file hash).
    """
    path = _resolve_profile_path(name_or_path)
    profile = load_profile(path)
    manifest.add_input("profile", path)

    overrides: dict[str, float] = {}
    if calibration is not None:
        for key, value in calibration.tau_overrides.items():
            if key not in _CALIBRATABLE_TAUS:
                raise GpucastError(
                    f"calibration override {key!r} is not a tunable; "
                    f"allowed: {', '.join(_CALIBRATABLE_TAUS)}"
                )
            overrides[key] = float(value)
    for env_name, field_name in sorted(ENV_OVERRIDES.items()):
        raw = os.environ.get(env_name)
        if raw is None:
            continue
        try:
            value = float(raw)
        except ValueError:
            raise GpucastError(
                f"environment override {env_name} must be a number (got {raw!r})"
            ) from None
        if value < 0:
            raise GpucastError(f"environment override {env_name} must be >= 0")
        overrides[field_name] = value
        manifest.env_overrides[env_name] = value
    if overrides:
        profile = profile.with_overrides(**overrides)
    return profile


def _load_calibration_arg(args: argparse.Namespace,
                          manifest: RunManifest) -> CalibrationSet | None:
    value = getattr(args, "calibration", None)
    if value is None:
        return None
    path = Path(value)
    calib = load_calibration(path)
    manifest.add_input("calibration", path)
    return calib


def _segment_paths(entries: list[str]) -> list[Path]:
    """Expand file/directory arguments into sorted segment-file paths."""
    paths: list[Path] = []
    for entry in entries:
        p = Path(entry)
        if p.is_dir():
            found = sorted(p.glob("*.json"))
            if not found:
                raise GpucastError(f"no segment files (*.json) under {p}")
            paths.extend(found)
        elif p.exists():
            paths.append(p)
        else:
            raise GpucastError(f"no such segment file or directory: {p}")
    return paths


def _load_segment_files(entries: list[str], manifest: RunManifest
                        ) -> list[workload.SegmentFile]:
    files = []
    for path in _segment_paths(entries):
        files.append(workload.parse_segments(path))
        manifest.add_input("segments", path)
    return files


def _load_measured(csv_path: str, manifest: RunManifest) -> list[workload.MeasuredRecord]:
    path = Path(csv_path)
    records = workload.ingest_measured(path)
    manifest.add_input("measured", path)
    return records


def _out_dir(args: argparse.Namespace) -> Path | None:
    value = getattr(args, "out", None)
    if value is None:
        return None
    out = Path(value)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_dims(text: str, what: str, allow_scalar: bool) -> tuple[int, ...]:
    parts = text.lower().split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad {what} {text!r}; expected e.g. 4096 or 128x256x64") from None
    if any(d < 1 for d in dims):
        raise UsageError(f"{what} dimensions must be >= 1 (got {text!r})")
    if allow_scalar and len(dims) == 1:
        return dims
    if len(dims) not in (2, 3):
        raise UsageError(f"bad {what} {text!r}; expected 2 or 3 dimensions")
    return dims


def _parse_gemm(text: str) -> GemmDims:
    dims = _parse_dims(text, "gemm size", allow_scalar=True)
    if len(dims) == 1:
        return GemmDims(dims[0], dims[0], dims[0])
    if len(dims) != 3:
        raise UsageError(f"bad gemm size {text!r}; expected N or MxNxK")
    return GemmDims(*dims)


def _parse_tile(text: str) -> TileDims:
    dims = _parse_dims(text, "tile", allow_scalar=False)
    if len(dims) == 2:
        return TileDims(dims[0], dims[1], dims[1])
    return TileDims(*dims)


def _parse_precision(text: str) -> Precision:
    try:
        return Precision(text)
    except ValueError:
        choices = ", ".join(p.value for p in Precision)
        raise UsageError(f"unknown precision {text!r}; choose from {choices}") from None


def _gemm_bytes(gemm: GemmDims, precision: Precision) -> float:
    """Off-chip traffic estimate: read both operands, write the product."""
    per_elem = PRECISION_BYTES[precision]
    return (gemm.m * gemm.k + gemm.k * gemm.n + gemm.m * gemm.n) * per_elem


def _fmt_seconds(seconds: float) -> str:
    if seconds == 0:
        return "0 s"
    if seconds >= 1.0:
        return f"{seconds:.6f} s"
    if seconds >= 1e-3:
        return f"{seconds * 1e3:.6f} ms"
    if seconds >= 1e-6:
        return f"{seconds * 1e6:.3f} us"
    return f"{seconds * 1e9:.3f} ns"


# ---------------------------------------------------------------------------
# predict
# ---------------------------------------------------------------------------

_BREAKDOWN_CSV_HEADER = (
    "model_path,total_s,compute_s,memory_or_io_s,sync_s,launch_s,"
    "writeback_s,overhead_s,interference_s,memcpy_s"
)


def _breakdown_csv_row(b) -> str:
    return (
        f"{b.model_path.value},{b.total_s:.9e},{b.t_compute_s:.9e},"
        f"{b.t_memory_or_io_s:.9e},{b.t_sync_s:.9e},{b.t_launch_s:.9e},"
        f"{b.t_writeback_s:.9e},{b.t_overhead_s:.9e},{b.t_interference_s:.9e},"
        f"{b.t_memcpy_s:.9e}"
    )


def _print_breakdown(b, out=None) -> None:
    out = out if out is not None else sys.stdout
    print(f"model path     : {b.model_path.value}", file=out)
    rows = [
        ("compute", b.t_compute_s),
        ("memory/io", b.t_memory_or_io_s),
        ("sync", b.t_sync_s),
        ("launch", b.t_launch_s),
        ("writeback", b.t_writeback_s),
        ("overhead", b.t_overhead_s),
        ("interference", b.t_interference_s),
        ("memcpy", b.t_memcpy_s),
    ]
    for label, value in rows:
        if value:
            print(f"  {label:<13}: {_fmt_seconds(value)}", file=out)
    if b.flags:
        print(f"  flags        : {', '.join(b.flags)}", file=out)
    print(f"total          : {_fmt_seconds(b.total_s)} ({b.total_s:.9e} s)", file=out)


def _gemm_case(args: argparse.Namespace, profile: HardwareProfile) -> KernelCase:
    gemm = _parse_gemm(args.gemm)
    if args.precision is not None:
        precision = _parse_precision(args.precision)
    else:
        precision = Precision.fp16 if profile.vendor == "nvidia" else Precision.fp64
    byte_count = _gemm_bytes(gemm, precision)

    if profile.vendor == "nvidia":
        if args.tile is None:
            raise UsageError("--tile is required for a GEMM prediction on an "
                             "NVIDIA profile (e.g. --tile 128x256x64)")
        tile = _parse_tile(args.tile)
        if args.k_tiles is not None:
            k_tiles = args.k_tiles
        else:
            steps = (gemm.m / tile.b_m) * (gemm.n / tile.b_n) * (gemm.k / tile.b_k)
            k_tiles = steps / profile.num_sm_or_cu
        return KernelCase(
            kernel_class=KernelClass.compute_bound,
            flops=gemm.flops,
            bytes=byte_count,
            working_set=byte_count,
            precision=precision,
            gemm=gemm,
            tile=tile,
            k_tiles=k_tiles,
            tma_participants=args.participants,
            tma_participants_b=args.participants_b,
            overlap_alpha=args.alpha,
            n_bar=args.n_bar,
            use_2sm=args.two_sm,
            pipelined=not args.serial,
            use_decompression=args.decompress,
            compression_ratio=args.compression_ratio,
            use_tma_store=args.tma_store,
            n_concurrent=args.concurrent,
            n_devices=args.devices,
        )
    tile = _parse_tile(args.tile) if args.tile is not None else None
    k_tiles = args.k_tiles if args.k_tiles is not None else 1.0
    return KernelCase(
        kernel_class=KernelClass.compute_bound,
        flops=gemm.flops,
        bytes=byte_count,
        working_set=byte_count,
        precision=precision,
        gemm=gemm,
        tile=tile,
        k_tiles=k_tiles,
        vgpr_per_wavefront=args.vgpr,
        mfma_utilization=args.utilization,
        n_concurrent=args.concurrent,
        n_devices=args.devices,
    )


_SEGMENTS_CSV_HEADER = (
    "segment,model_path,n_exec,multiplier,per_exec_s,kernel_s,memcpy_s,"
    "sync_s,subtotal_s"
)


def _segments_csv(app: workload.ApplicationPrediction) -> str:
    lines = [_SEGMENTS_CSV_HEADER]
    for seg in app.segments:
        lines.append(
            f"{seg.name},{seg.path.value},{seg.n_exec},{seg.multiplier:.9e},"
            f"{seg.per_exec.total_s:.9e},{seg.kernel_s:.9e},{seg.memcpy_s:.9e},"
            f"{seg.sync_s:.9e},{seg.subtotal_s:.9e}"
        )
    lines.append(
        f"TOTAL,,,,,{app.kernel_s:.9e},{app.memcpy_s:.9e},"
        f"{app.sync_s:.9e},{app.total_s:.9e}"
    )
    return "\n".join(lines) + "\n"


def _cmd_predict(args: argparse.Namespace, manifest: RunManifest) -> int:
    out_dir = _out_dir(args)
    calib = _load_calibration_arg(args, manifest)
    profile = _profile_for_run(args.profile, manifest, calib)

    if (args.gemm is None) == (args.segments is None):
        raise UsageError("predict needs exactly one of --gemm or --segments")

    if args.gemm is not None:
        case = _gemm_case(args, profile)
        if profile.vendor == "nvidia":
            breakdown = blackwell.kernel_time(case, profile)
        else:
            breakdown = cdna.kernel_time(case, profile)
        if calib is not None and case.gemm is not None:
            scale = calib.gemm_scale(max(case.gemm.m, case.gemm.n, case.gemm.k))
            if scale != 1.0:
                breakdown = breakdown.scaled(scale)
        print(f"profile        : {profile.name} ({profile.vendor})")
        print(f"gemm           : {case.gemm.m}x{case.gemm.n}x{case.gemm.k} "
              f"[{case.precision.value}]")
        _print_breakdown(breakdown)
        _emit(out_dir, manifest, "prediction.csv",
              _BREAKDOWN_CSV_HEADER + "\n" + _breakdown_csv_row(breakdown) + "\n")
    else:
        path = Path(args.segments)
        segfile = workload.parse_segments(path)
        manifest.add_input("segments", path)
        lookup = calib.lookup if calib is not None else None
        app = workload.aggregate(segfile, profile, multiplier_lookup=lookup)
        print(f"profile        : {profile.name} ({profile.vendor})")
        print(f"benchmark      : {app.benchmark} on {app.platform}")
        for seg in app.segments:
            print(f"  {seg.name:<24} {seg.path.value:<18} x{seg.n_exec:<8} "
                  f"{_fmt_seconds(seg.subtotal_s)}")
        for note in app.diagnostics:
            print(f"  note: {note}")
        print(f"kernel total   : {_fmt_seconds(app.kernel_s)}")
        if app.memcpy_s:
            print(f"memcpy total   : {_fmt_seconds(app.memcpy_s)}")
        if app.sync_s:
            print(f"sync total     : {_fmt_seconds(app.sync_s)}")
        print(f"total          : {_fmt_seconds(app.total_s)} ({app.total_s:.9e} s)")
        _emit(out_dir, manifest, "segments_prediction.csv", _segments_csv(app))

    if out_dir is not None:
        manifest.write(out_dir)
    return 0


# ---------------------------------------------------------------------------
# validate / compare
# ---------------------------------------------------------------------------

def _cmd_validate(args: argparse.Namespace, manifest: RunManifest) -> int:
    out_dir = _out_dir(args)
    calib = _load_calibration_arg(args, manifest)
    profile = _profile_for_run(args.profile, manifest, calib)
    segfiles = _load_segment_files(args.segments, manifest)
    measured = _load_measured(args.measured, manifest)

    report = validate(segfiles, measured, profile, calibration=calib)
    print(report_to_table(report))
    _emit(out_dir, manifest, "validation_report.csv", report_to_csv(report))
    if out_dir is not None:
        manifest.write(out_dir)
    return 0


def _cmd_compare(args: argparse.Namespace, manifest: RunManifest) -> int:
    out_dir = _out_dir(args)
    calib = _load_calibration_arg(args, manifest)
    segfiles = _load_segment_files(args.segments, manifest)
    measured = _load_measured(args.measured, manifest)

    lines = ["profile," + _CSV_HEADER]
    matched_platforms: set[str] = set()
    for entry in args.profiles:
        profile = _profile_for_run(entry, manifest, calib)
        subset = [s for s in segfiles if s.platform == profile.name]
        matched_platforms.update(s.platform for s in subset)
        print(f"=== {profile.name} ({profile.vendor}) ===")
        if not subset:
            print("  no segment files for this platform")
            continue
        meas_subset = [m for m in measured if m.platform == profile.name]
        report = validate(subset, meas_subset, profile, calibration=calib)
        print(report_to_table(report))
        print()
        for row in report.rows:
            lines.append(
                f"{profile.name},{row.benchmark},{row.platform},"
                f"{row.predicted_s:.9e},{row.measured_s:.9e},{row.error_pct:.4f},"
                f"{row.roofline_s:.9e},{row.roofline_error_pct:.4f}"
            )
    skipped = sorted({s.platform for s in segfiles} - matched_platforms)
    for platform in skipped:
        print(f"skipped: segment files for platform {platform!r} matched no profile")
    _emit(out_dir, manifest, "comparison.csv", "\n".join(lines) + "\n")
    if out_dir is not None:
        manifest.write(out_dir)
    return 0


# ---------------------------------------------------------------------------
# calibrate
# ---------------------------------------------------------------------------

def _pair_with_measured(segfiles: list[workload.SegmentFile],
                        measured: list[workload.MeasuredRecord], role: str,
                        ) -> list[tuple[workload.SegmentFile, workload.MeasuredRecord]]:
    by_key = {(m.benchmark, m.platform): m for m in measured}
    pairs = []
    for segfile in segfiles:
        key = (segfile.benchmark, segfile.platform)
        if key not in by_key:
            raise GpucastError(
                f"{role} case {segfile.benchmark}/{segfile.platform} has no row "
                "in the measured CSV"
            )
        pairs.append((segfile, by_key[key]))
    return pairs


def _cmd_calibrate(args: argparse.Namespace, manifest: RunManifest) -> int:
    out_dir = _out_dir(args)
    profile = _profile_for_run(args.profile, manifest, calibration=None)
    train_files = _load_segment_files(args.train, manifest)
    holdout_files = _load_segment_files(args.holdout, manifest) if args.holdout else []
    measured = _load_measured(args.measured, manifest)

    train = _pair_with_measured(train_files, measured, "train")
    holdout = _pair_with_measured(holdout_files, measured, "holdout")
    calib, fit = fit_calibration(train, holdout, profile,
                                 allow_worse=args.allow_worse)

    n = len(fit.train_errors_pct)
    print(f"fitted {len(calib.m_case)} multipliers from {n} training case(s)")
    print(f"train MAE      : {sum(fit.train_errors_pct) / n:.4f}%")
    if fit.holdout_mae_before_pct is not None:
        print(f"holdout MAE    : {fit.holdout_mae_before_pct:.4f}% -> "
              f"{fit.holdout_mae_after_pct:.4f}%"
              + (" (accepted)" if fit.accepted else " (worse; kept by override)"))
    else:
        print("holdout        : none supplied; calibration marked "
              f"{calib.provenance!r}")

    if out_dir is not None:
        calib_path = out_dir / "calibration.json"
        save_calibration(calib, calib_path)
        manifest.outputs.append("calibration.json")
        fit_doc = {
            "train_errors_pct": list(fit.train_errors_pct),
            "holdout_mae_before_pct": fit.holdout_mae_before_pct,
            "holdout_mae_after_pct": fit.holdout_mae_after_pct,
            "accepted": fit.accepted,
            "overridden": fit.overridden,
            "provenance": calib.provenance,
        }
        (out_dir / "fit_report.json").write_text(
            json.dumps(fit_doc, indent=2, sort_keys=True) + "\n")
        manifest.outputs.append("fit_report.json")
        manifest.write(out_dir)
    return 0


# ---------------------------------------------------------------------------
# sweep-tiles
# ---------------------------------------------------------------------------

def _cmd_sweep_tiles(args: argparse.Namespace, manifest: RunManifest) -> int:
    out_dir = _out_dir(args)
    profile = _profile_for_run(args.profile, manifest, calibration=None)
    gemm = _parse_gemm(args.gemm)
    precision = _parse_precision(args.precision)
    per_elem = PRECISION_BYTES[precision]
    working_set = _gemm_bytes(gemm, precision)

    candidates = []
    for text in args.tiles.split(","):
        tile = _parse_tile(text.strip())
        n_ctas = math.ceil(gemm.m / tile.b_m) * math.ceil(gemm.n / tile.b_n)
        flops_cta = 2.0 * tile.b_m * tile.b_n * gemm.k
        bytes_cta = (tile.b_m * gemm.k + gemm.k * tile.b_n
                     + tile.b_m * tile.b_n) * per_elem
        candidates.append(cdna.TileCandidate(
            name=text.strip(),
            flops_per_cta=flops_cta,
            bytes_per_cta=bytes_cta,
            n_ctas=n_ctas,
            w_eff=args.w_eff,
            tau_cta_s=args.tau_cta,
            precision=precision,
            working_set_bytes=working_set,
            tile=tile,
        ))

    selection = cdna.select_tile(candidates, profile)
    print(f"profile        : {profile.name}")
    print(f"gemm           : {gemm.m}x{gemm.n}x{gemm.k} [{precision.value}]")
    lines = ["tile,predicted_s,best"]
    for name, t in selection.evaluated:
        marker = " <- best" if name == selection.best.name else ""
        print(f"  {name:<12} {_fmt_seconds(t)}{marker}")
        lines.append(f"{name},{t:.9e},{1 if name == selection.best.name else 0}")
    _emit(out_dir, manifest, "tile_sweep.csv", "\n".join(lines) + "\n")
    if out_dir is not None:
        manifest.write(out_dir)
    return 0


# ---------------------------------------------------------------------------
# fuse
# ---------------------------------------------------------------------------

def _kernel_case_from_dict(raw: dict, index: int) -> tuple[str, KernelCase]:
    where = f"kernel[{index}]"
    if not isinstance(raw, dict):
        raise GpucastError(f"{where} must be an object")
    try:
        kernel_class = KernelClass(raw.get("class", "memory_bound"))
    except ValueError:
        raise GpucastError(
            f"{where}: unknown kernel class {raw.get('class')!r}") from None
    precision = raw.get("precision", "fp32")
    try:
        prec = Precision(precision)
    except ValueError:
        raise GpucastError(f"{where}: unknown precision {precision!r}") from None
    name = str(raw.get("name", f"kernel{index}"))
    try:
        case = KernelCase(
            kernel_class=kernel_class,
            flops=float(raw.get("flops", 0.0)),
            bytes=float(raw.get("bytes", 0.0)),
            working_set=float(raw.get("working_set", raw.get("bytes", 0.0))),
            precision=prec,
            n_loads=float(raw.get("n_loads", 0.0)),
            vgpr_per_wavefront=int(raw.get("vgpr_per_wavefront", 512)),
            mfma_utilization=raw.get("mfma_utilization"),
        )
    except (TypeError, ValueError) as exc:
        raise GpucastError(f"{where}: {exc}") from None
    return name, case


def _cmd_fuse(args: argparse.Namespace, manifest: RunManifest) -> int:
    out_dir = _out_dir(args)
    profile = _profile_for_run(args.profile, manifest, calibration=None)
    path = Path(args.kernels)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise GpucastError(f"kernel list not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise GpucastError(f"kernel list is not valid JSON: {path} ({exc})") from None
    if not isinstance(raw, list):
        raise GpucastError(f"kernel list must be a JSON array: {path}")
    manifest.add_input("kernels", path)

    named = [_kernel_case_from_dict(entry, i) for i, entry in enumerate(raw)]
    cases = [case for _, case in named]
    separate = [cdna.kernel_time(case, profile) for case in cases]
    separate_total = sum(b.total_s for b in separate)
    fused = cdna.fused_time(cases, args.tau_fusion, profile)

    print(f"profile        : {profile.name}")
    lines = ["kernel,predicted_s"]
    for (name, _), b in zip(named, separate):
        print(f"  {name:<24} {_fmt_seconds(b.total_s)}")
        lines.append(f"{name},{b.total_s:.9e}")
    print(f"separate total : {_fmt_seconds(separate_total)}")
    print(f"fused          : {_fmt_seconds(fused.total_s)}")
    delta = separate_total - fused.total_s
    pct = 100.0 * delta / separate_total if separate_total > 0 else 0.0
    print(f"saving         : {_fmt_seconds(delta)} ({pct:.2f}%)")
    lines.append(f"SEPARATE_TOTAL,{separate_total:.9e}")
    lines.append(f"FUSED,{fused.total_s:.9e}")
    _emit(out_dir, manifest, "fusion.csv", "\n".join(lines) + "\n")
    if out_dir is not None:
        manifest.write(out_dir)
    return 0


# ---------------------------------------------------------------------------
# parser construction and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gpucast",
        description="Analytical GPU kernel and application time prediction.",
    )
    parser.add_argument("--version", action="version",
                        version=f"gpucast {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_profile(p, plural=False):
        if plural:
            p.add_argument("--profiles", nargs="+", required=True,
                           metavar="PROFILE",
                           help="two or more profile names or JSON paths; "
                                f"shipped: {', '.join(shipped_profile_names())}")
        else:
            p.add_argument("--profile", required=True,
                           help="profile name or JSON path; shipped: "
                                f"{', '.join(shipped_profile_names())}")

    def add_out(p):
        p.add_argument("--out", metavar="DIR",
                       help="directory for CSV outputs and the run manifest; "
                            "omit to print only")

    p = sub.add_parser("predict", help="predict one kernel or one segment file")
    add_profile(p)
    p.add_argument("--gemm", metavar="N|MxNxK", help="GEMM problem size")
    p.add_argument("--tile", metavar="bMxbNxbK", help="CTA tile dimensions")
    p.add_argument("--segments", metavar="FILE", help="workload segment file")
    p.add_argument("--precision", help="numeric precision (default: fp16 on "
                                       "NVIDIA profiles, fp64 on AMD)")
    p.add_argument("--k-tiles", type=float, help="per-SM pipeline step count "
                                                 "(default: derived from dims)")
    p.add_argument("--alpha", type=float, help="compute/io overlap fraction in [0,1]")
    p.add_argument("--participants", type=int, default=1,
                   help="CTAs sharing each multicast load (default 1)")
    p.add_argument("--participants-b", type=int, default=None,
                   help="separate multicast width for the B operand stream")
    p.add_argument("--n-bar", type=int, default=1,
                   help="barrier waits per pipeline step (default 1)")
    p.add_argument("--two-sm", action="store_true",
                   help="model the paired-SM cooperative MMA mode")
    p.add_argument("--serial", action="store_true",
                   help="disable pipelining; stages execute back to back")
    p.add_argument("--decompress", action="store_true",
                   help="route operand loads through the decompression engine")
    p.add_argument("--compression-ratio", type=float, default=1.0,
                   help="compressed-size ratio for --decompress (default 1.0)")
    p.add_argument("--tma-store", action="store_true",
                   help="write results back through the bulk-copy engine")
    p.add_argument("--vgpr", type=int, default=512,
                   help="registers per wavefront for CDNA occupancy (default 512)")
    p.add_argument("--utilization", type=float, default=None,
                   help="matrix-unit utilization in (0,1] for CDNA profiles")
    p.add_argument("--concurrent", type=int, default=1,
                   help="co-resident kernels contending for the device")
    p.add_argument("--devices", type=int, default=1,
                   help="devices participating in the launch")
    p.add_argument("--calibration", metavar="FILE", help="calibration JSON to apply")
    add_out(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("validate",
                       help="compare predictions against measured kernel sums")
    add_profile(p)
    p.add_argument("--segments", nargs="+", required=True, metavar="FILE|DIR",
                   help="segment files and/or directories of them")
    p.add_argument("--measured", required=True, metavar="CSV",
                   help="measured times: benchmark,platform,time,unit,source")
    p.add_argument("--calibration", metavar="FILE", help="calibration JSON to apply")
    add_out(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("calibrate",
                       help="ratio-fit calibration multipliers on a train split")
    add_profile(p)
    p.add_argument("--train", nargs="+", required=True, metavar="FILE|DIR",
                   help="training segment files")
    p.add_argument("--holdout", nargs="*", default=[], metavar="FILE|DIR",
                   help="holdout segment files used to vet the fit")
    p.add_argument("--measured", required=True, metavar="CSV")
    p.add_argument("--allow-worse", action="store_true",
                   help="keep the fit even if it worsens the holdout MAE")
    add_out(p)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("compare",
                       help="validate the same workloads across several profiles")
    add_profile(p, plural=True)
    p.add_argument("--segments", nargs="+", required=True, metavar="FILE|DIR")
    p.add_argument("--measured", required=True, metavar="CSV")
    p.add_argument("--calibration", metavar="FILE")
    add_out(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("sweep-tiles",
                       help="rank tile shapes for a GEMM on the occupancy path")
    add_profile(p)
    p.add_argument("--gemm", required=True, metavar="N|MxNxK")
    p.add_argument("--tiles", required=True, metavar="T1,T2,...",
                   help="comma-separated tiles, e.g. 8x8,16x16,32x32")
    p.add_argument("--precision", default="fp64")
    p.add_argument("--w-eff", type=float, default=1.0,
                   help="effective wavefront slots per CU (default 1.0)")
    p.add_argument("--tau-cta", type=float, default=0.0,
                   help="per-CTA scheduling constant in seconds (default 0)")
    add_out(p)
    p.set_defaults(func=_cmd_sweep_tiles)

    p = sub.add_parser("fuse",
                       help="compare separate kernel launches with one fused kernel")
    add_profile(p)
    p.add_argument("--kernels", required=True, metavar="FILE",
                   help="JSON array of kernel descriptions")
    p.add_argument("--tau-fusion", type=float, default=0.0,
                   help="fixed fusion overhead in seconds (default 0)")
    add_out(p)
    p.set_defaults(func=_cmd_fuse)
    return parser


def main(argv: list[str] | None = None) -> int:
    args_list = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(args_list)
        if getattr(args, "func", None) is None:
            parser.print_help()
            return 1
        manifest = RunManifest(command=args.command, argv=args_list)
        return args.func(args, manifest)
    except (GpucastError, ValueError, OSError) as exc:
        print(f"gpucast: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit:
        raise
    except Exception as exc:  # pragma: no cover - internal invariant failure
        print(f"gpucast: internal error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
