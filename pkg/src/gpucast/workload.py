"""Workload ingestion and application-level aggregation.

A segment file describes one benchmark on one platform as a list of
characterised kernel segments (class, FLOPs, bytes, working set,
execution count, optional GEMM/tile dimensions) plus host-side memcpy and
sync phases.  Each segment is routed to a model path by its class and the
profile vendor, predicted once, scaled by any calibration multiplier, and
multiplied by its execution count; phase times are added on top.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from . import blackwell, cdna, roofline
from .core import (
    GemmDims,
    HardwareProfile,
    KernelCase,
    KernelClass,
    ModelPath,
    Precision,
    PredictionBreakdown,
    TileDims,
    WorkloadError,
)

__all__ = [
    "SEGMENT_SCHEMA_VERSION",
    "MemcpyEpisode",
    "WorkloadSegment",
    "SegmentFile",
    "MeasuredSource",
    "MeasuredRecord",
    "SegmentPrediction",
    "ApplicationPrediction",
    "parse_segments",
    "parse_segments_dict",
    "serialize_segments",
    "ingest_measured",
    "route_segment",
    "segment_case",
    "predict_segment",
    "aggregate",
    "naive_roofline_total",
    "fixture_path",
    "fixture_dir",
]

SEGMENT_SCHEMA_VERSION = 1

_FIXTURE_DIR = Path(__file__).parent / "fixtures"


@dataclass(frozen=True)
class MemcpyEpisode:
    bytes: float
    direction: str          # "h2d" | "d2h"
    count: int = 1

    def __post_init__(self) -> None:
        if self.bytes < 0:
            raise ValueError("memcpy bytes must be >= 0")
        if self.direction not in ("h2d", "d2h"):
            raise ValueError("memcpy direction must be 'h2d' or 'd2h'")
        if self.count < 1:
            raise ValueError("memcpy count must be >= 1")


@dataclass(frozen=True)
class WorkloadSegment:
    name: str
    kernel_class: KernelClass
    flops: float = 0.0
    bytes: float = 0.0
    working_set: float = 0.0
    n_exec: int = 1
    n_kernels: int = 1
    precision: Precision = Precision.fp32
    gemm: GemmDims | None = None
    tile: TileDims | None = None
    k_tiles: float | None = None
    n_loads: float = 0.0
    vgpr_per_wavefront: int = 512
    mfma_utilization: float | None = None
    memcpy: tuple[MemcpyEpisode, ...] = ()
    syncs: int = 0

    def __post_init__(self) -> None:
        if self.flops < 0 or self.bytes < 0 or self.working_set < 0:
            raise ValueError("flops, bytes and working_set must be >= 0")
        if self.n_exec < 1:
            raise ValueError("n_exec must be >= 1")
        if self.n_kernels < 1:
            raise ValueError("n_kernels must be >= 1")
        if self.syncs < 0:
            raise ValueError("syncs must be >= 0")


@dataclass(frozen=True)
class SegmentFile:
    benchmark: str
    platform: str
    schema_version: int = SEGMENT_SCHEMA_VERSION
    segments: tuple[WorkloadSegment, ...] = ()
    meta: dict[str, Any] = field(default_factory=dict)


class MeasuredSource(str, Enum):
    nsight_kern_sum = "nsight_kern_sum"
    rocprof_stats = "rocprof_stats"
    manual = "manual"


@dataclass(frozen=True)
class MeasuredRecord:
    benchmark: str
    platform: str
    time_s: float
    source: MeasuredSource


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _seg_error(origin: str, index: int | None, msg: str) -> WorkloadError:
    where = origin if index is None else f"{origin}, segment {index}"
    return WorkloadError(f"{where}: {msg}")


def _get_number(obj: dict, key: str, origin: str, index: int | None,
                default: float | None = None, minimum: float = 0.0) -> float:
    if key not in obj:
        if default is None:
            raise _seg_error(origin, index, f"missing field {key!r}")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _seg_error(origin, index, f"field {key!r} must be numeric (got {v!r})")
    if v < minimum:
        raise _seg_error(origin, index, f"field {key!r} must be >= {minimum:g} (got {v!r})")
    return float(v)


def parse_segments_dict(raw: dict[str, Any], origin: str = "<dict>") -> SegmentFile:
    if not isinstance(raw, dict):
        raise WorkloadError(f"{origin}: segment file must be a JSON object")
    for key in ("schema_version", "benchmark", "platform", "segments"):
        if key not in raw:
            raise WorkloadError(f"{origin}: missing top-level field {key!r}")
    version = raw["schema_version"]
    if version != SEGMENT_SCHEMA_VERSION:
        raise WorkloadError(
            f"{origin}: unsupported schema_version {version!r} "
            f"(expected {SEGMENT_SCHEMA_VERSION})"
        )
    if not isinstance(raw["segments"], list) or not raw["segments"]:
        raise WorkloadError(f"{origin}: 'segments' must be a non-empty list")

    segments: list[WorkloadSegment] = []
    for i, seg in enumerate(raw["segments"]):
        if not isinstance(seg, dict):
            raise _seg_error(origin, i, "segment entries must be objects")
        if "name" not in seg:
            raise _seg_error(origin, i, "missing field 'name'")
        if "class" not in seg:
            raise _seg_error(origin, i, "missing field 'class'")
        try:
            kclass = KernelClass(seg["class"])
        except ValueError:
            raise _seg_error(
                origin, i,
                f"unknown class {seg['class']!r} (expected one of "
                f"{', '.join(c.value for c in KernelClass)})",
            ) from None
        precision = Precision.fp32
        if "precision" in seg:
            try:
                precision = Precision(seg["precision"])
            except ValueError:
                raise _seg_error(origin, i,
                                 f"unknown precision {seg['precision']!r}") from None
        gemm = None
        if seg.get("gemm") is not None:
            g = seg["gemm"]
            try:
                gemm = GemmDims(m=int(g["m"]), n=int(g["n"]), k=int(g["k"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise _seg_error(origin, i, f"bad gemm dims: {exc}") from None
        tile = None
        if seg.get("tile") is not None:
            t = seg["tile"]
            try:
                tile = TileDims(b_m=int(t["b_m"]), b_n=int(t["b_n"]), b_k=int(t["b_k"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise _seg_error(origin, i, f"bad tile dims: {exc}") from None
        episodes: list[MemcpyEpisode] = []
        for j, ep in enumerate(seg.get("memcpy", [])):
            try:
                episodes.append(MemcpyEpisode(
                    bytes=float(ep["bytes"]), direction=str(ep["direction"]),
                    count=int(ep.get("count", 1)),
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise _seg_error(origin, i, f"bad memcpy episode {j}: {exc}") from None
        k_tiles = None
        if seg.get("k_tiles") is not None:
            k_tiles = _get_number(seg, "k_tiles", origin, i)
        util = None
        if seg.get("mfma_utilization") is not None:
            util = _get_number(seg, "mfma_utilization", origin, i)
        try:
            segments.append(WorkloadSegment(
                name=str(seg["name"]),
                kernel_class=kclass,
                flops=_get_number(seg, "flops", origin, i, default=0.0),
                bytes=_get_number(seg, "bytes", origin, i, default=0.0),
                working_set=_get_number(seg, "working_set", origin, i, default=0.0),
                n_exec=int(_get_number(seg, "n_exec", origin, i, default=1.0, minimum=1)),
                n_kernels=int(_get_number(seg, "n_kernels", origin, i, default=1.0,
                                          minimum=1)),
                precision=precision,
                gemm=gemm,
                tile=tile,
                k_tiles=k_tiles,
                n_loads=_get_number(seg, "n_loads", origin, i, default=0.0),
                vgpr_per_wavefront=int(_get_number(seg, "vgpr_per_wavefront", origin, i,
                                                   default=512.0, minimum=1)),
                mfma_utilization=util,
                memcpy=tuple(episodes),
                syncs=int(_get_number(seg, "syncs", origin, i, default=0.0)),
            ))
        except ValueError as exc:
            raise _seg_error(origin, i, str(exc)) from None

    meta = raw.get("meta", {})
    if not isinstance(meta, dict):
        raise WorkloadError(f"{origin}: 'meta' must be an object")
    return SegmentFile(
        benchmark=str(raw["benchmark"]),
        platform=str(raw["platform"]),
        schema_version=int(version),
        segments=tuple(segments),
        meta=dict(meta),
    )


def parse_segments(path: str | Path) -> SegmentFile:
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except FileNotFoundError:
        raise WorkloadError(f"segment file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise WorkloadError(f"segment file is not valid JSON: {p} ({exc})") from None
    return parse_segments_dict(raw, origin=str(p))


def serialize_segments(segfile: SegmentFile) -> dict[str, Any]:
    """Inverse of :func:`parse_segments_dict` (round-trips field-for-field)."""
    out_segments = []
    for seg in segfile.segments:
        entry: dict[str, Any] = {
            "name": seg.name,
            "class": seg.kernel_class.value,
            "flops": seg.flops,
            "bytes": seg.bytes,
            "working_set": seg.working_set,
            "n_exec": seg.n_exec,
            "n_kernels": seg.n_kernels,
            "precision": seg.precision.value,
            "n_loads": seg.n_loads,
            "vgpr_per_wavefront": seg.vgpr_per_wavefront,
            "syncs": seg.syncs,
        }
        if seg.gemm is not None:
            entry["gemm"] = {"m": seg.gemm.m, "n": seg.gemm.n, "k": seg.gemm.k}
        if seg.tile is not None:
            entry["tile"] = {"b_m": seg.tile.b_m, "b_n": seg.tile.b_n,
                             "b_k": seg.tile.b_k}
        if seg.k_tiles is not None:
            entry["k_tiles"] = seg.k_tiles
        if seg.mfma_utilization is not None:
            entry["mfma_utilization"] = seg.mfma_utilization
        if seg.memcpy:
            entry["memcpy"] = [
                {"bytes": ep.bytes, "direction": ep.direction, "count": ep.count}
                for ep in seg.memcpy
            ]
        out_segments.append(entry)
    return {
        "schema_version": segfile.schema_version,
        "benchmark": segfile.benchmark,
        "platform": segfile.platform,
        "meta": dict(segfile.meta),
        "segments": out_segments,
    }


_UNIT_SCALE = {"s": 1.0, "ms": 1e-3, "us": 1e-6}


def ingest_measured(path: str | Path) -> list[MeasuredRecord]:
    """Read a measured-times CSV (benchmark, platform, time, unit, source)."""
    p = Path(path)
    try:
        text = p.read_text()
    except FileNotFoundError:
        raise WorkloadError(f"measured file not found: {p}") from None
    reader = csv.DictReader(text.splitlines())
    required = {"benchmark", "platform", "time", "unit", "source"}
    if reader.fieldnames is None or not required.issubset(set(reader.fieldnames)):
        raise WorkloadError(
            f"{p}: measured CSV must have columns {', '.join(sorted(required))}"
        )
    records: list[MeasuredRecord] = []
    seen: set[tuple[str, str]] = set()
    for lineno, row in enumerate(reader, start=2):
        benchmark = (row["benchmark"] or "").strip()
        platform = (row["platform"] or "").strip()
        if not benchmark or not platform:
            raise WorkloadError(f"{p}, line {lineno}: empty benchmark or platform")
        unit = (row["unit"] or "").strip()
        if unit not in _UNIT_SCALE:
            raise WorkloadError(
                f"{p}, line {lineno}: unit must be one of s, ms, us (got {unit!r})"
            )
        try:
            time_value = float(row["time"])
        except (TypeError, ValueError):
            raise WorkloadError(
                f"{p}, line {lineno}: time must be numeric (got {row['time']!r})"
            ) from None
        if time_value <= 0:
            raise WorkloadError(f"{p}, line {lineno}: time must be > 0")
        try:
            source = MeasuredSource((row["source"] or "").strip())
        except ValueError:
            raise WorkloadError(
                f"{p}, line {lineno}: unknown source {row['source']!r}"
            ) from None
        key = (benchmark, platform)
        if key in seen:
            raise WorkloadError(
                f"{p}, line {lineno}: duplicate (benchmark, platform) pair {key}"
            )
        seen.add(key)
        records.append(MeasuredRecord(benchmark=benchmark, platform=platform,
                                      time_s=time_value * _UNIT_SCALE[unit],
                                      source=source))
    return records


# ---------------------------------------------------------------------------
# routing and prediction
# ---------------------------------------------------------------------------

def route_segment(segment: WorkloadSegment,
                  profile: HardwareProfile) -> tuple[ModelPath, str | None]:
    """Choose a model path for a segment.

    Compute-bound segments with full GEMM and tile dimensions go to the
    vendor's architecture path; everything else (including compute-bound
    segments missing those dimensions) takes the generic path.  The second
    element is a diagnostic when a fallback was applied.
    """
    if segment.kernel_class is KernelClass.compute_bound:
        if segment.gemm is not None and segment.tile is not None:
            if profile.vendor == "nvidia":
                return ModelPath.blackwell_stage, None
            return ModelPath.cdna_wavefront, None
        return (
            ModelPath.generic_roofline,
            f"segment {segment.name!r}: compute_bound without gemm+tile dims; "
            "using generic path",
        )
    # stencil maps onto the generic path as a memory-style proxy
    return ModelPath.generic_roofline, None


def _blackwell_k_tiles(segment: WorkloadSegment, profile: HardwareProfile) -> float:
    if segment.k_tiles is not None:
        return segment.k_tiles
    g, t = segment.gemm, segment.tile
    assert g is not None and t is not None
    total_steps = (g.m / t.b_m) * (g.n / t.b_n) * (g.k / t.b_k)
    return total_steps / profile.num_sm_or_cu


def segment_case(segment: WorkloadSegment, profile: HardwareProfile,
                 path: ModelPath) -> KernelCase:
    """Materialise the kernel case a segment presents to its model path."""
    if path is ModelPath.blackwell_stage:
        return KernelCase(
            kernel_class=segment.kernel_class,
            flops=segment.flops,
            bytes=segment.bytes,
            working_set=segment.working_set,
            precision=segment.precision,
            gemm=segment.gemm,
            tile=segment.tile,
            k_tiles=_blackwell_k_tiles(segment, profile),
        )
    if path is ModelPath.cdna_wavefront:
        k_tiles = segment.k_tiles
        if k_tiles is None and segment.gemm is not None and segment.tile is not None:
            k_tiles = max(1.0, _blackwell_k_tiles(segment, profile))
        flops = segment.flops if segment.flops > 0 else (
            segment.gemm.flops if segment.gemm is not None else 0.0
        )
        return KernelCase(
            kernel_class=segment.kernel_class,
            flops=flops,
            bytes=segment.bytes,
            working_set=segment.working_set,
            precision=segment.precision,
            gemm=segment.gemm,
            tile=segment.tile,
            k_tiles=k_tiles if k_tiles is not None else 1.0,
            n_loads=segment.n_loads,
            vgpr_per_wavefront=segment.vgpr_per_wavefront,
            mfma_utilization=segment.mfma_utilization,
        )
    return KernelCase(
        kernel_class=segment.kernel_class,
        flops=segment.flops,
        bytes=segment.bytes,
        working_set=segment.working_set,
        precision=segment.precision,
        n_kernels=segment.n_kernels,
    )


def predict_segment(segment: WorkloadSegment, profile: HardwareProfile,
                    generic_params: roofline.GenericPathParams | None = None,
                    cache_params: cdna.CacheModelParams | None = None,
                    ) -> tuple[PredictionBreakdown, str | None]:
    """Predict one execution of a segment on its routed path."""
    path, diagnostic = route_segment(segment, profile)
    case = segment_case(segment, profile, path)
    if path is ModelPath.blackwell_stage:
        return blackwell.kernel_time(case, profile), diagnostic
    if path is ModelPath.cdna_wavefront:
        return cdna.kernel_time(case, profile, cache_params), diagnostic
    return roofline.generic_predict(case, profile, generic_params), diagnostic


@dataclass(frozen=True)
class SegmentPrediction:
    name: str
    path: ModelPath
    n_exec: int
    multiplier: float
    per_exec: PredictionBreakdown
    kernel_s: float
    memcpy_s: float
    sync_s: float
    subtotal_s: float
    diagnostic: str | None = None


@dataclass(frozen=True)
class ApplicationPrediction:
    """Whole-application prediction with per-segment subtotals retained."""
    benchmark: str
    platform: str
    segments: tuple[SegmentPrediction, ...]
    total_s: float
    kernel_s: float
    memcpy_s: float
    sync_s: float

    @property
    def diagnostics(self) -> tuple[str, ...]:
        return tuple(s.diagnostic for s in self.segments if s.diagnostic)


def aggregate(segfile: SegmentFile, profile: HardwareProfile,
              generic_params: roofline.GenericPathParams | None = None,
              cache_params: cdna.CacheModelParams | None = None,
              multiplier_lookup=None) -> ApplicationPrediction:
    """Sum all segments: n_exec * (prediction * multiplier) plus phase times.

    ``multiplier_lookup`` is called as f(benchmark, platform, segment_name)
    and returns a calibration multiplier (1.0 when absent or None).
    """
    rows: list[SegmentPrediction] = []
    total = kernel_total = memcpy_total = sync_total = 0.0
    for seg in segfile.segments:
        per_exec, diagnostic = predict_segment(seg, profile, generic_params,
                                               cache_params)
        path, _ = route_segment(seg, profile)
        m = 1.0
        if multiplier_lookup is not None:
            m = float(multiplier_lookup(segfile.benchmark, segfile.platform, seg.name))
        kernel_s = seg.n_exec * per_exec.total_s * m
        memcpy_s = seg.n_exec * sum(
            ep.count * roofline.memcpy_time(ep.bytes, ep.direction, profile)
            for ep in seg.memcpy
        )
        sync_s = seg.n_exec * roofline.host_sync_time(seg.syncs, profile)
        subtotal = kernel_s + memcpy_s + sync_s
        rows.append(SegmentPrediction(
            name=seg.name, path=path, n_exec=seg.n_exec, multiplier=m,
            per_exec=per_exec, kernel_s=kernel_s, memcpy_s=memcpy_s,
            sync_s=sync_s, subtotal_s=subtotal, diagnostic=diagnostic,
        ))
        total += subtotal
        kernel_total += kernel_s
        memcpy_total += memcpy_s
        sync_total += sync_s
    return ApplicationPrediction(
        benchmark=segfile.benchmark, platform=segfile.platform,
        segments=tuple(rows), total_s=total, kernel_s=kernel_total,
        memcpy_s=memcpy_total, sync_s=sync_total,
    )


def naive_roofline_total(segfile: SegmentFile, profile: HardwareProfile) -> float:
    """Datasheet-roofline baseline for a whole benchmark: the kernel-segment
    bound summed over executions, with no launch, phase, or calibration
    terms."""
    total = 0.0
    for seg in segfile.segments:
        flops = seg.flops if seg.flops > 0 else (
            seg.gemm.flops if seg.gemm is not None else 0.0
        )
        bound = roofline.naive_roofline(flops, seg.bytes, profile,
                                        precision=seg.precision)
        total += seg.n_exec * bound.total_s
    return total


def fixture_dir() -> Path:
    return _FIXTURE_DIR


def fixture_path(*parts: str) -> Path:
    p = _FIXTURE_DIR.joinpath(*parts)
    if not p.exists():
        raise WorkloadError(f"no such fixture: {p}")
    return p
