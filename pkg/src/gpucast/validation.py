"""Accuracy reporting and calibration fitting.

Predictions are compared against measured profiler kernel sums per
(benchmark, platform).  Errors are percentage relative errors; the suite
metric is their arithmetic mean with equal weighting.  Every report also
carries the naive datasheet-roofline baseline so the two columns can be
read side by side.

Calibration is a ratio fit: the multiplier for a training case is simply
measured/predicted, which by construction drives training error to zero.
A per-platform fallback multiplier (geometric mean of the training ratios)
is what generalises to unseen benchmarks, and a fit is refused when that
fallback makes the holdout MAE worse, unless explicitly overridden.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import cdna, roofline
from .core import CalibrationRefused, GpucastError, HardwareProfile
from .workload import (
    ApplicationPrediction,
    MeasuredRecord,
    SegmentFile,
    aggregate,
    naive_roofline_total,
)

__all__ = [
    "relative_error_pct",
    "mae_pct",
    "CalibrationSet",
    "ValidationRow",
    "ValidationReport",
    "FitReport",
    "validate",
    "fit_calibration",
    "report_to_csv",
    "report_to_table",
    "load_calibration",
    "save_calibration",
]

WILDCARD = "*"


def relative_error_pct(predicted_s: float, measured_s: float) -> float:
    """|predicted - measured| / measured * 100."""
    if measured_s <= 0:
        raise ValueError("measured_s must be > 0")
    if predicted_s < 0:
        raise ValueError("predicted_s must be >= 0")
    return abs(predicted_s - measured_s) / measured_s * 100.0


def mae_pct(errors_pct: list[float]) -> float:
    """Arithmetic mean of percentage errors, equal weighting."""
    if not errors_pct:
        raise ValueError("mae_pct requires at least one error value")
    return sum(errors_pct) / len(errors_pct)


@dataclass(frozen=True)
class CalibrationSet:
    """Multipliers applied on top of model predictions.

    m_case is keyed by (benchmark, platform, segment-or-None); a benchmark
    of "*" acts as a per-platform fallback.  provenance is "default" for
    an identity set, "fitted" for a holdout-checked fit, and
    "fitted_unvalidated" when no holdout was supplied.
    """
    m_case: dict[tuple[str, str, str | None], float] = field(default_factory=dict)
    piecewise_gemm_scale: tuple[tuple[float, float], ...] = ()   # (max_dim, mult)
    tile_factors: dict[str, float] = field(default_factory=dict)
    tau_overrides: dict[str, float] = field(default_factory=dict)
    provenance: str = "default"
    split: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, mult in self.m_case.items():
            if mult <= 0:
                raise ValueError(f"calibration multiplier for {key} must be > 0")
        for _, mult in self.piecewise_gemm_scale:
            if mult <= 0:
                raise ValueError("piecewise gemm multipliers must be > 0")

    def multiplier(self, benchmark: str, platform: str,
                   segment: str | None = None) -> float:
        for key in ((benchmark, platform, segment), (benchmark, platform, None),
                    (WILDCARD, platform, None)):
            if key in self.m_case:
                return self.m_case[key]
        return 1.0

    def gemm_scale(self, dim: int) -> float:
        """Multiplier for a GEMM of the given leading dimension, from the
        first bucket whose ceiling is >= dim."""
        for max_dim, mult in self.piecewise_gemm_scale:
            if dim <= max_dim:
                return mult
        return 1.0

    def lookup(self, benchmark: str, platform: str, segment: str | None = None):
        # adapter matching workload.aggregate's multiplier_lookup signature
        return self.multiplier(benchmark, platform, segment)


def save_calibration(calib: CalibrationSet, path: str | Path) -> None:
    doc = {
        "provenance": calib.provenance,
        "split": calib.split,
        "m_case": [
            {"benchmark": b, "platform": p, "segment": s, "multiplier": m}
            for (b, p, s), m in sorted(calib.m_case.items(),
                                       key=lambda kv: (kv[0][0], kv[0][1],
                                                       kv[0][2] or ""))
        ],
        "piecewise_gemm_scale": [
            {"max_dim": d, "multiplier": m} for d, m in calib.piecewise_gemm_scale
        ],
        "tile_factors": calib.tile_factors,
        "tau_overrides": calib.tau_overrides,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_calibration(path: str | Path) -> CalibrationSet:
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except FileNotFoundError:
        raise GpucastError(f"calibration file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise GpucastError(f"calibration file is not valid JSON: {p} ({exc})") from None
    try:
        m_case = {
            (e["benchmark"], e["platform"], e.get("segment")): float(e["multiplier"])
            for e in raw.get("m_case", [])
        }
        piecewise = tuple(
            (float(e["max_dim"]), float(e["multiplier"]))
            for e in raw.get("piecewise_gemm_scale", [])
        )
        return CalibrationSet(
            m_case=m_case,
            piecewise_gemm_scale=piecewise,
            tile_factors={str(k): float(v)
                          for k, v in raw.get("tile_factors", {}).items()},
            tau_overrides={str(k): float(v)
                           for k, v in raw.get("tau_overrides", {}).items()},
            provenance=str(raw.get("provenance", "default")),
            split=dict(raw.get("split", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GpucastError(f"bad calibration file {p}: {exc}") from None


@dataclass(frozen=True)
class ValidationRow:
    benchmark: str
    platform: str
    predicted_s: float
    measured_s: float
    error_pct: float
    roofline_s: float
    roofline_error_pct: float


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]
    suite_mae_pct: float | None
    roofline_mae_pct: float | None
    uncovered_segments: tuple[str, ...]   # segment files without measured times
    uncovered_measured: tuple[str, ...]   # measured rows without segment files
    predictions: tuple[ApplicationPrediction, ...] = ()


def validate(segfiles: list[SegmentFile], measured: list[MeasuredRecord],
             profile: HardwareProfile,
             calibration: CalibrationSet | None = None,
             generic_params: roofline.GenericPathParams | None = None,
             cache_params: cdna.CacheModelParams | None = None) -> ValidationReport:
    """Predict every segment file and compare with its measured kernel sum.

    Unmatched entries on either side are listed as uncovered, never
    silently dropped.  The roofline columns always come from the naive
    datasheet bound with no calibration applied.
    """
    measured_by_key = {(m.benchmark, m.platform): m for m in measured}
    lookup = calibration.lookup if calibration is not None else None

    rows: list[ValidationRow] = []
    preds: list[ApplicationPrediction] = []
    uncovered_segments: list[str] = []
    matched_keys: set[tuple[str, str]] = set()
    for segfile in sorted(segfiles, key=lambda s: (s.benchmark, s.platform)):
        key = (segfile.benchmark, segfile.platform)
        app = aggregate(segfile, profile, generic_params, cache_params,
                        multiplier_lookup=lookup)
        preds.append(app)
        if key not in measured_by_key:
            uncovered_segments.append(f"{segfile.benchmark}/{segfile.platform}")
            continue
        matched_keys.add(key)
        meas = measured_by_key[key]
        roof = naive_roofline_total(segfile, profile)
        rows.append(ValidationRow(
            benchmark=segfile.benchmark,
            platform=segfile.platform,
            predicted_s=app.total_s,
            measured_s=meas.time_s,
            error_pct=relative_error_pct(app.total_s, meas.time_s),
            roofline_s=roof,
            roofline_error_pct=relative_error_pct(roof, meas.time_s),
        ))
    uncovered_measured = [
        f"{b}/{p}" for (b, p) in sorted(measured_by_key)
        if (b, p) not in matched_keys
    ]
    suite_mae = mae_pct([r.error_pct for r in rows]) if rows else None
    roof_mae = mae_pct([r.roofline_error_pct for r in rows]) if rows else None
    return ValidationReport(
        rows=tuple(rows), suite_mae_pct=suite_mae, roofline_mae_pct=roof_mae,
        uncovered_segments=tuple(uncovered_segments),
        uncovered_measured=tuple(uncovered_measured),
        predictions=tuple(preds),
    )


@dataclass(frozen=True)
class FitReport:
    train_errors_pct: tuple[float, ...]
    holdout_mae_before_pct: float | None
    holdout_mae_after_pct: float | None
    accepted: bool
    overridden: bool = False


def _geometric_mean(values: list[float]) -> float:
    return math.exp(sum(math.log(v) for v in values) / len(values))


def fit_calibration(train: list[tuple[SegmentFile, MeasuredRecord]],
                    holdout: list[tuple[SegmentFile, MeasuredRecord]],
                    profile: HardwareProfile,
                    generic_params: roofline.GenericPathParams | None = None,
                    cache_params: cdna.CacheModelParams | None = None,
                    allow_worse: bool = False,
                    ) -> tuple[CalibrationSet, FitReport]:
    """Ratio-fit calibration multipliers from training pairs.

    Each training case gets multiplier measured/predicted (training error
    becomes exactly zero); each platform additionally gets a fallback
    multiplier, the geometric mean of its training ratios.  If the
    fallback worsens the holdout MAE the fit raises
    :class:`CalibrationRefused` unless allow_worse is set.
    """
    if not train:
        raise ValueError("fit_calibration requires at least one training pair")
    for segfile, meas in train + holdout:
        if (segfile.benchmark, segfile.platform) != (meas.benchmark, meas.platform):
            raise ValueError(
                f"segment file {segfile.benchmark}/{segfile.platform} paired with "
                f"measured row {meas.benchmark}/{meas.platform}"
            )

    m_case: dict[tuple[str, str, str | None], float] = {}
    per_platform: dict[str, list[float]] = {}
    for segfile, meas in train:
        predicted = aggregate(segfile, profile, generic_params, cache_params).total_s
        if predicted <= 0:
            raise ValueError(
                f"cannot fit {segfile.benchmark}/{segfile.platform}: "
                "uncalibrated prediction is not positive"
            )
        ratio = meas.time_s / predicted
        m_case[(segfile.benchmark, segfile.platform, None)] = ratio
        per_platform.setdefault(segfile.platform, []).append(ratio)
    for platform, ratios in per_platform.items():
        m_case[(WILDCARD, platform, None)] = _geometric_mean(ratios)

    split = {
        "train": sorted(f"{s.benchmark}/{s.platform}" for s, _ in train),
        "holdout": sorted(f"{s.benchmark}/{s.platform}" for s, _ in holdout),
    }
    fitted = CalibrationSet(m_case=m_case, provenance="fitted", split=split)

    train_errors = []
    for segfile, meas in train:
        pred = aggregate(segfile, profile, generic_params, cache_params,
                         multiplier_lookup=fitted.lookup).total_s
        train_errors.append(relative_error_pct(pred, meas.time_s))

    if not holdout:
        fitted = CalibrationSet(m_case=m_case, provenance="fitted_unvalidated",
                                split=split)
        return fitted, FitReport(train_errors_pct=tuple(train_errors),
                                 holdout_mae_before_pct=None,
                                 holdout_mae_after_pct=None, accepted=True)

    before, after = [], []
    for segfile, meas in holdout:
        base = aggregate(segfile, profile, generic_params, cache_params).total_s
        cal = aggregate(segfile, profile, generic_params, cache_params,
                        multiplier_lookup=fitted.lookup).total_s
        before.append(relative_error_pct(base, meas.time_s))
        after.append(relative_error_pct(cal, meas.time_s))
    mae_before, mae_after = mae_pct(before), mae_pct(after)

    if mae_after > mae_before and not allow_worse:
        raise CalibrationRefused(
            f"calibration refused: holdout MAE worsens from {mae_before:.4f}% to "
            f"{mae_after:.4f}%; pass the override to accept anyway"
        )
    return fitted, FitReport(
        train_errors_pct=tuple(train_errors),
        holdout_mae_before_pct=mae_before,
        holdout_mae_after_pct=mae_after,
        accepted=mae_after <= mae_before,
        overridden=mae_after > mae_before,
    )


# ---------------------------------------------------------------------------
# report rendering
# ---------------------------------------------------------------------------

_CSV_HEADER = "benchmark,platform,predicted_s,measured_s,error_pct,roofline_s,roofline_error_pct"


def report_to_csv(report: ValidationReport) -> str:
    """Deterministic CSV rendering: sorted rows, fixed float formats."""
    lines = [_CSV_HEADER]
    for r in report.rows:
        lines.append(
            f"{r.benchmark},{r.platform},{r.predicted_s:.9e},{r.measured_s:.9e},"
            f"{r.error_pct:.4f},{r.roofline_s:.9e},{r.roofline_error_pct:.4f}"
        )
    return "\n".join(lines) + "\n"


def report_to_table(report: ValidationReport) -> str:
    header = f"{'benchmark':<22} {'platform':<8} {'predicted':>12} {'measured':>12} " \
             f"{'err%':>8} {'roofline':>12} {'roof err%':>10}"
    lines = [header, "-" * len(header)]
    for r in report.rows:
        lines.append(
            f"{r.benchmark:<22} {r.platform:<8} {r.predicted_s:>12.6e} "
            f"{r.measured_s:>12.6e} {r.error_pct:>8.2f} {r.roofline_s:>12.6e} "
            f"{r.roofline_error_pct:>10.2f}"
        )
    if report.suite_mae_pct is not None:
        lines.append("-" * len(header))
        lines.append(
            f"{'suite MAE':<22} {'':<8} {'':>12} {'':>12} "
            f"{report.suite_mae_pct:>8.2f} {'':>12} {report.roofline_mae_pct:>10.2f}"
        )
    for name in report.uncovered_segments:
        lines.append(f"uncovered (no measured time): {name}")
    for name in report.uncovered_measured:
        lines.append(f"uncovered (no segment file): {name}")
    return "\n".join(lines)
