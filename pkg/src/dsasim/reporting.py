"""Report data structures and file formats.

The design report is a pure function of (theta, physics config): its JSON
serialization is byte-stable so a stored theta can be re-evaluated and checked
against the original artifact. Run-only facts (seeds, convergence, timing)
belong to the separate synthesis summary written by the CLI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, ModelConsistencyError
from .network import PatternResult

# dB columns in CSV exports clamp here so zero-intensity samples stay finite
_DB_FLOOR = -300.0

PATTERN_CSV_HEADER = "angle_deg,input,subcarrier,gain_db,directivity_db,U_normalized"
TRACE_CSV_HEADER = "iteration,objective,grad_norm,step_norm"


@dataclass(frozen=True)
class ReportEntry:
    """Metrics for one (input, subcarrier) pair; indices are 1-based."""

    input: int
    subcarrier: int
    frequency_hz: float
    target_angle_deg: float | None
    peak_gain_db: float
    peak_directivity_db: float
    peak_angle_deg: float
    eta1: float
    eta2: float
    p_rad_w: float
    p_load_loss_w: float
    p_source_loss_w: float
    p_delivered_w: float


@dataclass(frozen=True)
class DesignReport:
    entries: tuple
    na: int
    k_count: int
    n_elements: int
    frequencies_hz: tuple
    aperture_baseline_db: float | None = None
    config_fingerprint: str | None = None
    patterns: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for e in self.entries:
            if not 0 <= e.eta2 <= e.eta1 <= 1 + 1e-9:
                raise ModelConsistencyError(
                    f"input {e.input} subcarrier {e.subcarrier}: efficiencies "
                    f"eta1={e.eta1:.6f} eta2={e.eta2:.6f} out of order")

    def to_json_dict(self) -> dict:
        return {
            "na": self.na,
            "k_count": self.k_count,
            "n_elements": self.n_elements,
            "frequencies_hz": list(self.frequencies_hz),
            "aperture_baseline_db": self.aperture_baseline_db,
            "config_fingerprint": self.config_fingerprint,
            "entries": [
                {
                    "input": e.input,
                    "subcarrier": e.subcarrier,
                    "frequency_hz": e.frequency_hz,
                    "target_angle_deg": e.target_angle_deg,
                    "peak_gain_db": e.peak_gain_db,
                    "peak_directivity_db": e.peak_directivity_db,
                    "peak_angle_deg": e.peak_angle_deg,
                    "eta1": e.eta1,
                    "eta2": e.eta2,
                    "p_rad_w": e.p_rad_w,
                    "p_load_loss_w": e.p_load_loss_w,
                    "p_source_loss_w": e.p_source_loss_w,
                    "p_delivered_w": e.p_delivered_w,
                }
                for e in self.entries
            ],
        }


def write_report_json(report: DesignReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_json_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def format_report_table(report: DesignReport) -> str:
    """Fixed-width summary table, one row per (input, subcarrier)."""
    lines = [
        f"{'input':>5} {'sc':>3} {'f_GHz':>8} {'target':>7} {'peak_at':>7} "
        f"{'gain_dB':>8} {'dir_dB':>7} {'eta1':>6} {'eta2':>6}"
    ]
    for e in report.entries:
        target = f"{e.target_angle_deg:7.1f}" if e.target_angle_deg is not None else "      -"
        lines.append(
            f"{e.input:>5} {e.subcarrier:>3} {e.frequency_hz / 1e9:8.4f} "
            f"{target} {e.peak_angle_deg:7.1f} {e.peak_gain_db:8.2f} "
            f"{e.peak_directivity_db:7.2f} {e.eta1:6.3f} {e.eta2:6.3f}")
    if report.aperture_baseline_db is not None:
        lines.append(
            f"aperture baseline (broadside, 4*pi*A/lambda^2): "
            f"{report.aperture_baseline_db:.2f} dB")
    return "\n".join(lines)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _fmt_db(value: float) -> str:
    return _fmt(max(value, _DB_FLOOR))


def write_pattern_csv(report: DesignReport, path) -> None:
    """One row per test angle per (input, subcarrier); dB columns floored at
    -300 so they always parse as numbers."""
    lines = [PATTERN_CSV_HEADER]
    for (inp, sc) in sorted(report.patterns):
        pat: PatternResult = report.patterns[(inp, sc)]
        for a, g, d, un in zip(pat.angles_deg, pat.gain_db,
                               pat.directivity_db, pat.u_normalized):
            lines.append(f"{_fmt(a)},{inp},{sc},{_fmt_db(g)},{_fmt_db(d)},{_fmt(un)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_trace_csv(trace, path) -> None:
    lines = [TRACE_CSV_HEADER]
    for it, obj, gn, sn in zip(trace.iterations, trace.objective,
                               trace.grad_norm, trace.step_norm):
        lines.append(f"{it},{obj:.17g},{gn:.17g},{sn:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_theta_json(theta: np.ndarray, path,
                     config_fingerprint: str | None = None) -> None:
    doc = {"theta": [float(t) for t in np.asarray(theta)],
           "config_fingerprint": config_fingerprint}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_theta_json(path) -> tuple[np.ndarray, str | None]:
    with open(path) as fh:
        doc = json.load(fh)
    try:
        theta = np.asarray(doc["theta"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"theta file malformed: {exc}") from exc
    if theta.ndim != 1 or not np.all(np.isfinite(theta)):
        raise DomainError("theta file must hold a flat list of finite reals")
    return theta, doc.get("config_fingerprint")
