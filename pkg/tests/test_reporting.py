"""Artifact formats: report JSON, pattern/trace CSV, theta files."""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dsasim.exceptions import DomainError, ModelConsistencyError
from dsasim.network import PatternResult
from dsasim.reporting import (PATTERN_CSV_HEADER, TRACE_CSV_HEADER,
                              DesignReport, ReportEntry, format_report_table,
                              read_theta_json, write_pattern_csv,
                              write_report_json, write_theta_json)


def _entry(inp=1, sc=1, eta1=0.9, eta2=0.6, target=180.0):
    return ReportEntry(
        input=inp, subcarrier=sc, frequency_hz=2.4e9,
        target_angle_deg=target, peak_gain_db=12.0, peak_directivity_db=13.0,
        peak_angle_deg=180.0, eta1=eta1, eta2=eta2, p_rad_w=0.6,
        p_load_loss_w=0.3, p_source_loss_w=0.1, p_delivered_w=0.9)


def _pattern(gains):
    gains = np.asarray(gains, dtype=float)
    t = len(gains)
    u = 10 ** (gains / 10)
    return PatternResult(
        angles_deg=np.linspace(0, 360, t, endpoint=False),
        u=u, u_normalized=u / u.max(), gain_db=gains, directivity_db=gains,
        peak_gain_db=float(np.max(gains)),
        peak_directivity_db=float(np.max(gains)),
        peak_angle_deg=0.0, p_rad=1.0)


def test_report_rejects_misordered_efficiencies():
    with pytest.raises(ModelConsistencyError):
        DesignReport(entries=(_entry(eta1=0.5, eta2=0.7),), na=1, k_count=1,
                     n_elements=3, frequencies_hz=(2.4e9,))
    with pytest.raises(ModelConsistencyError):
        DesignReport(entries=(_entry(eta1=1.2, eta2=0.5),), na=1, k_count=1,
                     n_elements=3, frequencies_hz=(2.4e9,))


def test_report_json_round_trip(tmp_path):
    report = DesignReport(entries=(_entry(), _entry(inp=2, target=None)),
                          na=2, k_count=1, n_elements=5,
                          frequencies_hz=(2.4e9,),
                          aperture_baseline_db=14.2,
                          config_fingerprint="deadbeef")
    path = tmp_path / "report.json"
    write_report_json(report, path)
    doc = json.loads(path.read_text())
    assert doc == report.to_json_dict()
    assert doc["entries"][1]["target_angle_deg"] is None
    assert doc["config_fingerprint"] == "deadbeef"
    # stable bytes on rewrite
    first = path.read_bytes()
    write_report_json(report, path)
    assert path.read_bytes() == first


def test_pattern_csv_header_and_floor(tmp_path):
    report = DesignReport(
        entries=(_entry(),), na=1, k_count=1, n_elements=3,
        frequencies_hz=(2.4e9,),
        patterns={(1, 1): _pattern([0.0, -np.inf, 3.0, -320.0])})
    path = tmp_path / "pattern.csv"
    write_pattern_csv(report, path)
    lines = path.read_text().splitlines()
    assert lines[0] == PATTERN_CSV_HEADER
    assert len(lines) == 5
    assert "inf" not in path.read_text()
    floored = lines[2].split(",")
    assert floored[3] == "-300" and floored[4] == "-300"


def test_pattern_csv_sorted_by_input_then_subcarrier(tmp_path):
    report = DesignReport(
        entries=(_entry(),), na=2, k_count=2, n_elements=3,
        frequencies_hz=(2.4e9, 2.44e9),
        patterns={(2, 1): _pattern([1.0]), (1, 2): _pattern([2.0]),
                  (1, 1): _pattern([3.0]), (2, 2): _pattern([4.0])})
    path = tmp_path / "pattern.csv"
    write_pattern_csv(report, path)
    rows = [line.split(",")[1:3] for line in path.read_text().splitlines()[1:]]
    assert rows == [["1", "1"], ["1", "2"], ["2", "1"], ["2", "2"]]


def test_trace_csv_round_trip(tmp_path):
    from dsasim.reporting import write_trace_csv

    class Trace:
        iterations = np.array([0, 1, 2])
        objective = np.array([2.0, 1.0 / 3.0, 0.125])
        grad_norm = np.array([1.5, 0.7, 1e-12])
        step_norm = np.array([0.0, 0.2, 0.01])

    path = tmp_path / "trace.csv"
    write_trace_csv(Trace(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == TRACE_CSV_HEADER
    assert len(lines) == 4
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert_allclose(data["objective"], Trace.objective, rtol=0, atol=0)
    assert_allclose(data["grad_norm"], Trace.grad_norm, rtol=0, atol=0)


def test_theta_round_trip(tmp_path):
    theta = np.array([0.1, -2.5, 1.0 / 3.0, 4e-17])
    path = tmp_path / "theta.json"
    write_theta_json(theta, path, config_fingerprint="c0ffee")
    back, fp = read_theta_json(path)
    assert_allclose(back, theta, rtol=0, atol=0)
    assert fp == "c0ffee"
    write_theta_json(theta, path)
    _, fp_none = read_theta_json(path)
    assert fp_none is None


@pytest.mark.parametrize("doc", [
    {},
    {"theta": "abc"},
    {"theta": [[1.0, 2.0]]},
    {"theta": [1.0, None]},
    {"theta": [1.0, np.nan]},
])
def test_theta_malformed_rejected(tmp_path, doc):
    path = tmp_path / "theta.json"
    path.write_text(json.dumps(doc, default=str))
    with pytest.raises(DomainError):
        read_theta_json(path)


def test_format_report_table():
    report = DesignReport(entries=(_entry(), _entry(inp=2, target=None)),
                          na=2, k_count=1, n_elements=5,
                          frequencies_hz=(2.4e9,),
                          aperture_baseline_db=15.5)
    table = format_report_table(report)
    lines = table.splitlines()
    assert len(lines) == 4
    assert "gain_dB" in lines[0]
    assert " 180.0" in lines[1]
    assert " - " in lines[2] or lines[2].rstrip().split()[3] == "-"
    assert "15.50 dB" in lines[3]
