#!/usr/bin/env python3
"""Smoke test for the softcircuit_py extension module.

Builds are not installed anywhere; the script finds the cdylib produced by
`cargo build -p softcircuit-python`, stages it under an importable name and
exercises one round trip through every binding group. Run from anywhere:

    cargo build -p softcircuit-python
    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def stage_module(tmp: Path) -> None:
    candidates = []
    for profile in ("debug", "release"):
        for name in ("libsoftcircuit_py.so", "softcircuit_py.so", "softcircuit_py.pyd"):
            path = REPO_ROOT / "target" / profile / name
            if path.exists():
                candidates.append(path)
    if not candidates:
        sys.exit(
            "softcircuit_py cdylib not found under target/; "
            "run `cargo build -p softcircuit-python` first"
        )
    newest = max(candidates, key=lambda p: p.stat().st_mtime)
    shutil.copy2(newest, tmp / "softcircuit_py.so")
    sys.path.insert(0, str(tmp))


def expect_value_error(fn, label):
    try:
        fn()
    except ValueError:
        return
    raise AssertionError(f"{label}: expected ValueError")


def check_traces(sc):
    occupancy = sc.occupancy_from_ag_weight(0.8918)
    assert 0.70 < occupancy < 0.85, occupancy
    expect_value_error(lambda: sc.occupancy_from_ag_weight(1.5), "occupancy bounds")

    curve = sc.trace_curve(seed=0)
    assert curve.strain[0] == 0.0
    assert curve.normalized_resistance[0] == 1.0
    assert len(curve.strain) == len(curve.normalized_resistance)
    assert all(b > a for a, b in zip(curve.strain, curve.strain[1:]))
    if curve.failure_strain is not None:
        assert 0.0 < curve.failure_strain <= 0.6
    assert "TraceCurve" in repr(curve)

    # A fully occupied lattice conducts at any seed; strain far past the
    # mean break strain disconnects it.
    g = sc.network_conductance(4, 4, 1.0, seed=3)
    assert g is not None and g > 0.0, g
    assert sc.network_conductance(4, 4, 1.0, seed=3, strain=5.0) is None

    print("traces ok")


def check_coldchain(sc):
    monitor = sc.ColdChainMonitor()
    assert monitor.status == "SAFE" and not monitor.latched

    # 3600 s strictly above 5 degC latches on the 61st sample.
    for i in range(61):
        status = monitor.update(i * 60, 5.1)
    assert status == "UNSAFE" and monitor.latched
    assert monitor.sample_count == 61

    payload = monitor.telemetry()
    assert payload.startswith(b"SMARTLABEL v1\nstatus=UNSAFE\n")
    restored = sc.ColdChainMonitor.from_telemetry(payload)
    assert restored.latched and restored.sample_count == 61

    # Exactly the threshold is safe; latching requires strictly above.
    safe = sc.ColdChainMonitor()
    for i in range(100):
        safe.update(i * 60, 5.0)
    assert safe.status == "SAFE"

    expect_value_error(lambda: monitor.update(0, 4.0), "monotonic timestamps")
    print("coldchain ok")


def check_thermistor(sc):
    assert abs(sc.ntc_resistance(25.0) - 10_000.0) < 1e-9
    assert sc.ntc_resistance(50.0) < 10_000.0 < sc.ntc_resistance(0.0)

    # Equal legs at 25 degC put a 10-bit low-side divider at half scale.
    assert sc.adc_from_temperature(25.0) == 512

    temps = [20.0 + 0.5 * i for i in range(41)]
    points = [(sc.adc_from_temperature(t), t) for t in temps]
    cal = sc.fit_linear_calibration(points)
    assert cal.slope_c_per_count < 0.0
    assert cal.fit_range_c == (20.0, 40.0)
    assert cal.residual_rms_c < 0.5
    worst = max(abs(cal.temperature(count)[0] - t) for count, t in points)
    assert worst < 1.0, worst
    inside, extrapolated = cal.temperature(sc.adc_from_temperature(30.0))
    assert not extrapolated and abs(inside - 30.0) < 1.0
    assert cal.temperature(sc.adc_from_temperature(90.0))[1]

    assert sc.moving_average([1.0, 2.0, 3.0, 4.0], 2) == [1.0, 1.5, 2.5, 3.5]
    print("thermistor ok")


def check_dsp(sc):
    fs = 250.0
    notch = sc.design_notch(60.0, 30.0, fs)
    assert notch.is_stable and notch.section_count == 1
    assert notch.magnitude_db(60.0) < -60.0
    mains = [math.sin(2.0 * math.pi * 60.0 * i / fs) for i in range(1250)]
    tail = notch.apply(mains)[-250:]
    rms = math.sqrt(sum(v * v for v in tail) / len(tail))
    assert rms < 0.01, rms

    band = sc.design_bandpass(0.5, 40.0, fs)
    assert band.section_count == 2
    assert band.magnitude_db(10.0) > -1.0
    assert sc.design_highpass(0.5, fs).is_stable
    assert sc.design_lowpass(40.0, fs).is_stable

    env = sc.rms_envelope([2.0] * 50, 10)
    assert all(abs(v - 2.0) < 1e-12 for v in env)

    # Impulse train at 600 ms spacing: 100 bpm.
    ecg = [0.0] * 2500
    for peak in range(50, 2500, 150):
        ecg[peak] = 1.0
    summary = sc.detect_r_peaks(ecg, sample_rate_hz=fs)
    assert len(summary.r_peak_indices) == 17
    assert summary.heart_rate_bpm is not None
    assert abs(summary.heart_rate_bpm - 100.0) < 1.0
    assert all(abs(rr - 600.0) < 1e-9 for rr in summary.rr_intervals_ms)

    assert sc.dtw_distance([0.0, 1.0, 2.0], [0.0, 2.0]) == 1.0
    assert sc.dtw_distance([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert sc.euclidean_distance([0.0, 3.0], [4.0, 3.0]) == 4.0

    bump = [math.exp(-((i - 50) ** 2) / 200.0) for i in range(100)]
    ramp = [i / 99.0 for i in range(100)]
    scaled = [1.1 * v for v in bump]
    assignments = sc.classify_nearest(
        [("q", scaled)], [("bump", bump), ("ramp", ramp)], metric="dtw"
    )
    assert len(assignments) == 1
    label, distance = assignments[0]
    assert label == "bump" and distance < sc.dtw_distance(scaled, ramp)
    expect_value_error(
        lambda: sc.classify_nearest([("q", scaled)], [("bump", bump)], metric="cosine"),
        "unknown metric",
    )
    print("dsp ok")


def check_recycle(sc):
    fraction = sc.ag_dry_weight_fraction(4.12, 1.25, 0.40, 0.5)
    assert abs(fraction - 0.8918) < 1e-3, fraction

    ledger = dict(sc.separation_ledger(100.0, 91.18, 1.04))
    assert set(ledger) == {"recovered", "lost", "substrate_bound"}
    assert abs(ledger["lost"] - 7.78) < 1e-9
    assert abs(sum(ledger.values()) - 100.0) < 1e-9

    wash = dict(sc.wash_ledger(12.0, 9.62, 0.73))
    assert abs(wash["recovered_powder"] - 8.89) < 1e-9

    retention = sc.conductivity_retention(100.0, 97.41)
    assert abs(retention - 0.9741) < 1e-12
    expect_value_error(lambda: sc.conductivity_retention(-1.0, 1.0), "positive sigma")
    print("recycle ok")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        stage_module(Path(tmp))
        import softcircuit_py as sc

        check_traces(sc)
        check_coldchain(sc)
        check_thermistor(sc)
        check_dsp(sc)
        check_recycle(sc)
    print("smoke test passed")


if __name__ == "__main__":
    main()
