import json
import math
import re

import numpy as np
import pytest

from fmrepeater import analysis
from fmrepeater.config import SweepGrid, load_scenario, loads_scenario, preset_path
from fmrepeater.exceptions import ConfigParseError, FitSingularError, ValidationError
from fmrepeater.photonics import NoiseDataPoint, snr_estimate
from fmrepeater.tables import Table, read_noise_csv


@pytest.fixture(scope="module")
def exp():
    return load_scenario("experimental")


@pytest.fixture(scope="module")
def sota():
    return load_scenario("state_of_the_art")


def _drop_sections(text, names):
    out, skip = [], False
    for line in text.splitlines(keepends=True):
        m = re.match(r"^\[(.+)\]", line)
        if m:
            skip = m.group(1) in names
        if not skip:
            out.append(line)
    return "".join(out)


def test_sweep_single_point_matches_direct(exp):
    grid = SweepGrid.build([0.1], [0.5])
    res = analysis.run_sweep(exp, grid)
    direct = snr_estimate(exp.mean_photon_number, exp.rep_rate, exp.crystal, 0.1, exp.filters,
                          exp.detector, exp.noise_bandwidth, exp.fiber, exp.nu_filter)
    assert len(res.table) == 1
    assert res.table.column("snr_db") == [f"{direct:.2f}"]
    assert res.table.column("argmax") == ["1"]


def test_sweep_workers_identical(sota):
    a = analysis.run_sweep(sota, workers=1).table.to_csv()
    b = analysis.run_sweep(sota, workers=8).table.to_csv()
    assert a == b


def test_sweep_state_of_the_art_region(sota):
    res = analysis.run_sweep(sota)
    ok = (res.snr_db >= 25.0) & (res.eta >= 0.20)
    assert ok.any()


def test_conversion_curve(exp):
    table, eta = analysis.conversion_curve(exp, [0.0, 0.08, 0.16])
    assert table.column("eta_db")[0] == "-inf"
    assert abs(float(table.column("eta_db")[-1]) + 30.0) <= 3.0
    assert np.all(np.diff(eta) > 0)
    with pytest.raises(ValidationError):
        analysis.conversion_curve(exp, [-0.1])


def test_noise_exact_recovery(exp):
    powers = [0.02, 0.05, 0.08, 0.11, 0.16]
    points = analysis.synthetic_noise_curve(exp, powers)
    res = analysis.noise_decompose(exp, points)
    assert res.fit.beta == pytest.approx(exp.crystal.beta_raman, rel=1e-9)
    assert res.fit.alpha_fixed
    assert res.table.header == ("pump_mw", "total", "fiber_theory", "crystal_estimate")


def test_noise_two_lengths_fits_alpha(exp):
    powers = [0.04, 0.16] * 3
    lengths = [0.5, 0.5, 2.0, 2.0, 5.0, 5.0]
    points = analysis.synthetic_noise_curve(exp, powers, lengths)
    res = analysis.noise_decompose(exp, points)
    assert not res.fit.alpha_fixed
    assert res.fit.beta == pytest.approx(exp.crystal.beta_raman, rel=1e-6)
    assert res.fit.alpha == pytest.approx(exp.crystal.alpha_raman, rel=1e-6)


def test_noise_two_rows_singular(exp):
    with pytest.raises(FitSingularError):
        analysis.noise_decompose(exp, analysis.synthetic_noise_curve(exp, [0.05, 0.16]))


def test_noise_dark_only(exp):
    import dataclasses

    free = dataclasses.replace(exp, fiber=None)
    pts = [NoiseDataPoint(p, exp.detector.dark_count_rate) for p in (0.02, 0.08, 0.16)]
    res = analysis.noise_decompose(free, pts)
    assert res.table.column("crystal_estimate") == ["0", "0", "0"]


def test_noise_csv_round_trip(exp):
    pts = analysis.synthetic_noise_curve(exp, [0.02, 0.08, 0.16])
    back = read_noise_csv(analysis.noise_points_to_csv(pts))
    for a, b in zip(pts, back):
        assert b.pump_power == pytest.approx(a.pump_power, rel=1e-12)
        assert b.counts_per_second == pytest.approx(a.counts_per_second, rel=1e-14)


def test_noise_csv_errors():
    with pytest.raises(ConfigParseError) as info:
        read_noise_csv("pump_mw,counts_per_s\n10,100\n20\n")
    assert info.value.line == 3
    with pytest.raises(ConfigParseError):
        read_noise_csv("pump,counts\n1,2\n")


def test_bundled_noise_file_matches_generator(exp):
    from importlib import resources

    text = (resources.files("fmrepeater.presets") / "noise_synthetic.csv").read_text()
    pts = read_noise_csv(text)
    regenerated = analysis.synthetic_noise_curve(exp, [p.pump_power for p in pts])
    for a, b in zip(pts, regenerated):
        assert a.counts_per_second == pytest.approx(b.counts_per_second, rel=1e-12)


def test_budget_experimental(exp):
    res = analysis.budget(exp)
    assert abs(res.figures["extinction_db"] - 8.0) <= 0.5
    assert res.figures["modes"] == 2
    assert "parameter-conditional" in res.text


def test_budget_state_of_the_art_structure(sota):
    res = analysis.budget(sota)
    f = res.figures
    assert f["modes"] == 16
    assert f["bandwidth_hz"] == pytest.approx(100e9)
    assert f["switching_time_s"] < 300e-9
    assert f["ledger_total_db"] == 25.0
    items = {(r[0], r[1]) for r in res.table.rows}
    for key in ("output_snr", "conversion_efficiency", "spectral_bandwidth", "number_of_modes",
                "extinction_ratio", "switching_time"):
        assert ("figure_of_merit", key) in items
    modes = [r for r in res.table.rows if r[0] == "mode_power"]
    assert len(modes) == 16 and all(r[2] == "-20.00" for r in modes)


def test_budget_empty_pump_chain():
    text = _drop_sections(preset_path("experimental").read_text(),
                          {"pump_chain", "vipa", "switch", "amplifier"})
    s = loads_scenario(text, "bare")
    res = analysis.budget(s)
    assert res.figures["ledger_total_db"] == 0.0
    assert ("ledger", "total", "0.00", "dB") in res.table.rows


def test_simulate_determinism(exp):
    a = analysis.simulate(exp, seed=42, trials=5000, workers=1)
    b = analysis.simulate(exp, seed=42, trials=5000, workers=8)
    assert a.table.to_csv() == b.table.to_csv()
    assert a.summary_json() == b.summary_json()
    assert json.loads(a.summary_json())["seed"] == 42
    with pytest.raises(ValidationError):
        analysis.simulate(exp, seed=1, trials=0)


def test_simulate_z_score(sota):
    rep = analysis.simulate(sota, seed=42, trials=100_000)
    assert abs(rep.summary["herald_z_score"]) <= 3


def test_simulate_csv_round_trip(exp):
    rep = analysis.simulate(exp, seed=3, trials=500)
    assert Table.from_csv(rep.table.to_csv()) == rep.table


def test_plan_shift_report(exp):
    plan, text = analysis.plan_shift_report(exp, 1)
    assert plan.pump_shift == pytest.approx(6e9, abs=1e-3)
    assert "12.0000 GHz" in text
    assert "WARNING" not in text
    with pytest.raises(ValidationError):
        analysis.plan_shift_report(exp, 2)


def test_plan_shift_off_grid(exp):
    import dataclasses

    from fmrepeater.pump_bank import SpectralModeGrid

    # signal modes at 12 GHz but the comb at 2 GHz: the outer heralds miss by 5 GHz,
    # more than half of the 8 GHz etalon line
    shifted = dataclasses.replace(exp, pump_comb=SpectralModeGrid(exp.nu_pump, 2e9, 2))
    plan, text = analysis.plan_shift_report(shifted, 1)
    assert plan.off_grid
    assert "WARNING: off-grid" in text


def test_extinction_budget_no_chain(exp):
    import dataclasses

    bare = dataclasses.replace(exp, pump_chain=None)
    er = analysis.extinction_budget(bare)
    assert er.vipa_ct_db == math.inf and er.switch_ct_db == math.inf
