import math
import re

import pytest

from fmrepeater.config import PRESETS, SweepGrid, load_scenario, loads_scenario, preset_path
from fmrepeater.exceptions import ConfigParseError, UnitError, ValidationError
from fmrepeater.mode_mapper import Process


def _preset_text(name="experimental"):
    return preset_path(name).read_text(encoding="utf-8")


def _edit(text, key, value):
    pattern = re.compile(rf"^{re.escape(key)}\s*=.*$", re.M)
    assert pattern.search(text), key
    return pattern.sub(f"{key} = {value}", text, count=1)


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load(name):
    s = load_scenario(name)
    assert s.name == name
    assert s.process is Process.DFG
    assert s.filters


def test_experimental_values():
    s = load_scenario("experimental")
    assert s.crystal.length_cm == pytest.approx(0.5)
    assert s.crystal.sigma_nl == 0.48
    assert s.pump_comb.count == 2 and s.pump_comb.spacing == 12e9
    assert s.detector.dark_count_rate == 2000.0
    assert s.detector.dead_time == pytest.approx(100e-9)
    assert s.fiber is not None
    assert abs(s.nu_filter - s.nu_filter_nominal) < 50e9


def test_state_of_the_art_values():
    s = load_scenario("state_of_the_art")
    assert s.pump_comb.count == 16
    assert s.pump_comb.bandwidth == pytest.approx(100e9)
    assert s.fiber is None
    assert s.pump_chain.switch.switching_time < 300e-9
    assert s.pump_chain.source_power_dbm == pytest.approx(5.0)


def test_missing_unit_rejected():
    text = _edit(_preset_text(), "spacing", "12")
    with pytest.raises(UnitError):
        loads_scenario(text)


def test_wrong_unit_rejected():
    with pytest.raises(UnitError):
        loads_scenario(_edit(_preset_text(), "dead_time", "100 GHz"))


def test_unknown_key_and_section():
    with pytest.raises(ValidationError):
        loads_scenario(_preset_text() + "\n[bogus]\nx = 1 m\n")
    with pytest.raises(ValidationError):
        loads_scenario(_preset_text().replace("[modes]\n", "[modes]\nwidth = 3 GHz\n"))


def test_missing_required():
    text = re.sub(r"^dark_count_rate.*$\n", "", _preset_text(), flags=re.M)
    with pytest.raises(ValidationError):
        loads_scenario(text)


def test_malformed_reports_line():
    with pytest.raises(ConfigParseError) as info:
        loads_scenario("[modes]\ncount = 2\nthis line has no delimiter\n")
    assert info.value.line == 3


def test_triple_tolerance():
    with pytest.raises(ValidationError):
        loads_scenario(_edit(_preset_text(), "filter", "1540 nm"))
    unlocked = loads_scenario(_edit(_preset_text(), "filter_lock", "false"))
    assert unlocked.nu_filter == unlocked.nu_filter_nominal


def test_sweep_grid_validation():
    with pytest.raises(ValidationError):
        SweepGrid.build([0.1, 0.05], [1.0])
    with pytest.raises(ValidationError):
        SweepGrid.build([0.1], [1.0, 6.0])
    g = SweepGrid.build([0.1, 0.2], [1.0, 2.0, 3.0])
    assert g.points()[0] == (0.1, 1.0) and g.points()[1] == (0.1, 2.0) and len(g.points()) == 6


def test_unknown_preset():
    with pytest.raises(ValidationError):
        load_scenario("no_such_preset")


def test_free_space_rejects_fiber_section():
    text = _edit(_preset_text(), "coupling", "free_space")
    with pytest.raises(ValidationError):
        loads_scenario(text)


def test_infinite_crosstalk_allowed():
    s = loads_scenario(_edit(_preset_text(), "spatial_crosstalk", "inf dB"))
    assert s.pump_chain.vipa.spatial_crosstalk_db == math.inf
