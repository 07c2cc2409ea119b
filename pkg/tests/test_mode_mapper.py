import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fmrepeater.exceptions import UnreachableShiftError, ValidationError
from fmrepeater.mode_mapper import (
    Process,
    idler_frequency,
    output_extinction,
    plan_shift,
    power_sum_db,
    required_shift,
    select_pump_mode,
    shift_displacement,
)
from fmrepeater.pump_bank import SpectralModeGrid
from fmrepeater.units import SPEED_OF_LIGHT

NU_SIG = SPEED_OF_LIGHT / 771.3e-9
NU_PUMP = SPEED_OF_LIGHT / 1553e-9
NU_IDLER = NU_SIG - NU_PUMP  # exact DFG complement


def test_process_parse():
    assert Process.parse("dfg") is Process.DFG
    assert Process.parse(Process.SFG) is Process.SFG
    with pytest.raises(ValidationError):
        Process.parse("OPO")


def test_matched_zero_shift():
    assert required_shift(NU_SIG, 0.0, NU_PUMP, NU_IDLER, "DFG") == 0.0


def test_plus_six_ghz_herald():
    # DFG: (nu_s + 6) - (nu_p + f) = nu_i  ->  f = +6 GHz
    assert required_shift(NU_SIG, 6e9, NU_PUMP, NU_IDLER, "DFG") == pytest.approx(6e9, abs=1e-3)
    # SFG counterpart: (nu_s + 6) + (nu_p + f) = nu_s + nu_p  ->  f = -6 GHz
    assert required_shift(NU_SIG, 6e9, NU_PUMP, NU_SIG + NU_PUMP, "SFG") == pytest.approx(-6e9, abs=1e-3)


def test_twelve_ghz_switch_displacement():
    d = shift_displacement(NU_SIG, NU_PUMP + 6e9, NU_PUMP - 6e9, "DFG")
    assert d == pytest.approx(12e9, abs=4 * math.ulp(NU_SIG))
    i_plus = idler_frequency(NU_SIG, NU_PUMP + 6e9, "DFG")
    i_minus = idler_frequency(NU_SIG, NU_PUMP - 6e9, "DFG")
    assert i_minus - i_plus == pytest.approx(12e9, abs=4 * math.ulp(NU_SIG))


def test_unreachable():
    with pytest.raises(UnreachableShiftError):
        required_shift(NU_SIG, 0.0, NU_PUMP, NU_IDLER + 1e12, "DFG", comb_span=100e9)


@given(st.floats(min_value=-50e9, max_value=50e9), st.floats(min_value=-50e9, max_value=50e9),
       st.sampled_from(["DFG", "SFG"]))
def test_required_shift_inverse(f_suc, detune, process):
    nu_filter = (NU_IDLER if process == "DFG" else NU_SIG + NU_PUMP) + detune
    f = required_shift(NU_SIG, f_suc, NU_PUMP, nu_filter, process)
    back = idler_frequency(NU_SIG + f_suc, NU_PUMP + f, process)
    assert back == pytest.approx(nu_filter, abs=8 * math.ulp(NU_SIG + NU_PUMP))


@given(st.floats(min_value=-50e9, max_value=50e9), st.floats(min_value=1e6, max_value=10e9),
       st.sampled_from(["DFG", "SFG"]))
def test_required_shift_linear(f_suc, step, process):
    a = required_shift(NU_SIG, f_suc, NU_PUMP, NU_IDLER, process)
    b = required_shift(NU_SIG, f_suc + step, NU_PUMP, NU_IDLER, process)
    slope = 1.0 if process == "DFG" else -1.0
    assert (b - a) == pytest.approx(slope * step, rel=1e-6, abs=1e-3)


COMB16 = SpectralModeGrid(NU_PUMP, 6.25e9, 16)


def test_select_examples():
    on = select_pump_mode(COMB16.offset(3), COMB16)
    assert on.index == 3 and on.residual_detuning == 0.0
    mid = (COMB16.offset(4) + COMB16.offset(5)) / 2
    tie = select_pump_mode(mid, COMB16)
    assert tie.index == 4
    assert tie.residual_detuning == pytest.approx(6.25e9 / 2)
    assert select_pump_mode(1e9, COMB16, filter_fwhm=250e6).off_grid


@given(st.floats(min_value=-60e9, max_value=60e9))
def test_select_matches_brute_force(f):
    sel = select_pump_mode(f, COMB16)
    distances = [abs(COMB16.offset(i) - f) for i in range(16)]
    best = min(distances)
    assert sel.index == distances.index(best)
    assert sel.residual_detuning == best


@given(st.floats(min_value=COMB16.offset(0), max_value=COMB16.offset(15)))
def test_select_residual_bounded(f):
    assert select_pump_mode(f, COMB16).residual_detuning <= 6.25e9 / 2 + 1e-3


def test_plan_shift_two_mode():
    sig = SpectralModeGrid(NU_SIG, 12e9, 2)
    pump = SpectralModeGrid(NU_PUMP, 12e9, 2)
    idlers = []
    for j, expected_line in ((0, 0), (1, 1)):
        plan = plan_shift(sig, j, pump, NU_IDLER, "DFG", filter_fwhm=8e9)
        assert plan.selected_comb_index == expected_line
        assert plan.residual_detuning == pytest.approx(0.0, abs=1e-3)
        assert not plan.off_grid
        idlers.append(plan.idler_frequency)
    assert idlers[0] == pytest.approx(idlers[1], abs=1e-2)
    centred = plan_shift(SpectralModeGrid(NU_SIG, 6.25e9, 3), 1, SpectralModeGrid(NU_PUMP, 6.25e9, 3),
                         NU_IDLER, "DFG")
    assert centred.pump_shift == 0.0


def test_extinction():
    assert output_extinction(18.0, math.inf, math.inf).total_er_db == pytest.approx(18.0)
    assert power_sum_db([21.0, 21.0]) == pytest.approx(21 - 10 * math.log10(2), abs=1e-12)
    assert round(power_sum_db([21.0, 21.0])) == 18
    assert power_sum_db([math.inf, 30.0]) == pytest.approx(30.0)
    assert power_sum_db([]) == math.inf
    with pytest.raises(ValidationError):
        power_sum_db([-math.inf])
    with pytest.raises(ValidationError):
        output_extinction(math.nan, 1.0, 1.0)


@given(st.lists(st.floats(min_value=-10, max_value=80), min_size=3, max_size=3))
def test_extinction_below_min(paths):
    er = output_extinction(*paths)
    assert er.total_er_db <= min(paths) + 1e-12
