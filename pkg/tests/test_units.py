import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fmrepeater.exceptions import UnitError, ValidationError
from fmrepeater.units import (
    SPEED_OF_LIGHT,
    Frequency,
    PowerDbm,
    Wavelength,
    db_to_linear,
    dbm_to_watts,
    dfg_triple_check,
    frequency_to_wavelength,
    linear_to_db,
    parse_quantity,
    photon_energy,
    ratio_to_db,
    wavelength_to_frequency,
    watts_to_dbm,
)


@pytest.mark.parametrize("db, ratio", [(0, 1.0), (20, 100.0), (-30, 1e-3)])
def test_db_to_linear(db, ratio):
    assert db_to_linear(db) == pytest.approx(ratio, rel=1e-15)
    assert linear_to_db(ratio) == pytest.approx(db, abs=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_linear_to_db_domain(bad):
    with pytest.raises(ValidationError):
        linear_to_db(bad)


def test_ratio_to_db_sentinels():
    assert ratio_to_db(0.0) == -math.inf
    assert ratio_to_db(math.inf) == math.inf
    with pytest.raises(ValidationError):
        ratio_to_db(-1.0)


def test_dbm_watts():
    assert dbm_to_watts(0) == pytest.approx(1e-3)
    # 27 dBm of amplifier output
    assert dbm_to_watts(27) == pytest.approx(0.501, abs=5e-4)
    assert dbm_to_watts(-20) == pytest.approx(10e-6)
    with pytest.raises(ValidationError):
        watts_to_dbm(0.0)
    with pytest.raises(ValidationError):
        watts_to_dbm(-1e-3)


def test_wavelength_frequency_examples():
    # oracle: c / lambda evaluated by hand
    assert wavelength_to_frequency(1553e-9) / 1e12 == pytest.approx(193.04, abs=0.005)
    # c / 771.3 nm = 388.6846 THz; the quoted 388.69 is one unit high in the last digit
    assert wavelength_to_frequency(771.3e-9) / 1e12 == pytest.approx(388.69, abs=0.01)
    assert wavelength_to_frequency(771.3e-9) / 1e12 == pytest.approx(388.6846, abs=5e-5)
    assert wavelength_to_frequency(SPEED_OF_LIGHT) == 1.0
    assert Wavelength.from_nm(1553).to_frequency().thz == pytest.approx(193.04, abs=0.005)


def test_dfg_triple():
    assert abs(dfg_triple_check(771.3e-9, 1553e-9, 1532.5e-9)) < 50e9
    assert abs(dfg_triple_check(771.3e-9, 1553e-9, 1540e-9)) > 500e9
    nu_i = wavelength_to_frequency(771.3e-9) - wavelength_to_frequency(1553e-9)
    assert dfg_triple_check(771.3e-9, 1553e-9, SPEED_OF_LIGHT / nu_i) == pytest.approx(0.0, abs=1e-3)


@given(st.floats(min_value=-60, max_value=60))
def test_dbm_round_trip(p):
    assert watts_to_dbm(dbm_to_watts(p)) == pytest.approx(p, abs=1e-9)
    assert PowerDbm(p).to_watts().to_dbm().dbm == pytest.approx(p, abs=1e-9)


@given(st.floats(min_value=1e-9, max_value=1e-3))
def test_wavelength_round_trip(lam):
    assert frequency_to_wavelength(wavelength_to_frequency(lam)) == pytest.approx(lam, rel=1e-12)
    assert Frequency.from_wavelength(lam).to_wavelength().m == pytest.approx(lam, rel=1e-12)


@given(st.floats(min_value=1e-7, max_value=1e-4), st.floats(min_value=1.0001, max_value=10))
def test_photon_energy_monotone(lam, factor):
    e1 = photon_energy(wavelength_to_frequency(lam))
    e2 = photon_energy(wavelength_to_frequency(lam * factor))
    assert e1 > e2 > 0


@pytest.mark.parametrize(
    "text, dim, expected",
    [
        ("160 mW", "power", 0.16),
        ("27 dBm", "power", dbm_to_watts(27)),
        ("6 GHz", "frequency", 6e9),
        ("1553 nm", "length", 1553e-9),
        ("100 ns", "time", 100e-9),
        ("2000 cps", "rate", 2000.0),
        ("0.1 1/cm", "attenuation", 10.0),
        ("0.2 dB/km", "db_per_length", 0.2),
        ("0.48 /(W cm^2)", "nl_coefficient", 0.48),
        ('"25 dB"', "db", 25.0),
        ("inf dB", "db", math.inf),
    ],
)
def test_parse_quantity(text, dim, expected):
    assert parse_quantity(text, dim) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("text, dim", [("160", "power"), ("160 GHz", "power"), ("abc mW", "power")])
def test_parse_quantity_rejects(text, dim):
    with pytest.raises(UnitError):
        parse_quantity(text, dim)
