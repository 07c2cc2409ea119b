"""Physical constants, unit conversions and the unit-suffixed quantity parser.

Everything is stored in SI (Hz, W, m, s). Display units such as GHz, dBm or nm
only appear at the boundaries: :func:`parse_quantity` on the way in and the
``.ghz``/``.nm`` style accessors on the way out.

.. note::
   Wavelength and frequency are related by ``lambda = c / nu``. Some texts
   print the relation inverted; that form is dimensionally wrong and is not
   used here.
"""

import math
import re
from dataclasses import dataclass

from .exceptions import UnitError, ValidationError
from .validation import check_non_negative, check_positive

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact
PLANCK = 6.626_070_15e-34  # J s, exact


def db_to_linear(x_db):
    """Convert a ratio in dB to a linear ratio. ``-inf`` maps to 0."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(ratio):
    """Convert a strictly positive linear ratio to dB."""
    if not ratio > 0:
        raise ValidationError(f"linear_to_db needs a positive ratio, got {ratio}")
    return 10.0 * math.log10(ratio)


def ratio_to_db(ratio):
    """Like :func:`linear_to_db` but returns -inf/+inf sentinels instead of raising.

    Used for SNR and efficiency reports where zero and infinite ratios are
    legitimate outcomes.
    """
    if math.isnan(ratio) or ratio < 0:
        raise ValidationError(f"ratio must be >= 0, got {ratio}")
    if ratio == 0:
        return -math.inf
    if math.isinf(ratio):
        return math.inf
    return 10.0 * math.log10(ratio)


def dbm_to_watts(p_dbm):
    return 1e-3 * 10.0 ** (p_dbm / 10.0)


def watts_to_dbm(p_w):
    if not p_w > 0:
        raise ValidationError(f"watts_to_dbm needs a positive power, got {p_w}")
    return 10.0 * math.log10(p_w / 1e-3)


def wavelength_to_frequency(wavelength_m):
    return SPEED_OF_LIGHT / check_positive(wavelength_m, "wavelength")


def frequency_to_wavelength(frequency_hz):
    return SPEED_OF_LIGHT / check_positive(frequency_hz, "frequency")


def photon_energy(frequency_hz):
    """Photon energy h*nu in joules."""
    return PLANCK * check_positive(frequency_hz, "frequency")


def photon_rate(power_w, frequency_hz):
    """Photon flux in photons/s carried by ``power_w`` at ``frequency_hz``."""
    return check_non_negative(power_w, "power") / photon_energy(frequency_hz)


def dfg_triple_check(signal_m, pump_m, idler_m):
    """Energy-conservation residual ``nu_sig - nu_pump - nu_idler`` in Hz."""
    return (
        wavelength_to_frequency(signal_m)
        - wavelength_to_frequency(pump_m)
        - wavelength_to_frequency(idler_m)
    )


@dataclass(frozen=True)
class Frequency:
    hz: float

    def __post_init__(self):
        check_positive(self.hz, "Frequency")

    @classmethod
    def from_ghz(cls, ghz):
        return cls(ghz * 1e9)

    @classmethod
    def from_wavelength(cls, wavelength):
        meters = wavelength.m if isinstance(wavelength, Wavelength) else wavelength
        return cls(wavelength_to_frequency(meters))

    @property
    def ghz(self):
        return self.hz / 1e9

    @property
    def thz(self):
        return self.hz / 1e12

    def to_wavelength(self):
        return Wavelength(frequency_to_wavelength(self.hz))


@dataclass(frozen=True)
class Wavelength:
    m: float

    def __post_init__(self):
        check_positive(self.m, "Wavelength")

    @classmethod
    def from_nm(cls, nm):
        return cls(nm * 1e-9)

    @property
    def nm(self):
        return self.m * 1e9

    def to_frequency(self):
        return Frequency(wavelength_to_frequency(self.m))


@dataclass(frozen=True)
class PowerWatts:
    w: float

    def __post_init__(self):
        check_non_negative(self.w, "PowerWatts")

    @property
    def mw(self):
        return self.w * 1e3

    def to_dbm(self):
        return PowerDbm(watts_to_dbm(self.w))


@dataclass(frozen=True)
class PowerDbm:
    dbm: float

    def to_watts(self):
        return PowerWatts(dbm_to_watts(self.dbm))


# --- unit-suffixed quantity parsing -------------------------------------------------

# dimension -> {suffix: factor to SI}
_UNITS = {
    "power": {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "µW": 1e-6, "nW": 1e-9, "pW": 1e-12},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12},
    "length": {"m": 1.0, "km": 1e3, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12},
    "velocity": {"m/s": 1.0, "km/s": 1e3},
    "rate": {"cps": 1.0, "counts/s": 1.0, "/s": 1.0, "1/s": 1.0},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "db": {"dB": 1.0},
    # stored in 1/m
    "attenuation": {"/m": 1.0, "1/m": 1.0, "/km": 1e-3, "1/km": 1e-3, "/cm": 1e2, "1/cm": 1e2},
    "db_per_length": {"dB/km": 1.0},  # stored as dB/km, the customary fibre unit
    # nonlinear coefficient, stored in 1/(W cm^2)
    "nl_coefficient": {"/(W cm^2)": 1.0, "1/(W cm^2)": 1.0, "W^-1 cm^-2": 1.0},
}

_QUANTITY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)\s*(.*?)\s*$")


def parse_quantity(text, dimension):
    """Parse ``"160 mW"`` style text into an SI float for ``dimension``.

    Power also accepts ``dBm``. A bare number is rejected: physical values
    must always carry a unit.
    """
    if dimension not in _UNITS:
        raise UnitError(f"unknown dimension {dimension!r}")
    match = _QUANTITY_RE.match(str(text).strip().strip('"').strip("'"))
    if match is None:
        raise UnitError(f"cannot parse quantity {text!r}")
    number, suffix = float(match.group(1)), match.group(2)
    if not suffix:
        raise UnitError(f"{text!r} is missing a unit suffix (expected {dimension})")
    if dimension == "power" and suffix == "dBm":
        return dbm_to_watts(number)
    try:
        return number * _UNITS[dimension][suffix]
    except KeyError:
        known = ", ".join(sorted(_UNITS[dimension]))
        raise UnitError(f"unit {suffix!r} is not a {dimension} unit (known: {known})") from None


def db_per_km_to_per_m(alpha_db_per_km):
    """Convert a dB/km attenuation into the natural-log coefficient in 1/m."""
    return alpha_db_per_km * math.log(10.0) / 10.0 / 1e3
