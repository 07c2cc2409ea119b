"""Pump preparation: comb generation, VIPA demultiplexing, photonic switch, amplifier.

Powers are carried in dBm through the chain; the loss ledger is exactly
additive in dB.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .exceptions import AmplificationInfeasibleError, DegenerateGeometryError, ValidationError
from .units import PLANCK, SPEED_OF_LIGHT, db_to_linear
from .validation import check_finite, check_int, check_non_negative, check_positive


@dataclass(frozen=True)
class SpectralModeGrid:
    """``count`` lines spaced by ``spacing`` Hz, symmetric about ``center``.

    For even ``count`` the offsets are half-integer multiples of the spacing,
    e.g. two lines sit at ``center +/- spacing/2``.
    """

    center: float
    spacing: float
    count: int

    def __post_init__(self):
        check_positive(self.center, "center")
        check_positive(self.spacing, "spacing")
        check_int(self.count, "count", minimum=1)

    def index_offsets(self):
        return np.arange(self.count) - (self.count - 1) / 2.0

    def offsets(self):
        return self.index_offsets() * self.spacing

    def frequencies(self):
        return self.center + self.offsets()

    def mode(self, i):
        if not 0 <= i < self.count:
            raise ValidationError(f"mode index {i} outside [0, {self.count})")
        return self.center + (i - (self.count - 1) / 2.0) * self.spacing

    def offset(self, i):
        return self.mode(i) - self.center

    @property
    def bandwidth(self):
        """Occupied bandwidth, one spacing per mode."""
        return self.count * self.spacing


def comb_modes(source_power_dbm, grid, eom_loss_db=0.0, flatness_db=0.0):
    """Per-mode comb power in dBm.

    Each line gets ``source - 10 log10(N) - eom_loss``; the two edge lines take
    an extra worst-case ``flatness_db / 2``. A single line has no flatness.
    """
    check_non_negative(eom_loss_db, "eom_loss_db")
    check_non_negative(flatness_db, "flatness_db")
    per_mode = source_power_dbm - 10.0 * math.log10(grid.count) - eom_loss_db
    powers = np.full(grid.count, per_mode)
    if grid.count > 1:
        powers[[0, -1]] -= flatness_db / 2.0
    return powers


# --- VIPA -------------------------------------------------------------------------


@dataclass(frozen=True)
class VipaGeometry:
    """VIPA plate geometry.

    ``spatial_crosstalk_db`` is a floor set by spatial-mode filtering and fibre
    coupling at the focal plane; it acts as an extra leakage path in parallel
    with the lineshape overlap. ``inf`` means ideal coupling.
    """

    thickness_m: float
    reflect_back: float = 1.0
    reflect_front: float = 0.95
    incidence_rad: float = 0.0
    insertion_loss_db: float = 3.0
    spatial_crosstalk_db: float = math.inf

    def __post_init__(self):
        check_positive(self.thickness_m, "thickness_m")
        if not 0 < self.reflect_front <= self.reflect_back <= 1:
            raise ValidationError("VIPA reflectivities need 0 < r <= R <= 1")
        if not 0 <= self.incidence_rad < math.pi / 2:
            raise ValidationError("incidence angle must lie in [0, pi/2)")
        check_non_negative(self.insertion_loss_db, "insertion_loss_db")

    @classmethod
    def for_fsr(cls, fsr_hz, thickness_m, **kwargs):
        """Geometry whose incidence angle tunes a given plate thickness to ``fsr_hz``."""
        cos_theta = SPEED_OF_LIGHT / (2.0 * thickness_m * fsr_hz)
        if not 0 < cos_theta <= 1:
            raise DegenerateGeometryError(
                f"a {thickness_m * 1e3:.3f} mm plate cannot reach an FSR of {fsr_hz / 1e9:.2f} GHz"
            )
        return cls(thickness_m=thickness_m, incidence_rad=math.acos(cos_theta), **kwargs)


def vipa_fsr(geom):
    """Free spectral range ``c / (2 t cos(theta_in))`` in Hz."""
    return SPEED_OF_LIGHT / (2.0 * geom.thickness_m * math.cos(geom.incidence_rad))


def vipa_fwhm(fsr, reflect_back, reflect_front):
    """Resolution ``(FSR / pi) * (1 - Rr) / sqrt(Rr)`` in Hz."""
    rr = reflect_back * reflect_front
    if rr <= 0:
        raise ValidationError("R*r must be > 0")
    if rr >= 1:
        raise DegenerateGeometryError("R*r = 1 gives a zero-width resonance")
    return fsr / math.pi * (1.0 - rr) / math.sqrt(rr)


def _lorentzian_density(x, center, hwhm):
    return (hwhm / math.pi) / ((x - center) ** 2 + hwhm**2)


def vipa_crosstalk(grid, fwhm, j):
    """Crosstalk for mode ``j`` in dB.

    Power of mode ``j`` inside a window one FWHM wide centred on it, over the
    summed power of all other modes in the same window. Every mode is an
    area-normalised Lorentzian of width ``fwhm``.
    """
    if grid.count < 2:
        raise ValidationError("crosstalk needs at least two modes")
    check_int(j, "j", minimum=0)
    if j >= grid.count:
        raise ValidationError(f"mode index {j} outside [0, {grid.count})")
    check_positive(fwhm, "fwhm")
    hwhm = fwhm / 2.0
    offsets = grid.offsets()
    lo, hi = offsets[j] - hwhm, offsets[j] + hwhm

    def window(center):
        val, _ = quad(_lorentzian_density, lo, hi, args=(center, hwhm), epsrel=1e-8, epsabs=0.0,
                      limit=200)
        return val

    signal = window(offsets[j])
    others = sum(window(c) for i, c in enumerate(offsets) if i != j)
    return 10.0 * math.log10(signal / others)


def vipa_worst_crosstalk(grid, fwhm):
    """Lowest crosstalk over all modes of the grid (the inner modes)."""
    # symmetric grid: the first half is enough
    return min(vipa_crosstalk(grid, fwhm, j) for j in range((grid.count + 1) // 2))


# --- amplifier ----------------------------------------------------------------------


@dataclass(frozen=True)
class AmplifierSpec:
    max_output_dbm: float = 42.0
    noise_figure_db: float = 7.5
    min_input_dbm: float = -20.0

    def __post_init__(self):
        check_finite(self.max_output_dbm, "max_output_dbm")
        check_non_negative(self.noise_figure_db, "noise_figure_db")
        check_finite(self.min_input_dbm, "min_input_dbm")


@dataclass(frozen=True)
class AmplifierOutput:
    output_dbm: float
    gain_db: float
    clamped: bool
    ase_density: float  # W/Hz at the amplifier output
    ase_in_band: float  # W left inside the post-amplifier DWDM passband


def amplify(input_dbm, target_output_dbm, spec, frequency_hz, ase_bandwidth_hz=100e9):
    """Amplify to ``target_output_dbm`` or the amplifier limit, whichever is lower.

    ASE is summarised as ``G h nu (F - 1)`` per Hz; ``ase_in_band`` is what
    remains inside a DWDM passband of ``ase_bandwidth_hz`` after filtering.
    """
    if input_dbm < spec.min_input_dbm:
        raise AmplificationInfeasibleError(input_dbm, spec.min_input_dbm)
    clamped = target_output_dbm > spec.max_output_dbm
    output = min(target_output_dbm, spec.max_output_dbm)
    gain_db = output - input_dbm
    gain = db_to_linear(gain_db)
    nf = db_to_linear(spec.noise_figure_db)
    density = gain * PLANCK * frequency_hz * max(nf - 1.0, 0.0)
    return AmplifierOutput(output, gain_db, clamped, density, density * ase_bandwidth_hz)


# --- photonic switch ----------------------------------------------------------------


@dataclass(frozen=True)
class SwitchSpec:
    port_count: int = 16
    switching_time: float = 10e-9
    port_crosstalk_db: float = 30.0
    insertion_loss_db: float = 0.0

    def __post_init__(self):
        check_int(self.port_count, "port_count", minimum=2)
        check_non_negative(self.switching_time, "switching_time")
        check_non_negative(self.port_crosstalk_db, "port_crosstalk_db", allow_inf=True)
        check_non_negative(self.insertion_loss_db, "insertion_loss_db")


@dataclass(frozen=True)
class PumpMode:
    frequency: float  # Hz
    power_dbm: float


@dataclass(frozen=True)
class SwitchSelection:
    selected: PumpMode
    index: int
    leakage: dict  # unselected index -> PumpMode at its leaked power
    delay: float


def pump_bank(grid, powers_dbm):
    powers = np.broadcast_to(np.asarray(powers_dbm, dtype=float), (grid.count,))
    return [PumpMode(float(f), float(p)) for f, p in zip(grid.frequencies(), powers)]


class PhotonicSwitch:
    """N x 1 switch holding its current port.

    Re-selecting the current port costs no reconfiguration time. One instance
    belongs to one simulation thread.
    """

    def __init__(self, spec):
        self.spec = spec
        self.current = None

    def select(self, bank, index):
        if not 0 <= index < min(self.spec.port_count, len(bank)):
            raise ValidationError(
                f"switch port {index} outside [0, {min(self.spec.port_count, len(bank))})"
            )
        delay = 0.0 if index == self.current else self.spec.switching_time
        self.current = index
        chosen = bank[index]
        selected = PumpMode(chosen.frequency, chosen.power_dbm - self.spec.insertion_loss_db)
        leakage = {
            i: PumpMode(m.frequency, m.power_dbm - self.spec.port_crosstalk_db)
            for i, m in enumerate(bank)
            if i != index
        }
        return SwitchSelection(selected, index, leakage, delay)


def switch_select(bank, index, spec, switch=None):
    """Functional form of :meth:`PhotonicSwitch.select`; pass ``switch`` to keep state."""
    switch = switch if switch is not None else PhotonicSwitch(spec)
    return switch.select(bank, index)


# --- loss ledger --------------------------------------------------------------------


@dataclass(frozen=True)
class PumpLossLedger:
    source_dbm: float
    stages: list  # [(name, loss_db)]
    levels: list = field(default_factory=list)  # power after each stage, dBm

    @property
    def total_loss_db(self):
        return math.fsum(loss for _, loss in self.stages)

    @property
    def output_dbm(self):
        return self.levels[-1] if self.levels else self.source_dbm


def pump_budget(source_dbm, stages):
    """Ordered per-mode loss ledger for ``stages`` given as ``(name, loss_db)`` pairs."""
    stages = [(str(name), check_finite(loss, f"loss of {name}")) for name, loss in stages]
    levels = []
    level = source_dbm
    for _, loss in stages:
        level = level - loss
        levels.append(level)
    return PumpLossLedger(source_dbm, stages, levels)


@dataclass(frozen=True)
class PumpChainConfig:
    source_power_dbm: float
    eom_loss_db: float
    vipa: VipaGeometry
    switch: SwitchSpec
    amplifier: AmplifierSpec
    target_output_dbm: float
    flatness_db: float = 0.0
    splitting_loss_db: float = None  # None: 10 log10(N)
    ase_filter_bandwidth: float = 100e9


def chain_ledger(config, grid):
    """Stage ledger OFC -> VIPA -> switch for one comb line at the amplifier input."""
    split = config.splitting_loss_db
    if split is None:
        split = 10.0 * math.log10(grid.count)
    return pump_budget(
        config.source_power_dbm,
        [
            ("OFC splitting", split),
            ("EOM insertion", config.eom_loss_db),
            ("VIPA coupling", config.vipa.insertion_loss_db),
            ("switch insertion", config.switch.insertion_loss_db),
        ],
    )


def amplifier_input_powers(config, grid):
    """Per-mode amplifier input (dBm), including the flatness deduction on edge lines."""
    ledger = chain_ledger(config, grid)
    powers = np.full(grid.count, ledger.output_dbm)
    if grid.count > 1:
        powers[[0, -1]] -= config.flatness_db / 2.0
    return powers


__all__ = [
    "AmplifierOutput",
    "AmplifierSpec",
    "PhotonicSwitch",
    "PumpChainConfig",
    "PumpLossLedger",
    "PumpMode",
    "SpectralModeGrid",
    "SwitchSelection",
    "SwitchSpec",
    "VipaGeometry",
    "amplifier_input_powers",
    "amplify",
    "chain_ledger",
    "comb_modes",
    "pump_bank",
    "pump_budget",
    "switch_select",
    "vipa_crosstalk",
    "vipa_fsr",
    "vipa_fwhm",
    "vipa_worst_crosstalk",
]
