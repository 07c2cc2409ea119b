"""Signal-to-noise estimate at the output of the frequency-shifting stage."""

import math
from dataclasses import dataclass

from ..units import photon_rate, ratio_to_db
from ..validation import check_non_negative, check_positive
from .conversion import conversion_efficiency
from .filters import filter_transmission, narrowest_fwhm
from .raman import DEFAULT_IDLER_HZ, raman_power


@dataclass(frozen=True)
class NoiseBandwidthModel:
    """Scales Raman coefficients from the bandwidth they were measured in.

    The Raman spectrum is taken as flat over the filter passband, so the
    accepted noise power scales with ``accepted / reference`` bandwidth.
    """

    reference_bandwidth: float  # Hz

    def __post_init__(self):
        check_positive(self.reference_bandwidth, "reference_bandwidth")

    def scale(self, accepted_bandwidth):
        return accepted_bandwidth / self.reference_bandwidth


@dataclass(frozen=True)
class SnrBreakdown:
    signal_rate: float
    crystal_noise_rate: float
    fiber_noise_rate: float
    dark_rate: float
    eta_conv: float

    @property
    def noise_rate(self):
        return self.crystal_noise_rate + self.fiber_noise_rate + self.dark_rate

    @property
    def snr(self):
        if self.signal_rate == 0:
            return 0.0
        if self.noise_rate == 0:
            return math.inf
        return self.signal_rate / self.noise_rate

    @property
    def snr_db(self):
        return ratio_to_db(self.snr)


def snr_breakdown(mu, rep_rate, crystal, pump_w, chain, det, noise_bandwidth,
                  fiber=None, frequency_hz=DEFAULT_IDLER_HZ):
    """Detected signal and noise rates (counts/s) for one operating point.

    ``fiber`` is the pump-carrying fibre for fibre-coupled geometries and
    ``None`` for free-space coupling.
    """
    check_non_negative(mu, "mu")
    check_non_negative(rep_rate, "rep_rate")
    eta = conversion_efficiency(pump_w, crystal)
    signal = rep_rate * mu * eta * filter_transmission(chain, 0.0) * det.efficiency

    scale = noise_bandwidth.scale(narrowest_fwhm(chain))
    p_wg = pump_w * crystal.coupling_in
    crystal_w = raman_power(p_wg, crystal.raman_medium()) * scale
    crystal_noise = photon_rate(crystal_w, frequency_hz) * det.efficiency
    fiber_noise = 0.0
    if fiber is not None:
        fiber_w = raman_power(pump_w, fiber.raman_medium()) * scale
        fiber_noise = photon_rate(fiber_w, frequency_hz) * det.efficiency
    return SnrBreakdown(signal, crystal_noise, fiber_noise, det.dark_count_rate, eta)


def snr_estimate(mu, rep_rate, crystal, pump_w, chain, det, noise_bandwidth,
                 fiber=None, frequency_hz=DEFAULT_IDLER_HZ):
    """SNR in dB; ``-inf`` when there is no signal and ``+inf`` when there is no noise."""
    return snr_breakdown(
        mu, rep_rate, crystal, pump_w, chain, det, noise_bandwidth, fiber, frequency_hz
    ).snr_db
