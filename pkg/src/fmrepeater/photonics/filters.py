"""Transmission of a stack of spectral filters.

Etalon and narrowband filters use a Lorentzian of the given FWHM (repeated
every FSR for an etalon). DWDM channels are flat-top: unity within +/-FWHM/2
of the centre and ``DWDM_REJECTION_DB`` below that outside.
"""

import math
from dataclasses import dataclass

from ..exceptions import ValidationError
from ..validation import check_non_negative, check_positive

FILTER_KINDS = ("etalon", "dwdm", "narrowband")
DWDM_REJECTION_DB = 25.0


@dataclass(frozen=True)
class FilterElement:
    kind: str
    fwhm: float  # Hz
    fsr: float = None  # Hz, etalon only
    insertion_loss_db: float = 0.0
    center: float = None  # Hz, informative; transmission is evaluated vs detuning

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValidationError(f"filter kind must be one of {FILTER_KINDS}, got {self.kind!r}")
        check_positive(self.fwhm, "fwhm")
        check_non_negative(self.insertion_loss_db, "insertion_loss_db")
        if self.kind == "etalon":
            if self.fsr is None:
                raise ValidationError("an etalon needs an FSR")
            if not check_positive(self.fsr, "fsr") > self.fwhm:
                raise ValidationError("etalon FSR must exceed its FWHM")
        elif self.fsr is not None:
            raise ValidationError(f"{self.kind} filters do not take an FSR")

    def lineshape(self, detuning):
        if self.kind == "dwdm":
            inside = abs(detuning) <= self.fwhm / 2
            return 1.0 if inside else 10.0 ** (-DWDM_REJECTION_DB / 10.0)
        if self.kind == "etalon":
            # fold onto the nearest resonance
            detuning = detuning - self.fsr * round(detuning / self.fsr)
        x = 2.0 * detuning / self.fwhm
        return 1.0 / (1.0 + x * x)

    def transmission(self, detuning):
        return self.lineshape(detuning) * 10.0 ** (-self.insertion_loss_db / 10.0)


def filter_transmission(chain, detuning):
    """Product of element transmissions at ``detuning`` (Hz) from the common centre."""
    chain = list(chain)
    if not chain:
        raise ValidationError("filter chain must not be empty")
    return math.prod(f.transmission(detuning) for f in chain)


def narrowest_fwhm(chain):
    return min(f.fwhm for f in chain)


def filter_rejection_db(chain, detuning):
    """Suppression in dB of light at ``detuning`` relative to the on-centre transmission."""
    return 10.0 * math.log10(filter_transmission(chain, 0.0) / filter_transmission(chain, detuning))
