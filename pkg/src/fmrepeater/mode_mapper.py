"""Feed-forward spectral mode mapping.

Given which signal mode was heralded, work out the pump shift that puts the
converted idler back on the fixed filter, pick the comb line that realises
it, and estimate the extinction ratio left after conversion.

Sign convention: the heralded mode sits at ``nu_sig + f_suc`` (``f_suc`` is
its offset from the signal reference) and the pump line at
``nu_pump + f_shift``. Then

* DFG: ``(nu_sig + f_suc) - (nu_pump + f_shift) = nu_filter``
* SFG: ``(nu_sig + f_suc) + (nu_pump + f_shift) = nu_filter``
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import UnreachableShiftError, ValidationError
from .validation import check_non_negative


class Process(str, Enum):
    DFG = "DFG"
    SFG = "SFG"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValidationError(f"process must be DFG or SFG, got {value!r}") from None


def idler_frequency(nu_signal, nu_pump, process):
    process = Process.parse(process)
    return nu_signal - nu_pump if process is Process.DFG else nu_signal + nu_pump


def baseline_mismatch(nu_sig, nu_pump, nu_filter, process):
    """How far the unshifted triple misses the filter, in Hz."""
    return idler_frequency(nu_sig, nu_pump, process) - nu_filter


def required_shift(nu_sig, f_suc, nu_pump, nu_filter, process, comb_span=None):
    """Pump shift (Hz) that maps the heralded mode onto ``nu_filter``.

    Raises :class:`UnreachableShiftError` when the unshifted triple is off by
    more than ``comb_span`` (if given).
    """
    process = Process.parse(process)
    mismatch = baseline_mismatch(nu_sig, nu_pump, nu_filter, process)
    if comb_span is not None and abs(mismatch) > comb_span:
        raise UnreachableShiftError(
            f"unshifted {process.value} triple misses the filter by {mismatch / 1e9:.3f} GHz, "
            f"more than the {comb_span / 1e9:.3f} GHz comb span"
        )
    # written against the offsets so the baseline-matched case is exact
    if process is Process.DFG:
        return mismatch + f_suc
    return -(mismatch + f_suc)


@dataclass(frozen=True)
class PumpSelection:
    index: int
    residual_detuning: float
    off_grid: bool


def select_pump_mode(f_shift, comb, filter_fwhm=None):
    """Nearest comb line to ``comb.center + f_shift``; ties go to the lower index.

    ``off_grid`` is set when the residual exceeds half of ``filter_fwhm``.
    """
    offsets = comb.offsets()
    distance = np.abs(offsets - f_shift)
    index = int(np.argmin(distance))  # first minimum, i.e. lowest index
    residual = float(distance[index])
    off_grid = filter_fwhm is not None and residual > filter_fwhm / 2.0
    return PumpSelection(index, residual, off_grid)


@dataclass(frozen=True)
class ShiftPlan:
    process: Process
    heralded_offset: float
    pump_shift: float
    selected_comb_index: int
    residual_detuning: float
    idler_frequency: float
    off_grid: bool = False


def plan_shift(signal_grid, herald_index, pump_comb, nu_filter, process, filter_fwhm=None,
               check_span=True):
    """Full plan for heralded signal mode ``herald_index``."""
    process = Process.parse(process)
    f_suc = signal_grid.offset(herald_index)
    f_shift = required_shift(
        signal_grid.center, f_suc, pump_comb.center, nu_filter, process,
        comb_span=pump_comb.bandwidth if check_span else None,
    )
    sel = select_pump_mode(f_shift, pump_comb, filter_fwhm)
    idler = idler_frequency(signal_grid.mode(herald_index), pump_comb.mode(sel.index), process)
    return ShiftPlan(process, f_suc, f_shift, sel.index, sel.residual_detuning, idler, sel.off_grid)


@dataclass(frozen=True)
class ExtinctionBudget:
    vipa_ct_db: float
    switch_ct_db: float
    filter_rejection_db: float
    total_er_db: float

    @property
    def contributions(self):
        return (self.vipa_ct_db, self.switch_ct_db, self.filter_rejection_db)


def power_sum_db(paths_db):
    """Combine independent leakage paths given as dB below the signal."""
    leak = math.fsum(10.0 ** (-p / 10.0) for p in paths_db if not math.isinf(p))
    for p in paths_db:
        if math.isinf(p) and p < 0:
            raise ValidationError("a leakage path cannot be -inf dB below the signal")
    if leak == 0:
        return math.inf
    return -10.0 * math.log10(leak)


def output_extinction(vipa_ct_db, switch_ct_db, filter_rejection_db):
    """Extinction ratio after conversion from three parallel leakage paths (dB)."""
    for name, val in (("vipa_ct_db", vipa_ct_db), ("switch_ct_db", switch_ct_db),
                      ("filter_rejection_db", filter_rejection_db)):
        if math.isnan(val):
            raise ValidationError(f"{name} is NaN")
    total = power_sum_db([vipa_ct_db, switch_ct_db, filter_rejection_db])
    return ExtinctionBudget(vipa_ct_db, switch_ct_db, filter_rejection_db, total)


def shift_displacement(nu_signal, pump_a, pump_b, process):
    """Idler displacement (Hz) when the pump moves from line ``pump_a`` to ``pump_b``."""
    check_non_negative(nu_signal, "nu_signal")
    return abs(idler_frequency(nu_signal, pump_a, process) - idler_frequency(nu_signal, pump_b, process))
