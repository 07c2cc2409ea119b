from dataclasses import dataclass

import numpy as np

from ..exceptions import ValidationError
from ..validation import check_fraction, check_non_negative


@dataclass(frozen=True)
class DetectorParams:
    efficiency: float = 0.5
    dark_count_rate: float = 2000.0  # counts/s
    dead_time: float = 100e-9  # s

    def __post_init__(self):
        check_fraction(self.efficiency, "efficiency")
        check_non_negative(self.dark_count_rate, "dark_count_rate")
        check_non_negative(self.dead_time, "dead_time")


def detector_response(incident_rate, det):
    """Registered count rate for an incident photon rate (non-paralyzable dead time).

    The raw click rate ``r = incident * efficiency + dark_count_rate`` is
    reduced to ``r / (1 + r * dead_time)``, which saturates at ``1/dead_time``.
    """
    incident = np.asarray(incident_rate, dtype=float)
    if np.any(incident < 0):
        raise ValidationError("incident_rate must be >= 0")
    raw = incident * det.efficiency + det.dark_count_rate
    registered = raw / (1.0 + raw * det.dead_time)
    return float(registered) if registered.ndim == 0 else registered
