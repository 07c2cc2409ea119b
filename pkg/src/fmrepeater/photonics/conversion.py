"""Waveguide frequency-conversion efficiency.

The undepleted-signal efficiency of a phase-matched waveguide is

    eta = c_out * sin^2( sqrt(sigma * P_pump * c_in) * L )

with ``sigma`` in 1/(W cm^2) and ``L`` in cm, so the sine argument is
dimensionless. Manufacturers sometimes quote ``sigma`` as "W/cm^2"; only the
numeric value is taken from such a datasheet.
"""

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..exceptions import ValidationError
from ..validation import check_fraction, check_non_negative, check_positive
from .raman import RamanMedium


@dataclass(frozen=True)
class CrystalParams:
    """Nonlinear waveguide parameters.

    ``beta_raman`` is the spontaneous Raman fraction per pass referred to the
    noise reference bandwidth; ``alpha_raman`` is the attenuation in 1/cm.
    """

    sigma_nl: float = 0.48
    length_cm: float = 0.5
    coupling_in: float = 0.3
    coupling_out: float = 0.3
    beta_raman: float = 0.0
    alpha_raman: float = 0.0

    def __post_init__(self):
        check_non_negative(self.sigma_nl, "sigma_nl")
        check_positive(self.length_cm, "length_cm")
        check_fraction(self.coupling_in, "coupling_in")
        check_fraction(self.coupling_out, "coupling_out")
        check_non_negative(self.beta_raman, "beta_raman")
        check_non_negative(self.alpha_raman, "alpha_raman")

    def raman_medium(self):
        return RamanMedium(
            beta=self.beta_raman,
            alpha=self.alpha_raman,
            length=self.length_cm,
            alpha_unit="1/cm",
            length_unit="cm",
        )

    def first_maximum_power(self):
        """Pump power (W) at which the sine argument first reaches pi/2."""
        k = self.sigma_nl * self.coupling_in * self.length_cm**2
        if k == 0:
            return math.inf
        return (math.pi / 2) ** 2 / k


def conversion_efficiency(pump_w, crystal):
    """Conversion efficiency for pump power ``pump_w`` (W); vectorises over arrays."""
    pump = np.asarray(pump_w, dtype=float)
    if np.any(pump < 0) or np.any(np.isnan(pump)):
        raise ValidationError("pump power must be >= 0")
    arg = np.sqrt(crystal.sigma_nl * pump * crystal.coupling_in) * crystal.length_cm
    eta = crystal.coupling_out * np.sin(arg) ** 2
    return float(eta) if eta.ndim == 0 else eta


class ConversionEfficiencyTransformer(TransformerMixin, BaseEstimator):
    """Map a column of pump powers (W) to conversion efficiencies.

    Stateless apart from input-shape bookkeeping, so it can sit inside an
    sklearn ``Pipeline`` ahead of any downstream regressor.

    Parameters
    ----------
    sigma_nl, length_cm, coupling_in, coupling_out : float
        Same meaning as in :class:`CrystalParams`.
    output : {"linear", "db"}
        Emit the efficiency as a ratio or in dB (``-inf`` at zero pump).
    """

    def __init__(self, sigma_nl=0.48, length_cm=0.5, coupling_in=0.3, coupling_out=0.3,
                 output="linear"):
        self.sigma_nl = sigma_nl
        self.length_cm = length_cm
        self.coupling_in = coupling_in
        self.coupling_out = coupling_out
        self.output = output

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=1)
        if X.shape[1] != 1:
            raise ValidationError("expected a single column of pump powers in watts")
        if self.output not in ("linear", "db"):
            raise ValidationError(f"output must be 'linear' or 'db', got {self.output!r}")
        self.crystal_ = CrystalParams(
            sigma_nl=self.sigma_nl,
            length_cm=self.length_cm,
            coupling_in=self.coupling_in,
            coupling_out=self.coupling_out,
        )
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "crystal_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(f"expected {self.n_features_in_} column, got {X.shape[1]}")
        eta = conversion_efficiency(X[:, 0], self.crystal_)
        if self.output == "db":
            with np.errstate(divide="ignore"):
                eta = 10.0 * np.log10(eta)
        return eta.reshape(-1, 1)
