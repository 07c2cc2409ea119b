"""Spontaneous Raman noise: the single-pass model, parameter fitting and the
subtraction of the known fibre contribution from a measured noise curve.

The model is ``P_ram = P_in * beta * exp(-alpha * z)``. It is used as written;
there is no integration of Raman generation along the medium.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..exceptions import FitSingularError, ValidationError
from ..units import photon_energy, photon_rate, wavelength_to_frequency
from ..validation import check_fraction, check_non_negative, check_positive
from .detector import DetectorParams

DEFAULT_IDLER_HZ = wavelength_to_frequency(1532.5e-9)

# alpha unit -> length unit it pairs with
_COMPATIBLE_UNITS = {"1/cm": "cm", "1/km": "km", "1/m": "m"}


@dataclass(frozen=True)
class RamanMedium:
    """A medium for the single-pass Raman model with explicit unit tags.

    The tags exist so that a per-km attenuation is never multiplied by a
    length in centimetres.
    """

    beta: float
    alpha: float
    length: float
    alpha_unit: str = "1/km"
    length_unit: str = "km"

    def __post_init__(self):
        check_non_negative(self.beta, "beta")
        check_non_negative(self.alpha, "alpha")
        check_non_negative(self.length, "length")
        expected = _COMPATIBLE_UNITS.get(self.alpha_unit)
        if expected is None:
            raise ValidationError(f"unknown attenuation unit {self.alpha_unit!r}")
        if self.length_unit != expected:
            raise ValidationError(
                f"attenuation in {self.alpha_unit} needs a length in {expected}, "
                f"got {self.length_unit}"
            )


@dataclass(frozen=True)
class FiberRamanParams:
    """Fibre Raman term; ``alpha_per_km`` is the natural-log coefficient (0.2 dB/km ~ 0.046/km)."""

    beta: float
    alpha_per_km: float
    length_km: float

    def __post_init__(self):
        check_non_negative(self.beta, "beta")
        check_non_negative(self.alpha_per_km, "alpha_per_km")
        check_non_negative(self.length_km, "length_km")

    def raman_medium(self):
        return RamanMedium(self.beta, self.alpha_per_km, self.length_km, "1/km", "km")


@dataclass(frozen=True)
class NoiseDataPoint:
    """One measured noise rate. ``length_cm`` is optional and defaults to the fit geometry."""

    pump_power: float  # W
    counts_per_second: float
    length_cm: float = None

    def __post_init__(self):
        check_non_negative(self.pump_power, "pump_power")
        check_non_negative(self.counts_per_second, "counts_per_second")
        if self.length_cm is not None:
            check_positive(self.length_cm, "length_cm")


def raman_power(input_w, medium):
    """Raman power (W) generated by ``input_w`` through ``medium``."""
    check_non_negative(input_w, "input power")
    return input_w * medium.beta * math.exp(-medium.alpha * medium.length)


class RamanNoiseRegressor(RegressorMixin, BaseEstimator):
    """Least-squares estimate of the crystal Raman coefficients from noise counts.

    The forward model for one observation is::

        counts = P * coupling_in * beta * exp(-alpha * z) * detection_efficiency / (h nu)

    ``X`` has one column (pump power in W, all taken at ``length_cm``) or two
    (pump power in W, crystal length in cm). ``beta`` and ``alpha`` are only
    separately identifiable when at least two distinct lengths are present;
    with a single length pass ``fix_alpha`` and only ``beta`` is estimated.

    Residuals are formed in linear count space.

    Attributes
    ----------
    beta_, alpha_ : float
        Fitted coefficients.
    covariance_ : ndarray
        Parameter covariance, 2x2 (or 1x1 when ``fix_alpha`` is set).
    residual_norm_ : float
        Euclidean norm of model minus data.
    clamped_ : dict
        ``{"beta": bool, "alpha": bool}``; True when the unconstrained optimum
        was negative and the parameter sits on its zero bound.
    """

    def __init__(self, coupling_in=1.0, detection_efficiency=1.0, frequency_hz=DEFAULT_IDLER_HZ,
                 length_cm=0.5, fix_alpha=None):
        self.coupling_in = coupling_in
        self.detection_efficiency = detection_efficiency
        self.frequency_hz = frequency_hz
        self.length_cm = length_cm
        self.fix_alpha = fix_alpha

    def _counts_per_watt(self):
        return (
            check_fraction(self.coupling_in, "coupling_in")
            * check_fraction(self.detection_efficiency, "detection_efficiency")
            / photon_energy(self.frequency_hz)
        )

    def _split(self, X):
        if X.shape[1] == 1:
            z = np.full(X.shape[0], check_positive(self.length_cm, "length_cm"))
        elif X.shape[1] == 2:
            z = X[:, 1]
        else:
            raise ValidationError("X must have 1 (power) or 2 (power, length) columns")
        return X[:, 0], z

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_samples=1, y_numeric=True)
        power, z = self._split(X)
        self.n_features_in_ = X.shape[1]
        if np.any(power < 0) or np.any(z <= 0):
            raise ValidationError("pump powers must be >= 0 and lengths > 0")
        if len(y) < 3:
            raise FitSingularError(f"need at least 3 data points, got {len(y)}")
        lit = power[power > 0]
        if lit.size == 0 or lit.max() < 2.0 * lit.min():
            raise FitSingularError("pump powers must span at least a factor of 2")
        k = self._counts_per_watt()
        if k == 0:
            raise FitSingularError("zero coupling or detection efficiency")
        a = k * power  # counts per unit beta*exp(-alpha z)

        if self.fix_alpha is not None:
            self._fit_beta_only(a, z, y, check_non_negative(self.fix_alpha, "fix_alpha"))
        else:
            if np.unique(z).size < 2:
                raise FitSingularError(
                    "beta and alpha are not separately identifiable from a single "
                    "crystal length; supply several lengths or set fix_alpha"
                )
            self._fit_both(a, z, y)
        return self

    def _fit_beta_only(self, a, z, y, alpha):
        basis = a * np.exp(-alpha * z)
        gram = float(basis @ basis)
        if gram == 0:
            raise FitSingularError("all design rows are zero")
        beta = float(basis @ y) / gram
        self.clamped_ = {"beta": beta < 0, "alpha": False}
        self.beta_ = max(beta, 0.0)
        self.alpha_ = alpha
        resid = self.beta_ * basis - y
        dof = len(y) - 1
        s2 = float(resid @ resid) / dof if dof > 0 else math.nan
        self.covariance_ = np.array([[s2 / gram]])
        self._finish(resid, y)

    def _fit_both(self, a, z, y):
        if not np.any(y > 0):
            # nothing above zero: beta sits on its bound and alpha is undetermined
            self.beta_, self.alpha_ = 0.0, 0.0
            self.clamped_ = {"beta": True, "alpha": False}
            self.covariance_ = np.full((2, 2), np.nan)
            self._finish(-y, y)
            return
        # log-linear start: ln(y/a) = ln(beta) - alpha z, exact on noiseless data
        ok = (y > 0) & (a > 0)
        if np.unique(z[ok]).size >= 2:
            slope, intercept = np.polyfit(z[ok], np.log(y[ok] / a[ok]), 1)
            beta0, alpha0 = math.exp(intercept), max(-slope, 0.0)
        else:
            beta0, alpha0 = float(np.sum(y) / max(np.sum(a), 1e-300)), 0.0
        beta_scale = beta0 if beta0 > 0 else 1.0

        def residual(x):
            return x[0] * beta_scale * a * np.exp(-x[1] * z) - y

        def jac(x):
            e = np.exp(-x[1] * z)
            return np.column_stack([beta_scale * a * e, -x[0] * beta_scale * a * z * e])

        res = least_squares(
            residual, x0=[beta0 / beta_scale, alpha0], jac=jac,
            bounds=([0.0, 0.0], [np.inf, np.inf]), method="trf",
            x_scale="jac", ftol=1e-15, xtol=1e-15, gtol=1e-15, max_nfev=2000,
        )
        x = np.where(res.active_mask != 0, 0.0, res.x)  # trf stops a hair inside the bound
        beta, alpha = x[0] * beta_scale, x[1]
        # jacobian in the unscaled parameters (beta, alpha)
        e = np.exp(-alpha * z)
        J = np.column_stack([a * e, -beta * a * z * e])
        # column-equilibrate before the rank test: beta and alpha differ by ~20 decades
        scale = np.linalg.norm(J, axis=0)
        resid = residual(x)
        dof = len(y) - 2
        s2 = float(resid @ resid) / dof if dof > 0 else math.nan
        if np.any(scale == 0) or res.active_mask[0] != 0:
            # beta clamped to zero leaves alpha unconstrained
            self.covariance_ = np.full((2, 2), np.nan)
        else:
            Js = J / scale
            if np.linalg.matrix_rank(Js) < 2 or np.linalg.cond(Js) > 1e12:
                raise FitSingularError("normal matrix is rank deficient")
            self.covariance_ = s2 * np.linalg.inv(Js.T @ Js) / np.outer(scale, scale)
        self.beta_, self.alpha_ = float(beta), float(alpha)
        self.clamped_ = {"beta": bool(res.active_mask[0] != 0), "alpha": bool(res.active_mask[1] != 0)}
        self._finish(resid, y)

    def _finish(self, resid, y):
        self.residual_norm_ = float(np.linalg.norm(resid))
        ynorm = float(np.linalg.norm(y))
        self.relative_residual_ = self.residual_norm_ / ynorm if ynorm > 0 else 0.0

    def predict(self, X):
        check_is_fitted(self, "beta_")
        X = check_array(X)
        power, z = self._split(X)
        return self._counts_per_watt() * power * self.beta_ * np.exp(-self.alpha_ * z)


@dataclass(frozen=True)
class RamanFit:
    beta: float
    alpha: float
    residual_norm: float
    relative_residual: float
    covariance: np.ndarray = field(repr=False)
    clamped: dict
    alpha_fixed: bool


@dataclass(frozen=True)
class RamanFitGeometry:
    """Everything the fit needs besides the data: how pump watts become counts."""

    length_cm: float = 0.5
    coupling_in: float = 1.0
    detection_efficiency: float = 1.0
    frequency_hz: float = DEFAULT_IDLER_HZ


def fit_raman_params(data, geometry, fix_alpha=None):
    """Fit ``(beta, alpha)`` to a list of :class:`NoiseDataPoint`."""
    data = list(data)
    if len(data) < 3:
        raise FitSingularError(f"need at least 3 data points, got {len(data)}")
    X = np.array(
        [[p.pump_power, p.length_cm if p.length_cm is not None else geometry.length_cm] for p in data]
    )
    y = np.array([p.counts_per_second for p in data])
    reg = RamanNoiseRegressor(
        coupling_in=geometry.coupling_in,
        detection_efficiency=geometry.detection_efficiency,
        frequency_hz=geometry.frequency_hz,
        length_cm=geometry.length_cm,
        fix_alpha=fix_alpha,
    ).fit(X, y)
    return RamanFit(
        beta=reg.beta_,
        alpha=reg.alpha_,
        residual_norm=reg.residual_norm_,
        relative_residual=reg.relative_residual_,
        covariance=reg.covariance_,
        clamped=reg.clamped_,
        alpha_fixed=fix_alpha is not None,
    )


@dataclass(frozen=True)
class NoiseDecomposition:
    pump_power: float
    total: float
    dark: float
    fiber: float
    crystal: float
    clamped: bool


def fiber_raman_counts(pump_w, fiber, det, frequency_hz=DEFAULT_IDLER_HZ):
    """Detected counts/s from Raman scattering of the pump in the fibre."""
    return photon_rate(raman_power(pump_w, fiber.raman_medium()), frequency_hz) * det.efficiency


def crystal_noise_decomposition(data, fiber, det, frequency_hz=DEFAULT_IDLER_HZ):
    """Split measured noise into dark, fibre-Raman and residual crystal-Raman counts.

    The crystal estimate is ``measured - dark - fibre`` clamped at zero; a
    clamped point carries ``clamped=True`` and triggers a warning.
    """
    if not isinstance(det, DetectorParams):
        raise ValidationError("det must be DetectorParams")
    out = []
    for point in data:
        fib = fiber_raman_counts(point.pump_power, fiber, det, frequency_hz)
        crystal = point.counts_per_second - det.dark_count_rate - fib
        clamped = crystal < 0
        out.append(
            NoiseDecomposition(
                pump_power=point.pump_power,
                total=point.counts_per_second,
                dark=det.dark_count_rate,
                fiber=fib,
                crystal=max(crystal, 0.0),
                clamped=clamped,
            )
        )
    n_clamped = sum(d.clamped for d in out)
    if n_clamped:
        warnings.warn(
            f"{n_clamped} point(s) had fibre + dark counts above the measurement; clamped to 0",
            stacklevel=2,
        )
    return out
