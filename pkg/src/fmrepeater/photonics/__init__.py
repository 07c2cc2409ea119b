"""Analytic component models: conversion, Raman noise, filters, detector, SNR."""

from .conversion import ConversionEfficiencyTransformer, CrystalParams, conversion_efficiency
from .detector import DetectorParams, detector_response
from .filters import FilterElement, filter_rejection_db, filter_transmission, narrowest_fwhm
from .raman import (
    DEFAULT_IDLER_HZ,
    FiberRamanParams,
    NoiseDataPoint,
    NoiseDecomposition,
    RamanFit,
    RamanFitGeometry,
    RamanMedium,
    RamanNoiseRegressor,
    crystal_noise_decomposition,
    fiber_raman_counts,
    fit_raman_params,
    raman_power,
)
from .snr import NoiseBandwidthModel, SnrBreakdown, snr_breakdown, snr_estimate

__all__ = [
    "ConversionEfficiencyTransformer",
    "CrystalParams",
    "DEFAULT_IDLER_HZ",
    "DetectorParams",
    "FiberRamanParams",
    "FilterElement",
    "NoiseBandwidthModel",
    "NoiseDataPoint",
    "NoiseDecomposition",
    "RamanFit",
    "RamanFitGeometry",
    "RamanMedium",
    "RamanNoiseRegressor",
    "SnrBreakdown",
    "conversion_efficiency",
    "crystal_noise_decomposition",
    "detector_response",
    "fiber_raman_counts",
    "filter_rejection_db",
    "filter_transmission",
    "fit_raman_params",
    "narrowest_fwhm",
    "raman_power",
    "snr_breakdown",
    "snr_estimate",
]
