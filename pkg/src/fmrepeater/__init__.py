"""Frequency-multiplexed quantum repeater node with feed-forward spectral mode mapping.

Subpackages and modules:

* :mod:`fmrepeater.units` - unit conversions and quantity parsing
* :mod:`fmrepeater.photonics` - conversion, Raman noise, filters, detector, SNR
* :mod:`fmrepeater.pump_bank` - comb, VIPA, amplifier, switch and loss ledger
* :mod:`fmrepeater.mode_mapper` - pump shift planning and extinction ratio
* :mod:`fmrepeater.link_sim` - Monte Carlo elementary links and chains
* :mod:`fmrepeater.config`, :mod:`fmrepeater.analysis`, :mod:`fmrepeater.cli`
"""

from .exceptions import (
    FMRepeaterError,
    InfeasiblePhysicsError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = ["FMRepeaterError", "InfeasiblePhysicsError", "ValidationError", "__version__"]
