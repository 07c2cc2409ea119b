"""Scenario files: sectioned ``key = value`` text with unit-suffixed quantities.

Example::

    [crystal]
    sigma_nl = 0.48 /(W cm^2)
    length = 0.5 cm
    coupling_in = 0.3

Physical values must carry a unit; dimensionless values (efficiencies,
counts, Raman fractions) are bare numbers. Unknown sections or keys are
rejected. Filters are given one section each, named ``[filter.<label>]``.

Two presets ship with the package: ``experimental`` and ``state_of_the_art``.
"""

import configparser
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .exceptions import ConfigParseError, UnitError, ValidationError
from .link_sim import LinkParams, ShiftStack
from .mode_mapper import Process, idler_frequency
from .photonics import (
    CrystalParams,
    DetectorParams,
    FiberRamanParams,
    FilterElement,
    NoiseBandwidthModel,
    conversion_efficiency,
    filter_transmission,
)
from .pump_bank import AmplifierSpec, PumpChainConfig, SpectralModeGrid, SwitchSpec, VipaGeometry
from .units import db_per_km_to_per_m, parse_quantity, wavelength_to_frequency, watts_to_dbm
from .validation import check_increasing, check_positive

PRESETS = ("experimental", "state_of_the_art")
DEFAULT_MAX_CRYSTAL_CM = 5.0

# key kinds: a dimension name understood by parse_quantity, or one of
# "float", "int", "str", "bool"; the "[]" suffix marks a comma-separated list.
_SCHEMA = {
    "wavelengths": {
        "signal": ("length", True),
        "pump": ("length", True),
        "filter": ("length", True),
        "process": ("str", False),
        "dfg_tolerance": ("frequency", False),
        "filter_lock": ("bool", False),
    },
    "modes": {"count": ("int", True), "spacing": ("frequency", True)},
    "source": {"mean_photon_number": ("float", True), "rep_rate": ("frequency", True)},
    "crystal": {
        "sigma_nl": ("nl_coefficient", True),
        "length": ("length", True),
        "coupling_in": ("float", True),
        "coupling_out": ("float", True),
        "beta_raman": ("float", True),
        "alpha_raman": ("attenuation", True),
        "coupling": ("str", False),
    },
    "fiber": {
        "beta": ("float", True),
        "attenuation": ("db_per_length", True),
        "length": ("length", True),
    },
    "noise": {"reference_bandwidth": ("frequency", True)},
    "filter": {
        "kind": ("str", True),
        "fwhm": ("frequency", True),
        "fsr": ("frequency", False),
        "insertion_loss": ("db", False),
    },
    "detector": {
        "efficiency": ("float", True),
        "dark_count_rate": ("rate", True),
        "dead_time": ("time", True),
    },
    "pump_chain": {
        "source_power": ("power", True),
        "eom_loss": ("db", True),
        "flatness": ("db", False),
        "splitting_loss": ("db", False),
        "target_output": ("power", True),
        "ase_filter_bandwidth": ("frequency", False),
    },
    "vipa": {
        "thickness": ("length", True),
        "reflect_back": ("float", True),
        "reflect_front": ("float", True),
        "incidence": ("angle", False),
        "fsr": ("frequency", False),
        "insertion_loss": ("db", False),
        "spatial_crosstalk": ("db", False),
    },
    "switch": {
        "port_count": ("int", True),
        "switching_time": ("time", True),
        "crosstalk": ("db", True),
        "insertion_loss": ("db", False),
    },
    "amplifier": {
        "max_output": ("power", True),
        "noise_figure": ("db", True),
        "min_input": ("power", True),
    },
    "link": {
        "attenuation": ("db_per_length", True),
        "length": ("length", True),
        "bsm_cap": ("float", False),
        "classical_velocity": ("velocity", True),
        "shifted_photons": ("str", False),
        "local_processing_time": ("time", False),
        "pump_power": ("power", True),
    },
    "sweep": {
        "pump_powers": ("power[]", True),
        "crystal_lengths": ("length[]", True),
        "max_length": ("length", False),
    },
}
_REQUIRED_SECTIONS = ("wavelengths", "modes", "source", "crystal", "noise", "detector", "link",
                      "sweep")


def _convert(raw, kind, where):
    raw = raw.strip()
    if kind.endswith("[]"):
        items = [item for item in raw.split(",") if item.strip()]
        if not items:
            raise ValidationError(f"{where}: empty list")
        return [_convert(item, kind[:-2], where) for item in items]
    try:
        if kind == "float":
            value = float(raw)
            if math.isnan(value):
                raise ValueError
            return value
        if kind == "int":
            return int(raw)
        if kind == "str":
            return raw.strip('"').strip("'")
        if kind == "bool":
            lowered = raw.lower()
            if lowered not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError
            return lowered in ("true", "yes", "1")
    except ValueError:
        raise ValidationError(f"{where}: cannot read {raw!r} as {kind}") from None
    try:
        return parse_quantity(raw, kind)
    except UnitError as exc:
        raise UnitError(f"{where}: {exc}") from None


def _read_sections(parser):
    values = {}
    for section in parser.sections():
        base = section.split(".", 1)[0]
        if base not in _SCHEMA or (base == "filter") != ("." in section):
            raise ValidationError(f"unknown section [{section}]")
        schema = _SCHEMA[base]
        got = {}
        for key, raw in parser.items(section):
            if key not in schema:
                raise ValidationError(f"[{section}] unknown key {key!r}")
            got[key] = _convert(raw, schema[key][0], f"[{section}] {key}")
        missing = [k for k, (_, required) in schema.items() if required and k not in got]
        if missing:
            raise ValidationError(f"[{section}] missing required key(s): {', '.join(missing)}")
        values[section] = got
    for section in _REQUIRED_SECTIONS:
        if section not in values:
            raise ValidationError(f"missing required section [{section}]")
    if not any(s.startswith("filter.") for s in values):
        raise ValidationError("at least one [filter.<label>] section is required")
    return values


@dataclass(frozen=True)
class SweepGrid:
    pump_powers: tuple  # W
    crystal_lengths: tuple  # cm

    @classmethod
    def build(cls, pump_powers_w, crystal_lengths_cm, max_length_cm=DEFAULT_MAX_CRYSTAL_CM):
        powers = check_increasing(pump_powers_w, "pump_powers")
        lengths = check_increasing(crystal_lengths_cm, "crystal_lengths")
        if powers[0] < 0:
            raise ValidationError("pump powers must be >= 0")
        if lengths[0] <= 0:
            raise ValidationError("crystal lengths must be > 0")
        if lengths[-1] > max_length_cm + 1e-12:
            raise ValidationError(
                f"crystal length {lengths[-1]} cm exceeds the {max_length_cm} cm guard"
            )
        return cls(tuple(float(p) for p in powers), tuple(float(x) for x in lengths))

    def points(self):
        return [(p, x) for p in self.pump_powers for x in self.crystal_lengths]


@dataclass(frozen=True)
class Scenario:
    name: str
    process: Process
    nu_signal: float
    nu_pump: float
    nu_filter: float
    nu_filter_nominal: float
    signal_grid: SpectralModeGrid
    pump_comb: SpectralModeGrid
    mean_photon_number: float
    rep_rate: float
    crystal: CrystalParams
    fiber: FiberRamanParams  # None for free-space coupling
    noise_bandwidth: NoiseBandwidthModel
    filters: tuple
    detector: DetectorParams
    pump_chain: PumpChainConfig  # None when the chain is not modelled
    link: LinkParams
    operating_pump_w: float
    shifted_photons: str
    local_processing_time: float
    sweep: SweepGrid

    def with_crystal(self, **changes):
        return replace(self, crystal=replace(self.crystal, **changes))

    def shift_stack(self, residual_detuning=0.0):
        switching = self.pump_chain.switch.switching_time if self.pump_chain else 0.0
        return ShiftStack(
            conversion_efficiency=conversion_efficiency(self.operating_pump_w, self.crystal),
            filter_transmission=filter_transmission(self.filters, residual_detuning),
            detector=self.detector,
            switching_time=switching,
            local_processing_time=self.local_processing_time,
            shifted_photons=self.shifted_photons,
        )


def _build(values, name):
    wl = values["wavelengths"]
    process = Process.parse(wl.get("process", "DFG"))
    nu_sig = wavelength_to_frequency(wl["signal"])
    nu_pump = wavelength_to_frequency(wl["pump"])
    nu_filter_nominal = wavelength_to_frequency(wl["filter"])
    exact = idler_frequency(nu_sig, nu_pump, process)
    tolerance = wl.get("dfg_tolerance", 50e9)
    if abs(exact - nu_filter_nominal) > tolerance:
        raise ValidationError(
            f"[wavelengths] the {process.value} triple misses the filter by "
            f"{(exact - nu_filter_nominal) / 1e9:.2f} GHz (tolerance {tolerance / 1e9:.2f} GHz)"
        )
    # a locked filter is tuned onto the unshifted idler rather than its nominal channel
    nu_filter = exact if wl.get("filter_lock", True) else nu_filter_nominal

    modes = values["modes"]
    count = modes["count"]
    spacing = modes["spacing"]
    signal_grid = SpectralModeGrid(nu_sig, spacing, count)
    pump_comb = SpectralModeGrid(nu_pump, spacing, count)

    cr = values["crystal"]
    coupling = cr.get("coupling", "fiber")
    if coupling not in ("fiber", "free_space"):
        raise ValidationError("[crystal] coupling must be 'fiber' or 'free_space'")
    crystal = CrystalParams(
        sigma_nl=cr["sigma_nl"],
        length_cm=cr["length"] * 100.0,
        coupling_in=cr["coupling_in"],
        coupling_out=cr["coupling_out"],
        beta_raman=cr["beta_raman"],
        alpha_raman=cr["alpha_raman"] / 100.0,
    )
    fiber = None
    if coupling == "fiber":
        if "fiber" not in values:
            raise ValidationError("fibre-coupled crystal needs a [fiber] section")
        fb = values["fiber"]
        fiber = FiberRamanParams(
            beta=fb["beta"],
            alpha_per_km=db_per_km_to_per_m(fb["attenuation"]) * 1e3,
            length_km=fb["length"] / 1e3,
        )
    elif "fiber" in values:
        raise ValidationError("[fiber] given for a free-space coupled crystal")

    filters = []
    for section in sorted(s for s in values if s.startswith("filter.")):
        f = values[section]
        filters.append(
            FilterElement(
                kind=f["kind"],
                fwhm=f["fwhm"],
                fsr=f.get("fsr"),
                insertion_loss_db=f.get("insertion_loss", 0.0),
                center=nu_filter,
            )
        )

    det = values["detector"]
    detector = DetectorParams(det["efficiency"], det["dark_count_rate"], det["dead_time"])

    pump_chain = None
    if "pump_chain" in values:
        for needed in ("vipa", "switch", "amplifier"):
            if needed not in values:
                raise ValidationError(f"[pump_chain] needs a [{needed}] section")
        pc, vp, sw, amp = (values[k] for k in ("pump_chain", "vipa", "switch", "amplifier"))
        vipa_kwargs = dict(
            reflect_back=vp["reflect_back"],
            reflect_front=vp["reflect_front"],
            insertion_loss_db=vp.get("insertion_loss", 0.0),
            spatial_crosstalk_db=vp.get("spatial_crosstalk", math.inf),
        )
        if "fsr" in vp and "incidence" in vp:
            raise ValidationError("[vipa] give either fsr or incidence, not both")
        if "fsr" in vp:
            vipa = VipaGeometry.for_fsr(vp["fsr"], vp["thickness"], **vipa_kwargs)
        else:
            vipa = VipaGeometry(vp["thickness"], incidence_rad=vp.get("incidence", 0.0),
                                **vipa_kwargs)
        pump_chain = PumpChainConfig(
            source_power_dbm=watts_to_dbm(pc["source_power"]),
            eom_loss_db=pc["eom_loss"],
            vipa=vipa,
            switch=SwitchSpec(
                port_count=sw["port_count"],
                switching_time=sw["switching_time"],
                port_crosstalk_db=sw["crosstalk"],
                insertion_loss_db=sw.get("insertion_loss", 0.0),
            ),
            amplifier=AmplifierSpec(
                max_output_dbm=watts_to_dbm(amp["max_output"]),
                noise_figure_db=amp["noise_figure"],
                min_input_dbm=watts_to_dbm(amp["min_input"]),
            ),
            target_output_dbm=watts_to_dbm(pc["target_output"]),
            flatness_db=pc.get("flatness", 0.0),
            splitting_loss_db=pc.get("splitting_loss"),
            ase_filter_bandwidth=pc.get("ase_filter_bandwidth", 100e9),
        )
    else:
        for orphan in ("vipa", "switch", "amplifier"):
            if orphan in values:
                raise ValidationError(f"[{orphan}] given without [pump_chain]")

    src = values["source"]
    ln = values["link"]
    link = LinkParams(
        alpha_db_per_km=ln["attenuation"],
        length_km=ln["length"] / 1e3,
        mode_count=count,
        rep_rate=src["rep_rate"],
        bsm_cap=ln.get("bsm_cap", 0.5),
        classical_velocity=ln["classical_velocity"],
    )
    shifted = ln.get("shifted_photons", "one")
    if shifted not in ("one", "both"):
        raise ValidationError("[link] shifted_photons must be 'one' or 'both'")

    sw_ = values["sweep"]
    sweep = SweepGrid.build(
        sw_["pump_powers"],
        [x * 100.0 for x in sw_["crystal_lengths"]],
        sw_.get("max_length", DEFAULT_MAX_CRYSTAL_CM / 100.0) * 100.0,
    )

    return Scenario(
        name=name,
        process=process,
        nu_signal=nu_sig,
        nu_pump=nu_pump,
        nu_filter=nu_filter,
        nu_filter_nominal=nu_filter_nominal,
        signal_grid=signal_grid,
        pump_comb=pump_comb,
        mean_photon_number=src["mean_photon_number"],
        rep_rate=src["rep_rate"],
        crystal=crystal,
        fiber=fiber,
        noise_bandwidth=NoiseBandwidthModel(values["noise"]["reference_bandwidth"]),
        filters=tuple(filters),
        detector=detector,
        pump_chain=pump_chain,
        link=link,
        operating_pump_w=check_positive(ln["pump_power"], "[link] pump_power"),
        shifted_photons=shifted,
        local_processing_time=ln.get("local_processing_time", 0.0),
        sweep=sweep,
    )


def loads_scenario(text, name="scenario"):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                       delimiters=("=",))
    parser.optionxform = str  # keys are case sensitive
    try:
        parser.read_string(text, source=name)
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigParseError(f"malformed scenario file {name}", line) from None
    except configparser.Error as exc:
        raise ConfigParseError(f"{name}: {exc.message}", getattr(exc, "lineno", None)) from None
    return _build(_read_sections(parser), name)


def load_scenario(path_or_preset):
    """Load a scenario from a file path or a preset name."""
    text_path = Path(str(path_or_preset))
    if str(path_or_preset) in PRESETS:
        ref = resources.files("fmrepeater.presets") / f"{path_or_preset}.cfg"
        return loads_scenario(ref.read_text(encoding="utf-8"), str(path_or_preset))
    if not text_path.is_file():
        raise ValidationError(f"scenario {path_or_preset!r} is neither a file nor a preset "
                              f"({', '.join(PRESETS)})")
    return loads_scenario(text_path.read_text(encoding="utf-8"), text_path.stem)


def preset_path(name):
    return resources.files("fmrepeater.presets") / f"{name}.cfg"
