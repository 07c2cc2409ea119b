"""Scenario-level analyses behind the command line: SNR sweep, conversion
curve, noise decomposition, budget report, link simulation and shift plans."""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import SweepGrid
from .exceptions import ValidationError
from .link_sim import (
    feed_forward_time_budget,
    herald_z_score,
    simulate_elementary_link,
    success_probability,
    swap_probability,
)
from .mode_mapper import output_extinction, plan_shift, power_sum_db, shift_displacement
from .photonics import (
    FiberRamanParams,
    NoiseDataPoint,
    RamanFitGeometry,
    conversion_efficiency,
    crystal_noise_decomposition,
    filter_rejection_db,
    fit_raman_params,
    narrowest_fwhm,
    snr_breakdown,
)
from .photonics.raman import fiber_raman_counts, raman_power
from .pump_bank import (
    amplifier_input_powers,
    amplify,
    chain_ledger,
    pump_budget,
    vipa_fsr,
    vipa_fwhm,
    vipa_worst_crosstalk,
)
from .tables import Table, fmt_db, fmt_num, fmt_prob
from .units import photon_rate, ratio_to_db

PARAMETER_CONDITIONAL = (
    "SNR and efficiency figures depend on assumed Raman coefficients and coupling "
    "efficiencies (parameter-conditional)"
)


def _pool_map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- sweep ------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    table: Table
    snr_db: np.ndarray  # (len(powers), len(lengths))
    eta: np.ndarray
    grid: SweepGrid
    argmax: tuple  # (pump W, length cm, snr dB)


def snr_at(scenario, pump_w, length_cm):
    crystal = scenario.with_crystal(length_cm=length_cm).crystal
    return snr_breakdown(
        scenario.mean_photon_number, scenario.rep_rate, crystal, pump_w, scenario.filters,
        scenario.detector, scenario.noise_bandwidth, scenario.fiber, scenario.nu_filter,
    )


def run_sweep(scenario, grid=None, workers=1):
    grid = grid or scenario.sweep
    points = grid.points()
    results = _pool_map(lambda pt: snr_at(scenario, *pt), points, workers)
    shape = (len(grid.pump_powers), len(grid.crystal_lengths))
    snr = np.array([r.snr_db for r in results]).reshape(shape)
    eta = np.array([r.eta_conv for r in results]).reshape(shape)
    best = int(np.argmax(snr))  # first maximum in grid order
    rows = [
        (fmt_num(p * 1e3), fmt_num(x), fmt_db(r.snr_db), fmt_prob(r.eta_conv), int(i == best))
        for i, ((p, x), r) in enumerate(zip(points, results))
    ]
    table = Table(("pump_mw", "length_cm", "snr_db", "eta_conv", "argmax"), rows)
    return SweepResult(table, snr, eta, grid, (points[best][0], points[best][1], results[best].snr_db))


# --- conversion curve ---------------------------------------------------------------


def conversion_curve(scenario, powers_w=None):
    if powers_w is None:
        powers_w = np.linspace(0.0, max(scenario.sweep.pump_powers), 33)
    powers = np.asarray(powers_w, dtype=float)
    if powers.ndim != 1 or powers.size == 0 or np.any(powers < 0):
        raise ValidationError("power axis must be a non-empty list of non-negative powers")
    eta = conversion_efficiency(powers, scenario.crystal)
    rows = [(fmt_num(p * 1e3), fmt_prob(e), fmt_db(ratio_to_db(e))) for p, e in zip(powers, eta)]
    return Table(("pump_mw", "eta_conv", "eta_db"), rows), np.atleast_1d(eta)


# --- noise decomposition ------------------------------------------------------------


@dataclass(frozen=True)
class NoiseResult:
    table: Table
    fit: object
    decomposition: list

    def summary(self):
        fit = self.fit
        lines = [
            f"beta_cryst = {fit.beta:.6g}",
            f"alpha_cryst = {fit.alpha:.6g} /cm" + (" (held fixed)" if fit.alpha_fixed else ""),
            f"residual_norm = {fit.residual_norm:.6g} counts/s",
            f"relative_residual = {fit.relative_residual:.6g}",
        ]
        if any(fit.clamped.values()):
            lines.append("warning: fitted parameter clamped at zero: "
                         + ", ".join(k for k, v in fit.clamped.items() if v))
        n_clamped = sum(d.clamped for d in self.decomposition)
        if n_clamped:
            lines.append(f"warning: {n_clamped} point(s) clamped to zero crystal noise")
        return "\n".join(lines)


def _fiber_or_null(scenario):
    return scenario.fiber or FiberRamanParams(beta=0.0, alpha_per_km=0.0, length_km=0.0)


def noise_decompose(scenario, data):
    """Subtract dark and fibre counts from measured noise and fit the crystal term."""
    data = list(data)
    fiber = _fiber_or_null(scenario)
    decomposition = crystal_noise_decomposition(data, fiber, scenario.detector, scenario.nu_filter)
    crystal_points = [
        NoiseDataPoint(p.pump_power, d.crystal, p.length_cm) for p, d in zip(data, decomposition)
    ]
    geometry = RamanFitGeometry(
        length_cm=scenario.crystal.length_cm,
        coupling_in=scenario.crystal.coupling_in,
        detection_efficiency=scenario.detector.efficiency,
        frequency_hz=scenario.nu_filter,
    )
    lengths = {p.length_cm if p.length_cm is not None else geometry.length_cm for p in data}
    fix_alpha = scenario.crystal.alpha_raman if len(lengths) < 2 else None
    fit = fit_raman_params(crystal_points, geometry, fix_alpha=fix_alpha)
    rows = [
        (fmt_num(d.pump_power * 1e3), fmt_num(d.total), fmt_num(d.fiber), fmt_num(d.crystal))
        for d in decomposition
    ]
    table = Table(("pump_mw", "total", "fiber_theory", "crystal_estimate"), rows)
    return NoiseResult(table, fit, decomposition)


def synthetic_noise_curve(scenario, powers_w, lengths_cm=None):
    """Noise counts that the scenario's own models predict (dark + fibre + crystal)."""
    fiber = _fiber_or_null(scenario)
    lengths = lengths_cm if lengths_cm is not None else [None] * len(powers_w)
    points = []
    for p, length in zip(powers_w, lengths):
        crystal = scenario.crystal if length is None else scenario.with_crystal(length_cm=length).crystal
        crystal_counts = photon_rate(
            raman_power(p * crystal.coupling_in, crystal.raman_medium()), scenario.nu_filter
        ) * scenario.detector.efficiency
        total = (scenario.detector.dark_count_rate
                 + fiber_raman_counts(p, fiber, scenario.detector, scenario.nu_filter)
                 + crystal_counts)
        points.append(NoiseDataPoint(p, total, length))
    return points


def noise_points_to_csv(points):
    with_length = any(p.length_cm is not None for p in points)
    header = ("pump_mw", "counts_per_s") + (("length_cm",) if with_length else ())
    rows = []
    for p in points:
        row = (fmt_num(p.pump_power * 1e3, 12), fmt_num(p.counts_per_second, 15))
        rows.append(row + ((fmt_num(p.length_cm, 12),) if with_length else ()))
    return Table(header, rows).to_csv()


# --- extinction and budget ----------------------------------------------------------


def extinction_budget(scenario):
    """ER after conversion for the scenario's comb, VIPA, switch and filters."""
    chain = scenario.pump_chain
    spacing = scenario.pump_comb.spacing
    filter_rej = filter_rejection_db(scenario.filters, spacing)
    if chain is None or scenario.pump_comb.count < 2:
        return output_extinction(math.inf, math.inf, filter_rej)
    fwhm = vipa_fwhm(vipa_fsr(chain.vipa), chain.vipa.reflect_back, chain.vipa.reflect_front)
    lineshape = vipa_worst_crosstalk(scenario.pump_comb, fwhm)
    vipa_ct = power_sum_db([lineshape, chain.vipa.spatial_crosstalk_db])
    return output_extinction(vipa_ct, chain.switch.port_crosstalk_db, filter_rej)


@dataclass(frozen=True)
class BudgetResult:
    table: Table
    text: str
    figures: dict


def budget(scenario, workers=1):
    rows = []
    lines = [f"Budget for scenario '{scenario.name}'", ""]
    chain = scenario.pump_chain
    figures = {}

    if chain is not None:
        ledger = chain_ledger(chain, scenario.pump_comb)
    else:
        ledger = pump_budget(0.0, [])
    lines.append("Pump loss ledger (per comb line)")
    lines.append(f"  source                {chain.source_power_dbm if chain else 0.0:8.2f} dBm")
    for (stage, loss), level in zip(ledger.stages, ledger.levels):
        rows.append(("ledger", stage, fmt_db(loss), "dB"))
        lines.append(f"  {stage:<20s} {-loss:8.2f} dB -> {level:7.2f} dBm")
    rows.append(("ledger", "total", fmt_db(ledger.total_loss_db), "dB"))
    lines.append(f"  total loss            {ledger.total_loss_db:8.2f} dB")
    figures["ledger_total_db"] = ledger.total_loss_db

    if chain is not None:
        inputs = amplifier_input_powers(chain, scenario.pump_comb)
        for i, p in enumerate(inputs):
            rows.append(("mode_power", f"mode_{i}", fmt_db(p), "dBm"))
        worst = float(inputs.min())
        amp = amplify(worst, chain.target_output_dbm, chain.amplifier, scenario.nu_pump,
                      chain.ase_filter_bandwidth)
        rows += [
            ("amplifier", "input_min", fmt_db(worst), "dBm"),
            ("amplifier", "output", fmt_db(amp.output_dbm), "dBm"),
            ("amplifier", "gain", fmt_db(amp.gain_db), "dB"),
            ("amplifier", "ase_in_band", fmt_num(amp.ase_in_band, 6), "W"),
        ]
        lines += [
            "",
            f"Amplifier: {worst:.2f} dBm in -> {amp.output_dbm:.2f} dBm out, "
            f"gain {amp.gain_db:.2f} dB" + (" (clamped at max output)" if amp.clamped else ""),
            f"  residual ASE in {chain.ase_filter_bandwidth / 1e9:.0f} GHz band: {amp.ase_in_band:.3e} W",
        ]
        switch = chain.switch
    else:
        switch = None

    if switch is not None:
        ff = feed_forward_time_budget(scenario.link, switch)
        rows.append(("timing", "feed_forward", fmt_num(ff * 1e6, 10), "us"))
        lines.append(f"Feed-forward budget (min. memory storage): {ff * 1e6:.4f} us")
        figures["feed_forward_s"] = ff

    er = extinction_budget(scenario)
    figures["extinction_db"] = er.total_er_db
    for name, val in zip(("vipa_ct", "switch_ct", "filter_rejection"), er.contributions):
        rows.append(("extinction", name, fmt_db(val), "dB"))
    rows.append(("extinction", "total", fmt_db(er.total_er_db), "dB"))
    lines += [
        "",
        "Extinction ratio after conversion",
        f"  VIPA crosstalk    {fmt_db(er.vipa_ct_db):>7s} dB",
        f"  switch crosstalk  {fmt_db(er.switch_ct_db):>7s} dB",
        f"  filter rejection  {fmt_db(er.filter_rejection_db):>7s} dB",
        f"  total             {fmt_db(er.total_er_db):>7s} dB",
    ]

    # figures of merit
    op = snr_at(scenario, scenario.operating_pump_w, scenario.crystal.length_cm)
    sweep = run_sweep(scenario, workers=workers)
    figures.update(
        snr_db=op.snr_db,
        eta_conv=op.eta_conv,
        sweep_snr_min=float(sweep.snr_db.min()),
        sweep_snr_max=float(sweep.snr_db.max()),
        bandwidth_hz=scenario.pump_comb.bandwidth,
        modes=scenario.pump_comb.count,
        switching_time_s=switch.switching_time if switch else math.nan,
    )
    fom = [
        ("Output SNR", f"{fmt_db(op.snr_db)} dB (sweep {fmt_db(figures['sweep_snr_min'])} - "
                       f"{fmt_db(figures['sweep_snr_max'])} dB)*"),
        ("Conversion Efficiency", f"{op.eta_conv * 100:.2f} %*"),
        ("Spectral Bandwidth", f"{scenario.pump_comb.bandwidth / 1e9:.2f} GHz"),
        ("Number of Modes", str(scenario.pump_comb.count)),
        ("Extinction Ratio", f"{fmt_db(er.total_er_db)} dB"),
        ("Switching Time", f"{switch.switching_time * 1e9:.2f} ns" if switch else "n/a"),
    ]
    rows += [
        ("figure_of_merit", "output_snr", fmt_db(op.snr_db), "dB"),
        ("figure_of_merit", "conversion_efficiency", fmt_prob(op.eta_conv), "1"),
        ("figure_of_merit", "spectral_bandwidth", fmt_num(scenario.pump_comb.bandwidth / 1e9), "GHz"),
        ("figure_of_merit", "number_of_modes", str(scenario.pump_comb.count), "1"),
        ("figure_of_merit", "extinction_ratio", fmt_db(er.total_er_db), "dB"),
        ("figure_of_merit", "switching_time",
         fmt_num(switch.switching_time * 1e9) if switch else "nan", "ns"),
    ]
    lines += ["", "Figure of Merit          | Value", "-" * 60]
    lines += [f"{name:<24s} | {value}" for name, value in fom]
    lines += [
        f"(operating point {scenario.operating_pump_w * 1e3:.1f} mW, "
        f"{scenario.crystal.length_cm:.2f} cm)",
        f"* {PARAMETER_CONDITIONAL}",
    ]
    return BudgetResult(Table(("section", "item", "value", "unit"), rows), "\n".join(lines), figures)


# --- simulation ---------------------------------------------------------------------


@dataclass(frozen=True)
class SimulationReport:
    table: Table
    summary: dict

    def summary_json(self):
        return json.dumps(self.summary, indent=2, sort_keys=True) + "\n"


def _trial_rows(result):
    d = result.draws
    success = result.local_success
    bits = np.where(d.outcomes, "1", "0")
    for i in range(result.trials):
        heralded = d.heralded_mode[i] >= 0
        yield (
            str(int(d.attempts[i])),
            "".join(bits[i]),
            str(int(d.heralded_mode[i])) if heralded else "",
            str(int(result.emit[i])),
            str(int(result.remote_bsm[i])),
            str(int(result.herald_received[i])),
            str(int(result.switch_done[i])) if heralded else "",
            str(int(result.local_detection[i])) if heralded else "",
            "1" if success[i] else "0",
        )


TRIAL_HEADER = ("attempt", "outcomes", "heralded_mode", "emit_ps", "remote_bsm_ps",
                "herald_received_ps", "switch_done_ps", "local_detection_ps", "local_success")


def simulate(scenario, seed, trials, workers=1):
    if trials is None or trials < 1:
        raise ValidationError("trials must be >= 1")
    stack = scenario.shift_stack()
    result = simulate_elementary_link(scenario.link, stack, seed=seed, trials=trials,
                                      workers=workers)
    eta_swap = swap_probability(scenario.link)
    p = success_probability(eta_swap, scenario.link.mode_count)
    hold = result.memory_hold
    budget_s = stack.switching_time + 2 * scenario.link.one_way_delay
    summary = {
        "scenario": scenario.name,
        "seed": int(seed),
        "trials": int(trials),
        "modes": scenario.link.mode_count,
        "eta_swap": float(fmt_prob(eta_swap)),
        "herald_probability_analytic": float(fmt_prob(p)),
        "herald_rate": float(fmt_prob(result.herald_rate)),
        "herald_z_score": float(f"{herald_z_score(result):.4f}"),
        "local_success_rate": float(fmt_prob(result.success_rate)),
        "local_detection_probability": float(fmt_prob(stack.shifted_survival)),
        "feed_forward_budget_us": float(fmt_num(budget_s * 1e6)),
        "min_memory_hold_us": float(fmt_num(hold.min() / 1e6)) if hold.size else None,
    }
    return SimulationReport(Table(TRIAL_HEADER, list(_trial_rows(result))), summary)


# --- shift planning -----------------------------------------------------------------


def plan_shift_report(scenario, mode_index):
    grid = scenario.signal_grid
    if not 0 <= mode_index < grid.count:
        raise ValidationError(f"mode index {mode_index} outside [0, {grid.count})")
    fwhm = narrowest_fwhm(scenario.filters)
    plan = plan_shift(grid, mode_index, scenario.pump_comb, scenario.nu_filter, scenario.process,
                      filter_fwhm=fwhm)
    comb = scenario.pump_comb
    lines = [
        f"process            {plan.process.value}",
        f"heralded mode      {mode_index} (offset {plan.heralded_offset / 1e9:+.4f} GHz)",
        f"required f_shift   {plan.pump_shift / 1e9:+.4f} GHz",
        f"selected comb line {plan.selected_comb_index} "
        f"(offset {comb.offset(plan.selected_comb_index) / 1e9:+.4f} GHz)",
        f"residual detuning  {plan.residual_detuning / 1e9:.4f} GHz",
        f"idler frequency    {plan.idler_frequency / 1e12:.6f} THz",
    ]
    if comb.count > 1:
        # with the signal held fixed, moving the pump between the outermost lines
        disp = shift_displacement(grid.mode(mode_index), comb.mode(0), comb.mode(comb.count - 1),
                                  scenario.process)
        lines.append(f"idler displacement between outermost switch states "
                     f"{disp / 1e9:.4f} GHz")
    if plan.off_grid:
        lines.append(f"WARNING: off-grid, residual exceeds half the {fwhm / 1e9:.4f} GHz filter FWHM")
    return plan, "\n".join(lines) + "\n"
