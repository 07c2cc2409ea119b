"""Elementary-link and repeater-chain Monte Carlo.

Each attempt follows the feed-forward protocol: photons are emitted, the
remote BSM tries all N modes in parallel, the herald travels back, the pump
switch is set for the heralded mode and the retrieved photon is converted,
filtered and detected.

Random numbers come from numpy's counter-based Philox generator. Attempt
``t`` of link ``i`` always reads the same block of counters, so results do
not depend on how attempts are batched or spread over workers. Timestamps are
integer picoseconds so latency identities hold exactly.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .photonics.conversion import conversion_efficiency
from .photonics.detector import DetectorParams
from .photonics.filters import filter_transmission
from .validation import check_fraction, check_int, check_non_negative, check_positive

PS = 1e12  # picoseconds per second
_DRAWS_EXTRA = 4  # herald choice, shifted-photon survival, agreed-photon survival, BSM coin


@dataclass(frozen=True)
class LinkParams:
    alpha_db_per_km: float = 0.2
    length_km: float = 50.0
    mode_count: int = 16
    rep_rate: float = 1e8
    bsm_cap: float = 0.5
    classical_velocity: float = 2.0e8

    def __post_init__(self):
        check_non_negative(self.alpha_db_per_km, "alpha_db_per_km")
        check_non_negative(self.length_km, "length_km")
        check_int(self.mode_count, "mode_count", minimum=1)
        check_positive(self.rep_rate, "rep_rate")
        # 0.5 is the linear-optics ceiling; larger caps model ancilla-assisted or ideal BSMs
        if not 0 < self.bsm_cap <= 1.0:
            raise ValidationError(f"bsm_cap must lie in (0, 1], got {self.bsm_cap}")
        check_positive(self.classical_velocity, "classical_velocity")

    @property
    def one_way_delay(self):
        return self.length_km * 1e3 / self.classical_velocity


def swap_probability(link):
    """Per-mode remote swap probability ``bsm_cap * 10^(-2 alpha L / 10)``."""
    return link.bsm_cap * 10.0 ** (-2.0 * link.alpha_db_per_km * link.length_km / 10.0)


def success_probability(eta_swap, n_modes):
    """Probability that at least one of ``n_modes`` independent modes succeeds."""
    check_fraction(eta_swap, "eta_swap")
    check_int(n_modes, "n_modes", minimum=1)
    return 1.0 - (1.0 - eta_swap) ** n_modes


def feed_forward_time_budget(link, switch):
    """Minimum memory storage time: herald round trip plus switch reconfiguration."""
    return 2.0 * link.length_km * 1e3 / link.classical_velocity + switch.switching_time


@dataclass(frozen=True)
class ShiftStack:
    """Per-photon survival through the local shifting and detection path.

    ``shifted_photons`` is ``"one"`` (the neighbour's photon is already at the
    agreed mode and only passes the filter and detector) or ``"both"``.
    """

    conversion_efficiency: float = 1.0
    filter_transmission: float = 1.0
    detector: DetectorParams = DetectorParams(efficiency=1.0, dark_count_rate=0.0, dead_time=0.0)
    switching_time: float = 0.0
    local_processing_time: float = 0.0
    shifted_photons: str = "one"

    def __post_init__(self):
        check_fraction(self.conversion_efficiency, "conversion_efficiency")
        check_fraction(self.filter_transmission, "filter_transmission")
        check_non_negative(self.switching_time, "switching_time")
        check_non_negative(self.local_processing_time, "local_processing_time")
        if self.shifted_photons not in ("one", "both"):
            raise ValidationError("shifted_photons must be 'one' or 'both'")

    @classmethod
    def from_models(cls, pump_w, crystal, chain, det, switch, residual_detuning=0.0, **kwargs):
        return cls(
            conversion_efficiency=conversion_efficiency(pump_w, crystal),
            filter_transmission=filter_transmission(chain, residual_detuning),
            detector=det,
            switching_time=switch.switching_time,
            **kwargs,
        )

    @property
    def shifted_survival(self):
        return self.conversion_efficiency * self.filter_transmission * self.detector.efficiency

    @property
    def agreed_survival(self):
        if self.shifted_photons == "both":
            return self.shifted_survival
        return self.filter_transmission * self.detector.efficiency


LOSSLESS_STACK = ShiftStack()


# --- random streams -----------------------------------------------------------------


def _blocks_per_trial(mode_count):
    return -(-(mode_count + _DRAWS_EXTRA) // 4)  # each Philox counter yields four 64-bit words


def _uniforms(seed, stream, start, stop, mode_count):
    """Uniform draws for attempts ``[start, stop)`` on substream ``stream``."""
    blocks = _blocks_per_trial(mode_count)
    bitgen = np.random.Philox(key=int(seed) + (int(stream) << 64))
    bitgen.advance(start * blocks)
    raw = bitgen.random_raw((stop - start) * blocks * 4)
    u = (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
    return u.reshape(stop - start, blocks * 4)


def _chunks(trials, workers):
    size = max(1, -(-trials // max(1, workers)))
    return [(s, min(s + size, trials)) for s in range(0, trials, size)]


def _map_ordered(fn, ranges, workers):
    if workers <= 1 or len(ranges) == 1:
        return [fn(r) for r in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, ranges))  # map preserves submission order


# --- elementary link ----------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    attempt: int
    outcomes: tuple  # per-mode remote BSM success
    heralded_mode: int  # None when no mode succeeded
    emit: int  # ps
    remote_bsm: int
    herald_received: int
    switch_done: int  # None without a herald
    local_detection: int  # None without a herald
    local_success: bool

    @property
    def memory_hold(self):
        """Storage time until the switch is ready (ps); None without a herald."""
        return None if self.switch_done is None else self.switch_done - self.emit


@dataclass
class LinkDraws:
    """Vectorised outcome of a block of attempts on one link."""

    attempts: np.ndarray
    outcomes: np.ndarray  # (n, N) bool
    heralded_mode: np.ndarray  # -1 for none
    shifted_ok: np.ndarray
    agreed_ok: np.ndarray
    bsm_ok: np.ndarray

    @property
    def heralded(self):
        return self.heralded_mode >= 0

    @classmethod
    def concat(cls, parts):
        return cls(*(np.concatenate([getattr(p, f) for p in parts]) for f in
                     ("attempts", "outcomes", "heralded_mode", "shifted_ok", "agreed_ok", "bsm_ok")))


def _draw_link(link, stack, seed, stream, start, stop):
    n_modes = link.mode_count
    u = _uniforms(seed, stream, start, stop, n_modes)
    outcomes = u[:, :n_modes] < swap_probability(link)
    count = outcomes.sum(axis=1)
    # uniform pick among the successful modes: the k-th success, k = floor(u * count)
    k = np.minimum(np.floor(u[:, n_modes] * count), np.maximum(count - 1, 0)).astype(np.int64)
    ranks = np.cumsum(outcomes, axis=1) - 1
    hit = outcomes & (ranks == k[:, None])
    herald = np.where(count > 0, np.argmax(hit, axis=1), -1)
    return LinkDraws(
        attempts=np.arange(start, stop, dtype=np.int64),
        outcomes=outcomes,
        heralded_mode=herald.astype(np.int64),
        shifted_ok=u[:, n_modes + 1] < stack.shifted_survival,
        agreed_ok=u[:, n_modes + 2] < stack.agreed_survival,
        bsm_ok=u[:, n_modes + 3] < link.bsm_cap,
    )


@dataclass
class ElementaryLinkResult:
    link: LinkParams
    stack: ShiftStack
    seed: int
    draws: LinkDraws
    emit: np.ndarray
    remote_bsm: np.ndarray
    herald_received: np.ndarray
    switch_done: np.ndarray  # -1 without herald
    local_detection: np.ndarray  # -1 without herald

    @property
    def trials(self):
        return len(self.emit)

    @property
    def local_success(self):
        return self.draws.heralded & self.draws.shifted_ok

    @property
    def herald_count(self):
        return int(self.draws.heralded.sum())

    @property
    def herald_rate(self):
        return self.herald_count / self.trials

    @property
    def success_rate(self):
        return int(self.local_success.sum()) / self.trials

    @property
    def memory_hold(self):
        """Storage times in ps for heralded attempts."""
        h = self.draws.heralded
        return self.switch_done[h] - self.emit[h]

    def records(self):
        d = self.draws
        success = self.local_success
        for i in range(self.trials):
            herald = int(d.heralded_mode[i])
            yield TrialRecord(
                attempt=int(d.attempts[i]),
                outcomes=tuple(bool(x) for x in d.outcomes[i]),
                heralded_mode=herald if herald >= 0 else None,
                emit=int(self.emit[i]),
                remote_bsm=int(self.remote_bsm[i]),
                herald_received=int(self.herald_received[i]),
                switch_done=int(self.switch_done[i]) if herald >= 0 else None,
                local_detection=int(self.local_detection[i]) if herald >= 0 else None,
                local_success=bool(success[i]),
            )


def _validate_run(trials, seed):
    check_int(trials, "trials", minimum=1)
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) < 2**64:
        raise ValidationError(f"seed must be an integer in [0, 2^64), got {seed!r}")


def simulate_elementary_link(link, stack=LOSSLESS_STACK, seed=0, trials=1, workers=1, stream=0):
    """Run ``trials`` attempts on one elementary link.

    Attempt ``t`` is emitted at ``t / rep_rate``. The herald arrives one
    round trip later, the switch is ready ``switching_time`` after that and
    the converted photon is detected ``local_processing_time`` later.
    """
    _validate_run(trials, seed)
    if not isinstance(link, LinkParams) or not isinstance(stack, ShiftStack):
        raise ValidationError("link must be LinkParams and stack must be ShiftStack")
    check_int(workers, "workers", minimum=1)

    parts = _map_ordered(
        lambda r: _draw_link(link, stack, seed, stream, *r), _chunks(trials, workers), workers
    )
    draws = LinkDraws.concat(parts)

    period = 1.0 / link.rep_rate
    emit = np.rint(draws.attempts * (period * PS)).astype(np.int64)
    one_way = int(round(link.one_way_delay * PS))
    round_trip = int(round(2.0 * link.one_way_delay * PS))
    switch = int(round(stack.switching_time * PS))
    processing = int(round(stack.local_processing_time * PS))
    herald_rx = emit + round_trip
    heralded = draws.heralded
    switch_done = np.where(heralded, herald_rx + switch, -1)
    detection = np.where(heralded, herald_rx + switch + processing, -1)
    return ElementaryLinkResult(
        link, stack, int(seed), draws, emit, emit + one_way, herald_rx, switch_done, detection
    )


# --- chain --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainStats:
    links: int
    trials: int
    successes: int
    end_to_end_rate: float
    latency_mean: float  # s, over successful attempts (nan if none)
    latency_p95: float
    herald_rates: tuple

    def __post_init__(self):
        if not 0.0 <= self.end_to_end_rate <= 1.0:
            raise ValidationError("end_to_end_rate outside [0, 1]")


def simulate_chain(links, seed=0, trials=1, stacks=None, workers=1, min_trials=1):
    """Concatenate elementary links; all must herald in the same attempt.

    Success also needs every link's shifted photon to survive and every
    internal local BSM (``len(links) - 1`` of them) to pass its
    ``bsm_cap`` coin with the neighbouring photon present.
    """
    links = list(links)
    if not links:
        raise ValidationError("need at least one link")
    _validate_run(trials, seed)
    if trials < min_trials:
        raise ValidationError(f"need at least {min_trials} trials, got {trials}")
    if stacks is None:
        stacks = [LOSSLESS_STACK] * len(links)
    elif isinstance(stacks, ShiftStack):
        stacks = [stacks] * len(links)
    stacks = list(stacks)
    if len(stacks) != len(links):
        raise ValidationError("one shift stack per link is required")

    results = [
        simulate_elementary_link(link, stack, seed, trials, workers, stream=i)
        for i, (link, stack) in enumerate(zip(links, stacks))
    ]
    ok = np.ones(trials, dtype=bool)
    for res in results:
        ok &= res.local_success
    for left, right in zip(results[:-1], results[1:]):
        ok &= left.draws.bsm_ok & right.draws.agreed_ok

    ready = np.max([res.switch_done - res.emit for res in results], axis=0)
    processing = max(int(round(s.local_processing_time * PS)) for s in stacks)
    latency = (ready[ok] + processing) / PS
    successes = int(ok.sum())
    return ChainStats(
        links=len(links),
        trials=trials,
        successes=successes,
        end_to_end_rate=successes / trials,
        latency_mean=float(latency.mean()) if successes else math.nan,
        latency_p95=float(np.percentile(latency, 95)) if successes else math.nan,
        herald_rates=tuple(r.herald_rate for r in results),
    )


def herald_z_score(result):
    """Standard score of the observed herald count against the analytic probability."""
    p = success_probability(swap_probability(result.link), result.link.mode_count)
    n = result.trials
    k = result.herald_count
    var = n * p * (1.0 - p)
    if var == 0:
        return 0.0 if k == n * p else math.inf
    return (k - n * p) / math.sqrt(var)
