"""Multi-frame energy-storage simulation and Monte-Carlo aggregation.

Storage dynamics: the device starts empty.  Each frame it draws a fresh
channel, solves both per-frame programs and, if the cheaper optimal cost is
covered by storage, runs it (storage moves by -cost, so surplus frames bank
energy); otherwise the whole frame harvests and the full-frame harvest is
banked.  A frame spent harvesting is an outage; the outage probability is the
mean of the outage indicator.

Reproducibility: every trial draws from its own generator seeded with
``master_seed XOR trial_index``, so results do not depend on scheduling or
the worker count, and aggregates use exact summation (math.fsum) so they do
not depend on trial ordering either.
"""

import math
from dataclasses import dataclass
from enum import Enum
from multiprocessing import Pool

import numpy as np

from .allocator import Allocation, Strategy, decide, evaluate_strategies
from .channel import ChannelRealization, realize_channels
from .params import SystemParams, with_overrides

__all__ = [
    "FrameRecord",
    "SimTrace",
    "MonteCarloResult",
    "StrategyAverages",
    "SweepAxis",
    "SweepRow",
    "step_frame",
    "run_trace",
    "monte_carlo",
    "sweep",
    "trace_records_csv_rows",
    "TRACE_CSV_COLUMNS",
    "SWEEP_CSV_COLUMNS",
    "FRAME_STATS_CSV_COLUMNS",
]


@dataclass(frozen=True)
class FrameRecord:
    frame_index: int
    e_stored_begin: float   # J, at the start of the frame
    i_s: int                # 1 when the frame is spent harvesting
    strategy: Strategy
    cost: float             # J, optimal cost of the executed mode
    e_harvest: float        # J, harvested during this frame
    allocation: Allocation


@dataclass(frozen=True)
class SimTrace:
    params: SystemParams
    seed: int
    records: tuple
    mean_cost: float      # over processed frames; NaN if none
    mean_harvest: float   # over all frames
    outage: float         # mean of the harvest-only indicator

    @classmethod
    def from_records(cls, params: SystemParams, seed: int,
                     records: list) -> "SimTrace":
        processed = [r.cost for r in records if r.i_s == 0]
        mean_cost = math.fsum(processed) / len(processed) if processed else math.nan
        mean_harvest = math.fsum(r.e_harvest for r in records) / len(records)
        outage = math.fsum(r.i_s for r in records) / len(records)
        return cls(params=params, seed=seed, records=tuple(records),
                   mean_cost=mean_cost, mean_harvest=mean_harvest, outage=outage)


def step_frame(params: SystemParams, channel: ChannelRealization,
               e_stored: float, frame_index: int = 0) -> tuple[FrameRecord, float]:
    """Advance the storage by one frame; returns the record and next level."""
    if e_stored < 0.0:
        raise ValueError("e_stored must be non-negative")
    alloc, brk = decide(params, channel.eff_gain_down, channel.gain_offload,
                        e_stored)
    i_s = 1 if alloc.strategy is Strategy.HARVEST_ONLY else 0
    if i_s:
        e_next = e_stored + brk.e_harvest
    else:
        e_next = e_stored - brk.cost
    record = FrameRecord(frame_index=frame_index, e_stored_begin=e_stored,
                         i_s=i_s, strategy=alloc.strategy, cost=brk.cost,
                         e_harvest=brk.e_harvest, allocation=alloc)
    return record, e_next


@dataclass(frozen=True)
class _TrialStats:
    """Exact per-trial sums used by the Monte-Carlo aggregation."""
    n_frames: int
    outage: float
    sum_cost_local: float
    n_local: int
    sum_cost_offload: float
    n_offload: int
    sum_e_decode: float
    n_decode: int
    sum_e_compute: float
    sum_e_offload: float
    sum_eh_local: float
    sum_eh_offload: float
    n_chosen_local: int
    n_chosen_offload: int
    n_chosen_harvest: int
    sum_processed_cost: float
    n_processed: int


def _run_trial(params: SystemParams, n_frames: int,
               seed: int) -> tuple[list, _TrialStats]:
    rng = np.random.default_rng(seed)
    e_stored = 0.0
    records = []
    cost_local, cost_off = [], []
    e_dec, e_cmp, e_off, eh_loc, eh_off = [], [], [], [], []
    chosen = {Strategy.LOCAL_COMPUTE: 0, Strategy.OFFLOAD: 0,
              Strategy.HARVEST_ONLY: 0}
    processed = []
    for i in range(n_frames):
        ch = realize_channels(params, rng)
        local, offload = evaluate_strategies(params, ch.eff_gain_down,
                                             ch.gain_offload)
        if local.feasible:
            cost_local.append(local.cost)
            e_cmp.append(local.breakdown.e_compute)
            eh_loc.append(local.breakdown.e_harvest)
            e_dec.append(local.breakdown.e_decode)
        elif offload.feasible:
            e_dec.append(offload.breakdown.e_decode)
        if offload.feasible:
            cost_off.append(offload.cost)
            e_off.append(offload.breakdown.e_offload)
            eh_off.append(offload.breakdown.e_harvest)
        alloc, brk = decide(params, ch.eff_gain_down, ch.gain_offload,
                            e_stored, precomputed=(local, offload))
        i_s = 1 if alloc.strategy is Strategy.HARVEST_ONLY else 0
        chosen[alloc.strategy] += 1
        if i_s:
            e_next = e_stored + brk.e_harvest
        else:
            e_next = e_stored - brk.cost
            processed.append(brk.cost)
        records.append(FrameRecord(frame_index=i, e_stored_begin=e_stored,
                                   i_s=i_s, strategy=alloc.strategy,
                                   cost=brk.cost, e_harvest=brk.e_harvest,
                                   allocation=alloc))
        e_stored = e_next
    stats = _TrialStats(
        n_frames=n_frames,
        outage=math.fsum(r.i_s for r in records) / n_frames,
        sum_cost_local=math.fsum(cost_local), n_local=len(cost_local),
        sum_cost_offload=math.fsum(cost_off), n_offload=len(cost_off),
        sum_e_decode=math.fsum(e_dec), n_decode=len(e_dec),
        sum_e_compute=math.fsum(e_cmp),
        sum_e_offload=math.fsum(e_off),
        sum_eh_local=math.fsum(eh_loc),
        sum_eh_offload=math.fsum(eh_off),
        n_chosen_local=chosen[Strategy.LOCAL_COMPUTE],
        n_chosen_offload=chosen[Strategy.OFFLOAD],
        n_chosen_harvest=chosen[Strategy.HARVEST_ONLY],
        sum_processed_cost=math.fsum(processed), n_processed=len(processed),
    )
    return records, stats


def run_trace(params: SystemParams, n_frames: int, seed: int) -> SimTrace:
    """One storage trajectory: empty start, fresh channel every frame."""
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    records, _ = _run_trial(params, n_frames, seed)
    return SimTrace.from_records(params, seed, records)


@dataclass(frozen=True)
class StrategyAverages:
    mean_cost_local: float
    mean_cost_offload: float
    mean_e_decode: float
    mean_e_compute: float
    mean_e_offload: float
    mean_e_harvest_local: float
    mean_e_harvest_offload: float
    frac_local: float
    frac_offload: float
    frac_harvest_only: float
    n_local_feasible: int
    n_offload_feasible: int


@dataclass(frozen=True)
class MonteCarloResult:
    params: SystemParams
    n_frames: int
    n_trials: int
    master_seed: int
    mean_storage: tuple       # per-frame mean of the start-of-frame level
    outage_per_frame: tuple
    outage: float
    outage_ci: float          # 1.96 * stderr over trials (normal approx.)
    mean_processed_cost: float
    mean_processed_cost_ci: float
    averages: StrategyAverages


def _trial_worker(args):
    params, n_frames, seed = args
    return _run_trial(params, n_frames, seed)


def _ci_halfwidth(values: list[float]) -> float:
    n = len(values)
    if n < 2:
        return math.nan
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return 1.96 * math.sqrt(var / n)


def monte_carlo(params: SystemParams, n_frames: int, n_trials: int,
                master_seed: int, jobs: int = 1) -> MonteCarloResult:
    """Average n_trials independent traces; identical results for any jobs."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    if master_seed < 0:
        raise ValueError("master_seed must be non-negative")
    tasks = [(params, n_frames, master_seed ^ t) for t in range(n_trials)]
    if jobs > 1 and n_trials > 1:
        with Pool(processes=min(jobs, n_trials)) as pool:
            results = pool.map(_trial_worker, tasks)
    else:
        results = [_trial_worker(t) for t in tasks]
    all_records = [rec for rec, _ in results]
    stats = [st for _, st in results]

    mean_storage = tuple(
        math.fsum(trial[f].e_stored_begin for trial in all_records) / n_trials
        for f in range(n_frames))
    outage_per_frame = tuple(
        math.fsum(trial[f].i_s for trial in all_records) / n_trials
        for f in range(n_frames))
    per_trial_outage = [st.outage for st in stats]
    outage = math.fsum(per_trial_outage) / n_trials

    def _mean(total_key: str, count_key: str) -> float:
        total = math.fsum(getattr(st, total_key) for st in stats)
        count = sum(getattr(st, count_key) for st in stats)
        return total / count if count else math.nan

    n_all = n_frames * n_trials
    averages = StrategyAverages(
        mean_cost_local=_mean("sum_cost_local", "n_local"),
        mean_cost_offload=_mean("sum_cost_offload", "n_offload"),
        mean_e_decode=_mean("sum_e_decode", "n_decode"),
        mean_e_compute=_mean("sum_e_compute", "n_local"),
        mean_e_offload=_mean("sum_e_offload", "n_offload"),
        mean_e_harvest_local=_mean("sum_eh_local", "n_local"),
        mean_e_harvest_offload=_mean("sum_eh_offload", "n_offload"),
        frac_local=sum(st.n_chosen_local for st in stats) / n_all,
        frac_offload=sum(st.n_chosen_offload for st in stats) / n_all,
        frac_harvest_only=sum(st.n_chosen_harvest for st in stats) / n_all,
        n_local_feasible=sum(st.n_local for st in stats),
        n_offload_feasible=sum(st.n_offload for st in stats),
    )
    per_trial_cost = [st.sum_processed_cost / st.n_processed
                      for st in stats if st.n_processed]
    mean_cost = (math.fsum(st.sum_processed_cost for st in stats)
                 / max(1, sum(st.n_processed for st in stats))
                 if any(st.n_processed for st in stats) else math.nan)
    return MonteCarloResult(
        params=params, n_frames=n_frames, n_trials=n_trials,
        master_seed=master_seed, mean_storage=mean_storage,
        outage_per_frame=outage_per_frame, outage=outage,
        outage_ci=_ci_halfwidth(per_trial_outage),
        mean_processed_cost=mean_cost,
        mean_processed_cost_ci=_ci_halfwidth(per_trial_cost),
        averages=averages)


class SweepAxis(Enum):
    OPS_PER_BIT = "ops_per_bit"
    DIST_AP_DEV = "dist_ap_dev"
    DIST_DEV_SERVER = "dist_dev_server"


@dataclass(frozen=True)
class SweepRow:
    axis: SweepAxis
    value: float
    averages: StrategyAverages
    outage: float
    outage_ci: float


def sweep(params: SystemParams, axis: SweepAxis, values, n_frames: int,
          n_trials: int, master_seed: int, jobs: int = 1) -> list[SweepRow]:
    """Monte-Carlo aggregates at each axis value (same seeds per value, so
    columns are comparable across the sweep)."""
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    rows = []
    for value in values:
        p = with_overrides(params, **{axis.value: value})
        mc = monte_carlo(p, n_frames, n_trials, master_seed, jobs=jobs)
        rows.append(SweepRow(axis=axis, value=value, averages=mc.averages,
                             outage=mc.outage, outage_ci=mc.outage_ci))
    return rows


TRACE_CSV_COLUMNS = ("frame", "e_stored_begin", "i_s", "strategy", "cost",
                     "e_harvest", "tau_e", "tau_d", "tau_c", "tau_o", "p_o")

FRAME_STATS_CSV_COLUMNS = ("frame", "mean_storage", "outage_rate")

SWEEP_CSV_COLUMNS = ("axis", "value", "mean_cost_local", "mean_cost_offload",
                     "mean_e_decode", "mean_e_compute", "mean_e_offload",
                     "mean_e_harvest_local", "mean_e_harvest_offload",
                     "frac_local", "frac_offload", "frac_harvest_only",
                     "outage", "outage_ci")


def trace_records_csv_rows(trace: SimTrace) -> list[list[str]]:
    rows = []
    for r in trace.records:
        a = r.allocation
        rows.append([str(r.frame_index), repr(r.e_stored_begin), str(r.i_s),
                     r.strategy.value, repr(r.cost), repr(r.e_harvest),
                     repr(a.tau_e), repr(a.tau_d), repr(a.tau_c),
                     repr(a.tau_o), repr(a.p_o)])
    return rows


def sweep_csv_rows(rows: list[SweepRow]) -> list[list[str]]:
    out = []
    for row in rows:
        a = row.averages
        out.append([row.axis.value, repr(row.value),
                    repr(a.mean_cost_local), repr(a.mean_cost_offload),
                    repr(a.mean_e_decode), repr(a.mean_e_compute),
                    repr(a.mean_e_offload), repr(a.mean_e_harvest_local),
                    repr(a.mean_e_harvest_offload), repr(a.frac_local),
                    repr(a.frac_offload), repr(a.frac_harvest_only),
                    repr(row.outage), repr(row.outage_ci)])
    return out
