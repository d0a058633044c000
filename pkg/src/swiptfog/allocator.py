"""Closed-form per-frame optimizers and the execution-mode decision.

Each frame of duration T is split into harvest, decode, and either a local
compute slot or an offload slot.  Two convex programs are solved in closed
form:

* local:   minimize E_D + E_C - E_H subject to the rate floor and the
  device's op/s budget.  The objective increases in both the decode and the
  compute slot, so both constraints bind: the decode slot is the shortest
  one meeting the rate floor and the compute slot is ops_per_bit * bits /
  dev_ops_per_sec.

* offload: minimize E_D + tau_o * p_o - E_H subject to the rate floor and
  delivering all received bits to the server.  Eliminating the harvest slot
  and the transmit-energy slack, stationarity gives the offload slot in
  terms of the principal branch of w * e^w = x, and power follows from the
  tight bit constraint.

Both solvers refuse allocations whose slots exceed the frame (weak channels
can push the closed forms past the frame boundary; those cases are reported
infeasible rather than clamped).  The decision compares the two optimal
costs; ties go to local compute, and if the cheaper cost exceeds the stored
energy the frame is spent harvesting.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

from .energy import EnergyBreakdown, compute_energy, decode_energy, frame_cost, harvested_energy
from .params import SystemParams

__all__ = [
    "Strategy",
    "Allocation",
    "StrategyResult",
    "local_feasible",
    "offload_feasible",
    "solve_local",
    "solve_offload",
    "lambert_w0",
    "decide",
    "evaluate_strategies",
    "decision_inequality",
    "pick_cheaper",
    "harvest_only_result",
]

log = logging.getLogger(__name__)

_INV_E = math.exp(-1.0)


class Strategy(Enum):
    LOCAL_COMPUTE = "local"
    OFFLOAD = "offload"
    HARVEST_ONLY = "harvest_only"


@dataclass(frozen=True)
class Allocation:
    tau_e: float
    tau_d: float
    tau_c: float
    tau_o: float
    p_o: float
    i_o: int
    strategy: Strategy

    def csv_row(self) -> list[str]:
        return [repr(self.tau_e), repr(self.tau_d), repr(self.tau_c),
                repr(self.tau_o), repr(self.p_o), str(self.i_o),
                self.strategy.value]


ALLOCATION_CSV_COLUMNS = ("tau_e", "tau_d", "tau_c", "tau_o", "p_o", "i_o", "strategy")


@dataclass(frozen=True)
class StrategyResult:
    feasible: bool
    allocation: Allocation | None = None
    breakdown: EnergyBreakdown | None = None

    @property
    def cost(self) -> float:
        return self.breakdown.cost if self.feasible else math.inf


_INFEASIBLE = StrategyResult(feasible=False)


def _log2_capacity(params: SystemParams, eff_gain_down: float) -> float:
    if eff_gain_down < 0.0:
        raise ValueError("eff_gain_down must be non-negative")
    return math.log2(1.0 + eff_gain_down / params.noise_dev)


def local_feasible(params: SystemParams, eff_gain_down: float) -> bool:
    """Can the rate floor and the compute budget share one frame?

    Requires 1/(B_h * log2(1+SNR)) + K/f_op <= 1/rate_min; the first term is
    seconds-per-bit spent decoding, the second seconds-per-bit computing.
    """
    l2 = _log2_capacity(params, eff_gain_down)
    if l2 <= 0.0:
        return False
    decode_secs_per_bit = 1.0 / (params.bw_downlink * l2)
    compute_secs_per_bit = params.ops_per_bit / params.dev_ops_per_sec
    return decode_secs_per_bit + compute_secs_per_bit <= 1.0 / params.rate_min


def offload_feasible(params: SystemParams, eff_gain_down: float) -> bool:
    """The rate floor must be strictly below the full-frame link capacity."""
    l2 = _log2_capacity(params, eff_gain_down)
    return params.rate_min < params.bw_downlink * l2


def _min_decode_slot(params: SystemParams, eff_gain_down: float) -> float:
    l2 = _log2_capacity(params, eff_gain_down)
    return params.bits_per_frame / (params.bw_downlink * l2)


def solve_local(params: SystemParams, eff_gain_down: float) -> StrategyResult:
    """Optimal harvest/decode/compute split, or infeasible."""
    if not local_feasible(params, eff_gain_down):
        return _INFEASIBLE
    tee = params.frame_duration
    tau_d = _min_decode_slot(params, eff_gain_down)
    tau_c = params.ops_per_bit * params.bits_per_frame / params.dev_ops_per_sec
    tau_e = tee - tau_d - tau_c
    if tau_e < 0.0:
        return _INFEASIBLE
    e_dec = decode_energy(params, eff_gain_down, tau_d)
    e_cmp = compute_energy(params, params.rate_min)
    e_hrv = harvested_energy(params, eff_gain_down, tau_e)
    breakdown = frame_cost(e_dec, e_cmp, 0.0, e_hrv, i_o=0)
    alloc = Allocation(tau_e=tau_e, tau_d=tau_d, tau_c=tau_c, tau_o=0.0,
                       p_o=0.0, i_o=0, strategy=Strategy.LOCAL_COMPUTE)
    return StrategyResult(feasible=True, allocation=alloc, breakdown=breakdown)


def lambert_w0(x: float) -> float:
    """Principal branch of w * exp(w) = x for x >= -1/e.

    Halley iteration from ln(1+x) for x >= 0 and from the square-root series
    around the branch point for x < 0; iterates until the step is at rounding
    level (at most 50 passes) and guarantees a residual |w e^w - x| within
    1e-12 * max(1, |x|).  No external special-function dependency.
    """
    if math.isnan(x):
        raise ValueError("x must not be NaN")
    if x < -_INV_E:
        # tolerate representation noise at the branch point
        if x > -_INV_E - 1e-15:
            return -1.0
        raise ValueError(f"lambert_w0 domain is x >= -1/e, got {x!r}")
    if x == 0.0:
        return 0.0
    if x >= 0.0:
        w = math.log1p(x)
    else:
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p ** 3 / 72.0
        if w >= 0.0:
            w = -1e-300  # keep the iterate on the negative side
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if f == 0.0 or wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w -= step
        if w < -1.0:
            w = -1.0 + 1e-16
        if abs(step) <= 2e-16 * (1.0 + abs(w)):
            break
    if abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, abs(x)):
        return w
    raise ArithmeticError(f"lambert_w0 failed to converge for x={x!r}")


def solve_offload(params: SystemParams, eff_gain_down: float,
                  gain_offload: float) -> StrategyResult:
    """Optimal harvest/decode/offload split and transmit power, or infeasible.

    The root argument x = eta * |g|^2 * (G + noise_dev) / noise_server equals
    the textbook form with 2^(bits/(B_h*tau_d)) substituted, because the
    decode slot is chosen to meet the rate floor with equality.  x == 0 (no
    offload path) and allocations exceeding the frame are infeasible.
    """
    if gain_offload < 0.0:
        raise ValueError("gain_offload must be non-negative")
    if not offload_feasible(params, eff_gain_down):
        return _INFEASIBLE
    tee = params.frame_duration
    tau_d = _min_decode_slot(params, eff_gain_down)
    x = (params.eh_efficiency * gain_offload
         * (eff_gain_down + params.noise_dev) / params.noise_server)
    if x <= 0.0:
        return _INFEASIBLE
    w = lambert_w0((x - 1.0) * _INV_E)
    if w <= -1.0 + 1e-12:
        return _INFEASIBLE
    bits = params.bits_per_frame
    tau_o = (bits * math.log(2.0) / params.bw_offload) / (1.0 + w)
    tau_e = tee - tau_d - tau_o
    if tau_e < 0.0:
        return _INFEASIBLE
    p_o = (params.noise_server / gain_offload) * (
        2.0 ** (bits / (params.bw_offload * tau_o)) - 1.0)
    e_dec = decode_energy(params, eff_gain_down, tau_d)
    e_off = tau_o * p_o
    e_hrv = harvested_energy(params, eff_gain_down, tau_e)
    breakdown = frame_cost(e_dec, 0.0, e_off, e_hrv, i_o=1)
    alloc = Allocation(tau_e=tau_e, tau_d=tau_d, tau_c=0.0, tau_o=tau_o,
                       p_o=p_o, i_o=1, strategy=Strategy.OFFLOAD)
    return StrategyResult(feasible=True, allocation=alloc, breakdown=breakdown)


def evaluate_strategies(params: SystemParams, eff_gain_down: float,
                        gain_offload: float) -> tuple[StrategyResult, StrategyResult]:
    """Solve both per-frame programs; either side may be infeasible."""
    return (solve_local(params, eff_gain_down),
            solve_offload(params, eff_gain_down, gain_offload))


def pick_cheaper(cost_local: float, cost_offload: float) -> Strategy:
    """Mode chosen by cost comparison; exact ties keep computation local."""
    if cost_offload < cost_local:
        return Strategy.OFFLOAD
    return Strategy.LOCAL_COMPUTE


def decision_inequality(params: SystemParams, eff_gain_down: float,
                        gain_offload: float,
                        precomputed: tuple[StrategyResult, StrategyResult] | None = None,
                        ) -> tuple[float, float]:
    """Left/right sides of the closed-form mode test; offload wins when
    left > right.  Only defined when both strategies are feasible."""
    local, offload = precomputed if precomputed is not None else evaluate_strategies(
        params, eff_gain_down, gain_offload)
    if not (local.feasible and offload.feasible):
        raise ValueError("decision inequality needs both strategies feasible")
    bits = params.bits_per_frame
    per_op = (params.fanout * params.activity_factor * params.immaturity_factor
              * params.thermal_noise_density * math.log(2.0))
    harvest_rate = params.eh_efficiency * (eff_gain_down + params.noise_dev)
    lhs = params.ops_per_bit * bits * (per_op + harvest_rate / params.dev_ops_per_sec)
    tau_o = offload.allocation.tau_o
    p_o = (params.noise_server / gain_offload) * (
        2.0 ** (bits / (params.bw_offload * tau_o)) - 1.0)
    rhs = tau_o * (p_o + harvest_rate)
    return lhs, rhs


def harvest_only_result(params: SystemParams, eff_gain_down: float) -> StrategyResult:
    """Whole frame spent harvesting; cost is the negated full-frame harvest."""
    e_hrv = harvested_energy(params, eff_gain_down, params.frame_duration)
    breakdown = frame_cost(0.0, 0.0, 0.0, e_hrv, i_o=0)
    alloc = Allocation(tau_e=params.frame_duration, tau_d=0.0, tau_c=0.0,
                       tau_o=0.0, p_o=0.0, i_o=0, strategy=Strategy.HARVEST_ONLY)
    return StrategyResult(feasible=True, allocation=alloc, breakdown=breakdown)


def decide(params: SystemParams, eff_gain_down: float, gain_offload: float,
           e_stored: float,
           precomputed: tuple[StrategyResult, StrategyResult] | None = None,
           ) -> tuple[Allocation, EnergyBreakdown]:
    """Pick the affordable cheaper mode, falling back to pure harvesting.

    Feasible strategies are compared by optimal cost (ties -> local); if the
    winner's cost exceeds e_stored, or nothing is feasible, the frame is
    spent harvesting.  When both strategies are feasible, the cost ordering
    is cross-checked against the closed-form inequality and any disagreement
    (beyond rounding noise) is logged.
    """
    if e_stored < 0.0:
        raise ValueError("e_stored must be non-negative")
    local, offload = precomputed if precomputed is not None else evaluate_strategies(
        params, eff_gain_down, gain_offload)
    if local.feasible and offload.feasible:
        chosen = local if pick_cheaper(local.cost, offload.cost) is Strategy.LOCAL_COMPUTE else offload
        lhs, rhs = decision_inequality(params, eff_gain_down, gain_offload,
                                       precomputed=(local, offload))
        margin = 1e-9 * max(abs(lhs), abs(rhs), 1e-30)
        rule_offloads = lhs > rhs
        cost_offloads = offload.cost < local.cost
        if rule_offloads != cost_offloads and abs(lhs - rhs) > margin:
            log.warning(
                "mode rule disagrees with cost comparison: lhs=%r rhs=%r "
                "cost_local=%r cost_offload=%r", lhs, rhs, local.cost, offload.cost)
    elif local.feasible:
        chosen = local
    elif offload.feasible:
        chosen = offload
    else:
        chosen = None
    if chosen is not None and chosen.cost <= e_stored:
        return chosen.allocation, chosen.breakdown
    fallback = harvest_only_result(params, eff_gain_down)
    return fallback.allocation, fallback.breakdown
