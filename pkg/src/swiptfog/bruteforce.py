"""Grid-search verifiers for the closed-form per-frame optima.

These deliberately avoid the closed-form solutions: each program's feasible
set is swept on a uniform time grid and the best cell is optionally tightened
by golden-section passes.  They exist to certify the allocator, so they trade
speed for transparency.

Reduction lemmas (both verified numerically in the test suite):

* local program: for a fixed decode slot the objective is strictly increasing
  in the compute slot (its coefficient is the positive harvest rate), so the
  cheapest grid point for a given decode slot uses the smallest grid compute
  slot satisfying the op-count constraint.  The scan therefore walks the
  decode axis and derives the compute cell, which equals the full 2-D grid
  minimum (``brute_local_grid2d`` cross-checks this on coarse grids).

* offload program: the objective is strictly increasing in the transmit
  energy, so the energy is pinned to the smallest value meeting the bit
  constraint, leaving a 1-D convex sweep over the offload slot
  (``brute_offload_grid2d`` cross-checks on coarse grids).

Grid-gap bounds: the returned minimum can sit above the true optimum by at
most (Lipschitz constant) x (cell size) per axis.  ``local_grid_tolerance``
and ``offload_grid_tolerance`` evaluate those bounds for a given instance and
grid, including the refinement shrink factor 0.618**refine_iters.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .params import SystemParams

__all__ = [
    "GridSpec",
    "brute_local",
    "brute_offload",
    "brute_local_grid2d",
    "brute_offload_grid2d",
    "bisect_lambert",
    "local_grid_tolerance",
    "offload_grid_tolerance",
]

_INV_E = math.exp(-1.0)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_EXP2_CAP = 900.0  # 2**x overflows past ~1023; treat beyond-cap as unaffordable


@dataclass(frozen=True)
class GridSpec:
    resolution: float = 1e-4        # s, grid step on every time axis
    refine_iters: int = 60          # golden-section passes inside the best cell
    power_grid: tuple = field(default_factory=tuple)  # J samples for the 2-D energy scan

    def __post_init__(self):
        if self.resolution <= 0.0:
            raise ValueError("resolution must be positive")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be >= 0")

    @classmethod
    def for_frame(cls, frame_duration: float, refine_iters: int = 60) -> "GridSpec":
        return cls(resolution=1e-4 * frame_duration, refine_iters=refine_iters)


def _per_op_energy(params: SystemParams) -> float:
    return (params.fanout * params.activity_factor * params.immaturity_factor
            * params.thermal_noise_density * math.log(2.0))


def _harvest_rate(params: SystemParams, eff_gain_down: float) -> float:
    return params.eh_efficiency * (eff_gain_down + params.noise_dev)


def _exp2m1(u):
    """2**u - 1 with overflow mapped to +inf (numpy or scalar input)."""
    u = np.asarray(u, dtype=float)
    out = np.full(u.shape, np.inf)
    ok = u <= _EXP2_CAP
    out[ok] = np.exp2(u[ok]) - 1.0
    if out.ndim == 0:
        return float(out)
    return out


def _golden_min(f, lo: float, hi: float, iters: int) -> tuple[float, float]:
    """Golden-section minimum of a quasi-convex f on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    xs = (x1, x2, 0.5 * (a + b))
    vals = [f(x) for x in xs]
    i = int(np.argmin(vals))
    return xs[i], vals[i]


# ---------------------------------------------------------------------------
# local-computation program
# ---------------------------------------------------------------------------

def _local_objective_grid(params: SystemParams, eff_gain_down: float,
                          tau_d: np.ndarray, tau_c: np.ndarray) -> np.ndarray:
    l2 = math.log2(1.0 + eff_gain_down / params.noise_dev)
    rate = params.bw_downlink * (tau_d / params.frame_duration) * l2
    e_dec = params.decode_energy_per_bit * params.bw_downlink * l2 * tau_d
    e_cmp = _per_op_energy(params) * params.ops_per_bit * rate * params.frame_duration
    e_hrv = _harvest_rate(params, eff_gain_down) * (
        params.frame_duration - tau_d - tau_c)
    return e_dec + e_cmp - e_hrv


def brute_local(params: SystemParams, eff_gain_down: float,
                spec: GridSpec) -> tuple[float, float, float]:
    """Grid minimum of the local program; returns (tau_d, tau_c, cost).

    Sweeps the decode axis at the grid resolution, derives the cheapest
    grid-aligned compute slot per the reduction lemma, then (optionally)
    golden-sections the surviving 1-D problem inside the best cell with the
    compute slot left continuous.
    """
    tee = params.frame_duration
    step = spec.resolution
    l2 = math.log2(1.0 + eff_gain_down / params.noise_dev)
    if l2 <= 0.0:
        raise ValueError("empty feasible grid: zero channel capacity")
    n = int(math.floor(tee / step))
    tau_d = step * np.arange(1, n + 1)
    rate = params.bw_downlink * (tau_d / tee) * l2
    tau_c_need = params.ops_per_bit * rate * tee / params.dev_ops_per_sec
    tau_c = step * np.ceil(tau_c_need / step - 1e-12)
    mask = (rate >= params.rate_min) & (tau_c <= tee) & (tau_d + tau_c <= tee)
    if not np.any(mask):
        raise ValueError("empty feasible grid for the local program")
    cost = np.where(mask,
                    _local_objective_grid(params, eff_gain_down, tau_d, tau_c),
                    np.inf)
    i = int(np.argmin(cost))
    best_d, best_c, best = float(tau_d[i]), float(tau_c[i]), float(cost[i])
    if spec.refine_iters > 0:
        def reduced(td: float) -> float:
            r = params.bw_downlink * (td / tee) * l2
            if r < params.rate_min:
                return math.inf
            tc = params.ops_per_bit * r * tee / params.dev_ops_per_sec
            if td + tc > tee:
                return math.inf
            return float(_local_objective_grid(
                params, eff_gain_down, np.asarray(td), np.asarray(tc)))
        lo = max(step * 1e-6, best_d - step)
        hi = min(tee, best_d + step)
        td, val = _golden_min(reduced, lo, hi, spec.refine_iters)
        if val < best:
            r = params.bw_downlink * (td / tee) * l2
            best_d = td
            best_c = params.ops_per_bit * r * tee / params.dev_ops_per_sec
            best = val
    return best_d, best_c, best


def brute_local_grid2d(params: SystemParams, eff_gain_down: float,
                       spec: GridSpec) -> tuple[float, float, float]:
    """Plain full 2-D scan of the local program (no reduction, no refine).

    Intended for coarse grids only; used to validate the reduction lemma.
    """
    tee = params.frame_duration
    step = spec.resolution
    n = int(math.floor(tee / step))
    ax = step * np.arange(0, n + 1)
    tau_d = ax[:, None]
    tau_c = ax[None, :]
    l2 = math.log2(1.0 + eff_gain_down / params.noise_dev)
    rate = params.bw_downlink * (tau_d / tee) * l2
    ops_ok = tau_c * params.dev_ops_per_sec >= params.ops_per_bit * rate * tee
    mask = (rate >= params.rate_min) & ops_ok & (tau_d + tau_c <= tee)
    if not np.any(mask):
        raise ValueError("empty feasible grid for the local program")
    cost = np.where(mask,
                    _local_objective_grid(params, eff_gain_down, tau_d, tau_c),
                    np.inf)
    i, j = np.unravel_index(int(np.argmin(cost)), cost.shape)
    return float(ax[i]), float(ax[j]), float(cost[i, j])


def local_grid_tolerance(params: SystemParams, eff_gain_down: float,
                         spec: GridSpec) -> float:
    """Upper bound on (grid minimum - true minimum) for the local program."""
    l2 = math.log2(1.0 + eff_gain_down / params.noise_dev)
    hr = _harvest_rate(params, eff_gain_down)
    lip_d = (params.bw_downlink * l2
             * (params.ops_per_bit * _per_op_energy(params)
                + params.decode_energy_per_bit) + hr)
    lip_c = hr
    couple = 1.0 + params.ops_per_bit * params.bw_downlink * l2 / params.dev_ops_per_sec
    if spec.refine_iters > 0:
        delta = 2.0 * spec.resolution * _GOLDEN ** spec.refine_iters + 1e-15
    else:
        delta = spec.resolution
    base = (lip_d + lip_c) * params.frame_duration
    return lip_d * delta + lip_c * couple * delta + 1e-12 * base


# ---------------------------------------------------------------------------
# offloading program
# ---------------------------------------------------------------------------

def _offload_cost_curve(params: SystemParams, eff_gain_down: float,
                        gain_offload: float, tau_d: float, tau_o):
    """Strategy cost as a function of the offload slot, with the transmit
    energy pinned to the smallest value that delivers the frame's bits."""
    bits = params.bits_per_frame
    tau_o = np.asarray(tau_o, dtype=float)
    lam = tau_o * (params.noise_server / gain_offload) * _exp2m1(
        bits / (params.bw_offload * tau_o))
    l2 = math.log2(1.0 + eff_gain_down / params.noise_dev)
    e_dec = params.decode_energy_per_bit * params.bw_downlink * l2 * tau_d
    e_hrv = _harvest_rate(params, eff_gain_down) * (
        params.frame_duration - tau_d - tau_o)
    return e_dec + lam - e_hrv


def brute_offload(params: SystemParams, eff_gain_down: float,
                  gain_offload: float, spec: GridSpec) -> tuple[float, float, float]:
    """Grid minimum of the offloading program; returns (tau_o, p_o, cost).

    The decode slot is fixed at its rate-floor value (shared with the local
    program); the transmit energy is eliminated per the reduction lemma and
    the remaining 1-D convex curve is swept then golden-sectioned.
    """
    if gain_offload <= 0.0:
        raise ValueError("gain_offload must be positive for the offload scan")
    tee = params.frame_duration
    step = spec.resolution
    l2 = math.log2(1.0 + eff_gain_down / params.noise_dev)
    if params.rate_min >= params.bw_downlink * l2:
        raise ValueError("empty feasible grid: rate floor exceeds capacity")
    tau_d = params.bits_per_frame / (params.bw_downlink * l2)
    hi = tee - tau_d
    n = int(math.floor(hi / step))
    if n < 1:
        raise ValueError("empty feasible grid for the offloading program")
    tau_o = step * np.arange(1, n + 1)
    cost = _offload_cost_curve(params, eff_gain_down, gain_offload, tau_d, tau_o)
    i = int(np.argmin(cost))
    best_o, best = float(tau_o[i]), float(cost[i])
    if not math.isfinite(best):
        raise ValueError("empty feasible grid for the offloading program")
    if spec.refine_iters > 0:
        def curve(to: float) -> float:
            return float(_offload_cost_curve(
                params, eff_gain_down, gain_offload, tau_d, to))
        lo = max(step * 1e-6, best_o - step)
        top = min(hi, best_o + step)
        to, val = _golden_min(curve, lo, top, spec.refine_iters)
        if val < best:
            best_o, best = to, val
    bits = params.bits_per_frame
    p_o = (params.noise_server / gain_offload) * _exp2m1(
        bits / (params.bw_offload * best_o))
    return best_o, float(p_o), best


def brute_offload_grid2d(params: SystemParams, eff_gain_down: float,
                         gain_offload: float, spec: GridSpec) -> tuple[float, float, float]:
    """Full 2-D scan over (offload slot, transmit energy); returns the best
    (tau_o, p_o, cost).  The energy axis comes from spec.power_grid (J);
    intended for coarse validation of the energy-elimination lemma."""
    if not spec.power_grid:
        raise ValueError("brute_offload_grid2d needs spec.power_grid samples")
    tee = params.frame_duration
    step = spec.resolution
    l2 = math.log2(1.0 + eff_gain_down / params.noise_dev)
    tau_d = params.bits_per_frame / (params.bw_downlink * l2)
    n = int(math.floor((tee - tau_d) / step))
    if n < 1:
        raise ValueError("empty feasible grid for the offloading program")
    tau_o = step * np.arange(1, n + 1)[:, None]
    lam = np.asarray(spec.power_grid, dtype=float)[None, :]
    bits = params.bits_per_frame
    delivered = (params.bw_offload * tau_o
                 * np.log2(1.0 + gain_offload * lam / (tau_o * params.noise_server)))
    e_dec = params.decode_energy_per_bit * params.bw_downlink * l2 * tau_d
    e_hrv = _harvest_rate(params, eff_gain_down) * (tee - tau_d - tau_o)
    cost = np.where(delivered >= bits, e_dec + lam - e_hrv, np.inf)
    if not np.isfinite(cost).any():
        raise ValueError("no feasible cell in the 2-D offload grid")
    i, j = np.unravel_index(int(np.argmin(cost)), cost.shape)
    to = float(tau_o[i, 0])
    return to, float(lam[0, j] / to), float(cost[i, j])


def offload_grid_tolerance(params: SystemParams, eff_gain_down: float,
                           gain_offload: float, spec: GridSpec,
                           tau_o_at: float) -> float:
    """Upper bound on (grid minimum - true minimum) for the offload program,
    using the local Lipschitz constant of the cost curve near tau_o_at."""
    bits = params.bits_per_frame
    a = params.noise_server / gain_offload
    u = bits / (params.bw_offload * tau_o_at)
    if u > _EXP2_CAP:
        return math.inf
    lam_slope = a * abs((2.0 ** u - 1.0) - u * math.log(2.0) * 2.0 ** u)
    lip = lam_slope + _harvest_rate(params, eff_gain_down)
    if spec.refine_iters > 0:
        delta = 2.0 * spec.resolution * _GOLDEN ** spec.refine_iters + 1e-15
    else:
        delta = spec.resolution
    base = lip * params.frame_duration + a * (2.0 ** u - 1.0) * tau_o_at
    return lip * delta + 1e-12 * max(base, 1e-30)


# ---------------------------------------------------------------------------
# independent root check
# ---------------------------------------------------------------------------

def bisect_lambert(x: float) -> float:
    """Bisection solution of w * exp(w) = x on the principal branch.

    Brackets [-1, max(1, ln(1+x)+1)] and halves until the interval is below
    1e-14; independent of the Halley-based implementation it certifies.
    """
    if math.isnan(x) or x < -_INV_E - 1e-15:
        raise ValueError(f"bisect_lambert domain is x >= -1/e, got {x!r}")
    if x <= -_INV_E + 1e-16:
        return -1.0  # at the branch point the root is exact
    lo = -1.0
    hi = max(1.0, math.log1p(max(x, 0.0)) + 1.0)
    for _ in range(200):
        if hi - lo <= 1e-14:
            break
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) - x > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
