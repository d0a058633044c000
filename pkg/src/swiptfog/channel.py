"""Rician fading with indoor path loss and phase-aligned transmit weights.

The downlink is an N-antenna array into a single-antenna device; the uplink
to the fog server is single-antenna.  Amplitudes compose multiplicatively:
``sqrt(linear path gain) * unit-power Rician fade``.  The transmit weights
cancel the per-antenna channel phases so magnitudes add coherently; the
resulting effective downlink gain is what every rate/energy formula consumes.

Power convention: with ``normalize_beamforming`` (the default) the weight
vector carries total power ``p_transmit``; with the flag off each antenna
carries ``p_transmit``, i.e. the array radiates ``n_antennas * p_transmit``.
The flag exists because the phase-only weight definition and a single-number
power budget cannot both hold for a multi-antenna array; see README.
"""

import cmath
import csv
import math
from dataclasses import dataclass

import numpy as np

from .params import SystemParams

__all__ = [
    "ChannelRealization",
    "pathloss_db",
    "draw_rician",
    "conjugate_beamform",
    "realize_channels",
    "dump_realizations_csv",
]


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray          # complex AP->device amplitudes, shape (n_antennas,)
    g: complex             # device->server amplitude
    eff_gain_down: float   # received power per unit symbol power, phase-aligned
    gain_offload: float    # |g|^2


def pathloss_db(d: float, f_c_mhz: float, n_coeff: float) -> float:
    """Indoor propagation loss 20*log10(f_MHz) + N*log10(d_m) - 28, in dB.

    Valid for d >= 1 m; below that the formula would predict gain.
    """
    if d < 1.0:
        raise ValueError(f"distance must be >= 1 m, got {d!r}")
    if f_c_mhz <= 0.0:
        raise ValueError("carrier frequency must be positive")
    return 20.0 * math.log10(f_c_mhz) + n_coeff * math.log10(d) - 28.0


def draw_rician(rng: np.random.Generator, k_linear: float, scale: float) -> complex:
    """One complex amplitude with a fixed-power dominant path plus scatter.

    k_linear is the dominant-to-scattered power ratio (0 = pure scatter,
    inf = deterministic magnitude).  The dominant-path phase is uniform.
    Expected power of the sample is exactly scale**2.
    """
    if k_linear < 0.0:
        raise ValueError("k_linear must be >= 0")
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    theta = rng.uniform(0.0, 2.0 * math.pi)
    re, im = rng.standard_normal(2)
    if math.isinf(k_linear):
        los_w, scatter_w = 1.0, 0.0
    else:
        los_w = math.sqrt(k_linear / (k_linear + 1.0))
        scatter_w = math.sqrt(1.0 / (k_linear + 1.0))
    los = cmath.exp(1j * theta)
    scatter = complex(re, im) / math.sqrt(2.0)
    return scale * (los_w * los + scatter_w * scatter)


def conjugate_beamform(h: np.ndarray, p_t: float) -> tuple[np.ndarray, float]:
    """Phase-cancelling weights and the resulting effective gain.

    Each weight carries amplitude sqrt(p_t) and the negated phase of its
    channel entry, so the propagated sum is sqrt(p_t) * sum(|h_i|) and the
    effective gain is p_t * (sum |h_i|)**2 regardless of the phases.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 1 or h.size == 0 or not np.any(np.abs(h) > 0.0):
        raise ValueError("channel vector must be a nonzero 1-D complex vector")
    if p_t <= 0.0:
        raise ValueError("transmit power must be positive")
    w = math.sqrt(p_t) * np.exp(-1j * np.angle(h))
    eff_gain = p_t * float(np.abs(h).sum()) ** 2
    return w, eff_gain


def realize_channels(params: SystemParams, rng: np.random.Generator) -> ChannelRealization:
    """Draw one frame's channels and the derived effective gains.

    Draw order is fixed (antennas 0..N-1, then the offload link) so a given
    seed reproduces the identical realization sequence.
    """
    k = params.rician_k_linear
    loss_h = pathloss_db(params.dist_ap_dev, params.carrier_freq_mhz,
                         params.pathloss_coeff)
    loss_g = pathloss_db(params.dist_dev_server, params.carrier_freq_mhz,
                         params.pathloss_coeff)
    scale_h = math.sqrt(10.0 ** (-loss_h / 10.0))
    scale_g = math.sqrt(10.0 ** (-loss_g / 10.0))
    h = np.array([draw_rician(rng, k, scale_h) for _ in range(params.n_antennas)])
    g = draw_rician(rng, k, scale_g)
    p_bf = params.p_transmit
    if params.normalize_beamforming:
        p_bf /= params.n_antennas
    _, eff_gain = conjugate_beamform(h, p_bf)
    return ChannelRealization(h=h, g=g, eff_gain_down=eff_gain,
                              gain_offload=abs(g) ** 2)


def dump_realizations_csv(params: SystemParams, n: int, seed: int, path: str) -> None:
    """Write n seeded realizations for debugging; column order is stable:
    trial, |h_0|..|h_{N-1}|, eff_gain_down, gain_offload."""
    rng = np.random.default_rng(seed)
    header = (["trial"]
              + [f"h_abs_{i}" for i in range(params.n_antennas)]
              + ["eff_gain_down", "gain_offload"])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for trial in range(n):
            ch = realize_channels(params, rng)
            row = ([trial]
                   + [repr(float(a)) for a in np.abs(ch.h)]
                   + [repr(ch.eff_gain_down), repr(ch.gain_offload)])
            writer.writerow(row)
