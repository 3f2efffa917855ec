"""First-order radio energy model.

``tx_energy`` accepts a scalar distance or an array of distances; the engine
charges whole batches of nodes at once.
"""

from __future__ import annotations

import math

import numpy as np

from .model import EnergyParams


def threshold_distance(params: EnergyParams) -> float:
    """Crossover distance between the d^2 and d^4 amplifier regimes."""
    return math.sqrt(params.e_fs / params.e_amp)


def tx_energy(params: EnergyParams, bits, distance):
    d0 = threshold_distance(params)
    if np.ndim(distance) == 0:
        if distance <= d0:
            amp = params.e_fs * distance * distance
        else:
            amp = params.e_amp * distance**4
        return bits * params.e_elec_tx + bits * amp
    d2 = np.square(distance)
    amp = np.where(distance <= d0, params.e_fs * d2, params.e_amp * (d2 * d2))
    return bits * params.e_elec_tx + bits * amp


def rx_energy(params: EnergyParams, bits):
    return bits * params.e_elec_rx


def aggregation_energy(params: EnergyParams, bits_per_signal, signals):
    return bits_per_signal * params.e_da * signals
