import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wsn_lifetime.energy import aggregation_energy, rx_energy, threshold_distance, tx_energy
from wsn_lifetime.model import EnergyParams

P = EnergyParams()


def test_threshold_distance_defaults():
    # sqrt(10e-12 / 0.0013e-12) = sqrt(7692.307...)
    assert threshold_distance(P) == pytest.approx(87.70580193070293, abs=1e-9)


@pytest.mark.parametrize("ratio, expected", [(1.0, 1.0), (4.0, 2.0)])
def test_threshold_distance_simple_ratios(ratio, expected):
    params = EnergyParams(e_fs=ratio * 1e-12, e_amp=1e-12)
    assert threshold_distance(params) == pytest.approx(expected)


@pytest.mark.parametrize(
    "bits, distance, expected",
    [
        (4000, 50, 4000 * 50e-9 + 4000 * 10e-12 * 2500),  # free space: 3.0e-4
        (4000, 100, 2.0e-4 + 4000 * 0.0013e-12 * 1e8),  # multipath: 7.2e-4
        (0, 75, 0.0),
    ],
)
def test_tx_energy_examples(bits, distance, expected):
    assert tx_energy(P, bits, distance) == pytest.approx(expected, rel=1e-12)


def test_tx_energy_hand_values():
    assert tx_energy(P, 4000, 50) == pytest.approx(3.0e-4, rel=1e-12)
    assert tx_energy(P, 4000, 100) == pytest.approx(7.2e-4, rel=1e-12)


@pytest.mark.parametrize("bits, expected", [(4000, 2.0e-4), (0, 0.0), (8000, 4.0e-4)])
def test_rx_energy(bits, expected):
    assert rx_energy(P, bits) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("signals, expected", [(5, 1.0e-4), (0, 0.0), (1, 2.0e-5)])
def test_aggregation_energy(signals, expected):
    assert aggregation_energy(P, 4000, signals) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("bits", [1, 4000, 10**6])
def test_branches_agree_at_crossover(bits):
    d0 = threshold_distance(P)
    free_space = bits * P.e_elec_tx + bits * P.e_fs * d0**2
    multipath = bits * P.e_elec_tx + bits * P.e_amp * d0**4
    assert abs(free_space - multipath) <= 1e-15 * free_space


def test_array_distances_match_scalar():
    d = np.array([0.0, 10.0, 87.0, threshold_distance(P), 88.0, 300.0])
    vec = tx_energy(P, 4000, d)
    assert vec == pytest.approx([tx_energy(P, 4000, float(x)) for x in d], rel=1e-15)


bits_st = st.integers(min_value=0, max_value=10**6)
dist_st = st.floats(min_value=0, max_value=2000, allow_nan=False)


@given(bits_st, dist_st, dist_st)
def test_tx_monotone_in_distance(bits, d1, d2):
    lo, hi = sorted((d1, d2))
    assert tx_energy(P, bits, lo) <= tx_energy(P, bits, hi)


@given(bits_st, bits_st, dist_st)
def test_tx_monotone_in_bits(b1, b2, d):
    lo, hi = sorted((b1, b2))
    assert tx_energy(P, lo, d) <= tx_energy(P, hi, d)


@given(bits_st, dist_st, st.integers(min_value=0, max_value=200))
def test_costs_non_negative(bits, d, signals):
    assert tx_energy(P, bits, d) >= 0
    assert rx_energy(P, bits) >= 0
    assert aggregation_energy(P, bits, signals) >= 0
    assert math.isfinite(tx_energy(P, bits, d))
