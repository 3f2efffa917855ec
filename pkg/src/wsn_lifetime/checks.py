"""Built-in invariant checks behind ``wsn-lifetime check``."""

from __future__ import annotations

import io

from .energy import threshold_distance, tx_energy
from .engine import iter_rounds, run_simulation
from .metrics import write_round_csv
from .model import EnergyParams, Variant, default_scenario

CONSERVATION_RTOL = 1e-9
CONTINUITY_RTOL = 1e-15


def conservation_error(variant: Variant, dim: float, seed: int) -> float:
    """Worst relative gap between initial energy and residual + charged, over all rounds."""
    worst = 0.0
    for state, _ in iter_rounds(default_scenario(variant, dim, seed)):
        total = state.initial_energy
        gap = abs(state.residual_energy() + state.charged_energy() - total) / total
        worst = max(worst, gap)
    return worst


def crossover_gap(params: EnergyParams, bits: float) -> float:
    """Relative difference of the d^2 and d^4 amplifier terms at d0."""
    d0 = threshold_distance(params)
    free_space = bits * params.e_elec_tx + bits * params.e_fs * d0**2
    multipath = bits * params.e_elec_tx + bits * params.e_amp * d0**4
    return abs(free_space - multipath) / tx_energy(params, bits, d0)


def _csv_text(variant: Variant, dim: float, seed: int) -> str:
    buf = io.StringIO()
    write_round_csv(run_simulation(default_scenario(variant, dim, seed)), buf)
    return buf.getvalue()


def run_checks() -> list[tuple[str, bool, str]]:
    results = []
    params = EnergyParams()
    for bits in (1, 4000, 10**6):
        gap = crossover_gap(params, bits)
        results.append((f"d0 continuity l={bits}", gap <= CONTINUITY_RTOL, f"rel gap {gap:.2e}"))
    for variant in Variant:
        for dim in (200, 450):
            err = conservation_error(variant, dim, 1)
            results.append(
                (f"energy conservation {variant.value} {dim}", err <= CONSERVATION_RTOL, f"max rel err {err:.2e}")
            )
    same = _csv_text(Variant.PMS2, 450, 7) == _csv_text(Variant.PMS2, 450, 7)
    results.append(("determinism pms2 450 seed 7", same, "byte-identical CSV" if same else "CSV differs"))
    return results
