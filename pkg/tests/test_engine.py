import numpy as np
import pytest

from reference_engine import ReferenceSim
from wsn_lifetime.election import rn_band_mask
from wsn_lifetime.energy import aggregation_energy, rx_energy, tx_energy
from wsn_lifetime.engine import init_simulation, iter_rounds, move_sink, run_round, run_simulation
from wsn_lifetime.model import (
    CH,
    DEAD,
    RN,
    ElectionWeights,
    FieldGeometry,
    Network,
    SinkBoundary,
    SinkState,
    Variant,
    default_scenario,
)

FIELD = FieldGeometry(450, 450)


def test_init_mobile():
    state = init_simulation(default_scenario(Variant.MS1, 200, 5))
    net = state.network
    assert len(net) == 100
    assert np.all(net.energy == 0.3)
    assert (state.sink.x, state.sink.y) == (0, 100)
    assert np.all((net.x >= 0) & (net.x <= 200) & (net.y >= 0) & (net.y <= 200))


def test_init_static():
    sink = init_simulation(default_scenario(Variant.STATIC, 200, 9)).sink
    assert (sink.x, sink.y, sink.dx) == (100, 100, 0)


def test_init_deterministic():
    a = init_simulation(default_scenario(Variant.PMS2, 300, 4)).network
    b = init_simulation(default_scenario(Variant.PMS2, 300, 4)).network
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


def test_nodes_snapshot_view():
    state = init_simulation(default_scenario(Variant.MS1, 200, 5))
    nodes = state.nodes
    assert [n.id for n in nodes] == list(range(1, 101))
    assert nodes[3].x == state.network.x[3]


def test_move_sink_plain():
    s = move_sink(SinkState(0, 225, 9, 0), FIELD)
    assert (s.x, s.dx) == (9, 9)


def test_move_sink_reflects():
    s = move_sink(SinkState(448, 225, 9, 0), FIELD)
    assert s.x == pytest.approx(443) and s.dx == -9


def test_move_sink_reflects_at_zero():
    s = move_sink(SinkState(3, 225, -9, 0), FIELD)
    assert s.x == pytest.approx(6) and s.dx == 9


def test_move_sink_static():
    s = move_sink(SinkState(225, 225, 0, 0), FIELD)
    assert (s.x, s.y) == (225, 225)


def test_move_sink_other_boundaries():
    assert move_sink(SinkState(448, 0, 9, 0), FIELD, SinkBoundary.WRAP).x == pytest.approx(7)
    assert move_sink(SinkState(448, 0, 9, 0), FIELD, SinkBoundary.STOP).x == 450


def staged(variant, positions, dim=200.0, p=0.99, seed=0):
    """A state whose nodes sit at ``positions``; extra nodes are created dead."""
    spec = default_scenario(variant, dim, seed).with_(num_nodes=max(2, len(positions)),
                                                      weights=ElectionWeights(p=p))
    state = init_simulation(spec)
    xs = [x for x, _ in positions] + [0.0] * (spec.num_nodes - len(positions))
    ys = [y for _, y in positions] + [0.0] * (spec.num_nodes - len(positions))
    net = Network.create(xs, ys, spec.energy.e0)
    net.energy[len(positions):] = 0.0
    state.network = net
    state.pairwise = net.pairwise_distances()
    state.band = rn_band_mask(net, spec.field, spec.r_thresh)
    return state


def test_lone_ch_within_d0_pays_aggregation_and_direct_tx():
    state = staged(Variant.STATIC, [(150, 100)])  # sink at centre, 50 m away
    rec = run_round(state)
    assert rec.ch_count == 1
    p = state.spec.energy
    spent = 0.3 - state.network.energy[0]
    assert spent == pytest.approx(aggregation_energy(p, 4000, 1) + tx_energy(p, 4000, 50))
    assert spent == pytest.approx(2.0e-5 + 3.0e-4)
    assert rec.bits_delivered == 4000


def test_far_ch_relays_to_nearest_rn():
    # sink starts at (0, 100); CH at (100, 30) is 122 m away, RNs at (100, 100) and (180, 100)
    state = staged(Variant.MS1, [(100, 30), (100, 100), (180, 100)])
    rec = run_round(state)
    net, p = state.network, state.spec.energy
    assert rec.ch_count == 1 and net.role[0] == CH
    assert net.rn_buffer_bits.tolist() == [0, 4000, 0]
    assert 0.3 - net.energy[0] == pytest.approx(aggregation_energy(p, 4000, 1) + tx_energy(p, 4000, 70))
    assert 0.3 - net.energy[1] == pytest.approx(rx_energy(p, 4000))
    assert net.energy[2] == 0.3
    assert rec.bits_delivered == 0


def test_rn_flushes_when_sink_arrives():
    state = staged(Variant.MS1, [(100, 30), (100, 100)])
    run_round(state)
    assert state.network.rn_buffer_bits[1] > 0
    for _ in range(40):
        run_round(state)
        if state.network.rn_buffer_bits[1] == 0:
            break
    assert state.network.rn_buffer_bits[1] == 0
    assert state.bits_delivered > 0


def test_dead_network_records_zeros():
    state = staged(Variant.MS2, [])
    state.network.energy[:] = 0.0
    rec = run_round(state)
    assert (rec.alive, rec.dead, rec.ch_count, rec.total_residual_j) == (0, 2, 0, 0.0)
    assert np.all(state.network.spent == 0)


def test_single_round_run():
    recs = run_simulation(default_scenario(Variant.MS3, 250, 2).with_(max_rounds=1))
    assert len(recs) == 1 and recs[0].round == 1


@pytest.mark.parametrize("variant", list(Variant))
def test_run_deterministic(variant):
    spec = default_scenario(variant, 350, 13)
    assert run_simulation(spec) == run_simulation(spec)


@pytest.mark.parametrize("seed", range(1, 22))
def test_ms2_alive_non_increasing(seed):
    alive = [r.alive for r in run_simulation(default_scenario(Variant.MS2, 450, seed))]
    assert all(a >= b for a, b in zip(alive, alive[1:]))


@pytest.mark.parametrize("variant", list(Variant))
def test_round_invariants(variant):
    spec = default_scenario(variant, 250, 3)
    for state, rec in iter_rounds(spec):
        net = state.network
        total = state.initial_energy
        assert abs(state.residual_energy() + state.charged_energy() - total) <= 1e-9 * total
        band = rn_band_mask(net, spec.field, spec.r_thresh) & net.alive
        # RNs that win a CH election keep their buffer, so the band is the invariant
        assert np.all(net.rn_buffer_bits[~band] == 0)
        if not variant.rn_can_be_ch:
            assert np.all(net.rn_buffer_bits[net.role != RN] == 0)
        assert 0 <= state.sink.x <= spec.field.xm
        assert rec.alive + rec.dead == spec.num_nodes
        assert state.bits_delivered <= state.bits_generated
        if not variant.mobile:
            assert not np.any(net.role == RN)


def test_overspend_bounded_by_one_round():
    spec = default_scenario(Variant.PMS2, 450, 1)
    before = None
    for state, _ in iter_rounds(spec):
        e = state.network.energy
        if before is not None:
            spent_now = before - e
            newly_negative = (before > 0) & (e < 0)
            assert np.all(-e[newly_negative] <= spent_now[newly_negative])
            assert np.all(e[before <= 0] == before[before <= 0])  # dead nodes are never charged again
        before = e.copy()


def test_band_matches_static_positions():
    spec = default_scenario(Variant.MS1, 200, 8)
    for state, _ in iter_rounds(spec.with_(max_rounds=5)):
        net = state.network
        band = rn_band_mask(net, spec.field, spec.r_thresh)
        assert np.all(net.role[net.alive & ~band] != RN)


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("dim", [200, 450])
def test_array_engine_matches_reference(variant, dim):
    spec = default_scenario(variant, dim, 17).with_(num_nodes=40, max_rounds=150)
    ref = ReferenceSim(spec)
    for state, rec in iter_rounds(spec):
        alive, chs = ref.step()
        assert (rec.alive, rec.ch_count) == (alive, chs)
        ref_energy = np.array([n.energy for n in ref.nodes])
        assert state.network.energy == pytest.approx(ref_energy, rel=1e-12, abs=1e-15)
        assert state.network.rn_buffer_bits.tolist() == [n.rn_buffer_bits for n in ref.nodes]
        assert state.bits_delivered == ref.delivered
