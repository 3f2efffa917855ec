"""Round-based simulation loop.

Each round: death check, RN labelling, CH election, data from normal nodes,
CH aggregation and uplink (direct, or via the nearest RN when the sink is
beyond d0), RN flush when the mobile sink comes within d0, sink motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .election import elect_network, rn_band_mask
from .energy import aggregation_energy, rx_energy, threshold_distance, tx_energy
from .metrics import RoundRecord
from .model import (
    CH,
    DEAD,
    NN,
    RN,
    FieldGeometry,
    Network,
    NodeState,
    ScenarioSpec,
    SinkBoundary,
    SinkState,
)


@dataclass
class SimulationState:
    spec: ScenarioSpec
    network: Network
    sink: SinkState
    rng: np.random.Generator
    pairwise: np.ndarray
    band: np.ndarray  # static RN band membership; nodes never move
    round: int = 0
    records: list[RoundRecord] = field(default_factory=list)
    bits_generated: int = 0
    bits_delivered: int = 0
    bits_lost: int = 0

    @property
    def nodes(self) -> list[NodeState]:
        """Snapshot of the node table as NodeState values."""
        return self.network.to_states()

    @property
    def initial_energy(self) -> float:
        return self.spec.num_nodes * self.spec.energy.e0

    def residual_energy(self) -> float:
        """Signed residual sum; overspent nodes count negative here."""
        return math.fsum(self.network.energy)

    def charged_energy(self) -> float:
        return math.fsum(self.network.spent)

    @property
    def finished(self) -> bool:
        if self.round >= self.spec.max_rounds:
            return True
        return bool(self.records) and self.records[-1].alive == 0


def init_simulation(spec: ScenarioSpec) -> SimulationState:
    rng = np.random.default_rng(spec.rng_seed)
    n = spec.num_nodes
    x = rng.uniform(0, spec.field.xm, n)
    y = rng.uniform(0, spec.field.ym, n)
    net = Network.create(x, y, spec.energy.e0)
    return SimulationState(
        spec=spec,
        network=net,
        sink=spec.initial_sink(),
        rng=rng,
        pairwise=net.pairwise_distances(),
        band=rn_band_mask(net, spec.field, spec.r_thresh),
    )


def move_sink(
    sink: SinkState, field_: FieldGeometry, boundary: SinkBoundary = SinkBoundary.REFLECT
) -> SinkState:
    x, dx = _advance(sink.x, sink.dx, field_.xm, boundary)
    y, dy = _advance(sink.y, sink.dy, field_.ym, boundary)
    return SinkState(x, y, dx, dy)


def _advance(pos: float, step: float, limit: float, boundary: SinkBoundary) -> tuple[float, float]:
    pos += step
    if boundary is SinkBoundary.WRAP:
        return pos % limit, step
    if boundary is SinkBoundary.STOP:
        return min(max(pos, 0.0), limit), step
    while pos < 0 or pos > limit:
        pos = 2 * limit - pos if pos > limit else -pos
        step = -step
    return pos, step


def nearest(pairwise: np.ndarray, sources: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest target row for each source, with its distance.

    ``targets`` must be ascending so argmin's first-hit rule breaks ties
    towards the lower id.
    """
    sub = pairwise[sources[:, None], targets]
    j = sub.argmin(axis=1)
    return targets[j], sub[np.arange(len(sources)), j]


def run_round(state: SimulationState) -> RoundRecord:
    spec = state.spec
    net = state.network
    params = spec.energy
    bits = params.packet_bits
    d0 = threshold_distance(params)
    sink = state.sink
    state.round += 1
    r = state.round

    alive = net.role != DEAD
    dying = alive & (net.energy <= 0)
    if dying.any():
        net.role[dying] = DEAD
        state.bits_lost += int(net.rn_buffer_bits[dying].sum())
        net.rn_buffer_bits[dying] = 0
        alive &= ~dying
    n_alive = int(alive.sum())

    net.role[alive] = NN
    if spec.variant.mobile:
        net.role[alive & state.band] = RN

    chs = elect_network(net, spec, r, sink, state.rng, state.pairwise) if n_alive else np.empty(0, np.intp)
    role = net.role
    rns = (role == RN).nonzero()[0]
    d_sink = net.distances_to(sink.x, sink.y)

    # normal nodes: send to the nearest of {CHs, RNs, sink}
    normals = (role == NN).nonzero()[0]
    state.bits_generated += bits * (normals.size + chs.size)
    receivers = ((role == RN) | (role == CH)).nonzero()[0]
    members = np.zeros(len(net), dtype=np.int64)
    if normals.size:
        dist = d_sink[normals]
        direct = np.ones(normals.size, dtype=bool)
        if receivers.size:
            target, d_target = nearest(state.pairwise, normals, receivers)
            direct = dist <= d_target
            dist = np.where(direct, dist, d_target)
            via = target[~direct]
            net.charge(via, rx_energy(params, bits))
            members += np.bincount(via, minlength=len(net))
        net.charge(normals, tx_energy(params, bits, dist), unique=True)
        state.bits_delivered += bits * int(direct.sum())
        net.rn_buffer_bits[rns] += bits * members[rns]

    # CHs: aggregate own packet plus members, then uplink
    if chs.size:
        net.charge(chs, aggregation_energy(params, bits, members[chs] + 1), unique=True)
        dist = d_sink[chs]
        direct = np.ones(chs.size, dtype=bool)
        if spec.variant.mobile and rns.size:
            direct = dist <= d0
        far = chs[~direct]
        if far.size:
            relay, d_relay = nearest(state.pairwise, far, rns)
            dist = dist.copy()
            dist[~direct] = d_relay
            net.charge(relay, rx_energy(params, bits))
            np.add.at(net.rn_buffer_bits, relay, bits)
        net.charge(chs, tx_energy(params, bits, dist), unique=True)
        state.bits_delivered += bits * int(direct.sum())

    # RNs in range of the sink consolidate their buffer into one packet
    if rns.size:
        flush = rns[(net.rn_buffer_bits[rns] > 0) & (d_sink[rns] <= d0)]
        if flush.size:
            packets = net.rn_buffer_bits[flush] // bits
            cost = aggregation_energy(params, bits, packets) + tx_energy(params, bits, d_sink[flush])
            net.charge(flush, cost, unique=True)
            net.rn_buffer_bits[flush] = 0
            state.bits_delivered += bits * flush.size

    state.sink = move_sink(sink, spec.field, spec.sink_boundary)

    residual = float(np.maximum(net.energy, 0.0).sum())
    record = RoundRecord(
        round=r,
        alive=n_alive,
        dead=spec.num_nodes - n_alive,
        ch_count=int(chs.size),
        total_residual_j=residual,
        avg_energy_per_alive_j=residual / n_alive if n_alive else 0.0,
        sink_x=sink.x,
        sink_y=sink.y,
        bits_delivered=state.bits_delivered,
    )
    state.records.append(record)
    return record


def iter_rounds(spec: ScenarioSpec) -> Iterator[tuple[SimulationState, RoundRecord]]:
    """Yield the live state after every round, for callers that audit it."""
    state = init_simulation(spec)
    while not state.finished:
        record = run_round(state)
        yield state, record


def run_simulation(spec: ScenarioSpec) -> list[RoundRecord]:
    state = init_simulation(spec)
    while not state.finished:
        run_round(state)
    return state.records
