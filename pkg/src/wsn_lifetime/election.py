"""Per-round role assignment: rendezvous labelling and cluster-head election.

Three election rules are supported:

* classic LEACH rotation (static sink, MS1, MS3),
* LEACH rotation restricted to nodes holding at least the average residual
  energy (MS2, MS4),
* the weighted four-term threshold (PMS2, PMS4), which scores a node on its
  residual energy, its distance to the sink, its spread from CHs already
  elected this round, and how often it has served as CH.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .model import (
    CH,
    DEAD,
    NN,
    RN,
    ElectionWeights,
    FieldGeometry,
    Network,
    NodeRole,
    NodeState,
    ScenarioSpec,
    SinkState,
)

MIN_SINK_DISTANCE = 1e-9


@dataclass
class ElectionContext:
    round: int
    alive_avg_energy: float
    alive_avg_sink_dist: float
    alive_avg_times_ch: float
    sink: SinkState
    elected_so_far: list[NodeState] = field(default_factory=list)

    @property
    def q(self) -> int:
        return len(self.elected_so_far)

    @classmethod
    def build(cls, nodes: Iterable[NodeState], round_: int, sink: SinkState) -> "ElectionContext":
        alive = [n for n in nodes if n.alive]
        if not alive:
            return cls(round_, 0.0, 0.0, 0.0, sink)
        count = len(alive)
        return cls(
            round=round_,
            alive_avg_energy=math.fsum(n.energy for n in alive) / count,
            alive_avg_sink_dist=math.fsum(sink_distance(n, sink) for n in alive) / count,
            alive_avg_times_ch=sum(n.times_ch for n in alive) / count,
            sink=sink,
        )


def sink_distance(node: NodeState, sink: SinkState) -> float:
    return math.hypot(node.x - sink.x, node.y - sink.y)


def in_rn_band(y: float, field_: FieldGeometry, r_thresh: float) -> bool:
    half = field_.ym / 2
    return half * (1 - r_thresh) <= y <= half * (1 + r_thresh)


def assign_rn_labels(nodes: Iterable[NodeState], field_: FieldGeometry, r_thresh: float) -> None:
    """Label every alive node RN inside the midline band, NN outside it."""
    for node in nodes:
        if not node.alive:
            continue
        if in_rn_band(node.y, field_, r_thresh):
            node.role = NodeRole.RENDEZVOUS
        else:
            node.role = NodeRole.NORMAL


def leach_threshold(p: float, round_: int, node: NodeState) -> float:
    epoch = max(1, math.floor(1.0 / p + 1e-9))
    if node.last_ch_round is not None and round_ - node.last_ch_round < epoch:
        return 0.0
    return p / (1 - p * ((round_ - 1) % epoch))


def sub_threshold_t1(node: NodeState, ctx: ElectionContext, w: ElectionWeights) -> float:
    avg = ctx.alive_avg_energy
    if avg <= 0 or node.energy < w.t2 * avg:
        return 0.0
    return w.p * node.energy / avg


def sub_threshold_t2(node: NodeState, ctx: ElectionContext, w: ElectionWeights) -> float:
    ds = max(sink_distance(node, ctx.sink), MIN_SINK_DISTANCE)
    avg = ctx.alive_avg_sink_dist
    if ds < w.t3 * avg:
        return 0.0
    return w.p * avg / ds


def sub_threshold_t3(node: NodeState, ctx: ElectionContext, w: ElectionWeights) -> float:
    chs = ctx.elected_so_far
    q = len(chs)
    if q <= 1:
        return w.p
    to_node = math.fsum(math.hypot(node.x - c.x, node.y - c.y) for c in chs) / q
    # ordered pairs j != i, so each unordered pair counts twice
    pair_sum = 2 * math.fsum(
        math.hypot(a.x - b.x, a.y - b.y) for k, a in enumerate(chs) for b in chs[k + 1 :]
    )
    pairwise = pair_sum / (q * (q - 1))
    if pairwise <= 0:
        return w.p
    return w.p * to_node / pairwise


def sub_threshold_t4(node: NodeState, ctx: ElectionContext, w: ElectionWeights) -> float:
    if ctx.round == 1:
        return w.p
    return w.p * ctx.alive_avg_times_ch / max(node.times_ch, 1)


def z_threshold(node: NodeState, ctx: ElectionContext, w: ElectionWeights) -> float:
    if node.energy < w.t1 * ctx.alive_avg_energy:
        return 0.0
    return (
        w.a1 * sub_threshold_t1(node, ctx, w)
        + w.a2 * sub_threshold_t2(node, ctx, w)
        + w.a3 * sub_threshold_t3(node, ctx, w)
        + w.a4 * sub_threshold_t4(node, ctx, w)
    )


def is_candidate(node: NodeState, spec: ScenarioSpec) -> bool:
    if not node.alive:
        return False
    return node.role is not NodeRole.RENDEZVOUS or spec.variant.rn_can_be_ch


def election_threshold(node: NodeState, ctx: ElectionContext, spec: ScenarioSpec) -> float:
    w = spec.weights
    if spec.variant.weighted:
        return z_threshold(node, ctx, w)
    if spec.variant.energy_gated and node.energy < ctx.alive_avg_energy:
        return 0.0
    return leach_threshold(w.p, ctx.round, node)


def rn_band_mask(net: Network, field_: FieldGeometry, r_thresh: float) -> np.ndarray:
    half = field_.ym / 2
    return (net.y >= half * (1 - r_thresh)) & (net.y <= half * (1 + r_thresh))


def elect_cluster_heads(
    nodes: Sequence[NodeState],
    spec: ScenarioSpec,
    round_: int,
    sink: SinkState,
    rng: np.random.Generator,
) -> list[NodeState]:
    """Elect this round's CHs among ``nodes`` (ids 1..N), updating them in place.

    Returns the elected nodes in election order.
    """
    net = Network.from_states(nodes)
    elected = elect_network(net, spec, round_, sink, rng)
    by_id = {n.id: n for n in nodes}
    for k in elected:
        node = by_id[int(k) + 1]
        node.role = NodeRole.CLUSTER_HEAD
        node.times_ch = int(net.times_ch[k])
        node.last_ch_round = round_
    return [by_id[int(k) + 1] for k in elected]


def elect_network(
    net: Network,
    spec: ScenarioSpec,
    round_: int,
    sink: SinkState,
    rng: np.random.Generator,
    pairwise: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Array form of CH election; returns elected row indices in election order.

    Candidates are visited in ascending id and each consumes exactly one
    uniform draw, elected or not, so the random stream depends only on who
    is a candidate. RN labels must already be set for this round.
    """
    alive = net.alive
    cand_mask = alive if spec.variant.rn_can_be_ch else alive & (net.role != RN)
    cand = cand_mask.nonzero()[0]
    draws = rng.random(cand.size)
    if cand.size == 0:
        return cand
    w = spec.weights
    if spec.variant.weighted:
        if pairwise is None:
            pairwise = net.pairwise_distances()
        elected = _elect_weighted(net, alive, cand, draws, w, round_, sink, pairwise)
    else:
        thr = _leach_thresholds(net, cand, w.p, round_)
        if spec.variant.energy_gated:
            avg = net.energy[alive].sum() / alive.sum()
            thr = np.where(net.energy[cand] >= avg, thr, 0.0)
        elected = cand[draws < thr]
    net.role[elected] = CH
    net.times_ch[elected] += 1
    net.last_ch_round[elected] = round_
    return elected


def _leach_thresholds(net: Network, idx: np.ndarray, p: float, round_: int) -> np.ndarray:
    epoch = max(1, math.floor(1.0 / p + 1e-9))
    last = net.last_ch_round[idx]
    eligible = (last < 0) | (round_ - last >= epoch)
    return np.where(eligible, p / (1 - p * ((round_ - 1) % epoch)), 0.0)


def _elect_weighted(net, alive, cand, draws, w, round_, sink, pairwise) -> np.ndarray:
    p = w.p
    ds_all = net.distances_to(sink.x, sink.y)
    n_alive = alive.sum()
    avg_e = net.energy[alive].sum() / n_alive
    avg_ds = ds_all[alive].sum() / n_alive
    avg_nch = net.times_ch[alive].sum() / n_alive

    e = net.energy[cand]
    ds = np.maximum(ds_all[cand], MIN_SINK_DISTANCE)
    if avg_e > 0:
        t1 = np.where(e >= w.t2 * avg_e, p * e / avg_e, 0.0)
    else:
        t1 = np.zeros(cand.size)
    t2 = np.where(ds >= w.t3 * avg_ds, p * avg_ds / ds, 0.0)
    if round_ == 1:
        t4 = np.full(cand.size, p)
    else:
        t4 = p * avg_nch / np.maximum(net.times_ch[cand], 1)
    base = w.a1 * t1 + w.a2 * t2 + w.a4 * t4
    gate = e >= w.t1 * avg_e

    # running sums of distance from every node to the CHs elected so far,
    # and of distances over unordered CH pairs
    to_chs = np.zeros(len(net))
    pair_sum = 0.0
    elected: list[int] = []
    for k, i, u in zip(range(cand.size), cand, draws):
        if not gate[k]:
            continue
        q = len(elected)
        t3 = p
        if q > 1 and pair_sum > 0:
            t3 = p * (to_chs[i] / q) / (2 * pair_sum / (q * (q - 1)))
        if u < base[k] + w.a3 * t3:
            pair_sum += to_chs[i]
            to_chs += pairwise[i]
            elected.append(i)
    return np.asarray(elected, dtype=np.intp)
