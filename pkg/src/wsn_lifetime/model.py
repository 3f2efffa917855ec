"""Domain types and configuration defaults shared by the simulator."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

WEIGHT_SUM_TOL = 1e-12


class Variant(str, Enum):
    STATIC = "static"
    MS1 = "ms1"
    MS2 = "ms2"
    MS3 = "ms3"
    MS4 = "ms4"
    PMS2 = "pms2"
    PMS4 = "pms4"

    @classmethod
    def parse(cls, label: str) -> "Variant":
        try:
            return cls(label.strip().lower())
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown scenario {label!r} (expected one of: {choices})") from None

    @property
    def mobile(self) -> bool:
        return self is not Variant.STATIC

    @property
    def rn_can_be_ch(self) -> bool:
        """RNs stand for election in MS3, MS4 and PMS4 only."""
        return self in (Variant.MS3, Variant.MS4, Variant.PMS4)

    @property
    def energy_gated(self) -> bool:
        return self in (Variant.MS2, Variant.MS4)

    @property
    def weighted(self) -> bool:
        return self in (Variant.PMS2, Variant.PMS4)


class NodeRole(str, Enum):
    NORMAL = "NN"
    RENDEZVOUS = "RN"
    CLUSTER_HEAD = "CH"
    DEAD = "dead"


class SinkBoundary(str, Enum):
    REFLECT = "reflect"
    WRAP = "wrap"
    STOP = "stop"


@dataclass(slots=True)
class NodeState:
    id: int
    x: float
    y: float
    energy: float
    role: NodeRole = NodeRole.NORMAL
    times_ch: int = 0
    last_ch_round: Optional[int] = None
    rn_buffer_bits: int = 0

    @property
    def alive(self) -> bool:
        return self.role is not NodeRole.DEAD


ROLE_ORDER = (NodeRole.NORMAL, NodeRole.RENDEZVOUS, NodeRole.CLUSTER_HEAD, NodeRole.DEAD)
NN, RN, CH, DEAD = range(4)


@dataclass
class Network:
    """Column-wise node table used by the engine.

    Row ``k`` is the node with id ``k + 1``. ``last_ch_round`` is -1 for
    nodes that never served as CH; ``spent`` accumulates every Joule charged.
    """

    x: np.ndarray
    y: np.ndarray
    energy: np.ndarray
    role: np.ndarray
    times_ch: np.ndarray
    last_ch_round: np.ndarray
    rn_buffer_bits: np.ndarray
    spent: np.ndarray

    @classmethod
    def create(cls, x: Iterable[float], y: Iterable[float], e0: float) -> "Network":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        n = len(x)
        return cls(
            x=x,
            y=y,
            energy=np.full(n, e0, dtype=float),
            role=np.full(n, NN, dtype=np.int8),
            times_ch=np.zeros(n, dtype=np.int64),
            last_ch_round=np.full(n, -1, dtype=np.int64),
            rn_buffer_bits=np.zeros(n, dtype=np.int64),
            spent=np.zeros(n, dtype=float),
        )

    @classmethod
    def from_states(cls, nodes: Iterable[NodeState]) -> "Network":
        nodes = sorted(nodes, key=lambda n: n.id)
        if [n.id for n in nodes] != list(range(1, len(nodes) + 1)):
            raise ValueError("node ids must be 1..N")
        net = cls.create([n.x for n in nodes], [n.y for n in nodes], 0.0)
        net.energy[:] = [n.energy for n in nodes]
        net.role[:] = [ROLE_ORDER.index(n.role) for n in nodes]
        net.times_ch[:] = [n.times_ch for n in nodes]
        net.last_ch_round[:] = [-1 if n.last_ch_round is None else n.last_ch_round for n in nodes]
        net.rn_buffer_bits[:] = [n.rn_buffer_bits for n in nodes]
        return net

    def to_states(self) -> list[NodeState]:
        return [
            NodeState(
                id=k + 1,
                x=float(self.x[k]),
                y=float(self.y[k]),
                energy=float(self.energy[k]),
                role=ROLE_ORDER[self.role[k]],
                times_ch=int(self.times_ch[k]),
                last_ch_round=None if self.last_ch_round[k] < 0 else int(self.last_ch_round[k]),
                rn_buffer_bits=int(self.rn_buffer_bits[k]),
            )
            for k in range(len(self))
        ]

    def __len__(self) -> int:
        return len(self.x)

    @property
    def alive(self) -> np.ndarray:
        return self.role != DEAD

    def charge(self, idx, joules, unique: bool = False) -> None:
        """Debit ``joules`` from rows ``idx``; repeated indices accumulate.

        Pass ``unique=True`` when ``idx`` has no repeats to take the faster
        fancy-indexing path.
        """
        if unique:
            self.energy[idx] -= joules
            self.spent[idx] += joules
        else:
            np.subtract.at(self.energy, idx, joules)
            np.add.at(self.spent, idx, joules)

    def distances_to(self, px: float, py: float) -> np.ndarray:
        return np.hypot(self.x - px, self.y - py)

    def pairwise_distances(self) -> np.ndarray:
        return np.hypot(self.x[:, None] - self.x[None, :], self.y[:, None] - self.y[None, :])


@dataclass(frozen=True)
class FieldGeometry:
    xm: float
    ym: float

    def __post_init__(self):
        if not (self.xm > 0 and self.ym > 0):
            raise ValueError(f"field dimensions must be positive, got {self.xm}x{self.ym}")

    @property
    def centre(self) -> tuple[float, float]:
        return self.xm / 2, self.ym / 2

    def contains(self, x: float, y: float) -> bool:
        return 0 <= x <= self.xm and 0 <= y <= self.ym


@dataclass(frozen=True)
class EnergyParams:
    """First-order radio constants. Units are J/bit unless noted."""

    e0: float = 0.3
    e_elec_tx: float = 50e-9
    e_elec_rx: float = 50e-9
    e_da: float = 5e-9  # J/bit/signal
    e_fs: float = 10e-12  # J/bit/m^2
    e_amp: float = 0.0013e-12  # J/bit/m^4
    packet_bits: int = 4000

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"EnergyParams.{name} must be positive, got {value}")


@dataclass(frozen=True)
class ElectionWeights:
    p: float = 0.05
    a1: float = 0.25
    a2: float = 0.25
    a3: float = 0.25
    a4: float = 0.25
    t1: float = 1.0
    t2: float = 1.0
    t3: float = 1.0

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        weights = (self.a1, self.a2, self.a3, self.a4)
        if any(a < 0 for a in weights):
            raise ValueError(f"weights must be non-negative, got {weights}")
        if abs(math.fsum(weights) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"a1+a2+a3+a4 must equal 1, got {math.fsum(weights)!r}")
        if not (self.t1 > 0 and self.t2 > 0 and self.t3 > 0):
            raise ValueError("gate multipliers t1, t2, t3 must be positive")

    @property
    def epoch(self) -> int:
        """Rounds in one LEACH rotation, floor(1/p)."""
        return max(1, math.floor(1.0 / self.p + 1e-9))


@dataclass(frozen=True)
class SinkState:
    x: float
    y: float
    dx: float = 0.0
    dy: float = 0.0


@dataclass(frozen=True)
class ScenarioSpec:
    variant: Variant
    field: FieldGeometry
    num_nodes: int = 100
    max_rounds: int = 3000
    r_thresh: float = 0.16
    weights: ElectionWeights = field(default_factory=ElectionWeights)
    sink_speed: float = 0.0
    rng_seed: int = 0
    energy: EnergyParams = field(default_factory=EnergyParams)
    sink_boundary: SinkBoundary = SinkBoundary.REFLECT

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "sink_boundary", SinkBoundary(self.sink_boundary))
        if not 0 < self.r_thresh < 1:
            raise ValueError(f"r_thresh must lie in (0, 1), got {self.r_thresh}")
        if self.num_nodes < 2:
            raise ValueError(f"num_nodes must be at least 2, got {self.num_nodes}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be at least 1, got {self.max_rounds}")
        if self.sink_speed < 0:
            raise ValueError(f"sink_speed must be non-negative, got {self.sink_speed}")
        if self.rng_seed < 0:
            raise ValueError(f"rng_seed must be unsigned, got {self.rng_seed}")

    @property
    def dim(self) -> float:
        return self.field.xm

    def initial_sink(self) -> SinkState:
        if not self.variant.mobile:
            cx, cy = self.field.centre
            return SinkState(cx, cy)
        return SinkState(0.0, self.field.ym / 2, self.sink_speed, 0.0)

    def with_(self, **changes: Any) -> "ScenarioSpec":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["variant"] = self.variant.value
        d["sink_boundary"] = self.sink_boundary.value
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ScenarioSpec":
        data = dict(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown ScenarioSpec keys: {sorted(unknown)}")
        if "variant" in data:
            data["variant"] = Variant.parse(data["variant"])
        if isinstance(data.get("field"), dict):
            data["field"] = FieldGeometry(**data["field"])
        if isinstance(data.get("weights"), dict):
            data["weights"] = ElectionWeights(**data["weights"])
        if isinstance(data.get("energy"), dict):
            data["energy"] = EnergyParams(**data["energy"])
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioSpec":
        return cls.from_dict(json.loads(text))


def default_scenario(variant: Variant | str, dim: float, seed: int = 0) -> ScenarioSpec:
    """Default scenario on a dim x dim field.

    Mobile variants cross the field every 50 rounds; the static sink does not move.
    """
    if not dim > 0:
        raise ValueError(f"dimension must be positive, got {dim}")
    variant = Variant.parse(variant) if isinstance(variant, str) else Variant(variant)
    speed = dim / 50 if variant.mobile else 0.0
    return ScenarioSpec(
        variant=variant,
        field=FieldGeometry(float(dim), float(dim)),
        sink_speed=speed,
        rng_seed=seed,
    )


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a (possibly partial) ScenarioSpec JSON document."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return data
