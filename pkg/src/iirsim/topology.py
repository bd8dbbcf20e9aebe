"""Node placement, adjacency, and minimum-hop routing toward collectors."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple, TYPE_CHECKING

from .core import NodeRole
from .errors import DisconnectedTopology, InvalidScenario, NoRoute

if TYPE_CHECKING:
    from .config import ScenarioConfig

_PLACEMENT_SALT = 0x9051


@dataclass(frozen=True)
class Node:
    id: int
    role: NodeRole
    pos: Tuple[float, float]


@dataclass
class Topology:
    nodes: List[Node]
    comm_radius: float
    adjacency: Dict[int, Set[int]]
    alive: Set[int]
    sink: int
    sub_sink: Optional[int]
    aggregators: Tuple[int, ...]
    routes: Dict[int, List[int]] = field(default_factory=dict)

    def node(self, n: int) -> Node:
        return self.nodes[n]

    def distance(self, a: int, b: int) -> float:
        (ax, ay), (bx, by) = self.nodes[a].pos, self.nodes[b].pos
        return math.hypot(ax - bx, ay - by)

    def extent(self) -> Tuple[float, float]:
        return (max(n.pos[0] for n in self.nodes),
                max(n.pos[1] for n in self.nodes))

    def sensors(self) -> List[int]:
        return [n.id for n in self.nodes if n.role is NodeRole.SENSOR]


def _mix(seed: int, salt: int) -> int:
    return (seed * 0x9E3779B97F4A7C15 + salt) % (1 << 64)


def _positions(scenario: "ScenarioConfig", seed: int) -> List[Tuple[float, float]]:
    n = scenario.node_count
    s = scenario.grid_spacing
    if scenario.placement == "grid":
        side = math.ceil(math.sqrt(n))
        return [((i % side) * s, (i // side) * s) for i in range(n)]
    if scenario.placement == "line":
        return [(i * s, 0.0) for i in range(n)]
    if scenario.placement == "uniform":
        side = math.ceil(math.sqrt(n))
        extent = scenario.area_size if scenario.area_size > 0 else side * s
        rng = random.Random(_mix(seed, _PLACEMENT_SALT))
        return [(rng.uniform(0.0, extent), rng.uniform(0.0, extent)) for _ in range(n)]
    raise InvalidScenario(f"unknown placement '{scenario.placement}'")


def _assign_roles(scenario: "ScenarioConfig",
                  positions: List[Tuple[float, float]]):
    n = scenario.node_count
    sink = scenario.sink_id
    if not 0 <= sink < n:
        raise InvalidScenario("sink_id out of range")

    sub_sink: Optional[int]
    if scenario.sub_sink == "auto":
        cx = sum(p[0] for p in positions) / n
        cy = sum(p[1] for p in positions) / n
        sub_sink = min((i for i in range(n) if i != sink),
                       key=lambda i: ((positions[i][0] - cx) ** 2
                                      + (positions[i][1] - cy) ** 2, i))
    else:
        sub_sink = scenario.sub_sink
    if sub_sink is not None and (not 0 <= sub_sink < n or sub_sink == sink):
        raise InvalidScenario("sub_sink conflicts with sink or is out of range")

    if scenario.aggregator_ids:
        aggregators = tuple(sorted(scenario.aggregator_ids))
    elif scenario.aggregator_every > 0:
        # Every k-th node id; on a row-major grid a stride of side+1 puts
        # the aggregators on a diagonal, spreading them over the field.
        k = scenario.aggregator_every
        aggregators = tuple(i for i in range(k - 1, n, k)
                            if i != sink and i != sub_sink)
    else:
        aggregators = ()
    special = {sink} | ({sub_sink} if sub_sink is not None else set())
    if special & set(aggregators):
        raise InvalidScenario("aggregator overlaps sink or sub-sink")
    for a in aggregators:
        if not 0 <= a < n:
            raise InvalidScenario(f"aggregator id {a} out of range")

    roles = {}
    for i in range(n):
        if i == sink:
            roles[i] = NodeRole.SINK
        elif i == sub_sink:
            roles[i] = NodeRole.SUB_SINK
        elif i in aggregators:
            roles[i] = NodeRole.AGGREGATOR
        else:
            roles[i] = NodeRole.SENSOR
    return roles, sink, sub_sink, aggregators


def build_topology(scenario: "ScenarioConfig", seed: int) -> Topology:
    """Deterministic placement, role assignment, and adjacency for a scenario."""
    if scenario.node_count < 2:
        raise InvalidScenario("need at least 2 nodes")
    positions = _positions(scenario, seed)
    roles, sink, sub_sink, aggregators = _assign_roles(scenario, positions)

    if scenario.mode == "framework":
        if sub_sink is None:
            raise InvalidScenario("framework mode requires a sub-sink")
        if not aggregators:
            raise InvalidScenario("framework mode requires at least one aggregator")

    nodes = [Node(i, roles[i], positions[i]) for i in range(scenario.node_count)]
    adjacency: Dict[int, Set[int]] = {i: set() for i in range(scenario.node_count)}
    r = scenario.comm_radius
    for i in range(scenario.node_count):
        xi, yi = positions[i]
        for j in range(i + 1, scenario.node_count):
            xj, yj = positions[j]
            if math.hypot(xi - xj, yi - yj) <= r:
                adjacency[i].add(j)
                adjacency[j].add(i)

    topo = Topology(nodes=nodes, comm_radius=r, adjacency=adjacency,
                    alive=set(range(scenario.node_count)), sink=sink,
                    sub_sink=sub_sink, aggregators=aggregators)

    reach = hop_distances(topo, sink)
    for node in nodes:
        if node.role is NodeRole.SENSOR and node.id not in reach:
            raise DisconnectedTopology(
                f"sensor {node.id} has no path to the sink at round 0")
    return topo


def neighbors_in_round(t: Topology, n: int) -> Set[int]:
    return {m for m in t.adjacency[n] if m in t.alive} - {n}


def hop_distances(t: Topology, target: int) -> Dict[int, int]:
    """BFS hop counts to `target` over the alive subgraph."""
    if target not in t.alive:
        return {}
    dist = {target: 0}
    frontier = [target]
    while frontier:
        nxt = []
        for u in frontier:
            for v in t.adjacency[u]:
                if v in t.alive and v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def shortest_hop_path(t: Topology, src: int, dst: int) -> List[int]:
    """Lexicographically-smallest minimum-hop path from src to dst.

    Walks downhill on the BFS distance field from dst, always taking the
    lowest-id neighbor, which makes equal-length path choice deterministic.
    """
    if src == dst:
        return [src]
    if src not in t.alive:
        raise NoRoute(f"node {src} is not alive")
    dist = hop_distances(t, dst)
    if src not in dist:
        raise NoRoute(f"no path from {src} to {dst} over alive nodes")
    path = [src]
    cur = src
    while cur != dst:
        cur = min(v for v in t.adjacency[cur]
                  if v in t.alive and dist.get(v) == dist[cur] - 1)
        path.append(cur)
    return path


def _collector_for(t: Topology, n: int) -> Optional[int]:
    role = t.nodes[n].role
    if role is NodeRole.SINK:
        return n
    if role is NodeRole.SUB_SINK:
        return t.sink
    if role is NodeRole.AGGREGATOR:
        return t.sub_sink
    # Sensor: nearest alive aggregator by hop count, lowest id on ties.
    best = None
    for a in t.aggregators:
        if a not in t.alive:
            continue
        d = hop_distances(t, a).get(n)
        if d is not None and (best is None or d < best[0]):
            best = (d, a)
    return best[1] if best else None


def route_to_collector(t: Topology, n: int) -> List[int]:
    """Hop path from n to its role-appropriate collector."""
    if n not in t.alive:
        raise NoRoute(f"node {n} is not alive")
    collector = _collector_for(t, n)
    if collector is None:
        raise NoRoute(f"no reachable collector for node {n}")
    return shortest_hop_path(t, n, collector)


def route_to_sink(t: Topology, n: int) -> List[int]:
    return shortest_hop_path(t, n, t.sink)


def recompute_routes(t: Topology, mode: str) -> None:
    """Refresh the cached route table; nodes without a route are omitted."""
    routes: Dict[int, List[int]] = {}
    for node in t.nodes:
        if node.id not in t.alive:
            continue
        try:
            if mode == "baseline":
                if node.role is NodeRole.SENSOR:
                    routes[node.id] = route_to_sink(t, node.id)
            else:
                routes[node.id] = route_to_collector(t, node.id)
        except NoRoute:
            continue
    t.routes = routes


def sink_reachable(t: Topology) -> bool:
    """True while at least one alive sensor can still reach the sink."""
    dist = hop_distances(t, t.sink)
    return any(n.role is NodeRole.SENSOR and n.id in t.alive and n.id in dist
               for n in t.nodes)
