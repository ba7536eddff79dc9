"""Graph algorithms: greedy edge-disjoint operator paths, fragmentation into two
vertex-disjoint phases, the dense CNOT construction, greedy operator-set
covering and unit-capacity max-flow."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .layout import (
    Edge,
    GridGraph,
    OperatorGraph,
    Vertex,
    build_operator_graph,
    edge_key,
    grid_neighbors,
    is_horizontal,
    is_vertical,
)


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class Path:
    vertices: tuple[Vertex, ...]
    key: Hashable = None

    def edges(self) -> list[Edge]:
        vs = self.vertices
        return [edge_key(vs[k], vs[k + 1]) for k in range(len(vs) - 1)]

    @property
    def start(self) -> Vertex:
        return self.vertices[0]

    @property
    def end(self) -> Vertex:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.vertices) - 1


def check_edp_set(
    paths: Sequence[Path],
    g: GridGraph | None = None,
    operator: bool = True,
    relaxed_ends: frozenset[Vertex] | set[Vertex] = frozenset(),
) -> list[str]:
    """Return every violated invariant of an (operator) EDP set.

    ``relaxed_ends`` lists path end vertices allowed to be ancillas reached by
    an edge of either orientation.
    """
    problems = []
    used_edges: dict[Edge, int] = {}
    ends: dict[Vertex, int] = {}
    interiors: dict[Vertex, int] = {}
    for k, p in enumerate(paths):
        vs = p.vertices
        if len(vs) < 2:
            problems.append(f"path {k} has fewer than two vertices")
            continue
        if len(set(vs)) != len(vs):
            problems.append(f"path {k} repeats a vertex")
        for a, b in zip(vs, vs[1:]):
            if not (is_horizontal(a, b) or is_vertical(a, b)):
                problems.append(f"path {k} has non-adjacent step {a}->{b}")
            if g is not None and not (g.contains(a) and g.contains(b)):
                problems.append(f"path {k} leaves the grid at {a}->{b}")
        for e in p.edges():
            if e in used_edges:
                problems.append(f"paths {used_edges[e]} and {k} share edge {e}")
            used_edges[e] = k
        for v in (vs[0], vs[-1]):
            if v in ends:
                problems.append(f"paths {ends[v]} and {k} share end vertex {v}")
            ends[v] = k
        for v in vs[1:-1]:
            interiors.setdefault(v, k)
            if g is not None and g.is_data(v):
                problems.append(f"path {k} passes through data vertex {v}")
        if operator and len(vs) >= 2:
            if not is_vertical(vs[0], vs[1]) and vs[0] not in relaxed_ends:
                problems.append(f"path {k} first edge is not vertical")
            if not is_horizontal(vs[-2], vs[-1]) and vs[-1] not in relaxed_ends:
                problems.append(f"path {k} last edge is not horizontal")
    for v, k in ends.items():
        if v in interiors:
            problems.append(f"end vertex {v} of path {k} is interior to path {interiors[v]}")
    return problems


def shortest_operator_path(
    og: OperatorGraph, src: Vertex, dst: Vertex, removed: set[Edge] | frozenset[Edge] = frozenset()
) -> tuple[Vertex, ...] | None:
    parent: dict[Vertex, Vertex | None] = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst:
            break
        for u in og.out(v):
            if u in parent or edge_key(u, v) in removed:
                continue
            if u in og.targets and u != dst:
                continue
            parent[u] = v
            queue.append(u)
    if dst not in parent:
        return None
    out = [dst]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return tuple(reversed(out))


def greedy_max_edp(
    og: OperatorGraph,
    terminals: Sequence[tuple[Vertex, Vertex]],
    removed: Iterable[Edge] = (),
    keys: Sequence[Hashable] | None = None,
) -> list[Path]:
    """Route pairs shortest-first on the shrinking residual graph.

    Path lengths never decrease as edges are removed, so stale heap entries
    are re-evaluated lazily.
    """
    removed = set(removed)
    keys = list(range(len(terminals))) if keys is None else list(keys)
    heap = []
    for k, (c, t) in enumerate(terminals):
        p = shortest_operator_path(og, c, t, removed)
        if p is not None:
            heap.append((len(p), (c, t), k, p))
    heapq.heapify(heap)
    out = []
    while heap:
        length, pair, k, p = heapq.heappop(heap)
        if any(e in removed for e in Path(p).edges()):
            p = shortest_operator_path(og, pair[0], pair[1], removed)
            if p is None:
                continue
            if len(p) > length:
                heapq.heappush(heap, (len(p), pair, k, p))
                continue
        path = Path(p, keys[k])
        removed.update(path.edges())
        out.append(path)
    return out


def greedy_t_operator_set(
    g: GridGraph, terminals: Sequence[tuple[Vertex, Vertex]], keys: Sequence[Hashable] | None = None
) -> list[list[Path]]:
    keys = list(range(len(terminals))) if keys is None else list(keys)
    remaining = list(zip(terminals, keys))
    rounds = []
    while remaining:
        pairs = [t for t, _ in remaining]
        og = build_operator_graph(g, pairs)
        paths = greedy_max_edp(og, pairs, keys=[k for _, k in remaining])
        if not paths:
            raise PathError(f"terminal pair {pairs[0]} cannot be routed")
        done = {p.key for p in paths}
        remaining = [(t, k) for t, k in remaining if k not in done]
        rounds.append(paths)
    return rounds


@dataclass(frozen=True)
class CrossingComponent:
    vertices: tuple[Vertex, ...]
    shape: str  # "isolated", "horizontal" or "vertical"


def path_membership(paths: Sequence[Path]) -> dict[Vertex, list[int]]:
    member: dict[Vertex, list[int]] = {}
    for k, p in enumerate(paths):
        for v in p.vertices:
            member.setdefault(v, []).append(k)
    return member


def crossing_components(paths: Sequence[Path]) -> list[CrossingComponent]:
    member = path_membership(paths)
    crossing = {v for v, ks in member.items() if len(ks) > 1}
    seen: set[Vertex] = set()
    out = []
    for start in sorted(crossing):
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            comp.append(v)
            for u in grid_neighbors(v):
                if u in crossing and u not in seen:
                    seen.add(u)
                    queue.append(u)
        comp.sort()
        if len(comp) == 1:
            shape = "isolated"
        elif len({v[0] for v in comp}) == 1:
            shape = "horizontal"
        elif len({v[1] for v in comp}) == 1:
            shape = "vertical"
        else:
            raise PathError(f"crossing component {comp} is not a line; input is not an operator EDP set")
        out.append(CrossingComponent(tuple(comp), shape))
    return out


@dataclass
class Fragmentation:
    labels: list[list[int]]  # labels[path][edge] in {1, 2}
    phase1: list[tuple[int, tuple[Vertex, ...]]] = field(default_factory=list)
    phase2: list[tuple[int, tuple[Vertex, ...]]] = field(default_factory=list)


def fragment_edp(paths: Sequence[Path]) -> Fragmentation:
    """Label edges so every crossing vertex sees its two paths in different
    phases, then cut each path where its label changes."""
    member = path_membership(paths)
    # constraint graph over (path, edge index); weight 0 = equal, 1 = different
    adj: dict[tuple[int, int], list[tuple[tuple[int, int], int]]] = {}

    def link(a, b, w):
        adj.setdefault(a, []).append((b, w))
        adj.setdefault(b, []).append((a, w))

    for v, ks in member.items():
        if len(ks) < 2:
            continue
        if len(ks) > 2:
            raise PathError(f"vertex {v} lies on {len(ks)} paths")
        pair = []
        for k in ks:
            idx = paths[k].vertices.index(v)
            if idx == 0 or idx == len(paths[k].vertices) - 1:
                raise PathError(f"vertex {v} is an end of path {k} and shared with another path")
            pair.append(((k, idx - 1), (k, idx)))
        (a1, a2), (b1, b2) = pair
        link(a1, a2, 0)
        link(b1, b2, 0)
        link(a1, b1, 1)

    def ekey(node):
        k, i = node
        vs = paths[k].vertices
        return edge_key(vs[i], vs[i + 1])

    labels = [[1] * len(p) for p in paths]
    value: dict[tuple[int, int], int] = {}
    for root in sorted(adj, key=ekey):
        if root in value:
            continue
        comp = [root]
        value[root] = 0
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b, w in adj[a]:
                if b not in value:
                    value[b] = value[a] ^ w
                    comp.append(b)
                    queue.append(b)
                elif value[b] != value[a] ^ w:
                    raise PathError("fragmentation constraints are infeasible; input is not an operator EDP set")
        least = min(comp, key=ekey)
        flip = value[least]
        for node in comp:
            value[node] ^= flip
    for (k, i), val in value.items():
        labels[k][i] = 1 + val
    frag = Fragmentation(labels)
    for k, p in enumerate(paths):
        vs = p.vertices
        start = 0
        for i in range(1, len(p) + 1):
            if i == len(p) or labels[k][i] != labels[k][start]:
                seg = (k, vs[start : i + 1])
                (frag.phase1 if labels[k][start] == 1 else frag.phase2).append(seg)
                start = i
    return frag


def check_fragmentation(paths: Sequence[Path], frag: Fragmentation) -> list[str]:
    problems = []
    for name, phase in (("phase 1", frag.phase1), ("phase 2", frag.phase2)):
        seen: dict[Vertex, int] = {}
        for k, vs in phase:
            for v in vs:
                if v in seen:
                    problems.append(f"{name}: vertex {v} shared by segments of paths {seen[v]} and {k}")
                seen[v] = k
    for k, p in enumerate(paths):
        segs = sorted(
            [(vs, 1) for j, vs in frag.phase1 if j == k] + [(vs, 2) for j, vs in frag.phase2 if j == k],
            key=lambda s: p.vertices.index(s[0][0]),
        )
        rebuilt: list[Vertex] = []
        covered = []
        for vs, lab in segs:
            if rebuilt and rebuilt[-1] != vs[0]:
                problems.append(f"path {k}: segments do not join at {vs[0]}")
            rebuilt.extend(vs if not rebuilt else vs[1:])
            covered.extend([lab] * (len(vs) - 1))
        if tuple(rebuilt) != p.vertices:
            problems.append(f"path {k}: segments do not reassemble the path")
        if covered != frag.labels[k]:
            problems.append(f"path {k}: segment labels disagree with edge labels")
    return problems


def dense_cnot_paths(g: GridGraph, pairs: Sequence[tuple[Vertex, Vertex]]) -> list[list[Path]]:
    """Explicit routing for a perfect pairing of all data vertices, greedily
    split into edge-disjoint classes."""
    black = set(g.black_vertices)
    used = [v for pr in pairs for v in pr]
    if len(used) != len(set(used)) or set(used) != black:
        raise PathError("terminal pairs must form a perfect pairing of all data vertices")
    paths = []
    for k, (v, u) in enumerate(pairs):
        (rv, cv), (ru, cu) = v, u
        vs = [v, (rv - 1, cv)]
        step = 1 if cu - 1 > cv else -1
        vs += [(rv - 1, c) for c in range(cv + step, cu - 1 + step, step)]
        step = 1 if ru > rv - 1 else -1
        vs += [(r, cu - 1) for r in range(rv - 1 + step, ru + step, step)]
        vs.append(u)
        paths.append(Path(tuple(vs), k))
    edge_sets = [set(p.edges()) for p in paths]
    colors: list[int] = []
    for k in range(len(paths)):
        taken = {colors[j] for j in range(k) if edge_sets[j] & edge_sets[k]}
        c = 0
        while c in taken:
            c += 1
        colors.append(c)
    classes: list[list[Path]] = [[] for _ in range(max(colors, default=-1) + 1)]
    for p, c in zip(paths, colors):
        classes[c].append(p)
    return classes


class FlowNetwork:
    """Residual network with unit-capacity arcs; arc ``i ^ 1`` is the reverse of ``i``."""

    def __init__(self):
        self.index: dict[Hashable, int] = {}
        self.nodes: list[Hashable] = []
        self.adj: list[list[int]] = []
        self.head: list[int] = []
        self.cap: list[int] = []
        self.flow: list[int] = []

    def node(self, v: Hashable) -> int:
        i = self.index.get(v)
        if i is None:
            i = self.index[v] = len(self.nodes)
            self.nodes.append(v)
            self.adj.append([])
        return i

    def _pair(self, u, v, cu, cv) -> int:
        a, b = self.node(u), self.node(v)
        i = len(self.head)
        self.head += [b, a]
        self.cap += [cu, cv]
        self.flow += [0, 0]
        self.adj[a].append(i)
        self.adj[b].append(i + 1)
        return i

    def add_arc(self, u: Hashable, v: Hashable, cap: int = 1) -> int:
        return self._pair(u, v, cap, 0)

    def add_edge(self, u: Hashable, v: Hashable, cap: int = 1) -> int:
        """Undirected edge: capacity ``cap`` in each direction, skew-symmetric flow."""
        return self._pair(u, v, cap, cap)

    @property
    def n_arcs(self) -> int:
        return len(self.head) // 2

    def arcs(self) -> list[tuple[Hashable, Hashable, int]]:
        out = []
        for i in range(0, len(self.head), 2):
            u, v = self.nodes[self.head[i + 1]], self.nodes[self.head[i]]
            out.append((u, v, self.cap[i]))
            if self.cap[i + 1]:
                out.append((v, u, self.cap[i + 1]))
        return out


def max_flow(net: FlowNetwork, s: Hashable, t: Hashable) -> int:
    """Edmonds-Karp; leaves the flow on ``net.flow``."""
    if s not in net.index or t not in net.index:
        return 0
    si, ti = net.index[s], net.index[t]
    value = 0
    while True:
        via = [-1] * len(net.nodes)
        via[si] = -2
        queue = deque([si])
        while queue and via[ti] == -1:
            a = queue.popleft()
            for i in net.adj[a]:
                b = net.head[i]
                if via[b] == -1 and net.cap[i] - net.flow[i] > 0:
                    via[b] = i
                    queue.append(b)
        if via[ti] == -1:
            return value
        b = ti
        while b != si:
            i = via[b]
            net.flow[i] += 1
            net.flow[i ^ 1] -= 1
            b = net.head[i ^ 1]
        value += 1


def extract_flow_paths(net: FlowNetwork, s: Hashable, t: Hashable) -> list[tuple[Hashable, ...]]:
    """Decompose the integral flow into s-t paths without s and t; cycles dropped."""
    if s not in net.index or t not in net.index:
        return []
    si, ti = net.index[s], net.index[t]
    remaining = {}
    for i, f in enumerate(net.flow):
        if f < 0:
            continue
        if f > 1 or f != int(f):
            raise PathError(f"flow {f} on arc {i} is not binary")
        if f == 1:
            remaining[i] = True
    out = []
    while True:
        walk = [si]
        arcs_used: list[int] = []
        pos = {si: 0}
        a = si
        while a != ti:
            nxt = next((i for i in net.adj[a] if remaining.get(i)), None)
            if nxt is None:
                break
            remaining[nxt] = False
            b = net.head[nxt]
            if b in pos:
                # drop the cycle closing at b
                cut = pos[b]
                for v in walk[cut + 1 :]:
                    del pos[v]
                walk = walk[: cut + 1]
                arcs_used = arcs_used[:cut]
            else:
                pos[b] = len(walk)
                walk.append(b)
                arcs_used.append(nxt)
            a = b
        if a != ti:
            break
        out.append(tuple(net.nodes[v] for v in walk[1:-1]))
    return out


def vertex_split(arcs: Iterable[tuple[Hashable, Hashable]], vertices: Iterable[Hashable] = ()) -> FlowNetwork:
    """Each vertex ``v`` becomes ``(v, 'in') -> (v, 'out')`` of capacity 1."""
    net = FlowNetwork()
    arcs = list(arcs)
    order = list(dict.fromkeys([*vertices, *(x for a in arcs for x in a)]))
    for v in order:
        net.add_arc((v, "in"), (v, "out"))
    for u, v in arcs:
        net.add_arc((u, "out"), (v, "in"))
    return net
