"""Patch grids: the square EDPC grid with its black/grey/white coloring and the
rotated 1:1 grid used by the SWAP baseline."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]


class LayoutError(ValueError):
    pass


class Color(str, Enum):
    BLACK = "black"
    GREY = "grey"
    WHITE = "white"


def edge_key(u: Vertex, v: Vertex) -> Edge:
    return (u, v) if u < v else (v, u)


def is_horizontal(u: Vertex, v: Vertex) -> bool:
    """Same row, adjacent columns. Horizontal neighbors support XX."""
    return u[0] == v[0] and abs(u[1] - v[1]) == 1


def is_vertical(u: Vertex, v: Vertex) -> bool:
    """Same column, adjacent rows. Vertical neighbors support ZZ."""
    return u[1] == v[1] and abs(u[0] - v[0]) == 1


def grid_neighbors(v: Vertex) -> tuple[Vertex, ...]:
    """Up, down, left, right, unbounded."""
    i, j = v
    return ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1))


@dataclass(frozen=True)
class GridGraph:
    """L x L grid, 1-based ``(row, col)`` vertices."""

    L: int

    def contains(self, v: Vertex) -> bool:
        return 1 <= v[0] <= self.L and 1 <= v[1] <= self.L

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple((i, j) for i in range(1, self.L + 1) for j in range(1, self.L + 1))

    def color(self, v: Vertex) -> Color:
        ei, ej = v[0] % 2 == 0, v[1] % 2 == 0
        if ei and ej:
            return Color.BLACK
        if not ei and not ej:
            return Color.WHITE
        return Color.GREY

    def is_data(self, v: Vertex) -> bool:
        return v[0] % 2 == 0 and v[1] % 2 == 0

    def neighbors(self, v: Vertex) -> tuple[Vertex, ...]:
        return tuple(u for u in grid_neighbors(v) if self.contains(u))

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        out = []
        for i, j in self.vertices:
            if j < self.L:
                out.append(((i, j), (i, j + 1)))
            if i < self.L:
                out.append(((i, j), (i + 1, j)))
        return tuple(out)

    @cached_property
    def black_vertices(self) -> tuple[Vertex, ...]:
        return tuple(v for v in self.vertices if self.is_data(v))

    @cached_property
    def perimeter(self) -> tuple[Vertex, ...]:
        return tuple(v for v in self.vertices if v[0] in (1, self.L) or v[1] in (1, self.L))

    @property
    def space(self) -> int:
        return self.L * self.L


def build_grid(L: int, allow_even: bool = False) -> GridGraph:
    if L < 3:
        raise LayoutError(f"grid side must be at least 3, got {L}")
    if L % 2 == 0:
        if not allow_even:
            raise LayoutError(f"grid side must be odd, got {L}")
        warnings.warn(f"even grid side {L}: the last row and column of data qubits lack an ancilla border")
    return GridGraph(L)


def grid_side_for(n: int) -> int:
    """Smallest odd L >= 3 whose grid holds n data qubits."""
    L = 3
    while (L // 2) ** 2 < n:
        L += 2
    return L


@dataclass(frozen=True)
class Embedding:
    """Logical qubit k lives on ``positions[k]``; ``boundary`` is where rotations happen."""

    positions: tuple[Vertex, ...]
    boundary: frozenset[Vertex]

    def __post_init__(self):
        if len(set(self.positions)) != len(self.positions):
            raise LayoutError("embedding is not injective")

    def inverse(self) -> dict[Vertex, int]:
        return {v: q for q, v in enumerate(self.positions)}


def embed_qubits(n_logical: int, g: GridGraph) -> Embedding:
    black = g.black_vertices
    if n_logical > len(black):
        raise LayoutError(f"{n_logical} qubits do not fit on L={g.L} ({len(black)} data vertices)")
    boundary = frozenset(v for v in g.perimeter if not g.is_data(v))
    return Embedding(tuple(black[:n_logical]), boundary)


@dataclass(frozen=True)
class OperatorGraph:
    """Directed arcs usable by operator paths for a fixed terminal set."""

    arcs: dict[Vertex, tuple[Vertex, ...]]
    controls: frozenset[Vertex]
    targets: frozenset[Vertex]

    def out(self, v: Vertex) -> tuple[Vertex, ...]:
        return self.arcs.get(v, ())


def build_operator_graph(
    g: GridGraph,
    terminals: list[tuple[Vertex, Vertex]],
    blocked_edges: frozenset[Edge] | set[Edge] = frozenset(),
    blocked_vertices: frozenset[Vertex] | set[Vertex] = frozenset(),
) -> OperatorGraph:
    """Controls keep outgoing vertical arcs, targets keep incoming horizontal
    arcs, every other data vertex is dropped."""
    controls, targets = set(), set()
    for c, t in terminals:
        for v in (c, t):
            if not g.contains(v) or not g.is_data(v):
                raise LayoutError(f"terminal {v} is not a data vertex")
            if v in controls or v in targets:
                raise LayoutError(f"terminal vertex {v} appears more than once")
        if c == t:
            raise LayoutError(f"terminal pair has equal endpoints {c}")
        controls.add(c)
        targets.add(t)
    arcs: dict[Vertex, tuple[Vertex, ...]] = {}
    for v in g.vertices:
        if v in blocked_vertices:
            continue
        if g.is_data(v):
            if v not in controls:
                continue
            out = [u for u in g.neighbors(v) if is_vertical(u, v) and not g.is_data(u)]
        else:
            out = []
            for u in g.neighbors(v):
                if g.is_data(u):
                    if u in targets and is_horizontal(u, v):
                        out.append(u)
                else:
                    out.append(u)
        out = [u for u in out if u not in blocked_vertices and edge_key(u, v) not in blocked_edges]
        arcs[v] = tuple(out)
    return OperatorGraph(arcs, frozenset(controls), frozenset(targets))


def layout_json(g: GridGraph, emb: Embedding) -> dict:
    return {
        "L": g.L,
        "vertices": [{"v": list(v), "color": g.color(v).value} for v in g.vertices],
        "embedding": [list(v) for v in emb.positions],
        "boundary": sorted(list(v) for v in emb.boundary),
    }


Site = tuple[int, int]


@dataclass(frozen=True)
class RotatedLayout:
    """Data sites ``(a, b)`` on an L1 x L2 grid whose neighbors are diagonal
    neighbors in the patch grid. Site ``(a, b)`` sits on patch
    ``(a + b, a - b + L2 - 1)``; ancillas fill the faces between sites."""

    L1: int
    L2: int

    @cached_property
    def sites(self) -> tuple[Site, ...]:
        return tuple((a, b) for a in range(self.L1) for b in range(self.L2))

    def contains(self, s: Site) -> bool:
        return 0 <= s[0] < self.L1 and 0 <= s[1] < self.L2

    def patch(self, s: Site) -> Vertex:
        a, b = s
        return (a + b, a - b + self.L2 - 1)

    def site_neighbors(self, s: Site) -> tuple[Site, ...]:
        a, b = s
        return tuple(t for t in ((a - 1, b), (a + 1, b), (a, b - 1), (a, b + 1)) if self.contains(t))

    @cached_property
    def site_edges(self) -> tuple[tuple[Site, Site], ...]:
        out = []
        for a, b in self.sites:
            if a + 1 < self.L1:
                out.append(((a, b), (a + 1, b)))
            if b + 1 < self.L2:
                out.append(((a, b), (a, b + 1)))
        return tuple(out)

    def common_ancillas(self, s1: Site, s2: Site) -> tuple[Vertex, Vertex]:
        (r1, c1), (r2, c2) = self.patch(s1), self.patch(s2)
        if abs(r1 - r2) != 1 or abs(c1 - c2) != 1:
            raise LayoutError(f"sites {s1} and {s2} are not neighbors")
        return ((r1, c2), (r2, c1))

    @cached_property
    def data_patches(self) -> frozenset[Vertex]:
        return frozenset(self.patch(s) for s in self.sites)

    @cached_property
    def patches(self) -> tuple[Vertex, ...]:
        out = set(self.data_patches)
        for s1, s2 in self.site_edges:
            out.update(self.common_ancillas(s1, s2))
        return tuple(sorted(out))

    @cached_property
    def boundary_sites(self) -> tuple[Site, ...]:
        return tuple(s for s in self.sites if s[0] in (0, self.L1 - 1) or s[1] in (0, self.L2 - 1))

    @property
    def space(self) -> int:
        return len(self.patches)

    @property
    def patch_rows(self) -> int:
        return self.L1 + self.L2 - 1

    def distance(self, s1: Site, s2: Site) -> int:
        return abs(s1[0] - s2[0]) + abs(s1[1] - s2[1])


def build_swap_layout(n_logical: int, L1: int, L2: int) -> RotatedLayout:
    if L1 < 1 or L2 < 1:
        raise LayoutError("rotated grid dimensions must be positive")
    if L1 * L2 < n_logical:
        raise LayoutError(f"{n_logical} qubits do not fit on a {L1}x{L2} rotated grid")
    return RotatedLayout(L1, L2)


def swap_grid_for(n: int) -> tuple[int, int]:
    """Near-square L1 x L2 >= n with L1 <= L2."""
    L2 = 1
    while L2 * L2 < n:
        L2 += 1
    L1 = L2
    while L1 > 1 and (L1 - 1) * L2 >= n:
        L1 -= 1
    return L1, L2
