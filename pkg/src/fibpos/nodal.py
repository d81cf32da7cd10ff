"""Dual graphs of nodal fibres: disconnecting nodes, socket-type components
and the refined slope bounds they feed."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import BoundReport, FibposError, SurfaceCanonicalData


class DisconnectedGraphError(FibposError):
    pass


@dataclass(frozen=True)
class FibreDualGraph:
    """Components (by geometric genus) and nodes (edges, self-loops allowed).

    Vertex ids are indices into ``genera``; edge ids are indices into ``edges``.
    """

    genera: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "genera", tuple(int(g) for g in self.genera))
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        if not self.genera:
            raise FibposError("a fibre has at least one component")
        if any(g < 0 for g in self.genera):
            raise FibposError("geometric genus must be >= 0")
        n = len(self.genera)
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise FibposError(f"edge ({a}, {b}) references a missing vertex")

    @property
    def n_vertices(self) -> int:
        return len(self.genera)

    def is_rational(self, v: int) -> bool:
        return self.genera[v] == 0

    def incidence(self) -> list[list[tuple[int, int]]]:
        """Per vertex, the list of ``(edge id, other endpoint)``; loops appear twice."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.genera]
        for eid, (a, b) in enumerate(self.edges):
            adj[a].append((eid, b))
            adj[b].append((eid, a))
        return adj

    def is_connected(self) -> bool:
        return _component_count(self.n_vertices, self.edges) == 1

    def arithmetic_genus(self) -> int:
        return sum(self.genera) + len(self.edges) - self.n_vertices + 1

    def relabel(self, perm: list[int]) -> FibreDualGraph:
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        genera = [0] * self.n_vertices
        for v, g in enumerate(self.genera):
            genera[perm[v]] = g
        return FibreDualGraph(tuple(genera), tuple((perm[a], perm[b]) for a, b in self.edges))


def _component_count(n: int, edges: tuple[tuple[int, int], ...] | list[tuple[int, int]]) -> int:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = n
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            count -= 1
    return count


def disconnecting_nodes(gph: FibreDualGraph) -> frozenset[int]:
    """Edge ids of the bridges of the multigraph (lowpoint DFS, iterative)."""
    if not gph.is_connected():
        raise DisconnectedGraphError("dual graph of a fibre must be connected")
    adj = gph.incidence()
    n = gph.n_vertices
    disc = [-1] * n
    low = [0] * n
    bridges: set[int] = set()
    timer = 0
    disc[0] = low[0] = timer
    # frames: (vertex, edge id used to enter it, next neighbour index)
    stack: list[list[int]] = [[0, -1, 0]]
    while stack:
        frame = stack[-1]
        v, via, i = frame
        if i < len(adj[v]):
            frame[2] += 1
            eid, w = adj[v][i]
            if eid == via:
                continue
            if disc[w] == -1:
                timer += 1
                disc[w] = low[w] = timer
                stack.append([w, eid, 0])
            else:
                low[v] = min(low[v], disc[w])
            continue
        stack.pop()
        if stack:
            parent = stack[-1][0]
            low[parent] = min(low[parent], low[v])
            if low[v] > disc[parent]:
                bridges.add(via)
    return frozenset(bridges)


@dataclass(frozen=True)
class SocketLocus:
    vertices: frozenset[int]
    rSocket: int


def socket_components(gph: FibreDualGraph, bridges: frozenset[int] | None = None) -> SocketLocus:
    """Rational components with no self-loop whose every node is disconnecting."""
    if bridges is None:
        bridges = disconnecting_nodes(gph)
    if gph.n_vertices < 2:
        return SocketLocus(frozenset(), 0)
    adj = gph.incidence()
    socket = set()
    for v in range(gph.n_vertices):
        if not gph.is_rational(v) or not adj[v]:
            continue
        if any(w == v for _, w in adj[v]):
            continue
        if all(eid in bridges for eid, _ in adj[v]):
            socket.add(v)
    order = sorted(socket)
    index = {v: i for i, v in enumerate(order)}
    inner = [(index[a], index[b]) for a, b in gph.edges if a in socket and b in socket]
    r = _component_count(len(order), inner) if order else 0
    return SocketLocus(frozenset(socket), r)


@dataclass(frozen=True)
class NodalCounts:
    """Disconnecting-node counts ``(n, k, l, r)`` summed over the singular fibres."""

    nTotal: int
    k: int
    l: int
    rSocket: int

    def __post_init__(self) -> None:
        if min(self.nTotal, self.k, self.l, self.rSocket) < 0:
            raise FibposError("nodal counts must be nonnegative")
        if self.nTotal != self.k + self.l:
            raise FibposError("nTotal must equal k + l")

    @classmethod
    def of(cls, k: int, l: int, rSocket: int) -> NodalCounts:
        return cls(k + l, k, l, rSocket)

    def __add__(self, other: NodalCounts) -> NodalCounts:
        return NodalCounts(
            self.nTotal + other.nTotal,
            self.k + other.k,
            self.l + other.l,
            self.rSocket + other.rSocket,
        )


def nodal_counts(gph: FibreDualGraph) -> NodalCounts:
    bridges = disconnecting_nodes(gph)
    sock = socket_components(gph, bridges)
    k = sum(
        1
        for eid in bridges
        if gph.edges[eid][0] in sock.vertices or gph.edges[eid][1] in sock.vertices
    )
    return NodalCounts(len(bridges), k, len(bridges) - k, sock.rSocket)


def adjunction_degree(gph: FibreDualGraph, v: int) -> int:
    """Degree of the relative dualizing sheaf on component ``v``."""
    branches = sum(1 for a, b in gph.edges for end in (a, b) if end == v)
    return 2 * gph.genera[v] - 2 + branches


def socket_adjunction_discrepancy(gph: FibreDualGraph) -> tuple[int, int]:
    """``(K_f . D from adjunction, -2r + k)`` for the socket locus ``D``.

    The two agree on socket loci without internal nodes; on chains of
    socket components they differ and callers surface the gap as a warning.
    """
    counts = nodal_counts(gph)
    sock = socket_components(gph)
    oracle = sum(adjunction_degree(gph, v) for v in sock.vertices)
    return oracle, -2 * counts.rSocket + counts.k


def relative_minimality_check(counts: NodalCounts) -> bool:
    return 2 * counts.rSocket <= counts.k


def ch_nodal_rhs(g: int, chi: Fraction, counts: NodalCounts) -> Fraction:
    """``4(g-1)/g chi + n``; shared by the Cornalba-Harris and Xiao routes."""
    return Fraction(4 * (g - 1), g) * chi + counts.nTotal


def moriwaki_nodal_rhs(g: int, chi: Fraction, counts: NodalCounts) -> Fraction:
    """``4(g-1)/g chi + k + 2(g-1)/g l``."""
    return Fraction(4 * (g - 1), g) * chi + counts.k + Fraction(2 * (g - 1), g) * counts.l


@dataclass(frozen=True)
class RefinedComparison:
    ch: BoundReport
    xiao: BoundReport
    moriwaki: BoundReport
    strongest: str
    gap: Fraction

    @property
    def reports(self) -> tuple[BoundReport, BoundReport, BoundReport]:
        return (self.ch, self.xiao, self.moriwaki)

    def summary(self) -> str:
        if self.gap == 0:
            return "all three bounds coincide"
        return f"{self.strongest} strongest by {self.gap}"


def refined_bounds(s: SurfaceCanonicalData, counts: NodalCounts) -> RefinedComparison:
    ch_rhs = ch_nodal_rhs(s.g, s.chi_f, counts)
    mw_rhs = moriwaki_nodal_rhs(s.g, s.chi_f, counts)
    gap = mw_rhs - ch_rhs
    strongest = "Moriwaki" if gap > 0 else ("Cornalba-Harris/Xiao" if gap < 0 else "none")
    names = ("nodal slope (Cornalba-Harris)", "nodal slope (Xiao)", "nodal slope (Moriwaki)")
    rhss = (ch_rhs, ch_rhs, mw_rhs)
    base = ["relatively minimal nodal fibration", f"counts n={counts.nTotal} k={counts.k} l={counts.l} r={counts.rSocket}"]
    if not relative_minimality_check(counts):
        reports = [
            BoundReport.not_applicable(nm, "relative minimality 2r <= k", base, rhs)
            for nm, rhs in zip(names, rhss)
        ]
    else:
        reports = [BoundReport.compare(nm, s.Kf2, rhs, base) for nm, rhs in zip(names, rhss)]
    return RefinedComparison(reports[0], reports[1], reports[2], strongest, abs(gap))
