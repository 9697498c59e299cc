"""Simple undirected graphs with sorted adjacency, plus the generators and
neighborhood queries the dynamics and counting modules are built on.

Vertices are 0-based everywhere in code; 1-based labels appear only in
display strings. Graphs are immutable after construction because vertex
degrees determine the admissible threshold range of every vertex state;
mutating a graph would silently invalidate states built against it.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from itertools import combinations

from .rng import SplitMix64


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: no self-loops, no parallel edges.

    adjacency[v] is the strictly increasing tuple of neighbors of v.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0 or len(self.adjacency) != self.n:
            raise ValueError("adjacency length must equal vertex count")
        for v, nbrs in enumerate(self.adjacency):
            if any(nbrs[i] >= nbrs[i + 1] for i in range(len(nbrs) - 1)):
                raise ValueError(f"adjacency of vertex {v} is not strictly increasing")
            for u in nbrs:
                if u == v:
                    raise ValueError(f"self-loop at vertex {v}")
                if not 0 <= u < self.n:
                    raise ValueError(f"vertex {u} out of range in adjacency of {v}")
                if v not in self.adjacency[u]:
                    raise ValueError(f"asymmetric adjacency between {v} and {u}")

    def degree(self, v: int) -> int:
        self.check_vertex(v)
        return len(self.adjacency[v])

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range 0..{self.n - 1}")

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2


def from_edge_list(n: int, edges) -> Graph:
    """Build a graph from an edge list, deduplicating repeated edges.

    Out-of-range endpoints and self-loops are rejected.
    """
    seen: set[tuple[int, int]] = set()
    for u, v in edges:
        if not (0 <= u < n) or not (0 <= v < n):
            raise ValueError(f"edge ({u},{v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        seen.add((min(u, v), max(u, v)))
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in sorted(seen):
        nbrs[u].append(v)
        nbrs[v].append(u)
    return Graph(n, tuple(tuple(sorted(a)) for a in nbrs))


def path_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("path graph needs at least one vertex")
    return from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle graph needs at least three vertices to stay simple")
    return from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    """Star with `leaves` leaves attached to center vertex 0."""
    if leaves < 1:
        raise ValueError("star graph needs at least one leaf")
    return from_edge_list(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def closed_neighborhood(g: Graph, v: int) -> tuple[int, ...]:
    """v together with its neighbors, in increasing order."""
    g.check_vertex(v)
    return tuple(sorted((v, *g.adjacency[v])))


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    seen = [False] * g.n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for w in g.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == g.n


def is_tree(g: Graph) -> bool:
    return g.edge_count == g.n - 1 and is_connected(g)


def is_path(g: Graph) -> bool:
    """True when the graph is a path in the structural sense (any labeling)."""
    if g.n == 1:
        return True
    degs = sorted(g.degree(v) for v in range(g.n))
    return is_tree(g) and degs[-1] <= 2


def is_cycle(g: Graph) -> bool:
    return (
        g.n >= 3
        and g.edge_count == g.n
        and all(g.degree(v) == 2 for v in range(g.n))
        and is_connected(g)
    )


MAX_ENUM_VERTICES = 5


def enumerate_connected_graphs(n: int) -> list[Graph]:
    """All connected simple graphs on n labeled vertices, each exactly once.

    Kept tiny on purpose (n <= 5, 1024 edge subsets at most); this exists as
    the exhaustive substrate for the verification suites, not as a general
    graph enumerator. Order is deterministic: ascending edge-subset bitmask.
    """
    if n < 1:
        raise ValueError("need at least one vertex")
    if n > MAX_ENUM_VERTICES:
        raise ValueError(f"refusing to enumerate graphs on more than {MAX_ENUM_VERTICES} vertices")
    slots = list(combinations(range(n), 2))
    out = []
    for mask in range(1 << len(slots)):
        edges = [slots[i] for i in range(len(slots)) if mask >> i & 1]
        g = from_edge_list(n, edges)
        if is_connected(g):
            out.append(g)
    return out


def random_tree(n: int, seed: int) -> Graph:
    """Deterministic pseudo-random labeled tree on n vertices.

    Construction: a SplitMix64 stream seeded with `seed` emits n-2 values
    mod n; that word is decoded as a Pruefer sequence. Same (n, seed) always
    yields the same tree, independent of interpreter version.
    """
    if n < 1:
        raise ValueError("need at least one vertex")
    if n == 1:
        return from_edge_list(1, [])
    if n == 2:
        return from_edge_list(2, [(0, 1)])
    rng = SplitMix64(seed)
    seq = [rng.below(n) for _ in range(n - 2)]
    return _decode_pruefer(n, seq)


def _decode_pruefer(n: int, seq: list[int]) -> Graph:
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u, w = leaves[0], leaves[1]
    edges.append((u, w))
    return from_edge_list(n, edges)


# --- interchange formats ----------------------------------------------------
#
# Edge-list text: first line "n m", then m lines "u v" (0-based, LF endings).
# JSON form: {"n": int, "edges": [[u, v], ...]}.


def to_edge_list_text(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def from_edge_list_text(text: str) -> Graph:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("edge-list text must start with a 'n m' header line")
    n, m = int(rows[0][0]), int(rows[0][1])
    if len(rows) - 1 != m:
        raise ValueError(f"header promises {m} edges, found {len(rows) - 1}")
    edges = []
    for row in rows[1:]:
        if len(row) != 2:
            raise ValueError(f"malformed edge line: {' '.join(row)!r}")
        edges.append((int(row[0]), int(row[1])))
    return from_edge_list(n, edges)


def to_json_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v] for u, v in g.edges]}


def from_json_dict(data: dict) -> Graph:
    return from_edge_list(int(data["n"]), [(int(u), int(v)) for u, v in data["edges"]])


def load_graph(path: str) -> Graph:
    """Read a graph file, accepting either the JSON or the edge-list format."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    if text.lstrip().startswith("{"):
        return from_json_dict(json.loads(text))
    return from_edge_list_text(text)
