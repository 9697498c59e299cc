"""Exact enumeration of the common fixed-point set.

A state is fixed for every rule/scheme combination exactly when each vertex
satisfies the local condition

    (x_v = 0 and vote < k_v)   or   (x_v = 1 and vote >= k_v),

where the vote counts ones over the closed neighborhood. All counting in
this module targets that predicate, by five independent routes:

  * brute force: sweep the predicate over the whole state space (the oracle)
  * backtracking: assign vertices one at a time, pruning a partial
    assignment as soon as some fully-assigned neighborhood violates the
    condition
  * closed forms for paths (2*Fib(3n-1)) and cycles (2 + Luc(3n))
  * transfer matrix for cycles: global fixed points are closed walks in the
    compatibility graph of the 144 locally-fixed window assignments, so the
    count is the trace of the n-th matrix power, in exact integer arithmetic
  * path decomposition for trees: grow the tree one attached path at a
    time, maintaining pinned-vertex counts so each attachment is a
    constant-size bilinear merge

Counts are exact Python integers throughout; they grow like (2+sqrt(5))^n
and overflow any fixed-width type almost immediately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .dynamics import ExtendedState, Rule
from .graphs import Graph, closed_neighborhood, is_tree
from .phasespace import (
    CheckReport,
    StateCodec,
    StateSpaceCapExceeded,
    _compose_sequential,
    _permutation_pool,
    _transition_tables,
    resolve_cap,
    state_space_size,
)
from .rng import SplitMix64


def is_fixed_point(s: ExtendedState, g: Graph) -> bool:
    """True iff the local fixed-point condition holds at every vertex.

    Equivalently: s is a fixed point of all six update maps (three moving
    rules crossed with parallel/sequential), and of the static ones.
    """
    s.validate_for(g)
    x = s.x
    for v in range(g.n):
        vote = x[v] + sum(x[u] for u in g.adjacency[v])
        if x[v] == 1:
            if vote < s.k[v]:
                return False
        elif vote >= s.k[v]:
            return False
    return True


def count_fixed_brute(g: Graph, cap: int | None = None) -> int:
    """Oracle count: test the predicate on every state of the space."""
    size = state_space_size(g)
    limit = resolve_cap(cap)
    if size > limit:
        raise StateSpaceCapExceeded(size, limit)
    n = g.n
    adj = g.adjacency
    dplus = [g.degree(v) + 1 for v in range(n)]
    radices = [2 * dp for dp in dplus]
    x = [0] * n
    k = [1] * n
    digits = [0] * n
    count = 0
    for _ in range(size):
        ok = True
        for v in range(n):
            vote = x[v]
            for u in adj[v]:
                vote += x[u]
            if (vote >= k[v]) != (x[v] == 1):
                ok = False
                break
        if ok:
            count += 1
        for v in range(n):
            d = digits[v] + 1
            if d == radices[v]:
                digits[v] = 0
                x[v] = 0
                k[v] = 1
            else:
                digits[v] = d
                if d == dplus[v]:
                    x[v] = 1
                    k[v] = 1
                else:
                    k[v] += 1
                break
    return count


def fixed_point_index_set(g: Graph, cap: int | None = None) -> list[int]:
    """Indices (in mixed-radix state order) of all fixed points."""
    size = state_space_size(g)
    limit = resolve_cap(cap)
    if size > limit:
        raise StateSpaceCapExceeded(size, limit)
    codec = StateCodec(g)
    return [i for i in range(size) if is_fixed_point(codec.decode(i), g)]


def _bfs_order(g: Graph) -> list[int]:
    order = []
    seen = [False] * g.n
    for root in range(g.n):
        if seen[root]:
            continue
        seen[root] = True
        queue = [root]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for u in g.adjacency[v]:
                if not seen[u]:
                    seen[u] = True
                    queue.append(u)
    return order


def count_fixed_backtrack(g: Graph, vertex_order: list[int] | None = None) -> int:
    """Depth-first assignment with earliest-possible pruning.

    Vertices are assigned (bit, threshold) pairs in BFS order by default; a
    partial assignment dies the moment every member of some vertex's closed
    neighborhood is assigned and the condition fails there. Order affects
    only speed, never the count.
    """
    order = list(vertex_order) if vertex_order is not None else _bfs_order(g)
    if sorted(order) != list(range(g.n)):
        raise ValueError("vertex_order must be a permutation of the vertices")
    position = [0] * g.n
    for pos, v in enumerate(order):
        position[v] = pos
    # vertex w becomes checkable once the last member of n[w] is assigned
    check_at: list[list[int]] = [[] for _ in range(g.n)]
    for w in range(g.n):
        last = max(position[u] for u in closed_neighborhood(g, w))
        check_at[last].append(w)

    n = g.n
    adj = g.adjacency
    dplus = [g.degree(v) + 1 for v in range(n)]
    x = [0] * n
    k = [0] * n

    def condition_holds(w: int) -> bool:
        vote = x[w] + sum(x[u] for u in adj[w])
        return (vote >= k[w]) == (x[w] == 1)

    def extend(pos: int) -> int:
        if pos == n:
            return 1
        v = order[pos]
        total = 0
        for bit in (0, 1):
            x[v] = bit
            for kv in range(1, dplus[v] + 1):
                k[v] = kv
                if all(condition_holds(w) for w in check_at[pos]):
                    total += extend(pos + 1)
        return total

    return extend(0)


# --- sequences and closed forms -------------------------------------------------


def fib(n: int) -> int:
    """Fibonacci, fib(0) = 0, fib(1) = 1."""
    if n < 0:
        raise ValueError("negative index")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def lucas(n: int) -> int:
    """Lucas, lucas(0) = 2, lucas(1) = 1."""
    if n < 0:
        raise ValueError("negative index")
    a, b = 2, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def count_fixed_path(n: int) -> int:
    """Fixed points over the n-vertex path: 2*Fib(3n-1)."""
    if n < 1:
        raise ValueError("path needs at least one vertex")
    return 2 * fib(3 * n - 1)


def path_recursion_step(fix_n: int, fix_n_minus_1: int) -> int:
    """One step of the path extension/charging recursion.

    Appending a vertex to an n-path extends each fixed point in one of six
    end-window classes; two classes extend five ways and are in bijection
    with the fixed points of the (n-1)-path, the other four extend four
    ways: Fix(n+1) = 5*Fix(n-1) + 4*(Fix(n) - Fix(n-1)).
    """
    return 5 * fix_n_minus_1 + 4 * (fix_n - fix_n_minus_1)


def count_fixed_cycle(n: int) -> int:
    """Fixed points over the n-vertex cycle: 2 + Luc(3n), for n >= 3."""
    if n < 3:
        raise ValueError("cycle needs at least three vertices")
    return 2 + lucas(3 * n)


_CYCLE_SEED = {3: 78, 4: 324, 5: 1366, 6: 5780}


def count_fixed_cycle_recursion(n: int) -> int:
    """Cycle count via the degree-4 linear recursion.

    The counts satisfy the recursion whose characteristic polynomial is
    x^4 - 6x^3 + 8x^2 - 2x - 1, i.e.

        L(n) = 6 L(n-1) - 8 L(n-2) + 2 L(n-3) + L(n-4),

    seeded with the directly computed values L(3)..L(6). The polynomial
    factors as (x-1)^2 (x^2 - 4x - 1), which is where the constant 2 and
    the growth rate 2+sqrt(5) of the closed form come from.
    """
    if n < 3:
        raise ValueError("cycle needs at least three vertices")
    if n <= 6:
        return _CYCLE_SEED[n]
    window = [_CYCLE_SEED[3], _CYCLE_SEED[4], _CYCLE_SEED[5], _CYCLE_SEED[6]]
    for _ in range(n - 6):
        nxt = 6 * window[3] - 8 * window[2] + 2 * window[1] + window[0]
        window = [window[1], window[2], window[3], nxt]
    return window[3]


# --- transfer matrix for cycles --------------------------------------------------
#
# On a cycle every vertex sees a three-vertex window. A window assignment
# ((x_left, x_mid, x_right), (k_left, k_mid, k_right)) with thresholds in
# {1,2,3} is locally fixed when the condition holds at the middle vertex;
# 144 of the 216 assignments qualify. Two windows are compatible as
# consecutive when they agree on the two shared vertices. Global fixed
# points over the n-cycle correspond bijectively to closed walks of length
# n in this compatibility graph.


@dataclass(frozen=True)
class LocalFixedPoint:
    """One locally-fixed window assignment for the cycle template."""

    x: tuple[int, int, int]
    k: tuple[int, int, int]


@dataclass(frozen=True)
class TransferMatrix:
    """Compatibility graph of the 144 locally-fixed windows."""

    states: tuple[LocalFixedPoint, ...]
    out_edges: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.states)


@lru_cache(maxsize=1)
def build_transfer_matrix() -> TransferMatrix:
    states = []
    for xl in (0, 1):
        for xm in (0, 1):
            for xr in (0, 1):
                vote = xl + xm + xr
                for kl in (1, 2, 3):
                    for km in (1, 2, 3):
                        for kr in (1, 2, 3):
                            if (vote >= km) == (xm == 1):
                                states.append(LocalFixedPoint((xl, xm, xr), (kl, km, kr)))
    index = {}
    for i, s in enumerate(states):
        # a successor window must present (mid, right) as its (left, mid)
        index.setdefault((s.x[0], s.x[1], s.k[0], s.k[1]), []).append(i)
    out = []
    for s in states:
        key = (s.x[1], s.x[2], s.k[1], s.k[2])
        out.append(tuple(index.get(key, ())))
    return TransferMatrix(tuple(states), tuple(out))


def _transfer_power_traces(n_max: int) -> list[int]:
    """Traces of the matrix powers A^3 .. A^n_max, exact integers."""
    tm = build_transfer_matrix()
    dim = tm.dimension
    in_edges: list[list[int]] = [[] for _ in range(dim)]
    for i, outs in enumerate(tm.out_edges):
        for j in outs:
            in_edges[j].append(i)
    # rows of A as dicts are unnecessary: A is 0/1, so one multiplication by A
    # is a gather over in-edges per column
    power = [[0] * dim for _ in range(dim)]
    for i, outs in enumerate(tm.out_edges):
        row = power[i]
        for j in outs:
            row[j] = 1
    degree = 1
    traces = []
    while degree < n_max:
        nxt = []
        for row in power:
            nxt.append([sum(row[t] for t in in_edges[j]) for j in range(dim)])
        power = nxt
        degree += 1
        if degree >= 3:
            traces.append(sum(power[i][i] for i in range(dim)))
    return traces


def count_fixed_cycle_transfer(n: int) -> int:
    """Cycle count as trace(A^n) over the 144-window compatibility matrix."""
    if n < 3:
        raise ValueError("cycle needs at least three vertices")
    return _transfer_power_traces(n)[-1]


def transfer_trace_range(n_max: int) -> dict[int, int]:
    """Traces for every cycle length 3..n_max in one matrix-power run."""
    if n_max < 3:
        raise ValueError("need n_max >= 3")
    traces = _transfer_power_traces(n_max)
    return {n: traces[n - 3] for n in range(3, n_max + 1)}


# --- pinned-vertex counts on paths ------------------------------------------------
#
# chi(v; X) counts the fixed points of X whose state at v is pinned to
# (0, d_X(v)+1): bit off, threshold maxed. Such a vertex is automatically
# locally fixed and contributes a zero to each neighbor's vote, which is
# what makes these counts compose across single-vertex gluings. Positions
# on paths are 1-based in this section to keep the index arithmetic aligned
# with the closed formulas.


def chi_path(n: int, v: int) -> int:
    """Fixed points of the n-path with the state at position v pinned.

    With r the distance from v to the nearer end, the count is
    Fib(3(r+1)-2) * Fib(3(n-r)-2); the two factors are the pinned-end
    counts of the two subpaths meeting at v.
    """
    if not 1 <= v <= n:
        raise ValueError(f"position {v} outside 1..{n}")
    r = min(v - 1, n - v)
    return fib(3 * (r + 1) - 2) * fib(3 * (n - r) - 2)


def _gap_factor(gap: int) -> int:
    return sum(fib(3 * j - 2) for j in range(1, gap + 1))


def zeta_path(n: int, marked_positions) -> int:
    """Fixed points of the n-path pinned at several positions at once.

    The marks split the path into outer stubs and inner gaps, and pinned
    vertices screen their neighbors from each other, so the count is a
    product: a pinned-endpoint factor Fib(3a-2) for the stub of a vertices
    ending at the first mark, the mirror factor for the last mark, and
    sum_{j=1..gap} Fib(3j-2) for each run strictly between adjacent marks.
    """
    marks = list(marked_positions)
    if not marks:
        raise ValueError("no marks given; use the total path count instead")
    if any(marks[i] >= marks[i + 1] for i in range(len(marks) - 1)):
        raise ValueError("marked positions must be strictly increasing")
    if marks[0] < 1 or marks[-1] > n:
        raise ValueError(f"marks must lie within 1..{n}")
    total = fib(3 * marks[0] - 2) * fib(3 * (n - marks[-1] + 1) - 2)
    for a, b in zip(marks, marks[1:]):
        total *= _gap_factor(b - a)
    return total


def merge_at_vertex(fix1: int, chi1: int, fix2: int, chi2: int) -> int:
    """Fixed points of a one-vertex union from the parts' counts.

    For X = X1 u X2 sharing exactly one vertex v, with chi_i the pinned
    count of v in X_i:  Fix(X) = chi1*Fix2 + (Fix1 - 2*chi1)*chi2.
    """
    return chi1 * fix2 + (fix1 - 2 * chi1) * chi2


# --- trees via path decomposition -------------------------------------------------


@dataclass(frozen=True)
class PathDecomposition:
    """A tree as a base path plus branch paths, each grafted at one vertex.

    paths[0] is the base; every later path starts at its attachment vertex,
    which must already appear in the union of the earlier paths, and shares
    only that vertex with it.
    """

    paths: tuple[tuple[int, ...], ...]

    @property
    def base(self) -> tuple[int, ...]:
        return self.paths[0]

    @property
    def branches(self) -> tuple[tuple[int, ...], ...]:
        return self.paths[1:]


def _farthest_from(g: Graph, root: int) -> tuple[int, list[int]]:
    """BFS helper: the farthest vertex from root (smallest id on ties) and
    the parent array of the search tree."""
    parent = [-1] * g.n
    seen = [False] * g.n
    seen[root] = True
    frontier = [root]
    last = root
    while frontier:
        nxt = []
        for v in frontier:
            for u in g.adjacency[v]:
                if not seen[u]:
                    seen[u] = True
                    parent[u] = v
                    nxt.append(u)
        if nxt:
            last = min(nxt)
        frontier = nxt
    return last, parent


def decompose_tree(t: Graph, seed: int | None = None) -> PathDecomposition:
    """Split a tree into a base path and branch paths.

    Deterministic default: the base is a longest leaf-to-leaf path (double
    BFS, ties to smallest vertex id) and branches extend greedily toward
    the smallest unvisited neighbor. A seed draws an alternative valid
    decomposition (random base endpoints, shuffled extension choices);
    every valid decomposition yields the same fixed-point count.
    """
    if not is_tree(t):
        raise ValueError("input graph is not a tree")
    if t.n == 1:
        return PathDecomposition(((0,),))
    rng = SplitMix64(seed) if seed is not None else None

    if rng is None:
        end_a, _ = _farthest_from(t, 0)
        end_b, parent = _farthest_from(t, end_a)
    else:
        leaves = [v for v in range(t.n) if t.degree(v) == 1]
        end_a = leaves[rng.below(len(leaves))]
        others = [v for v in leaves if v != end_a] or [v for v in range(t.n) if v != end_a]
        end_b = others[rng.below(len(others))]
        _, parent = _farthest_from(t, end_a)
    base = [end_b]
    while base[-1] != end_a:
        base.append(parent[base[-1]])
    paths = [tuple(base)]

    visited = [False] * t.n
    for v in base:
        visited[v] = True
    anchors = list(base)
    cursor = 0
    while cursor < len(anchors):
        v = anchors[cursor]
        cursor += 1
        nbrs = [u for u in t.adjacency[v] if not visited[u]]
        if rng is not None:
            rng.shuffle(nbrs)
        for u in nbrs:
            if visited[u]:
                continue
            branch = [v]
            node = u
            while True:
                visited[node] = True
                branch.append(node)
                onward = [w for w in t.adjacency[node] if not visited[w]]
                if not onward:
                    break
                if rng is not None:
                    node = onward[rng.below(len(onward))]
                else:
                    node = onward[0]
            paths.append(tuple(branch))
            anchors.extend(branch[1:])
    return PathDecomposition(tuple(paths))


def _validate_decomposition(t: Graph, d: PathDecomposition) -> None:
    tree_edges = set(t.edges)
    covered: set[int] = set()
    edges: set[tuple[int, int]] = set()
    for i, p in enumerate(d.paths):
        for a, b in zip(p, p[1:]):
            if (min(a, b), max(a, b)) not in tree_edges:
                raise ValueError(f"path {i} uses edge ({a},{b}) not present in the tree")
            edges.add((min(a, b), max(a, b)))
        if i == 0:
            covered.update(p)
            continue
        overlap = covered.intersection(p)
        if overlap != {p[0]}:
            raise ValueError(
                f"branch {i} must share exactly its first vertex with the earlier union, "
                f"shares {sorted(overlap)}"
            )
        covered.update(p)
    if covered != set(range(t.n)) or len(edges) != t.edge_count:
        raise ValueError("decomposition does not cover the tree")


def count_fixed_tree(t: Graph, decomposition: PathDecomposition | None = None) -> int:
    """Exact fixed-point count of a tree by iterated path attachment.

    The running tree T grows one branch path at a time. For the current T
    we keep, for every subset A of attachment vertices still needed by
    future branches, the count of fixed points of T pinned at all of A
    (the empty subset is the plain count). Grafting path p at vertex v then
    updates every tracked count by the one-vertex-union rule applied within
    the pinned family:

        new(A)        = old(A+v) * path(A_p) + (old(A) - 2*old(A+v)) * path(A_p+v)
        new(A+v)      = old(A+v) * path(A_p+v)

    where path(.) are pinned counts over p from the closed path formulas,
    and A splits into its tree side and its path side. Memory is
    exponential only in the number of simultaneously pending attachment
    vertices, which is small for desk-scale trees.
    """
    if decomposition is None:
        decomposition = decompose_tree(t)
    else:
        if not is_tree(t):
            raise ValueError("input graph is not a tree")
        _validate_decomposition(t, decomposition)

    base = decomposition.base
    branches = decomposition.branches
    attach = [p[0] for p in branches]

    def path_zeta(p: tuple[int, ...], pinned: frozenset[int]) -> int:
        if not pinned:
            return count_fixed_path(len(p))
        positions = sorted(p.index(w) + 1 for w in pinned)
        return zeta_path(len(p), positions)

    in_union = set(base)
    pending = frozenset(v for v in attach if v in in_union)
    counts: dict[frozenset[int], int] = {}
    for subset in _subsets(pending):
        counts[subset] = path_zeta(base, subset)

    for i, p in enumerate(branches):
        v = p[0]
        new_vertices = set(p[1:])
        future = [attach[j] for j in range(i + 1, len(branches))]
        in_union.update(new_vertices)
        next_pending = frozenset(w for w in future if w in in_union)
        new_counts: dict[frozenset[int], int] = {}
        for subset in _subsets(next_pending):
            tree_side = frozenset(w for w in subset if w not in new_vertices and w != v)
            path_side = frozenset(w for w in subset if w in new_vertices)
            with_v = counts[tree_side | {v}]
            path_pinned = path_zeta(p, path_side | {v})
            if v in subset:
                new_counts[subset] = with_v * path_pinned
            else:
                new_counts[subset] = with_v * path_zeta(p, path_side) + (
                    counts[tree_side] - 2 * with_v
                ) * path_pinned
        counts = new_counts

    return counts[frozenset()]


def _subsets(items: frozenset[int]):
    members = sorted(items)
    for mask in range(1 << len(members)):
        yield frozenset(members[i] for i in range(len(members)) if mask >> i & 1)


# --- structural reports ------------------------------------------------------------


def verify_fixed_point_sets(g: Graph, cap: int | None = None) -> CheckReport:
    """The predicate's fixed set equals the self-loop set of all six maps.

    The three moving rules crossed with parallel and sequential updating
    (every permutation order, up to the sampling limit) must all agree with
    the local condition, state for state.
    """
    size = state_space_size(g)
    limit = resolve_cap(cap)
    if size > limit:
        raise StateSpaceCapExceeded(size, limit)
    expected = set(fixed_point_index_set(g, cap=cap))
    checked = 0
    for rule in (Rule.INCREASING, Rule.DECREASING, Rule.MIXED):
        tables, parallel = _transition_tables(g, rule)
        loops = {i for i in range(size) if parallel[i] == i}
        if loops != expected:
            return CheckReport(
                "fixed-sets", False,
                f"parallel {rule.value} fixed set disagrees with the predicate",
                f"symmetric difference size {len(loops ^ expected)}",
            )
        checked += 1
        for order in _permutation_pool(g.n):
            succ = _compose_sequential(tables, order)
            loops = {i for i in range(size) if succ[i] == i}
            if loops != expected:
                return CheckReport(
                    "fixed-sets", False,
                    f"sequential {rule.value} order {order} disagrees with the predicate",
                    f"symmetric difference size {len(loops ^ expected)}",
                )
            checked += 1
    return CheckReport(
        "fixed-sets", True,
        f"{len(expected)} fixed points agree across {checked} maps",
    )


@dataclass(frozen=True)
class HalfOnesReport:
    passed: bool
    total: int
    per_vertex_active: tuple[int, ...]
    details: str


def verify_half_ones(g: Graph, cap: int | None = None) -> HalfOnesReport:
    """Per vertex, exactly half the fixed points carry bit 1 at that vertex.

    Also checks the corollary that the total count is even. The flip and
    reflect map restricts to a bijection of the fixed-point set exchanging
    active and inactive states at every vertex, which is the mechanism.
    """
    size = state_space_size(g)
    limit = resolve_cap(cap)
    if size > limit:
        raise StateSpaceCapExceeded(size, limit)
    codec = StateCodec(g)
    total = 0
    active = [0] * g.n
    for i in range(size):
        s = codec.decode(i)
        if is_fixed_point(s, g):
            total += 1
            for v in range(g.n):
                active[v] += s.x[v]
    passed = total % 2 == 0 and all(2 * a == total for a in active)
    details = f"{total} fixed points; per-vertex active counts {active}"
    return HalfOnesReport(passed, total, tuple(active), details)


def path_scaling_estimate(n: int) -> float:
    """Closed asymptotic estimate of the n-path count.

    The exact count is 2*Fib(3n-1); replacing the Fibonacci number with its
    dominant geometric term gives (1 - 1/sqrt(5)) * (2+sqrt(5))^n, since
    the cube of the golden ratio is 2+sqrt(5).
    """
    if n < 1:
        raise ValueError("path needs at least one vertex")
    return (1 - 1 / math.sqrt(5)) * (2 + math.sqrt(5)) ** n
