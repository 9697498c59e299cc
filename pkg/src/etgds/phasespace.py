"""Exhaustive phase-space construction and attractor analysis.

The full state space of a graph is the product over vertices of the
per-vertex spaces {0,1} x {1..d(v)+1}, so it carries a natural mixed-radix
index: vertex v contributes a digit in [0, 2(d(v)+1)). The whole phase
space of an update map is stored as one dense successor array over these
indices; a functional digraph needs nothing more.

The verification suites at the bottom sweep small graphs exhaustively:
cycle-length bounds per rule and scheme, the flip/reflect conjugation
between the increasing and decreasing maps, strict potential descent under
state-changing mixed vertex updates, and direction persistence along
sequential orbits. They are organized around per-vertex transition tables
(index -> index after updating one vertex), which are built once per graph
and rule and composed per permutation; this keeps all-permutation sweeps
inside the per-criterion time budget.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations

from .dynamics import (
    ExtendedState,
    Parallel,
    Rule,
    RuleScheme,
    Scheme,
    Sequential,
    format_state,
)
from .graphs import Graph
from .rng import SplitMix64

DEFAULT_STATE_CAP = 10_000_000
CAP_ENV_VAR = "ETGDS_CAP"

# All-permutation sweeps are exact up to this many vertices; larger graphs
# fall back to a seeded sample of permutations.
FULL_PERMUTATION_LIMIT = 5


class StateSpaceCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"state space has {size} states, exceeding the cap of {cap}")
        self.size = size
        self.cap = cap


def resolve_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get(CAP_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_STATE_CAP


def state_space_size(g: Graph) -> int:
    """Product over vertices of 2*(d(v)+1); exact, arbitrary precision."""
    size = 1
    for v in range(g.n):
        size *= 2 * (g.degree(v) + 1)
    return size


class StateCodec:
    """Mixed-radix bijection between extended states and dense indices.

    Vertex v owns the digit (x_v*(d(v)+1) + k_v - 1) with radix 2*(d(v)+1);
    digits are combined little-endian (vertex 0 varies fastest).
    """

    def __init__(self, g: Graph):
        self.graph = g
        self.dplus = tuple(g.degree(v) + 1 for v in range(g.n))
        self.radices = tuple(2 * dp for dp in self.dplus)
        strides = []
        acc = 1
        for r in self.radices:
            strides.append(acc)
            acc *= r
        self.strides = tuple(strides)
        self.size = acc

    def encode(self, s: ExtendedState) -> int:
        s.validate_for(self.graph)
        idx = 0
        for v in range(self.graph.n):
            idx += (s.x[v] * self.dplus[v] + s.k[v] - 1) * self.strides[v]
        return idx

    def decode(self, idx: int) -> ExtendedState:
        if not 0 <= idx < self.size:
            raise ValueError(f"index {idx} outside state space of size {self.size}")
        xs = []
        ks = []
        for v in range(self.graph.n):
            digit = idx % self.radices[v]
            idx //= self.radices[v]
            dp = self.dplus[v]
            xs.append(digit // dp)
            ks.append(digit % dp + 1)
        return ExtendedState(tuple(xs), tuple(ks))

    def all_indices(self):
        return range(self.size)


def _transition_tables(g: Graph, rule: Rule) -> tuple[list[list[int]], list[int]]:
    """Per-vertex successor tables plus the synchronous successor array.

    tables[v][i] is the index reached from state i by updating vertex v
    alone; parallel[i] applies every vertex update to the same snapshot.
    Built in one odometer sweep over the whole space.
    """
    codec = StateCodec(g)
    n, size = g.n, codec.size
    adj = g.adjacency
    dplus = list(codec.dplus)
    radices = list(codec.radices)
    strides = list(codec.strides)
    raise_up = rule.raises_on_activation()
    lower_down = rule.lowers_on_deactivation()

    x = [0] * n
    k = [1] * n
    digits = [0] * n
    tables = [[0] * size for _ in range(n)]
    parallel = [0] * size

    for idx in range(size):
        total = 0
        for v in range(n):
            vote = x[v]
            for u in adj[v]:
                vote += x[u]
            kv = k[v]
            xv = x[v]
            if vote >= kv:
                nx = 1
                nk = kv + 1 if (xv == 0 and raise_up) else kv
            else:
                nx = 0
                nk = kv - 1 if (xv == 1 and lower_down) else kv
            delta = ((nx - xv) * dplus[v] + nk - kv) * strides[v]
            tables[v][idx] = idx + delta
            total += delta
        parallel[idx] = idx + total
        # odometer increment with carry
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
    return tables, parallel


def _compose_sequential(tables: list[list[int]], order) -> list[int]:
    """Successor array of a sequential sweep: first vertex applied first."""
    order = list(order)
    current = list(tables[order[0]])
    for v in order[1:]:
        t = tables[v]
        current = [t[j] for j in current]
    return current


def _psi_table(g: Graph) -> list[int]:
    """Index permutation of the flip/reflect conjugation."""
    codec = StateCodec(g)
    n, size = g.n, codec.size
    # per-vertex digit reflection: x*(d+1)+(k-1)  ->  (1-x)*(d+1)+(d+1-k)
    luts = []
    for v in range(n):
        dp = codec.dplus[v]
        lut = []
        for digit in range(2 * dp):
            xv, kv = digit // dp, digit % dp + 1
            lut.append((1 - xv) * dp + (dp + 1 - kv))
        luts.append(lut)
    table = [0] * size
    digits = [0] * n
    radices = list(codec.radices)
    strides = list(codec.strides)
    for idx in range(size):
        acc = 0
        for v in range(n):
            acc += luts[v][digits[v]] * strides[v]
        table[idx] = acc
        for v in range(n):
            if digits[v] + 1 == radices[v]:
                digits[v] = 0
            else:
                digits[v] += 1
                break
    return table


def _x_masks(g: Graph) -> list[int]:
    """Bitmask of vertex bits per state index (vertex v at bit position v)."""
    codec = StateCodec(g)
    n, size = g.n, codec.size
    masks = [0] * size
    digits = [0] * n
    radices = list(codec.radices)
    dplus = list(codec.dplus)
    mask = 0
    for idx in range(size):
        masks[idx] = mask
        for v in range(n):
            d = digits[v] + 1
            if d == radices[v]:
                digits[v] = 0
                mask &= ~(1 << v)
            else:
                digits[v] = d
                if d == dplus[v]:
                    mask |= 1 << v
                break
    return masks


@dataclass
class PhaseSpace:
    """Functional digraph of one update map over the full state space."""

    graph: Graph
    rule_scheme: RuleScheme
    successors: list[int]
    codec: StateCodec = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.successors)


def _successor_slice(g: Graph, rs: RuleScheme, start: int, stop: int) -> list[int]:
    tables, parallel = _transition_tables(g, rs.rule)
    if isinstance(rs.scheme, Parallel):
        return parallel[start:stop]
    order = list(rs.scheme.order)
    current = tables[order[0]][start:stop]
    for v in order[1:]:
        t = tables[v]
        current = [t[j] for j in current]
    return current


def build_phase_space(
    g: Graph,
    rule_scheme: RuleScheme,
    cap: int | None = None,
    workers: int = 1,
) -> PhaseSpace:
    """Compute the dense successor array for one rule/scheme pair.

    Refuses spaces larger than the cap (default 10^7 states; override with
    the cap argument or the ETGDS_CAP environment variable). The result is
    a pure function of the inputs, identical for any worker count.
    """
    if isinstance(rule_scheme.scheme, Sequential) and len(rule_scheme.scheme.order) != g.n:
        raise ValueError("permutation length does not match the vertex count")
    size = state_space_size(g)
    limit = resolve_cap(cap)
    if size > limit:
        raise StateSpaceCapExceeded(size, limit)
    codec = StateCodec(g)
    if workers <= 1 or size < 4 * workers:
        succ = _successor_slice(g, rule_scheme, 0, size)
    else:
        bounds = [size * i // workers for i in range(workers + 1)]
        chunks = [(g, rule_scheme, bounds[i], bounds[i + 1]) for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_successor_slice_star, chunks))
        succ = [j for part in parts for j in part]
    return PhaseSpace(g, rule_scheme, succ, codec)


def _successor_slice_star(args) -> list[int]:
    return _successor_slice(*args)


@dataclass(frozen=True)
class AttractorSummary:
    """Exact attractor census of a functional digraph."""

    fixed_point_count: int
    cycle_length_histogram: dict[int, int]
    transient_state_count: int
    periodic_state_count: int

    @property
    def total_states(self) -> int:
        return self.transient_state_count + self.periodic_state_count

    @property
    def max_cycle_length(self) -> int:
        return max(self.cycle_length_histogram) if self.cycle_length_histogram else 0


def _cycle_census(succ: list[int]) -> AttractorSummary:
    """Single-pass classification of every node of a functional digraph.

    Standard three-color pointer chase: walk unvisited nodes forward; when
    the walk re-enters its own path a new cycle has been found, and the
    depth stamps recover its exact length. Stamps are only trusted while a
    node is colored in-progress, so the array can be reused across walks.
    """
    n = len(succ)
    color = bytearray(n)  # 0 new, 1 on current path, 2 resolved
    depth = [0] * n
    hist: dict[int, int] = {}
    fixed = 0
    periodic = 0
    for start in range(n):
        if color[start]:
            continue
        path = []
        node = start
        while color[node] == 0:
            color[node] = 1
            depth[node] = len(path)
            path.append(node)
            node = succ[node]
        if color[node] == 1:  # ran into the current path: new cycle
            length = len(path) - depth[node]
            hist[length] = hist.get(length, 0) + 1
            periodic += length
            if length == 1:
                fixed += 1
        for visited in path:
            color[visited] = 2
    return AttractorSummary(fixed, hist, n - periodic, periodic)


def attractors(ps: PhaseSpace) -> AttractorSummary:
    return _cycle_census(ps.successors)


def fixed_point_indices(ps: PhaseSpace) -> list[int]:
    succ = ps.successors
    return [i for i in range(len(succ)) if succ[i] == i]


# --- exports ------------------------------------------------------------------


def scheme_string(scheme: Scheme) -> str:
    return scheme.describe()


def to_dot(ps: PhaseSpace) -> str:
    """Graphviz rendering: one node per state (labeled with its literal),
    one edge per transition, deterministic index order."""
    lines = ["digraph phase_space {"]
    for i in range(ps.size):
        lines.append(f'  s{i} [label="{format_state(ps.codec.decode(i))}"];')
    for i, j in enumerate(ps.successors):
        lines.append(f"  s{i} -> s{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json_dict(ps: PhaseSpace) -> dict:
    summary = attractors(ps)
    return {
        "graph": {"n": ps.graph.n, "edges": [[u, v] for u, v in ps.graph.edges]},
        "rule": ps.rule_scheme.rule.value,
        "scheme": scheme_string(ps.rule_scheme.scheme),
        "successors": list(ps.successors),
        "summary": {
            "size": ps.size,
            "fixed_points": summary.fixed_point_count,
            "cycle_lengths": {str(k): v for k, v in sorted(summary.cycle_length_histogram.items())},
            "transient_states": summary.transient_state_count,
            "periodic_states": summary.periodic_state_count,
        },
    }


def to_json(ps: PhaseSpace) -> str:
    return json.dumps(to_json_dict(ps), sort_keys=True, separators=(",", ":")) + "\n"


# --- verification suites -------------------------------------------------------


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification sweep; failure carries a counterexample."""

    name: str
    passed: bool
    details: str
    counterexample: str | None = None


def _permutation_pool(n: int, sample_size: int = 120, seed: int = 0):
    """All n! orders for small n; a seeded sample beyond that."""
    if n <= FULL_PERMUTATION_LIMIT:
        yield from permutations(range(n))
        return
    rng = SplitMix64(seed)
    for _ in range(sample_size):
        order = list(range(n))
        rng.shuffle(order)
        yield tuple(order)


def _first_state_on_long_cycle(succ: list[int], codec: StateCodec, bound: int) -> str:
    """Literal of some state on a cycle longer than `bound` (for reports)."""
    n = len(succ)
    color = bytearray(n)
    depth = [0] * n
    for start in range(n):
        if color[start]:
            continue
        path = []
        node = start
        while color[node] == 0:
            color[node] = 1
            depth[node] = len(path)
            path.append(node)
            node = succ[node]
        if color[node] == 1 and len(path) - depth[node] > bound:
            return format_state(codec.decode(node))
        for visited in path:
            color[visited] = 2
    return ""


def verify_limit_theorem(g: Graph, rule: Rule, scheme_family: str) -> CheckReport:
    """Cycle-length bound sweep: 1 for sequential sweeps, 2 for synchronous.

    Sequential runs every permutation (all n! up to n=5, seeded sample
    beyond). Failure reports the offending permutation and a state on the
    long cycle.
    """
    if scheme_family not in ("sequential", "parallel"):
        raise ValueError("scheme_family must be 'sequential' or 'parallel'")
    codec = StateCodec(g)
    tables, parallel = _transition_tables(g, rule)
    name = f"limits[{rule.value},{scheme_family}]"
    if scheme_family == "parallel":
        census = _cycle_census(parallel)
        worst = census.max_cycle_length
        if worst <= 2:
            return CheckReport(name, True, f"max cycle length {worst} <= 2")
        witness = _first_state_on_long_cycle(parallel, codec, 2)
        return CheckReport(name, False, f"cycle of length {worst} found", witness)
    worst = 0
    for order in _permutation_pool(g.n):
        succ = _compose_sequential(tables, order)
        census = _cycle_census(succ)
        worst = max(worst, census.max_cycle_length)
        if census.max_cycle_length > 1:
            witness = _first_state_on_long_cycle(succ, codec, 1)
            return CheckReport(
                name, False,
                f"cycle of length {census.max_cycle_length} under order {order}",
                witness,
            )
    return CheckReport(name, True, f"max cycle length {worst} <= 1 over all orders")


def verify_conjugacy(g: Graph, scheme: Scheme | None = None) -> CheckReport:
    """Exhaustive check that flip/reflect intertwines the increasing and
    decreasing maps, state for state, making their phase spaces isomorphic
    digraphs (the flip/reflect table is the vertex bijection).

    With scheme=None the synchronous map and every sequential order are all
    checked in one call, reusing the transition tables.
    """
    codec = StateCodec(g)
    up_tables, up_par = _transition_tables(g, Rule.INCREASING)
    down_tables, down_par = _transition_tables(g, Rule.DECREASING)
    flip = _psi_table(g)
    size = codec.size

    if any(flip[flip[i]] != i for i in range(size)):
        bad = next(i for i in range(size) if flip[flip[i]] != i)
        return CheckReport(
            "conjugacy", False, "flip/reflect failed to be an involution",
            format_state(codec.decode(bad)),
        )

    def check_pair(up_succ: list[int], down_succ: list[int], label: str) -> CheckReport | None:
        lhs = [flip[j] for j in up_succ]
        rhs = [down_succ[j] for j in flip]
        if lhs != rhs:
            bad = next(i for i in range(size) if lhs[i] != rhs[i])
            return CheckReport(
                "conjugacy", False, f"intertwining fails for {label}",
                format_state(codec.decode(bad)),
            )
        return None

    if scheme is None:
        failure = check_pair(up_par, down_par, "parallel")
        if failure:
            return failure
        count = 0
        for order in _permutation_pool(g.n):
            count += 1
            failure = check_pair(
                _compose_sequential(up_tables, order),
                _compose_sequential(down_tables, order),
                f"seq:{order}",
            )
            if failure:
                return failure
        return CheckReport(
            "conjugacy", True,
            f"intertwining holds on {size} states (parallel and {count} orders)",
        )

    if isinstance(scheme, Parallel):
        failure = check_pair(up_par, down_par, "parallel")
    else:
        failure = check_pair(
            _compose_sequential(up_tables, scheme.order),
            _compose_sequential(down_tables, scheme.order),
            scheme.describe(),
        )
    return failure or CheckReport(
        "conjugacy", True, f"intertwining holds on {size} states ({scheme.describe()})"
    )


def verify_potential_descent(g: Graph) -> CheckReport:
    """Every state-changing mixed vertex update must lower the potential.

    Sweeps all states and vertices; identity updates are excluded (they may
    leave the potential unchanged). Reports the minimum observed drop.
    """
    codec = StateCodec(g)
    n = g.n
    adj = g.adjacency
    dplus = codec.dplus
    x = [0] * n
    k = [1] * n
    digits = [0] * n
    radices = codec.radices
    min_drop = None
    for idx in range(codec.size):
        for v in range(n):
            vote = x[v]
            for u in adj[v]:
                vote += x[u]
            kv = k[v]
            xv = x[v]
            new_x = 1 if vote >= kv else 0
            if new_x == xv:
                continue
            # potential change is local to v and its incident edges
            before = kv if xv else dplus[v] + 1 - kv
            mismatch_before = sum(1 for u in adj[v] if x[u] != xv)
            new_k = kv + 1 if new_x else kv - 1
            after = new_k if new_x else dplus[v] + 1 - new_k
            mismatch_after = len(adj[v]) - mismatch_before
            drop = (before + mismatch_before) - (after + mismatch_after)
            if min_drop is None or drop < min_drop:
                min_drop = drop
            if drop < 1:
                return CheckReport(
                    "potential-descent", False,
                    f"update of vertex {v} changed the bit but dropped potential by {drop}",
                    format_state(codec.decode(idx)),
                )
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
    detail = "no state-changing updates exist" if min_drop is None else f"minimum drop {min_drop} >= 1"
    return CheckReport("potential-descent", True, detail)


_DIR_ID, _DIR_UP, _DIR_DOWN, _DIR_MIXED = 0, 1, 2, 4


def _direction_flags(masks: list[int], succ: list[int]) -> list[int]:
    flags = [0] * len(succ)
    for i, j in enumerate(succ):
        a, b = masks[i], masks[j]
        if a == b:
            flags[i] = _DIR_ID
        else:
            up = b & ~a
            down = a & ~b
            if up and down:
                flags[i] = _DIR_MIXED
            elif up:
                flags[i] = _DIR_UP
            else:
                flags[i] = _DIR_DOWN
    return flags


def _future_direction_sets(succ: list[int], flags: list[int]) -> list[int]:
    """Bit-union of non-identity directions over each state's forward orbit."""
    n = len(succ)
    unseen, active = -1, -2
    result = [unseen] * n
    for start in range(n):
        if result[start] != unseen:
            continue
        path = []
        node = start
        while result[node] == unseen:
            result[node] = active
            path.append(node)
            node = succ[node]
        if result[node] == active:
            # closed a new cycle: every node on it sees the whole loop
            acc = 0
            probe = node
            while True:
                acc |= flags[probe]
                probe = succ[probe]
                if probe == node:
                    break
            while result[probe] == active:
                result[probe] = acc
                probe = succ[probe]
                if probe == node:
                    break
        for visited in reversed(path):
            if result[visited] == active:
                result[visited] = flags[visited] | result[succ[visited]]
    return result


def verify_unidirectional(g: Graph, rules=(Rule.INCREASING, Rule.DECREASING, Rule.MIXED)) -> CheckReport:
    """Direction persistence along sequential orbits.

    Once a sweep makes only upward flips, every later sweep in the orbit
    makes only upward flips or none at all (same statement downward).
    Checked exhaustively over states and permutation orders.
    """
    codec = StateCodec(g)
    masks = _x_masks(g)
    for rule in rules:
        tables, _ = _transition_tables(g, rule)
        for order in _permutation_pool(g.n):
            succ = _compose_sequential(tables, order)
            flags = _direction_flags(masks, succ)
            future = _future_direction_sets(succ, flags)
            for i in range(len(succ)):
                f = flags[i]
                if f == _DIR_UP and future[succ[i]] & ~_DIR_UP:
                    return CheckReport(
                        "unidirectional", False,
                        f"rule {rule.value}, order {order}: upward step followed by non-upward step",
                        format_state(codec.decode(i)),
                    )
                if f == _DIR_DOWN and future[succ[i]] & ~_DIR_DOWN:
                    return CheckReport(
                        "unidirectional", False,
                        f"rule {rule.value}, order {order}: downward step followed by non-downward step",
                        format_state(codec.decode(i)),
                    )
    return CheckReport("unidirectional", True, "direction persists along every sequential orbit")
