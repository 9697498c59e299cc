"""Dynamic-threshold vertex functions and the global update maps built on them.

Every vertex v of a graph carries an extended state (x_v, k_v): a binary
activity bit and an integer threshold confined to {1, ..., d(v)+1}. One
vertex update recomputes the bit as a threshold vote over the closed
neighborhood (at least k_v ones among v and its neighbors turns the bit on)
and moves the threshold according to the chosen rule:

  static      threshold never moves
  increasing  k_v += 1 whenever the bit flips 0 -> 1
  decreasing  k_v -= 1 whenever the bit flips 1 -> 0
  mixed       both of the above

The two flip conditions are exactly "x_v = 0 and vote >= k_v" and
"x_v = 1 and vote < k_v", so the threshold can never leave its range:
an increment requires vote >= k_v which is impossible at k_v = d(v)+1 with
x_v = 0, and a decrement requires vote < k_v which is impossible at k_v = 1
with x_v = 1.

Global maps come in two flavors: the synchronous map updates every vertex
from the same snapshot, the sequential map sweeps the vertices once in a
given permutation order, feeding each update the partially rewritten state.

Also here: the flip-and-reflect conjugation that swaps the increasing and
decreasing systems, the integer potential that strictly decreases under
state-changing mixed vertex updates, transition direction classification,
a generic orbit walker, and the weighted-sum synchronous variant.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .graphs import Graph


class Rule(str, Enum):
    STATIC = "static"
    INCREASING = "increasing"
    DECREASING = "decreasing"
    MIXED = "mixed"

    def raises_on_activation(self) -> bool:
        return self in (Rule.INCREASING, Rule.MIXED)

    def lowers_on_deactivation(self) -> bool:
        return self in (Rule.DECREASING, Rule.MIXED)


@dataclass(frozen=True)
class Parallel:
    """Synchronous scheme: all vertices update from the same snapshot."""

    def describe(self) -> str:
        return "parallel"


@dataclass(frozen=True)
class Sequential:
    """One full sweep in the fixed permutation `order` (first entry first)."""

    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError(f"{self.order} is not a permutation of 0..{len(self.order) - 1}")

    def describe(self) -> str:
        return "seq:" + ",".join(str(v) for v in self.order)


Scheme = Parallel | Sequential


@dataclass(frozen=True)
class RuleScheme:
    """Pairing of a threshold rule with an update scheme."""

    rule: Rule
    scheme: Scheme


@dataclass(frozen=True)
class ExtendedState:
    """Per-vertex (bit, threshold) pairs, stored as two parallel tuples."""

    x: tuple[int, ...]
    k: tuple[int, ...]

    def __post_init__(self):
        if len(self.x) != len(self.k):
            raise ValueError("bit and threshold tuples must have equal length")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, int]]) -> "ExtendedState":
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @property
    def n(self) -> int:
        return len(self.x)

    def pair(self, v: int) -> tuple[int, int]:
        return self.x[v], self.k[v]

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.x, self.k))

    def with_vertex(self, v: int, x_v: int, k_v: int) -> "ExtendedState":
        if self.x[v] == x_v and self.k[v] == k_v:
            return self
        return ExtendedState(
            self.x[:v] + (x_v,) + self.x[v + 1 :],
            self.k[:v] + (k_v,) + self.k[v + 1 :],
        )

    def validate_for(self, g: Graph) -> None:
        if self.n != g.n:
            raise ValueError(f"state has {self.n} components, graph has {g.n} vertices")
        for v in range(g.n):
            if self.x[v] not in (0, 1):
                raise ValueError(f"vertex {v}: bit {self.x[v]} is not 0 or 1")
            top = g.degree(v) + 1
            if not 1 <= self.k[v] <= top:
                raise ValueError(f"vertex {v}: threshold {self.k[v]} outside 1..{top}")


def sigma(s: ExtendedState, g: Graph, v: int) -> int:
    """Number of 1-bits over the closed neighborhood of v (v included)."""
    g.check_vertex(v)
    x = s.x
    return x[v] + sum(x[u] for u in g.adjacency[v])


def tau(k: int, neighborhood_bits: Sequence[int]) -> int:
    """Plain threshold vote: 1 iff at least k of the inputs are 1."""
    if k < 1:
        raise ValueError("threshold must be at least 1")
    return 1 if sum(neighborhood_bits) >= k else 0


def next_threshold(rule: Rule, x_v: int, k_v: int, sig: int) -> int:
    """Threshold after one vertex update, from the pre-update bit and vote.

    The conditions are evaluated on the inputs of the update, never on the
    freshly computed bit, so the bit and threshold components of an update
    are simultaneous.
    """
    if x_v == 0 and sig >= k_v:
        return k_v + 1 if rule.raises_on_activation() else k_v
    if x_v == 1 and sig < k_v:
        return k_v - 1 if rule.lowers_on_deactivation() else k_v
    return k_v


def local_update(s: ExtendedState, g: Graph, rule: Rule, v: int) -> ExtendedState:
    """Update vertex v only, leaving every other component untouched."""
    sig = sigma(s, g, v)
    k_v = s.k[v]
    new_x = 1 if sig >= k_v else 0
    new_k = next_threshold(rule, s.x[v], k_v, sig)
    return s.with_vertex(v, new_x, new_k)


def sds_step(s: ExtendedState, g: Graph, rule: Rule, order: Sequence[int]) -> ExtendedState:
    """One full sequential sweep, updating vertices in `order` (first first)."""
    if sorted(order) != list(range(g.n)):
        raise ValueError(f"{tuple(order)} is not a permutation of the {g.n} vertices")
    for v in order:
        s = local_update(s, g, rule, v)
    return s


def gca_step(s: ExtendedState, g: Graph, rule: Rule) -> ExtendedState:
    """One synchronous step: every component computed from the same snapshot."""
    s.validate_for(g)
    new_x = []
    new_k = []
    for v in range(g.n):
        sig = sigma(s, g, v)
        k_v = s.k[v]
        new_x.append(1 if sig >= k_v else 0)
        new_k.append(next_threshold(rule, s.x[v], k_v, sig))
    return ExtendedState(tuple(new_x), tuple(new_k))


def step_function(g: Graph, rs: RuleScheme) -> Callable[[ExtendedState], ExtendedState]:
    """The whole-state map for a rule/scheme pair, as a reusable callable."""
    if isinstance(rs.scheme, Parallel):
        return lambda s: gca_step(s, g, rs.rule)
    order = rs.scheme.order
    if len(order) != g.n:
        raise ValueError(f"permutation of length {len(order)} for a graph on {g.n} vertices")
    return lambda s: sds_step(s, g, rs.rule, order)


def psi(s: ExtendedState, g: Graph) -> ExtendedState:
    """Flip every bit and reflect every threshold within its range.

    Componentwise (x, k) -> (1-x, d(v)+2-k). Applying it twice gives the
    identity, and it exchanges the increasing and decreasing dynamics.
    """
    s.validate_for(g)
    return ExtendedState(
        tuple(1 - b for b in s.x),
        tuple(g.degree(v) + 2 - s.k[v] for v in range(g.n)),
    )


def potential(s: ExtendedState, g: Graph) -> int:
    """Integer energy of a state: vertex terms plus disagreeing edges.

    An active vertex contributes its threshold k_v; an inactive one
    contributes d(v)+2-k_v (the number of zeros in its closed neighborhood
    that would force the bit to stay off). Each edge whose endpoints carry
    different bits contributes 1. Under the mixed rule, any single-vertex
    update that changes the bit lowers this total by at least one.
    """
    s.validate_for(g)
    total = 0
    for v in range(g.n):
        total += s.k[v] if s.x[v] else g.degree(v) + 2 - s.k[v]
    for u in range(g.n):
        for w in g.adjacency[u]:
            if w > u and s.x[u] != s.x[w]:
                total += 1
    return total


class TransitionDirection(str, Enum):
    IDENTITY = "identity"
    UP = "up"
    DOWN = "down"
    MIXED_DIRECTION = "mixed-direction"


def is_unidirectional(s: ExtendedState, s_next: ExtendedState) -> TransitionDirection:
    """Classify the bit flips of a transition.

    `identity` when no bit changes (thresholds may still move), `up` when
    only 0 -> 1 flips occur, `down` when only 1 -> 0 flips occur, and
    `mixed-direction` when both kinds appear. The identity case is kept as
    its own class so direction statements along orbits are unambiguous.
    """
    if s.n != s_next.n:
        raise ValueError("states live on different vertex counts")
    went_up = any(a == 0 and b == 1 for a, b in zip(s.x, s_next.x))
    went_down = any(a == 1 and b == 0 for a, b in zip(s.x, s_next.x))
    if went_up and went_down:
        return TransitionDirection.MIXED_DIRECTION
    if went_up:
        return TransitionDirection.UP
    if went_down:
        return TransitionDirection.DOWN
    return TransitionDirection.IDENTITY


class OrbitCapExceeded(RuntimeError):
    """Raised when an orbit fails to close within the step cap."""


def orbit(
    s: ExtendedState,
    step: Callable[[ExtendedState], ExtendedState],
    cap: int,
) -> tuple[list[ExtendedState], list[ExtendedState]]:
    """Forward orbit of s, split into transient prefix and cycle.

    Walks s, step(s), step(step(s)), ... recording every state seen, until a
    state repeats; the first repeated state starts the cycle. The returned
    prefix followed by the cycle is exactly the orbit. With cap at least the
    size of the reachable state space, closure is guaranteed.
    """
    seen: dict[ExtendedState, int] = {}
    trail: list[ExtendedState] = []
    current = s
    for _ in range(cap + 1):
        if current in seen:
            split = seen[current]
            return trail[:split], trail[split:]
        seen[current] = len(trail)
        trail.append(current)
        current = step(current)
    raise OrbitCapExceeded(f"orbit did not close within {cap} steps")


# --- weighted synchronous variant -------------------------------------------


@dataclass(frozen=True)
class SymmetricWeights:
    """Real symmetric interaction matrix for the weighted mixed dynamics."""

    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        n = len(self.matrix)
        for row in self.matrix:
            if len(row) != n:
                raise ValueError("weight matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValueError(f"weight matrix asymmetric at ({i},{j})")

    @classmethod
    def from_rows(cls, rows) -> "SymmetricWeights":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.matrix)


def closed_neighborhood_weights(g: Graph) -> SymmetricWeights:
    """0/1 indicator matrix of closed neighborhoods: a_ij = 1 iff j is i or
    adjacent to i. With these weights the weighted dynamics reproduces the
    unweighted mixed synchronous map."""
    rows = []
    for i in range(g.n):
        row = [0] * g.n
        row[i] = 1
        for j in g.adjacency[i]:
            row[j] = 1
        rows.append(tuple(row))
    return SymmetricWeights(tuple(rows))


def weighted_mixed_gca_step(
    x: Sequence[int],
    k: Sequence[float],
    w: SymmetricWeights,
) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """Synchronous mixed update with weighted sums in place of vote counts.

    Vertex i flips on when x_i = 0 and sum_j a_ij x_j >= k_i, flips off when
    x_i = 1 and the sum falls below k_i, and the threshold moves by +1 / -1
    on exactly those two transitions. Thresholds are unconstrained here:
    with arbitrary weights there is no degree bound to confine them.
    """
    n = w.n
    if len(x) != n or len(k) != n:
        raise ValueError(f"state length must match the {n}x{n} weight matrix")
    mat = w.matrix
    new_x = []
    new_k = []
    for i in range(n):
        total = sum(mat[i][j] * x[j] for j in range(n) if x[j])
        if x[i] == 0 and total >= k[i]:
            new_x.append(1)
            new_k.append(k[i] + 1)
        elif x[i] == 1 and total < k[i]:
            new_x.append(0)
            new_k.append(k[i] - 1)
        else:
            new_x.append(x[i])
            new_k.append(k[i])
    return tuple(new_x), tuple(new_k)


# --- state literals ----------------------------------------------------------
#
# States are written "((x1,k1),(x2,k2),...)" with vertices in index order,
# e.g. "((1,2),(0,2),(1,2),(0,2))". Parsing and formatting round-trip
# bit-exactly; no whitespace is emitted.


def format_state(s: ExtendedState) -> str:
    return "(" + ",".join(f"({b},{t})" for b, t in s.pairs()) + ")"


def parse_state(text: str) -> ExtendedState:
    try:
        value = ast.literal_eval(text.strip())
    except (SyntaxError, ValueError) as exc:
        raise ValueError(f"malformed state literal: {text!r}") from exc
    if (
        isinstance(value, tuple)
        and len(value) == 2
        and all(isinstance(c, int) for c in value)
    ):
        value = (value,)  # single-vertex literal "((x,k))" collapses one paren level
    if not isinstance(value, tuple) or not value:
        raise ValueError(f"state literal must list (bit,threshold) pairs: {text!r}")
    pairs = []
    for entry in value:
        if (
            not isinstance(entry, tuple)
            or len(entry) != 2
            or not all(isinstance(c, int) for c in entry)
        ):
            raise ValueError(f"state component {entry!r} is not an integer pair")
        pairs.append((entry[0], entry[1]))
    return ExtendedState.from_pairs(pairs)
