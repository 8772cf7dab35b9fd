"""Structural analysis of counterstrategies: deadlocked states,
countertrace recognition, and maximal k-preventing cycles.

A k-preventing cycle is a closed walk through states marked with blocked
goal k.  States may repeat but directed edges may not (this is how
"modulo state-repetition" is read here), adjacent walk entries are
distinct, and a self-loop counts as a one-state cycle.  Maximality is the
sub-cycle relation: C ≺ C' when C is shorter and appears contiguously in
C' at some rotation offset.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, List, Sequence, Set, Tuple

from .errors import GoalNotPrevented
from .game import Counterstrategy


def deadlocked_states(cs: Counterstrategy) -> Set[int]:
    """States q with delta_s(q, delta_e(q)) empty."""
    return {q for q in cs.states if not cs.delta_s[q]}


def is_countertrace(cs: Counterstrategy) -> bool:
    """True iff every same-length path from Q0 sees the same inputs.

    Frontier sets are advanced in lockstep; a repeated frontier closes
    every path prefix, so termination is by frontier-set memoization.
    """
    frontier = frozenset(cs.q0)
    seen = set()
    while frontier and frontier not in seen:
        labels = {tuple(sorted(cs.delta_e[q].items())) for q in frontier}
        if len(labels) > 1:
            return False
        seen.add(frontier)
        frontier = frozenset(
            q2 for q in frontier for q2 in cs.delta_s[q]
        )
    return True


def _canonical(walk: Tuple[int, ...]) -> Tuple[int, ...]:
    """Lexicographically least rotation; cycle identity is rotation-free."""
    rotations = [walk[i:] + walk[:i] for i in range(len(walk))]
    return min(rotations)


def _sub_cycle(c1: Sequence[int], c2: Sequence[int]) -> bool:
    """c1 ≺ c2: strictly shorter and found contiguously at some offset."""
    if len(c1) >= len(c2):
        return False
    n2 = len(c2)
    for o in range(n2):
        if all(c1[i] == c2[(i + o) % n2] for i in range(len(c1))):
            return True
    return False


def _closed_walks(edges: Set[Tuple[int, int]], nodes: List[int],
                  max_len: int) -> Set[Tuple[int, ...]]:
    """All edge-distinct closed walks (length ≥ 2) up to max_len, keyed
    by canonical rotation.  Self-loop edges are excluded; they only ever
    form one-state cycles."""
    walks: Set[Tuple[int, ...]] = set()
    plain = {(a, b) for a, b in edges if a != b}

    def dfs(start: int, path: List[int], used: FrozenSet):
        v = path[-1]
        for a, b in sorted(plain):
            if a != v or (a, b) in used:
                continue
            if b == start and len(path) >= 2:
                walks.add(_canonical(tuple(path)))
            if len(path) < max_len:
                dfs(start, path + [b], used | {(a, b)})

    for s in nodes:
        dfs(s, [s], frozenset())
    return walks


def preventing_cycles(cs: Counterstrategy, k: int) -> List[Tuple[int, ...]]:
    """Maximal k-preventing cycles, as canonical state-id tuples."""
    q_k = [q for q in cs.states if cs.gamma_goals[q] == k]
    if not q_k:
        raise GoalNotPrevented(k)
    in_k = set(q_k)
    edges = {
        (q, q2)
        for q in q_k
        for q2 in cs.delta_s[q]
        if q2 in in_k
    }
    candidates = _closed_walks(edges, q_k, max_len=2 * len(q_k))
    for q, q2 in edges:
        if q == q2:
            candidates.add((q,))
    maximal = [
        c for c in candidates
        if not any(c != c2 and _sub_cycle(c, c2) for c2 in candidates)
    ]
    return sorted(maximal, key=lambda c: (len(c), c))


def recurrent_states(cs: Counterstrategy) -> Set[int]:
    """States lying on some cycle of the successor graph.

    These are the states the play can visit forever, so the goal mark
    carried by them is the one actually prevented in the limit; states on
    the transient prefix may be marked with earlier goals that the system
    does eventually reach.
    """
    adj = {q: set(cs.delta_s[q]) for q in cs.states}
    out: Set[int] = set()
    for q in cs.states:
        seen: Set[int] = set()
        frontier = set(adj[q])
        while frontier:
            if q in frontier:
                out.add(q)
                break
            seen |= frontier
            frontier = {b for a in frontier for b in adj[a]} - seen
    return out


def diameter_bound(cs: Counterstrategy) -> int:
    """Sum of per-component diameters of the successor graph; the unroll
    depth heuristic for livelock instances."""
    if not cs.states:
        return 0
    adj = {q: set(cs.delta_s[q]) for q in cs.states}
    undirected: Dict[int, Set[int]] = {q: set() for q in cs.states}
    for q, succs in adj.items():
        for q2 in succs:
            undirected[q].add(q2)
            undirected[q2].add(q)

    def bfs_far(src: int, allowed: Set[int]) -> int:
        dist = {src: 0}
        frontier = [src]
        far = 0
        while frontier:
            nxt = []
            for q in frontier:
                for q2 in adj[q]:
                    if q2 in allowed and q2 not in dist:
                        dist[q2] = dist[q] + 1
                        far = max(far, dist[q2])
                        nxt.append(q2)
            frontier = nxt
        return far

    remaining = set(cs.states)
    total = 0
    while remaining:
        seed = min(remaining)
        comp = {seed}
        frontier = [seed]
        while frontier:
            nxt = []
            for q in frontier:
                for q2 in undirected[q]:
                    if q2 in remaining and q2 not in comp:
                        comp.add(q2)
                        nxt.append(q2)
            frontier = nxt
        total += max(bfs_far(q, comp) for q in comp)
        remaining -= comp
    return total
