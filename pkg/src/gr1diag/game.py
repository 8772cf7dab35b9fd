"""GR(1) game solving: realizability, cooperative satisfiability, and
environment counterstrategy extraction.

Counterstrategy extraction is rank-based over the environment's dual
fixpoints and deliberately deterministic: candidate next inputs are tried
in descending packed-index order (all-true first), initial-state
completions in ascending order, and state ids follow BFS discovery order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from .arena import (
    Arena,
    DEFAULT_STATE_CAP,
    env_attractor,
    prevent_forever,
    winning_set,
)
from .errors import EnvLivenessUnsupported, SpecRealizable
from .model import GR1Spec, evaluate


@dataclass(frozen=True)
class Realizable:
    winning: object  # bool array over arena states
    warnings: tuple = ()


@dataclass(frozen=True)
class Unrealizable:
    bad_init: Dict[str, bool]  # total assignment over X ∪ Y


@dataclass(frozen=True)
class Counterstrategy:
    """Environment automaton whose runs satisfy φe ∧ ¬φs (Definition 1
    shape): deterministic input function delta_e, system-response relation
    delta_s, total state labels, and a goal mark per state."""

    inputs: tuple
    outputs: tuple
    states: tuple  # ids, 1-based, discovery order
    q0: tuple
    gamma_x: Dict[int, Dict[str, bool]]
    gamma_y: Dict[int, Dict[str, bool]]
    delta_e: Dict[int, Dict[str, bool]]
    delta_s: Dict[int, tuple]  # successors under delta_e(q)
    gamma_goals: Dict[int, int]

    def successors(self, q: int, x: Dict[str, bool]) -> tuple:
        """delta_s(q, x); empty unless x is the strategy's own input."""
        if x != self.delta_e.get(q):
            return ()
        return self.delta_s[q]

    def label(self, q: int) -> Dict[str, bool]:
        full = dict(self.gamma_x[q])
        full.update(self.gamma_y[q])
        return full

    def dump(self) -> str:
        def bits(assignment, names):
            return "".join("1" if assignment[n] else "0" for n in names) or "-"

        lines = []
        for q in self.states:
            lines.append(
                f"state {q} in={bits(self.gamma_x[q], self.inputs)} "
                f"out={bits(self.gamma_y[q], self.outputs)} "
                f"goal={self.gamma_goals[q]}"
            )
        for q in self.states:
            lines.append(f"einput {q} {bits(self.delta_e[q], self.inputs)}")
        for q in self.states:
            for q2 in self.delta_s[q]:
                lines.append(f"edge {q} {q2}")
        return "\n".join(lines) + "\n"


def parse_counterstrategy(text: str, inputs, outputs) -> Counterstrategy:
    """Inverse of Counterstrategy.dump for the given proposition orders."""

    def assign(bitstr, names):
        if bitstr == "-":
            bitstr = ""
        return {n: bitstr[i] == "1" for i, n in enumerate(names)}

    states, gx, gy, de, ds, gg = [], {}, {}, {}, {}, {}
    for raw in text.splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "state":
            q = int(parts[1])
            fields = dict(p.split("=", 1) for p in parts[2:])
            states.append(q)
            gx[q] = assign(fields["in"], inputs)
            gy[q] = assign(fields["out"], outputs)
            gg[q] = int(fields["goal"])
            ds.setdefault(q, [])
        elif parts[0] == "einput":
            de[int(parts[1])] = assign(parts[2], inputs)
        elif parts[0] == "edge":
            ds.setdefault(int(parts[1]), []).append(int(parts[2]))
        else:
            raise ValueError(f"bad counterstrategy line {raw!r}")
    return Counterstrategy(
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        states=tuple(states),
        q0=(states[0],) if states else (),
        gamma_x=gx,
        gamma_y=gy,
        delta_e=de,
        delta_s={q: tuple(v) for q, v in ds.items()},
        gamma_goals=gg,
    )


# ---------------------------------------------------------------------------


def check_realizability(spec: GR1Spec, state_cap: int = DEFAULT_STATE_CAP):
    """Realizable(winning set) or Unrealizable(losing initial state)."""
    arena = Arena(spec, state_cap)
    return _check_realizability(arena)


def _check_realizability(arena: Arena):
    Z, _ = winning_set(arena)
    if not arena.env_init_x.any():
        return Realizable(
            winning=Z,
            warnings=("no admissible environment initial input; "
                      "specification holds vacuously",),
        )
    bad = _bad_init_input(arena, Z)
    if bad is None:
        return Realizable(winning=Z)
    x0, y0 = bad
    return Unrealizable(bad_init=arena.assignment_of(x0 * arena.Yn + y0))


def _bad_init_input(arena: Arena, Z) -> Optional[Tuple[int, int]]:
    """First (descending) admissible initial input with no winning system
    completion, paired with its lowest initial-condition completion."""
    init_blocks = arena.sys_init.reshape(arena.Xn, arena.Yn)
    win_blocks = Z.reshape(arena.Xn, arena.Yn)
    for x0 in range(arena.Xn - 1, -1, -1):
        if not arena.env_init_x[x0]:
            continue
        ys = init_blocks[x0]
        if (ys & win_blocks[x0]).any():
            continue
        y_choices = np.flatnonzero(ys)
        y0 = int(y_choices[0]) if len(y_choices) else 0
        return x0, y0
    return None


def check_satisfiability(spec: GR1Spec, state_cap: int = DEFAULT_STATE_CAP) -> bool:
    """Cooperative closed-system check: does some run from an admissible
    initial state satisfy both transition relations and visit every system
    and environment goal infinitely often?"""
    arena = Arena(spec, state_cap)
    adj = arena.sys_ok.copy()
    # a move to s' also needs its input part admitted by the env relation
    env_next = np.repeat(arena.env_ok, arena.Yn, axis=1)
    adj &= env_next

    init = arena.sys_init & np.repeat(arena.env_init_x, arena.Yn)
    if not init.any():
        return False
    reach = init.copy()
    while True:
        nxt = adj[reach].any(axis=0)
        new = nxt & ~reach
        if not new.any():
            break
        reach |= new

    nodes = np.flatnonzero(reach)
    g = nx.DiGraph()
    g.add_nodes_from(int(n) for n in nodes)
    rows, cols = np.nonzero(adj[np.ix_(nodes, nodes)])
    g.add_edges_from(
        (int(nodes[r]), int(nodes[c])) for r, c in zip(rows, cols)
    )
    required = arena.sys_goals + arena.env_goals
    for comp in nx.strongly_connected_components(g):
        if len(comp) == 1:
            (only,) = comp
            if not g.has_edge(only, only):
                continue
        idx = np.fromiter(comp, dtype=np.int64)
        if all(goal[idx].any() for goal in required):
            return True
    return False


# ---------------------------------------------------------------------------
# Counterstrategy extraction


def extract_counterstrategy(
    spec: GR1Spec, state_cap: int = DEFAULT_STATE_CAP
) -> Counterstrategy:
    if spec.in_slot("env_goal"):
        raise EnvLivenessUnsupported(
            "counterstrategy extraction requires a specification without "
            "environment liveness assumptions"
        )
    arena = Arena(spec, state_cap)
    Z, per_goal = winning_set(arena)
    result = _check_realizability(arena)
    if isinstance(result, Realizable):
        raise SpecRealizable("specification is realizable")

    goals = arena.sys_goals or [np.ones(arena.S, dtype=bool)]
    prevent = [prevent_forever(arena, B) for B in goals]
    target = np.zeros(arena.S, dtype=bool)
    for V in prevent:
        target |= V
    W, rank = env_attractor(arena, target)

    def mark(s: int) -> int:
        for k, V in enumerate(prevent):
            if V[s]:
                return k + 1
        for j, Zj in enumerate(per_goal):
            if not Zj[s]:
                return j + 1
        return 1

    def pick_input(s: int) -> int:
        r = rank[s]
        if r == 0:
            k = mark(s)
            confined = arena.all_legal_in(prevent[k - 1])
        else:
            layer = (rank >= 0) & (rank < r)
            confined = arena.all_legal_in(layer)
        for x in range(arena.Xn - 1, -1, -1):
            if arena.env_ok[s, x] and confined[s, x]:
                return x
        raise AssertionError(f"no admissible forcing input at state {s}")

    x0, _ = _bad_init_input(arena, Z)
    init_blocks = arena.sys_init.reshape(arena.Xn, arena.Yn)
    roots = [x0 * arena.Yn + int(y) for y in np.flatnonzero(init_blocks[x0])]

    ids: Dict[int, int] = {}
    order: List[int] = []
    frontier = []
    for s in roots:
        if s not in ids:
            ids[s] = len(ids) + 1
            order.append(s)
            frontier.append(s)
    succ_of: Dict[int, List[int]] = {}
    einput_of: Dict[int, int] = {}
    while frontier:
        nxt = []
        for s in frontier:
            if not W[s]:
                raise AssertionError(
                    f"reached state {s} outside the environment winning set"
                )
            x = pick_input(s)
            einput_of[s] = x
            block = arena.sys_ok[s].reshape(arena.Xn, arena.Yn)[x]
            succs = [x * arena.Yn + int(y) for y in np.flatnonzero(block)]
            succ_of[s] = succs
            for s2 in succs:
                if s2 not in ids:
                    ids[s2] = len(ids) + 1
                    order.append(s2)
                    nxt.append(s2)
        frontier = nxt

    return Counterstrategy(
        inputs=tuple(arena.inputs),
        outputs=tuple(arena.outputs),
        states=tuple(ids[s] for s in order),
        q0=tuple(ids[s] for s in roots),
        gamma_x={ids[s]: arena.x_assignment(arena.input_part(s)) for s in order},
        gamma_y={ids[s]: arena.y_assignment(s) for s in order},
        delta_e={ids[s]: arena.x_assignment(einput_of[s]) for s in order},
        delta_s={ids[s]: tuple(ids[s2] for s2 in succ_of[s]) for s in order},
        gamma_goals={ids[s]: mark(s) for s in order},
    )
