"""Time-indexed instantiation of specification conjuncts.

Every operation returns (statement-id, step, expression-over-TimedAtom)
triples so clause provenance survives CNF conversion.  A depth-d unrolling
instantiates each safety conjunct at steps 0..d and therefore mentions
atoms up to step d+1.  Environment-safety conjuncts are never included in
satisfiability unrollings; pinned input sequences already respect them.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .errors import NotDeadlocked, UnknownGoal
from .model import GR1Spec, TimedAtom, at_step, conj
from .sat import ENV_PIN_ID, STATE_ANCHOR_ID

Triple = Tuple[int, int, object]


def unroll_from_init(spec: GR1Spec, depth: int) -> List[Triple]:
    """sys_init at step 0 plus every sys_trans conjunct at steps 0..depth."""
    out: List[Triple] = []
    for s in spec.in_slot("sys_init"):
        out.append((s.id, 0, at_step(s.expr, 0)))
    for i in range(depth + 1):
        for s in spec.in_slot("sys_trans"):
            out.append((s.id, i, at_step(s.expr, i)))
    return out


def goal_clause(spec: GR1Spec, k: int, depth: int) -> Triple:
    """The k-th (1-based) system liveness required at the final step."""
    try:
        stmt = spec.sys_goal_by_index(k)
    except Exception as exc:
        raise UnknownGoal(k) from exc
    return (stmt.id, depth, at_step(stmt.expr, depth))


def _assignment_expr(state: Dict[str, bool], step: int):
    lits = []
    from .model import Not

    for name in sorted(state):
        atom = TimedAtom(name, step)
        lits.append(atom if state[name] else Not(atom))
    return conj(lits)


def state_formula(gamma_x: Dict[str, bool], gamma_y: Dict[str, bool]):
    """Literal-complete step-0 conjunction describing a counterstrategy
    state; both label maps must be total over their proposition sets."""
    full = dict(gamma_x)
    full.update(gamma_y)
    return _assignment_expr(full, 0)


def deadlock_formula(cs, q, spec: GR1Spec) -> List[Triple]:
    """Single-step instance proving state q deadlocked: the state at step 0,
    inputs pinned to delta_e(q) at step 1, every sys_trans conjunct once."""
    x_next = cs.delta_e[q]
    if cs.successors(q, x_next):
        raise NotDeadlocked(q)
    out: List[Triple] = [
        (STATE_ANCHOR_ID, 0, state_formula(cs.gamma_x[q], cs.gamma_y[q])),
        (ENV_PIN_ID, 1, _assignment_expr(x_next, 1)),
    ]
    for s in spec.in_slot("sys_trans"):
        out.append((s.id, 0, at_step(s.expr, 0)))
    return out


def env_unrolling(cs, cycle_states: Sequence[int], depth: int) -> List[Dict[str, bool]]:
    """Input assignment per step 0..depth, cycling through the cycle's
    state labels (index i mod cycle length)."""
    period = len(cycle_states)
    return [
        dict(cs.gamma_x[cycle_states[i % period]]) for i in range(depth + 1)
    ]


def pinned_input_triples(pins: Sequence[Dict[str, bool]]) -> List[Triple]:
    return [
        (ENV_PIN_ID, i, _assignment_expr(x, i)) for i, x in enumerate(pins)
    ]


def unroll_from_state(cs, q, spec: GR1Spec, depth: int) -> List[Triple]:
    """State anchor at step 0 plus sys_trans at steps 0..depth."""
    out: List[Triple] = [
        (STATE_ANCHOR_ID, 0, state_formula(cs.gamma_x[q], cs.gamma_y[q]))
    ]
    for i in range(depth + 1):
        for s in spec.in_slot("sys_trans"):
            out.append((s.id, i, at_step(s.expr, i)))
    return out


def livelock_formula(cs, goal_index: int, cycle_states: Sequence[int],
                     spec: GR1Spec, depth: int) -> List[Triple]:
    """Inputs pinned to the cycle through step depth+1, safety unrolled to
    depth from the counterstrategy's initial state, the blocked goal at the
    final step."""
    pins = env_unrolling(cs, cycle_states, depth + 1)
    out = pinned_input_triples(pins)
    out.extend(unroll_from_state(cs, cs.q0[0], spec, depth))
    out.append(goal_clause(spec, goal_index, depth))
    return out
