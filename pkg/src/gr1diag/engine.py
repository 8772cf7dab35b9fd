"""End-to-end diagnosis: classification, the three core-finding
algorithms, and projection of CNF cores back to source statements.

Verdicts: Synthesizable, Unsatisfiable (fails even cooperatively),
Unrealizable (fails only against an adversarial environment).  Failure
modes: Deadlock (a reachable state with no legal system move) and
Livelock (some system goal is kept unreachable).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Set, Tuple

from . import sat
from .analysis import (
    deadlocked_states,
    diameter_bound,
    is_countertrace,
    preventing_cycles,
    recurrent_states,
)
from .arena import DEFAULT_STATE_CAP
from .errors import (
    AnalysisTimeout,
    DepthExhausted,
    EnvLivenessUnsupported,
    NotUnsatAtDepth,
    NotUnsynthesizable,
    ResourceLimit,
)
from .game import (
    Counterstrategy,
    Realizable,
    Unrealizable,
    check_realizability,
    check_satisfiability,
    extract_counterstrategy,
)
from .model import (
    Atom,
    GR1Spec,
    Not,
    Statement,
    conj,
)
from .unroll import (
    deadlock_formula,
    goal_clause,
    livelock_formula,
    unroll_from_init,
)

DEFAULT_MAX_DEPTH = 15
DEFAULT_BUDGET_MS = 30000


@dataclass(frozen=True)
class CoreStatement:
    id: int
    text: str
    span: tuple
    tags: tuple = ()


@dataclass(frozen=True)
class Artifacts:
    cnfs: tuple = ()
    counterstrategy: Optional[Counterstrategy] = None


@dataclass(frozen=True)
class Diagnosis:
    verdict: str  # Synthesizable | Unsatisfiable | Unrealizable
    failure_mode: Optional[str] = None  # Deadlock | Livelock
    livelocked_goal: Optional[int] = None  # goal statement id
    bad_init: Optional[Tuple[Tuple[str, bool], ...]] = None
    core: Tuple[CoreStatement, ...] = ()
    method: Optional[str] = None
    depth_used: Optional[int] = None
    notes: Tuple[str, ...] = ()
    flags: Tuple[str, ...] = ()
    warnings: Tuple[str, ...] = ()
    artifacts: Optional[Artifacts] = field(
        default=None, compare=False, repr=False
    )

    def core_ids(self) -> Set[int]:
        return {c.id for c in self.core}

    def to_report(self) -> dict:
        return {
            "schema": 1,
            "verdict": self.verdict,
            "failure_mode": self.failure_mode,
            "livelocked_goal": self.livelocked_goal,
            "bad_init": (
                None if self.bad_init is None
                else {name: value for name, value in self.bad_init}
            ),
            "core": [
                {
                    "id": c.id,
                    "text": c.text,
                    "span": [c.span[0], [c.span[1][0], c.span[1][1]]],
                    "tags": list(c.tags),
                }
                for c in self.core
            ],
            "method": self.method,
            "depth_used": self.depth_used,
            "notes": list(self.notes),
            "flags": list(self.flags),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_report(cls, doc: dict) -> "Diagnosis":
        if doc.get("schema") != 1:
            raise ValueError(f"unsupported report schema {doc.get('schema')!r}")
        return cls(
            verdict=doc["verdict"],
            failure_mode=doc["failure_mode"],
            livelocked_goal=doc["livelocked_goal"],
            bad_init=(
                None if doc["bad_init"] is None
                else tuple(sorted(doc["bad_init"].items()))
            ),
            core=tuple(
                CoreStatement(
                    id=c["id"],
                    text=c["text"],
                    span=(c["span"][0], (c["span"][1][0], c["span"][1][1])),
                    tags=tuple(c["tags"]),
                )
                for c in doc["core"]
            ),
            method=doc["method"],
            depth_used=doc["depth_used"],
            notes=tuple(doc["notes"]),
            flags=tuple(doc["flags"]),
            warnings=tuple(doc["warnings"]),
        )


# ---------------------------------------------------------------------------
# Helpers


def _deadline(budget_ms: int) -> float:
    return time.monotonic() + budget_ms / 1000.0


def _solve_phase(phase: str, budget_ms: int, fn):
    try:
        return fn(_deadline(budget_ms))
    except ResourceLimit as exc:
        raise AnalysisTimeout(phase, budget_ms) from exc


def map_back(spec: GR1Spec, groups) -> Tuple[List[CoreStatement], List[str]]:
    """Project (statement-id, step) groups to statements; synthetic groups
    become notes, never core members."""
    ids = sorted({sid for sid, _ in groups if sid > 0})
    notes = []
    synth_steps: Dict[int, List[int]] = {}
    for sid, step in groups:
        if sid <= 0:
            synth_steps.setdefault(sid, []).append(step)
    if sat.STATE_ANCHOR_ID in synth_steps:
        notes.append("core uses the state anchor (current-state pinning)")
    if sat.ENV_PIN_ID in synth_steps:
        steps = sorted(synth_steps[sat.ENV_PIN_ID])
        notes.append(
            f"core uses environment input pins at steps {steps[0]}..{steps[-1]}"
        )
    if sat.MOVE_PIN_ID in synth_steps:
        notes.append("core uses the proposed-move pin")
    core = []
    for sid in ids:
        stmt = spec.statement(sid)
        tags = []
        if stmt.tag == "topology":
            tags.append("topology")
        if stmt.slot == "sys_goal":
            tags.append("goal")
        if stmt.slot == "sys_init":
            tags.append("init")
        core.append(CoreStatement(sid, stmt.text, stmt.span, tuple(tags)))
    return core, notes


def _meaning_flags(spec: GR1Spec, core: Sequence[CoreStatement]) -> Tuple[str, ...]:
    """A core whose only safety content is workspace topology explains
    nothing about the authored requirements."""
    for c in core:
        stmt = spec.statement(c.id)
        if stmt.slot == "sys_trans" and stmt.tag != "topology":
            return ()
    return ("possibly-not-meaningful",)


def _groups_satisfiable(cnf: sat.CnfInstance, groups, deadline) -> bool:
    solver = sat.Solver(cnf.n_vars, deadline=deadline)
    for g in groups:
        for idx in cnf.groups.get(g, []):
            solver.add_clause(list(cnf.clauses[idx]))
    ok, _ = solver.solve()
    return ok


def _statement_minimality_notes(
    instances: Sequence[Tuple[sat.CnfInstance, frozenset]],
    core_ids: Set[int],
    budget_ms: int,
) -> Tuple[str, ...]:
    """Detect statements whose removal (from every instance at once)
    keeps all instances unsatisfiable; such a core is only group-minimal."""
    removable = []
    for sid in sorted(core_ids):
        still_unsat = True
        for cnf, groups in instances:
            trial = [g for g in groups if g[0] != sid]
            if _groups_satisfiable(cnf, trial, _deadline(budget_ms)):
                still_unsat = False
                break
        if still_unsat:
            removable.append(sid)
    if removable:
        return (
            "group-minimal: removing statement(s) "
            f"{removable} still leaves the instance(s) unsatisfiable",
        )
    return ()


def _sorted_assignment(assignment: Dict[str, bool]):
    return tuple(sorted(assignment.items()))


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class Classification:
    verdict: str
    failure_mode: Optional[str]
    goal_index: Optional[int]  # 1-based among sys_goal statements
    bad_init: Optional[Dict[str, bool]]
    counterstrategy: Optional[Counterstrategy]
    warnings: Tuple[str, ...] = ()
    notes: Tuple[str, ...] = ()


def classify(spec: GR1Spec, state_cap: int = DEFAULT_STATE_CAP) -> Classification:
    result = check_realizability(spec, state_cap)
    if isinstance(result, Realizable):
        return Classification(
            "Synthesizable", None, None, None, None, warnings=result.warnings
        )
    bad_init = result.bad_init
    verdict = (
        "Unrealizable" if check_satisfiability(spec, state_cap)
        else "Unsatisfiable"
    )
    notes = []
    try:
        cs = extract_counterstrategy(spec, state_cap)
    except EnvLivenessUnsupported:
        cs = None
        notes.append(
            "environment liveness present; counterstrategy-based analysis "
            "skipped in favor of iterated realizability"
        )
    if cs is None or not cs.states:
        mode, goal_index = "Deadlock", None
        if cs is not None and not cs.states:
            notes.append("no system completion of the initial conditions")
        if cs is None:
            mode, goal_index = _mode_without_counterstrategy(spec, state_cap, bad_init)
    elif deadlocked_states(cs):
        mode, goal_index = "Deadlock", None
    else:
        mode = "Livelock"
        recurrent = recurrent_states(cs)
        marks = [cs.gamma_goals[q] for q in recurrent]
        goal_index = min(marks or cs.gamma_goals.values())
    return Classification(
        verdict, mode, goal_index, bad_init, cs, notes=tuple(notes)
    )


def _mode_without_counterstrategy(spec, state_cap, bad_init):
    """Fallback when no counterstrategy is available: deadlock iff the
    environment can force a dead end from the bad initial state."""
    from .arena import Arena, env_attractor, winning_set
    import numpy as np

    arena = Arena(spec, state_cap)
    dead, _ = env_attractor(arena, np.zeros(arena.S, dtype=bool))
    s0 = arena.state_of(bad_init)
    if dead[s0]:
        return "Deadlock", None
    _, per_goal = winning_set(arena)
    for j, Zj in enumerate(per_goal):
        if not Zj[s0]:
            return "Livelock", j + 1
    return "Livelock", 1


# ---------------------------------------------------------------------------
# Algorithm 1: unsatisfiable cores via SAT unrolling


def unsat_bmc(
    spec: GR1Spec,
    max_depth: int,
    reason: str,
    goal_index: Optional[int] = None,
    budget_ms: int = DEFAULT_BUDGET_MS,
) -> Diagnosis:
    if reason == "deadlock":
        for d in range(0, max_depth + 1):
            cnf = sat.to_cnf(unroll_from_init(spec, d))
            res = _solve_phase(
                "unsat-unroll", budget_ms,
                lambda dl, cnf=cnf: sat.solve(cnf, deadline=dl),
            )
            if res.status == "UNSAT":
                return _finish_sat_core(
                    spec, [cnf], reason, d, budget_ms, method="SatUnroll"
                )
        raise DepthExhausted(
            f"no unsatisfiable unrolling up to depth {max_depth}"
        )
    if reason != "livelock":
        raise ValueError(f"bad reason {reason!r}")
    triples = unroll_from_init(spec, max_depth)
    triples.append(goal_clause(spec, goal_index, max_depth))
    cnf = sat.to_cnf(triples)
    res = _solve_phase(
        "unsat-unroll", budget_ms, lambda dl: sat.solve(cnf, deadline=dl)
    )
    if res.status == "SAT":
        raise NotUnsatAtDepth(
            f"goal instance satisfiable at depth {max_depth}; the depth may "
            "not match the failure or the spec is not livelocked"
        )
    return _finish_sat_core(
        spec, [cnf], reason, max_depth, budget_ms, method="SatUnroll"
    )


def _finish_sat_core(spec, cnfs, reason, depth, budget_ms, method,
                     extra_notes=()) -> Diagnosis:
    instances = []
    for cnf in cnfs:
        mus = _solve_phase(
            "mus-extraction", budget_ms,
            lambda dl, cnf=cnf: sat.extract_mus(cnf, deadline=dl),
        )
        instances.append((cnf, mus.core_groups))
    union_groups = set()
    for _, groups in instances:
        union_groups |= groups
    core, notes = map_back(spec, union_groups)
    notes = list(extra_notes) + notes
    notes.extend(
        _statement_minimality_notes(
            instances, {c.id for c in core}, budget_ms
        )
    )
    return Diagnosis(
        verdict="",  # filled by diagnose()
        core=tuple(core),
        method=method,
        depth_used=depth,
        notes=tuple(notes),
        flags=_meaning_flags(spec, core),
        artifacts=Artifacts(cnfs=tuple(cnfs)),
    )


# ---------------------------------------------------------------------------
# Algorithm 2: unrealizable cores via counterstrategy SAT


def unreal_bmc(
    spec: GR1Spec,
    cs: Counterstrategy,
    reason: str,
    goal_index: Optional[int] = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
    budget_ms: int = DEFAULT_BUDGET_MS,
    bad_init: Optional[Dict[str, bool]] = None,
    state_cap: int = DEFAULT_STATE_CAP,
) -> Diagnosis:
    if reason == "deadlock":
        cnfs = [
            sat.to_cnf(deadlock_formula(cs, q, spec))
            for q in sorted(deadlocked_states(cs))
        ]
        diag = _finish_sat_core(
            spec, cnfs, reason, None, budget_ms, method="CounterstrategySat"
        )
        return replace(diag, artifacts=replace(diag.artifacts, counterstrategy=cs))
    if reason != "livelock":
        raise ValueError(f"bad reason {reason!r}")
    if not is_countertrace(cs):
        diag = unreal_iterate(
            spec, bad_init, goal_index, budget_ms=budget_ms,
            state_cap=state_cap,
        )
        notes = diag.notes + (
            "counterstrategy is not a countertrace; fell back to iterated "
            "realizability",
        )
        return replace(diag, notes=notes)
    depth = max(max_depth, diameter_bound(cs))
    cnfs = []
    skipped = []
    for cycle in preventing_cycles(cs, goal_index):
        cnf = sat.to_cnf(
            livelock_formula(cs, goal_index, cycle, spec, depth)
        )
        res = _solve_phase(
            "livelock-unroll", budget_ms,
            lambda dl, cnf=cnf: sat.solve(cnf, deadline=dl),
        )
        if res.status == "SAT":
            skipped.append(cycle)
            continue
        cnfs.append(cnf)
    notes = ()
    if skipped:
        notes = (
            f"{len(skipped)} preventing cycle(s) produced satisfiable "
            f"instances at depth {depth} and were skipped",
        )
    if not cnfs:
        raise NotUnsatAtDepth(
            f"every preventing-cycle instance was satisfiable at depth {depth}"
        )
    diag = _finish_sat_core(
        spec, cnfs, reason, depth, budget_ms,
        method="CounterstrategySat", extra_notes=notes,
    )
    return replace(diag, artifacts=replace(diag.artifacts, counterstrategy=cs))


# ---------------------------------------------------------------------------
# Algorithm 3: iterated realizability


def _anchor_statements(spec: GR1Spec, bad_init: Dict[str, bool], first_id: int):
    input_names = [p.name for p in spec.inputs]
    output_names = [p.name for p in spec.outputs]

    def pin(names):
        lits = [
            Atom(n) if bad_init[n] else Not(Atom(n)) for n in names
        ]
        return conj(lits)

    out = []
    if input_names:
        out.append(Statement(
            first_id, "anchor: initial inputs", (0, (0, 0)), "env_init",
            pin(input_names), tag="anchor",
        ))
    out.append(Statement(
        first_id + 1, "anchor: initial outputs", (0, (0, 0)), "sys_init",
        pin(output_names), tag="anchor",
    ))
    return out


def _anchored_spec(
    spec: GR1Spec,
    bad_init: Dict[str, bool],
    goal_index: Optional[int],
    trans_ids: Set[int],
) -> GR1Spec:
    """The spec pinned to start exactly at bad_init, keeping only the
    given safety conjuncts and (at most) the blocked goal."""
    stmts = list(_anchor_statements(
        spec, bad_init, max(spec.ids(), default=0) + 1
    ))
    for s in spec.statements:
        if s.slot in ("env_trans", "env_goal"):
            stmts.append(s)
        elif s.slot == "sys_trans" and s.id in trans_ids:
            stmts.append(s)
        elif s.slot == "sys_goal" and goal_index is not None:
            if s.id == spec.sys_goal_by_index(goal_index).id:
                stmts.append(s)
    return replace(spec, statements=tuple(stmts))


def unreal_iterate(
    spec: GR1Spec,
    bad_init: Dict[str, bool],
    goal_index: Optional[int],
    budget_ms: int = DEFAULT_BUDGET_MS,
    state_cap: int = DEFAULT_STATE_CAP,
) -> Diagnosis:
    trans_ids = {s.id for s in spec.in_slot("sys_trans")}
    anchored = _anchored_spec(spec, bad_init, goal_index, trans_ids)
    if isinstance(check_realizability(anchored, state_cap), Realizable):
        raise NotUnsynthesizable(
            "anchored specification is synthesizable; nothing to diagnose"
        )
    # single committed sweep in ascending id order; a conjunct is dropped
    # permanently when its removal leaves the spec unsynthesizable
    keep = set(trans_ids)
    for sid in sorted(trans_ids):
        trial = keep - {sid}
        candidate = _anchored_spec(spec, bad_init, goal_index, trial)
        if not isinstance(check_realizability(candidate, state_cap), Realizable):
            keep = trial
    core_ids = sorted(keep)
    if goal_index is not None:
        core_ids.append(spec.sys_goal_by_index(goal_index).id)
    core = []
    for sid in sorted(core_ids):
        stmt = spec.statement(sid)
        tags = []
        if stmt.tag == "topology":
            tags.append("topology")
        if stmt.slot == "sys_goal":
            tags.append("goal")
        core.append(CoreStatement(sid, stmt.text, stmt.span, tuple(tags)))
    notes = (
        "core anchored at the losing initial state; initial-condition "
        "statements are represented by bad_init rather than core members",
    )
    return Diagnosis(
        verdict="",
        bad_init=_sorted_assignment(bad_init),
        core=tuple(core),
        method="IteratedRealizability",
        notes=notes,
        flags=_meaning_flags(spec, core),
    )


# ---------------------------------------------------------------------------
# Top-level orchestration


def diagnose(
    spec: GR1Spec,
    max_depth: int = DEFAULT_MAX_DEPTH,
    budget_ms: int = DEFAULT_BUDGET_MS,
    state_cap: int = DEFAULT_STATE_CAP,
) -> Diagnosis:
    cls = classify(spec, state_cap)
    if cls.verdict == "Synthesizable":
        return Diagnosis(
            verdict="Synthesizable",
            warnings=cls.warnings + spec.warnings,
            notes=cls.notes,
        )
    goal_stmt_id = (
        spec.sys_goal_by_index(cls.goal_index).id
        if cls.goal_index is not None else None
    )
    if cls.verdict == "Unsatisfiable":
        diag = unsat_bmc(
            spec, max_depth, cls.failure_mode.lower(),
            goal_index=cls.goal_index, budget_ms=budget_ms,
        )
    elif cls.counterstrategy is not None and cls.counterstrategy.states:
        diag = unreal_bmc(
            spec, cls.counterstrategy, cls.failure_mode.lower(),
            goal_index=cls.goal_index, max_depth=max_depth,
            budget_ms=budget_ms, bad_init=cls.bad_init,
            state_cap=state_cap,
        )
    else:
        diag = unreal_iterate(
            spec, cls.bad_init, cls.goal_index,
            budget_ms=budget_ms, state_cap=state_cap,
        )
    bad_init = diag.bad_init
    if bad_init is None and cls.bad_init is not None:
        bad_init = _sorted_assignment(cls.bad_init)
    artifacts = diag.artifacts
    if artifacts is not None and artifacts.counterstrategy is None:
        artifacts = replace(artifacts, counterstrategy=cls.counterstrategy)
    elif artifacts is None:
        artifacts = Artifacts(counterstrategy=cls.counterstrategy)
    return replace(
        diag,
        verdict=cls.verdict,
        failure_mode=cls.failure_mode,
        livelocked_goal=goal_stmt_id,
        bad_init=bad_init,
        notes=cls.notes + diag.notes,
        warnings=spec.warnings,
        artifacts=artifacts,
    )
