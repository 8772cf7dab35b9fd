"""Propositional layer: CNF with clause-group provenance, a complete
clause-learning SAT solver, and group-MUS extraction.

Variables are positive ints, literals signed ints.  Clause groups are keyed
by (statement-id, unroll-step); auxiliary definition clauses stay in the
group of the conjunct that introduced them.  The solver is deliberately
deterministic: branching picks the lowest-index unassigned variable with
phase false, and there are no restarts, so golden tests are stable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import NotUnsat, ResourceLimit
from .model import (
    And,
    Const,
    Iff,
    Implies,
    Not,
    Or,
    TimedAtom,
)

# Clause-product size above which the translation introduces a definition
# variable instead of distributing.
_DISTRIBUTE_LIMIT = 64

# Pseudo statement ids for synthetic groups (state anchors, input pins,
# proposed-move pins).
STATE_ANCHOR_ID = -2
ENV_PIN_ID = -1
MOVE_PIN_ID = -3


@dataclass
class CnfInstance:
    variables: Dict[TimedAtom, int] = field(default_factory=dict)
    clauses: List[List[int]] = field(default_factory=list)
    groups: Dict[Tuple[int, int], List[int]] = field(default_factory=dict)
    n_vars: int = 0

    def var(self, atom: TimedAtom) -> int:
        v = self.variables.get(atom)
        if v is None:
            self.n_vars += 1
            v = self.n_vars
            self.variables[atom] = v
        return v

    def aux_var(self) -> int:
        self.n_vars += 1
        return self.n_vars

    def add_clause(self, lits: List[int], group: Tuple[int, int]) -> None:
        idx = len(self.clauses)
        self.clauses.append(lits)
        self.groups.setdefault(group, []).append(idx)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        for clause in self.clauses:
            lines.append(" ".join(map(str, clause)) + " 0")
        for group in sorted(self.groups):
            for idx in self.groups[group]:
                lines.append(f"c g {group[0]}.{group[1]} {idx}")
        return "\n".join(lines) + "\n"


@dataclass
class MusResult:
    status: str  # "SAT" or "UNSAT"
    model: Optional[Dict[TimedAtom, bool]] = None
    core_groups: frozenset = frozenset()


# ---------------------------------------------------------------------------
# Expression -> CNF


def _nnf(expr, negate=False):
    if isinstance(expr, TimedAtom):
        return ("lit", expr, not negate) if negate else ("lit", expr, True)
    if isinstance(expr, Const):
        return ("const", expr.value != negate)
    if isinstance(expr, Not):
        return _nnf(expr.arg, not negate)
    if isinstance(expr, And):
        parts = [_nnf(a, negate) for a in expr.args]
        return ("or" if negate else "and", parts)
    if isinstance(expr, Or):
        parts = [_nnf(a, negate) for a in expr.args]
        return ("and" if negate else "or", parts)
    if isinstance(expr, Implies):
        return _nnf(Or((Not(expr.lhs), expr.rhs)), negate)
    if isinstance(expr, Iff):
        both = And(
            (
                Or((Not(expr.lhs), expr.rhs)),
                Or((Not(expr.rhs), expr.lhs)),
            )
        )
        return _nnf(both, negate)
    raise TypeError(f"cannot convert {expr!r}")


def _clauses_of(node, cnf: CnfInstance, group) -> List[List[int]]:
    """NNF node -> clause lists; falls back to definition variables when
    plain distribution would blow up."""
    kind = node[0]
    if kind == "lit":
        _, atom, positive = node
        v = cnf.var(atom)
        return [[v if positive else -v]]
    if kind == "const":
        return [] if node[1] else [[]]
    if kind == "and":
        out = []
        for part in node[1]:
            out.extend(_clauses_of(part, cnf, group))
        return out
    if kind == "or":
        parts = [_clauses_of(p, cnf, group) for p in node[1]]
        if any(len(p) == 0 for p in parts):  # some disjunct is TRUE
            return []
        size = 1
        for p in parts:
            size *= len(p)
        if size <= _DISTRIBUTE_LIMIT:
            acc = [[]]
            for p in parts:
                acc = [c1 + c2 for c1 in acc for c2 in p]
            return acc
        # One definition variable per non-unit disjunct (implication-only
        # definition: equisatisfiable, models project faithfully).
        top = []
        extra = []
        for p in parts:
            if len(p) == 1:
                top.extend(p[0])
            else:
                z = cnf.aux_var()
                top.append(z)
                for clause in p:
                    extra.append([-z] + clause)
        return [top] + extra
    raise ValueError(f"bad node {node!r}")


def to_cnf(exprs: Sequence[Tuple[int, int, object]]) -> CnfInstance:
    """Convert (statement-id, step, expression-over-TimedAtom) conjuncts to
    an equisatisfiable CNF with one provenance group per conjunct."""
    cnf = CnfInstance()
    for sid, step, expr in exprs:
        group = (sid, step)
        cnf.groups.setdefault(group, [])
        for clause in _clauses_of(_nnf(expr), cnf, group):
            # de-duplicate literals; drop tautological clauses
            lits = sorted(set(clause), key=abs)
            if any(-l in lits for l in lits):
                continue
            cnf.add_clause(lits, group)
    return cnf


# ---------------------------------------------------------------------------
# CDCL solver


class Solver:
    """Complete clause-learning search with two-literal watching and
    first-UIP learning.  Restart-free; branching order is variable index
    with phase false."""

    def __init__(self, n_vars: int, max_conflicts: Optional[int] = None,
                 deadline: Optional[float] = None):
        self.n_vars = n_vars
        self.max_conflicts = max_conflicts
        self.deadline = deadline
        self.clauses: List[List[int]] = []
        self.watches: Dict[int, List[int]] = {}
        self.assign: List[int] = [0] * (n_vars + 1)  # 0 unset, +1 true, -1 false
        self.level: List[int] = [0] * (n_vars + 1)
        self.reason: List[Optional[int]] = [None] * (n_vars + 1)
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0
        self.root_conflict = False

    # -- clause management

    def add_clause(self, lits: List[int]) -> None:
        lits = sorted(set(lits), key=abs)
        if any(-l in lits for l in lits):
            return
        if not lits:
            self.root_conflict = True
            return
        if len(lits) == 1:
            if not self._enqueue(lits[0], None):
                self.root_conflict = True
            return
        self._attach(lits)

    def _attach(self, lits: List[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches.setdefault(lits[0], []).append(ci)
        self.watches.setdefault(lits[1], []).append(ci)
        return ci

    # -- assignment

    def _value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def _enqueue(self, lit: int, reason_ci: Optional[int]) -> bool:
        val = self._value(lit)
        if val == 1:
            return True
        if val == -1:
            return False
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason_ci
        self.trail.append(lit)
        return True

    def _propagate(self) -> Optional[int]:
        """Unit propagation; returns a conflicting clause index or None."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            neg = -lit
            watching = self.watches.get(neg, [])
            i = 0
            while i < len(watching):
                ci = watching[i]
                clause = self.clauses[ci]
                # make sure clause[1] is the false watch
                if clause[0] == neg:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self._value(first) == 1:
                    i += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self._value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(ci)
                        watching[i] = watching[-1]
                        watching.pop()
                        moved = True
                        break
                if moved:
                    continue
                if self._value(first) == -1:
                    return ci  # conflict
                self._enqueue(first, ci)
                i += 1
        return None

    def _decision_level(self) -> int:
        return len(self.trail_lim)

    def _new_level(self):
        self.trail_lim.append(len(self.trail))

    def _backtrack(self, target: int):
        while self._decision_level() > target:
            start = self.trail_lim.pop()
            for lit in self.trail[start:]:
                v = abs(lit)
                self.assign[v] = 0
                self.reason[v] = None
            del self.trail[start:]
        self.qhead = min(self.qhead, len(self.trail))

    # -- conflict analysis

    def _analyze(self, confl_ci: int) -> Tuple[List[int], int]:
        learnt: List[int] = []
        seen = [False] * (self.n_vars + 1)
        counter = 0
        p = None
        idx = len(self.trail) - 1
        clause = self.clauses[confl_ci]
        cur_level = self._decision_level()
        while True:
            for q in clause:
                # skip the asserted literal when walking a reason clause
                if p is not None and q == p:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    if self.level[v] == cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            seen[abs(p)] = False
            counter -= 1
            idx -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[abs(p)]]
        learnt.insert(0, -p)
        back = 0
        for q in learnt[1:]:
            back = max(back, self.level[abs(q)])
        return learnt, back

    def _analyze_final(self, false_lit: int) -> List[int]:
        """Assumptions responsible for `false_lit` being falsified."""
        out = set()
        v0 = abs(false_lit)
        if self.level[v0] == 0:
            return []
        seen = {v0}
        for lit in reversed(self.trail):
            v = abs(lit)
            if v not in seen:
                continue
            if self.reason[v] is None:
                out.add(lit)  # an assumption decision
            else:
                for q in self.clauses[self.reason[v]]:
                    if self.level[abs(q)] > 0:
                        seen.add(abs(q))
            seen.discard(v)
        return sorted(out, key=abs)

    # -- main search

    def solve(self, assumptions: Sequence[int] = ()) -> Tuple[bool, object]:
        """Returns (True, model-list) or (False, failed-assumption-list).

        The model is indexable by variable (model[v] is a bool).
        """
        self._backtrack(0)
        if self.root_conflict:
            return False, []
        if self._propagate() is not None:
            self.root_conflict = True
            return False, []
        conflicts = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts += 1
                if self.max_conflicts is not None and conflicts > self.max_conflicts:
                    raise ResourceLimit("conflict limit exceeded")
                if self.deadline is not None and time.monotonic() > self.deadline:
                    raise ResourceLimit("time budget exceeded")
                if self._decision_level() == 0:
                    self.root_conflict = True
                    return False, []
                if self._all_decisions_are_assumptions(assumptions):
                    core = self._core_from_conflict(confl)
                    self._backtrack(0)
                    return False, core
                learnt, back = self._analyze(confl)
                if len(learnt) == 1:
                    # assert learned units at the root so they are never
                    # mistaken for assumption decisions; popped assumptions
                    # are re-decided by the main loop
                    self._backtrack(0)
                    if not self._enqueue(learnt[0], None):
                        self.root_conflict = True
                        return False, []
                else:
                    self._backtrack(back)
                    ci = self._attach(learnt)
                    self._enqueue(learnt[0], ci)
                continue
            # choose next assumption or branch
            lit = self._next_assumption(assumptions)
            if lit == 0:
                lit = self._branch_lit()
                if lit is None:
                    model = [False] * (self.n_vars + 1)
                    for v in range(1, self.n_vars + 1):
                        model[v] = self.assign[v] == 1
                    result = model
                    self._backtrack(0)
                    return True, result
                self._new_level()
                self._enqueue(lit, None)
            elif lit is not None:
                val = self._value(lit)
                if val == -1:
                    core = self._analyze_final(lit)
                    if lit not in core:
                        core.append(lit)
                    self._backtrack(0)
                    return False, sorted(set(core), key=abs)
                self._new_level()
                if val == 0:
                    self._enqueue(lit, None)

    def _next_assumption(self, assumptions) -> Optional[int]:
        dl = self._decision_level()
        if dl < len(assumptions):
            return assumptions[dl]
        return 0

    def _all_decisions_are_assumptions(self, assumptions) -> bool:
        return self._decision_level() <= len(assumptions)

    def _core_from_conflict(self, confl_ci: int) -> List[int]:
        out = set()
        seen = set()
        for q in self.clauses[confl_ci]:
            if self.level[abs(q)] > 0:
                seen.add(abs(q))
        for lit in reversed(self.trail):
            v = abs(lit)
            if v not in seen:
                continue
            if self.reason[v] is None:
                out.add(lit)
            else:
                for q in self.clauses[self.reason[v]]:
                    if self.level[abs(q)] > 0:
                        seen.add(abs(q))
            seen.discard(v)
        return sorted(out, key=abs)

    def _branch_lit(self) -> Optional[int]:
        for v in range(1, self.n_vars + 1):
            if self.assign[v] == 0:
                return -v  # phase false
        return None


# ---------------------------------------------------------------------------
# Public operations


def solve(cnf: CnfInstance, assumptions: Sequence[int] = (),
          max_conflicts: Optional[int] = None,
          deadline: Optional[float] = None) -> MusResult:
    solver = Solver(cnf.n_vars, max_conflicts=max_conflicts, deadline=deadline)
    for clause in cnf.clauses:
        solver.add_clause(list(clause))
    ok, payload = solver.solve(list(assumptions))
    if ok:
        model = {atom: payload[v] for atom, v in cnf.variables.items()}
        return MusResult("SAT", model=model)
    return MusResult("UNSAT")


def extract_mus(cnf: CnfInstance, max_conflicts: Optional[int] = None,
                deadline: Optional[float] = None) -> MusResult:
    """Group-minimal unsatisfiable subset via selector assumptions plus a
    deletion shrink pass scanning groups in ascending order."""
    group_keys = sorted(cnf.groups)
    n_base = cnf.n_vars
    selector = {g: n_base + i + 1 for i, g in enumerate(group_keys)}
    solver = Solver(n_base + len(group_keys), max_conflicts=max_conflicts,
                    deadline=deadline)
    for g in group_keys:
        for idx in cnf.groups[g]:
            solver.add_clause(cnf.clauses[idx] + [-selector[g]])
    ok, payload = solver.solve([selector[g] for g in group_keys])
    if ok:
        raise NotUnsat("instance is satisfiable")
    # Deletion pass over the full group set, not just the first conflict
    # core: scanning in ascending order makes the result deterministic and
    # prefers dropping low-numbered statements when several minimal subsets
    # exist.
    core = set(group_keys)
    for g in group_keys:
        trial = core - {g}
        ok, _ = solver.solve([selector[h] for h in sorted(trial)])
        if not ok:
            core = trial
    return MusResult("UNSAT", core_groups=frozenset(core))
