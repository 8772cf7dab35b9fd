"""Abstract syntax for GR(1) robot specifications.

A specification is a flat list of statements, each holding one conjunct of
the usual six-slot decomposition (env/sys x init/safety/liveness).  Every
downstream artifact (CNF groups, cores, game states) refers to statements by
their integer id, so ids are stable under slicing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, Optional, Union

from .errors import UnknownStatementId

SLOTS = ("env_init", "env_trans", "env_goal", "sys_init", "sys_trans", "sys_goal")


@dataclass(frozen=True)
class Proposition:
    name: str
    kind: str  # "input" or "output"

    def __post_init__(self):
        if self.kind not in ("input", "output"):
            raise ValueError(f"bad proposition kind {self.kind!r}")


# ---------------------------------------------------------------------------
# Boolean expressions.  Atoms are either spec-level (name + primed flag) or
# time-indexed (name + step); the connective nodes are shared between both.


@dataclass(frozen=True)
class Atom:
    name: str
    primed: bool = False


@dataclass(frozen=True)
class TimedAtom:
    name: str
    step: int


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "BoolExpr"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    lhs: "BoolExpr"
    rhs: "BoolExpr"


@dataclass(frozen=True)
class Iff:
    lhs: "BoolExpr"
    rhs: "BoolExpr"


BoolExpr = Union[Atom, TimedAtom, Const, Not, And, Or, Implies, Iff]

TRUE = Const(True)
FALSE = Const(False)


def conj(args: Iterable[BoolExpr]) -> BoolExpr:
    args = tuple(a for a in args if a != TRUE)
    if any(a == FALSE for a in args):
        return FALSE
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(args)


def disj(args: Iterable[BoolExpr]) -> BoolExpr:
    args = tuple(a for a in args if a != FALSE)
    if any(a == TRUE for a in args):
        return TRUE
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(args)


def atoms_of(expr: BoolExpr) -> Iterator:
    """Yield every Atom/TimedAtom leaf (with repetition)."""
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, (Atom, TimedAtom)):
            yield e
        elif isinstance(e, Not):
            stack.append(e.arg)
        elif isinstance(e, (And, Or)):
            stack.extend(e.args)
        elif isinstance(e, (Implies, Iff)):
            stack.append(e.lhs)
            stack.append(e.rhs)


def map_atoms(expr: BoolExpr, fn: Callable) -> BoolExpr:
    if isinstance(expr, (Atom, TimedAtom)):
        return fn(expr)
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Not):
        return Not(map_atoms(expr.arg, fn))
    if isinstance(expr, And):
        return And(tuple(map_atoms(a, fn) for a in expr.args))
    if isinstance(expr, Or):
        return Or(tuple(map_atoms(a, fn) for a in expr.args))
    if isinstance(expr, Implies):
        return Implies(map_atoms(expr.lhs, fn), map_atoms(expr.rhs, fn))
    if isinstance(expr, Iff):
        return Iff(map_atoms(expr.lhs, fn), map_atoms(expr.rhs, fn))
    raise TypeError(f"not an expression: {expr!r}")


def evaluate(expr: BoolExpr, lookup: Callable) -> bool:
    """Evaluate under a truth assignment; `lookup` maps an atom to a bool."""
    if isinstance(expr, (Atom, TimedAtom)):
        return bool(lookup(expr))
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Not):
        return not evaluate(expr.arg, lookup)
    if isinstance(expr, And):
        return all(evaluate(a, lookup) for a in expr.args)
    if isinstance(expr, Or):
        return any(evaluate(a, lookup) for a in expr.args)
    if isinstance(expr, Implies):
        return (not evaluate(expr.lhs, lookup)) or evaluate(expr.rhs, lookup)
    if isinstance(expr, Iff):
        return evaluate(expr.lhs, lookup) == evaluate(expr.rhs, lookup)
    raise TypeError(f"not an expression: {expr!r}")


def at_step(expr: BoolExpr, step: int) -> BoolExpr:
    """Instantiate a spec-level expression at a time step.

    Unprimed atoms land on `step`, primed (next) atoms on `step + 1`.
    """
    return map_atoms(
        expr, lambda a: TimedAtom(a.name, step + 1 if a.primed else step)
    )


def has_primed(expr: BoolExpr) -> bool:
    return any(a.primed for a in atoms_of(expr) if isinstance(a, Atom))


_PREC = {"iff": 1, "implies": 2, "or": 3, "and": 4, "not": 5, "atom": 6}


def format_expr(expr: BoolExpr) -> str:
    def fmt(e, parent_prec):
        if isinstance(e, Atom):
            s = f"next({e.name})" if e.primed else e.name
            return s
        if isinstance(e, TimedAtom):
            return f"{e.name}@{e.step}"
        if isinstance(e, Const):
            return "TRUE" if e.value else "FALSE"
        if isinstance(e, Not):
            return "!" + fmt(e.arg, _PREC["not"])
        if isinstance(e, And):
            s = " & ".join(fmt(a, _PREC["and"]) for a in e.args)
            return f"({s})" if parent_prec > _PREC["and"] else s
        if isinstance(e, Or):
            s = " | ".join(fmt(a, _PREC["or"]) for a in e.args)
            return f"({s})" if parent_prec > _PREC["or"] else s
        if isinstance(e, Implies):
            s = f"{fmt(e.lhs, _PREC['implies'] + 1)} -> {fmt(e.rhs, _PREC['implies'])}"
            return f"({s})" if parent_prec > _PREC["implies"] else s
        if isinstance(e, Iff):
            s = f"{fmt(e.lhs, _PREC['iff'] + 1)} <-> {fmt(e.rhs, _PREC['iff'] + 1)}"
            return f"({s})" if parent_prec > _PREC["iff"] else s
        raise TypeError(f"not an expression: {e!r}")

    return fmt(expr, 0)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Statement:
    id: int
    text: str
    span: tuple  # (line, (col_start, col_end))
    slot: str
    expr: BoolExpr
    tag: Optional[str] = None  # e.g. "topology" for synthetic conjuncts

    def __post_init__(self):
        if self.slot not in SLOTS:
            raise ValueError(f"bad slot {self.slot!r}")


@dataclass(frozen=True)
class GR1Spec:
    inputs: tuple  # of Proposition
    outputs: tuple  # of Proposition
    statements: tuple  # of Statement
    topology: Optional[object] = None  # Workspace, if a [TOPOLOGY] section was given
    warnings: tuple = ()

    @property
    def propositions(self) -> tuple:
        return self.inputs + self.outputs

    def prop_names(self) -> list:
        return [p.name for p in self.propositions]

    def in_slot(self, slot: str) -> list:
        return [s for s in self.statements if s.slot == slot]

    def statement(self, sid: int) -> Statement:
        for s in self.statements:
            if s.id == sid:
                return s
        raise UnknownStatementId(sid)

    def sys_goal_by_index(self, k: int) -> Statement:
        """k is 1-based among sys_goal statements."""
        goals = self.in_slot("sys_goal")
        if not 1 <= k <= len(goals):
            raise UnknownStatementId(f"sys goal index {k}")
        return goals[k - 1]

    def ids(self) -> set:
        return {s.id for s in self.statements}

    def pretty(self) -> str:
        """Render back to the textual input format (round-trip parseable)."""
        out = []
        if self.inputs:
            out.append("[INPUT]")
            out.extend(p.name for p in self.inputs)
        out.append("[OUTPUT]")
        out.extend(p.name for p in self.outputs)
        section_of = {
            "env_init": "[ENV_INIT]",
            "sys_init": "[SYS_INIT]",
            "env_trans": "[ENV_TRANS]",
            "sys_trans": "[SYS_TRANS]",
            "env_goal": "[ENV_LIVENESS]",
            "sys_goal": "[SYS_LIVENESS]",
        }
        for slot in ("env_init", "env_trans", "env_goal", "sys_init", "sys_trans", "sys_goal"):
            stmts = [s for s in self.in_slot(slot) if s.tag != "topology"]
            if stmts:
                out.append(section_of[slot])
                out.extend(format_expr(s.expr) for s in stmts)
        if self.topology is not None:
            out.append("[TOPOLOGY]")
            out.extend(self.topology.lines())
        return "\n".join(out) + "\n"


def statement_slice(spec: GR1Spec, keep: set) -> GR1Spec:
    """Drop every statement whose id is not in `keep`; ids are preserved."""
    unknown = set(keep) - spec.ids()
    if unknown:
        raise UnknownStatementId(sorted(unknown))
    return replace(
        spec, statements=tuple(s for s in spec.statements if s.id in keep)
    )
