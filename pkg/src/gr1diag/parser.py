"""Parser for the sectioned specification text format.

One statement per line, `#` comments, sections [INPUT] [OUTPUT] [ENV_INIT]
[SYS_INIT] [ENV_TRANS] [SYS_TRANS] [ENV_LIVENESS] [SYS_LIVENESS] [TOPOLOGY].
Operators: ! & | -> <->, next(.), TRUE/FALSE, parentheses.  Precedence
! > & > | > -> > <->, with -> right-associative.  next() is distributed
inward onto atoms so downstream code only ever sees primed atoms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    NextInInitOrGoal,
    SpecSyntaxError,
    UndeclaredProposition,
    UndeclaredRegion,
)
from .model import (
    And,
    Atom,
    Const,
    GR1Spec,
    Iff,
    Implies,
    Not,
    Or,
    Proposition,
    Statement,
    atoms_of,
    has_primed,
)
from .workspace import Workspace, compile_topology

_SECTIONS = {
    "[INPUT]": "input",
    "[OUTPUT]": "output",
    "[ENV_INIT]": "env_init",
    "[SYS_INIT]": "sys_init",
    "[ENV_TRANS]": "env_trans",
    "[SYS_TRANS]": "sys_trans",
    "[ENV_LIVENESS]": "env_goal",
    "[SYS_LIVENESS]": "sys_goal",
    "[TOPOLOGY]": "topology",
}

_IDENT = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")

_TOKEN = re.compile(
    r"\s*(?:(?P<lpar>\()|(?P<rpar>\))|(?P<iff><->)|(?P<imp>->)"
    r"|(?P<and>&)|(?P<or>\|)|(?P<not>!)|(?P<ident>[a-zA-Z_][a-zA-Z0-9_]*))"
)


@dataclass
class _Tok:
    kind: str
    value: str
    col: int


def _tokenize(text: str, lineno: int) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecSyntaxError(lineno, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return toks


class _ExprParser:
    def __init__(self, toks, lineno):
        self.toks = toks
        self.lineno = lineno
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, kind=None):
        tok = self.peek()
        if tok is None:
            raise SpecSyntaxError(self.lineno, "unexpected end of line")
        if kind is not None and tok.kind != kind:
            raise SpecSyntaxError(self.lineno, f"expected {kind}, found {tok.value!r}")
        self.pos += 1
        return tok

    def parse(self):
        expr = self.parse_iff()
        if self.peek() is not None:
            raise SpecSyntaxError(self.lineno, f"trailing input {self.peek().value!r}")
        return expr

    def parse_iff(self):
        lhs = self.parse_implies()
        while self.peek() and self.peek().kind == "iff":
            self.take()
            lhs = Iff(lhs, self.parse_implies())
        return lhs

    def parse_implies(self):
        lhs = self.parse_or()
        if self.peek() and self.peek().kind == "imp":
            self.take()
            return Implies(lhs, self.parse_implies())  # right-associative
        return lhs

    def parse_or(self):
        args = [self.parse_and()]
        while self.peek() and self.peek().kind == "or":
            self.take()
            args.append(self.parse_and())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def parse_and(self):
        args = [self.parse_unary()]
        while self.peek() and self.peek().kind == "and":
            self.take()
            args.append(self.parse_unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def parse_unary(self):
        tok = self.peek()
        if tok is None:
            raise SpecSyntaxError(self.lineno, "unexpected end of line")
        if tok.kind == "not":
            self.take()
            return Not(self.parse_unary())
        if tok.kind == "lpar":
            self.take()
            expr = self.parse_iff()
            self.take("rpar")
            return expr
        if tok.kind == "ident":
            self.take()
            if tok.value == "TRUE":
                return Const(True)
            if tok.value == "FALSE":
                return Const(False)
            if tok.value == "next":
                self.take("lpar")
                inner = self.parse_iff()
                self.take("rpar")
                return _prime(inner, self.lineno)
            return Atom(tok.value)
        raise SpecSyntaxError(self.lineno, f"unexpected {tok.value!r}")


def _prime(expr, lineno):
    """Distribute next() down to atoms; nesting next() is an error."""
    if isinstance(expr, Atom):
        if expr.primed:
            raise SpecSyntaxError(lineno, "nested next() is not allowed")
        return Atom(expr.name, primed=True)
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Not):
        return Not(_prime(expr.arg, lineno))
    if isinstance(expr, And):
        return And(tuple(_prime(a, lineno) for a in expr.args))
    if isinstance(expr, Or):
        return Or(tuple(_prime(a, lineno) for a in expr.args))
    if isinstance(expr, Implies):
        return Implies(_prime(expr.lhs, lineno), _prime(expr.rhs, lineno))
    if isinstance(expr, Iff):
        return Iff(_prime(expr.lhs, lineno), _prime(expr.rhs, lineno))
    raise SpecSyntaxError(lineno, "bad operand under next()")


def parse_spec(source: str) -> GR1Spec:
    inputs = []
    outputs = []
    pending = []  # (slot, lineno, text, expr)
    topo_regions = []
    topo_pairs = set()
    topo_span = None
    warnings = []

    section = None
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        if stripped in _SECTIONS:
            section = _SECTIONS[stripped]
            if section == "topology" and topo_span is None:
                topo_span = (lineno, (0, len(stripped)))
            continue
        if stripped.startswith("["):
            raise SpecSyntaxError(lineno, f"unknown section {stripped!r}")
        if section is None:
            raise SpecSyntaxError(lineno, "statement before any section header")

        if section in ("input", "output"):
            if not _IDENT.fullmatch(stripped):
                raise SpecSyntaxError(lineno, f"bad proposition name {stripped!r}")
            (inputs if section == "input" else outputs).append(stripped)
        elif section == "topology":
            parts = stripped.split()
            if parts[0] == "region" and len(parts) == 2:
                topo_regions.append(parts[1])
            elif parts[0] == "adj" and len(parts) == 3:
                topo_pairs.add(frozenset(parts[1:]))
            else:
                raise SpecSyntaxError(lineno, f"bad topology line {stripped!r}")
        else:
            toks = _tokenize(line, lineno)
            expr = _ExprParser(toks, lineno).parse()
            pending.append((section, lineno, stripped, expr))

    dupes = {n for n in inputs if n in outputs} | {
        n for n in inputs + outputs if (inputs + outputs).count(n) > 1
    }
    if dupes:
        raise SpecSyntaxError(0, f"duplicate proposition name(s): {sorted(dupes)}")
    input_set = set(inputs)
    output_set = set(outputs)
    declared = input_set | output_set

    statements = []
    next_id = 1
    for slot, lineno, text, expr in pending:
        for atom in atoms_of(expr):
            if atom.name not in declared:
                raise UndeclaredProposition(atom.name, lineno)
        if slot in ("env_init", "sys_init", "env_goal", "sys_goal") and has_primed(expr):
            raise NextInInitOrGoal(lineno)
        names = {a.name for a in atoms_of(expr)}
        if slot == "env_init" and names & output_set:
            raise SpecSyntaxError(lineno, "env init may only mention input propositions")
        if slot == "sys_init" and names & input_set:
            # Mixed-init relaxation: allowed, since a diagnosis can pin a
            # full state as the initial condition.
            warnings.append(
                f"line {lineno}: sys init mentions input proposition(s) "
                f"{sorted(names & input_set)}"
            )
        if slot == "env_trans":
            primed_outputs = {
                a.name for a in atoms_of(expr) if a.primed and a.name in output_set
            }
            if primed_outputs:
                raise SpecSyntaxError(
                    lineno,
                    f"env safety may not constrain next-step outputs {sorted(primed_outputs)}",
                )
        statements.append(
            Statement(next_id, text, (lineno, (0, len(text))), slot, expr)
        )
        next_id += 1

    topology = None
    if topo_regions or topo_pairs:
        undeclared = [r for r in topo_regions if r not in output_set]
        if undeclared:
            raise UndeclaredRegion(undeclared[0], topo_span[0])
        topology = Workspace(tuple(topo_regions), frozenset(topo_pairs), topo_span)
        statements.extend(compile_topology(topology, next_id))

    return GR1Spec(
        inputs=tuple(Proposition(n, "input") for n in inputs),
        outputs=tuple(Proposition(n, "output") for n in outputs),
        statements=tuple(statements),
        topology=topology,
        warnings=tuple(warnings),
    )
