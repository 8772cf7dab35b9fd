"""Region maps and their compilation into motion-safety conjuncts.

A workspace is an adjacency graph over region names.  Compilation produces
synthetic sys_trans statements (tagged "topology"): per-region adjacency
constraints, mutual exclusion at the current and next step, and a sys_init
exactly-one conjunct.  Staying in place is always allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SpecSyntaxError, UndeclaredRegion
from .model import Atom, Implies, Not, Statement, conj, disj


@dataclass(frozen=True)
class Workspace:
    regions: tuple  # ordered region names
    adjacency: frozenset  # of frozenset({a, b}) pairs, a != b
    span: tuple = (0, (0, 0))  # source span of the [TOPOLOGY] section

    def __post_init__(self):
        for pair in self.adjacency:
            names = set(pair)
            if len(names) != 2:
                raise UndeclaredRegion(f"bad adjacency pair {sorted(pair)}")
            unknown = names - set(self.regions)
            if unknown:
                raise UndeclaredRegion(sorted(unknown)[0])

    def adjacent(self, region: str) -> list:
        if region not in self.regions:
            raise UndeclaredRegion(region)
        out = []
        for other in self.regions:
            if other != region and frozenset((region, other)) in self.adjacency:
                out.append(other)
        return out

    def lines(self) -> list:
        """The [TOPOLOGY] section body, round-trip parseable."""
        out = [f"region {r}" for r in self.regions]
        seen = set()
        for a in self.regions:
            for b in self.adjacent(a):
                if frozenset((a, b)) not in seen:
                    seen.add(frozenset((a, b)))
                    out.append(f"adj {a} {b}")
        return out


def _exactly_one(atoms: list):
    at_least = disj(atoms)
    pairwise = [
        Not(conj((atoms[i], atoms[j])))
        for i in range(len(atoms))
        for j in range(i + 1, len(atoms))
    ]
    return conj([at_least] + pairwise)


def compile_topology(w: Workspace, first_id: int) -> list:
    """Compile a workspace into Statements with ids first_id, first_id+1, ...

    Returns the adjacency statement per region, exactly-one over current-step
    and next-step region atoms, and an exactly-one sys_init conjunct.  All
    share the [TOPOLOGY] section span so cores can surface them as
    "environment topology".
    """
    stmts = []
    next_id = first_id

    def add(slot, expr, text):
        nonlocal next_id
        stmts.append(
            Statement(next_id, text, w.span, slot, expr, tag="topology")
        )
        next_id += 1

    for r in w.regions:
        targets = [Atom(r, primed=True)] + [
            Atom(o, primed=True) for o in w.adjacent(r)
        ]
        add(
            "sys_trans",
            Implies(Atom(r), disj(targets)),
            f"topology: moves from {r}",
        )
    cur = [Atom(r) for r in w.regions]
    nxt = [Atom(r, primed=True) for r in w.regions]
    add("sys_trans", _exactly_one(cur), "topology: exactly one region")
    add("sys_trans", _exactly_one(nxt), "topology: exactly one region (next)")
    add("sys_init", _exactly_one(cur), "topology: exactly one region (init)")
    return stmts


def parse_map_file(text: str) -> Workspace:
    """Read the standalone .map format: `region <name>` / `adj <a> <b>` lines."""
    regions = []
    pairs = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "region" and len(parts) == 2:
            regions.append(parts[1])
        elif parts[0] == "adj" and len(parts) == 3:
            pairs.add(frozenset(parts[1:]))
        else:
            raise SpecSyntaxError(lineno, f"bad map line {raw!r}")
    return Workspace(tuple(regions), frozenset(pairs))
