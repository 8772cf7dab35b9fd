"""Explicit-state game arena over total assignments to X ∪ Y.

States are integers packing the input bits (high) and output bits (low),
first declared proposition most significant.  Move relations are dense
boolean matrices, so all fixpoint steps reduce to vectorized any/all
reductions.  Sized for desk-scale specs; the cap is enforced, not assumed.
"""

from __future__ import annotations

from typing import Dict, List, Optional

import numpy as np

from .errors import StateSpaceTooLarge
from .model import And, Atom, Const, GR1Spec, Iff, Implies, Not, Or
from .model import atoms_of as _atoms

DEFAULT_STATE_CAP = 2 ** 20

# Dense S x S relations cap the practical arena size well below the state
# cap; refuse early instead of thrashing memory.
_MAX_RELATION_ENTRIES = 2 ** 28


def _np_eval(expr, lookup):
    if isinstance(expr, Atom):
        return lookup(expr)
    if isinstance(expr, Const):
        return np.bool_(expr.value)
    if isinstance(expr, Not):
        return ~_np_eval(expr.arg, lookup)
    if isinstance(expr, And):
        out = np.bool_(True)
        for a in expr.args:
            out = out & _np_eval(a, lookup)
        return out
    if isinstance(expr, Or):
        out = np.bool_(False)
        for a in expr.args:
            out = out | _np_eval(a, lookup)
        return out
    if isinstance(expr, Implies):
        return ~_np_eval(expr.lhs, lookup) | _np_eval(expr.rhs, lookup)
    if isinstance(expr, Iff):
        return _np_eval(expr.lhs, lookup) == _np_eval(expr.rhs, lookup)
    raise TypeError(f"not an expression: {expr!r}")


class Arena:
    """Compiled move relations and predicates for one GR1Spec."""

    def __init__(self, spec: GR1Spec, state_cap: int = DEFAULT_STATE_CAP):
        self.spec = spec
        self.inputs = [p.name for p in spec.inputs]
        self.outputs = [p.name for p in spec.outputs]
        n_in, n_out = len(self.inputs), len(self.outputs)
        n = n_in + n_out
        if 2 ** n > state_cap:
            raise StateSpaceTooLarge(
                f"2^{n} states exceed the cap of {state_cap}"
            )
        self.Xn = 1 << n_in
        self.Yn = 1 << n_out
        self.S = 1 << n
        if self.S * self.S > _MAX_RELATION_ENTRIES:
            raise StateSpaceTooLarge(
                f"dense relations for 2^{n} states exceed the memory bound"
            )

        s_idx = np.arange(self.S)
        x_idx = np.arange(self.Xn)
        # bit position of each proposition within a packed state index
        self._state_bit = {}
        for j, name in enumerate(self.inputs):
            self._state_bit[name] = n - 1 - j
        for j, name in enumerate(self.outputs):
            self._state_bit[name] = n_out - 1 - j
        self._cur = {
            name: ((s_idx >> bit) & 1).astype(bool)
            for name, bit in self._state_bit.items()
        }
        self._x_val = {
            name: ((x_idx >> (n_in - 1 - j)) & 1).astype(bool)
            for j, name in enumerate(self.inputs)
        }

        self._output_set = set(self.outputs)
        self.env_ok = self._build_env_ok()
        self.sys_ok = self._build_sys_ok()
        self.env_init_x = self._pred_x("env_init")
        self.sys_init = self._pred_s("sys_init") & self._sys_invariant
        self.sys_goals = [
            self._eval_state(s.expr) for s in spec.in_slot("sys_goal")
        ]
        self.env_goals = [
            self._eval_state(s.expr) for s in spec.in_slot("env_goal")
        ]

    # -- predicate evaluation

    def _eval_state(self, expr) -> np.ndarray:
        def lookup(atom):
            if atom.primed:
                raise ValueError("primed atom in a state predicate")
            return self._cur[atom.name]

        out = _np_eval(expr, lookup)
        return np.broadcast_to(out, (self.S,)).copy()

    def _pred_s(self, slot) -> np.ndarray:
        acc = np.ones(self.S, dtype=bool)
        for s in self.spec.in_slot(slot):
            acc &= self._eval_state(s.expr)
        return acc

    def _pred_x(self, slot) -> np.ndarray:
        def lookup(atom):
            if atom.primed:
                raise ValueError("primed atom in an initial predicate")
            return self._x_val[atom.name]

        acc = np.ones(self.Xn, dtype=bool)
        for s in self.spec.in_slot(slot):
            acc &= np.broadcast_to(_np_eval(s.expr, lookup), (self.Xn,))
        return acc

    def _build_env_ok(self) -> np.ndarray:
        """env_ok[s, x'] = every env safety conjunct holds for the step
        (state s, next inputs x')."""

        def lookup(atom):
            if atom.primed:
                return self._x_val[atom.name][None, :]
            return self._cur[atom.name][:, None]

        acc = np.ones((self.S, self.Xn), dtype=bool)
        for s in self.spec.in_slot("env_trans"):
            acc &= np.broadcast_to(
                _np_eval(s.expr, lookup), (self.S, self.Xn)
            )
        return acc

    def _invariant_stmt(self, stmt) -> bool:
        """Unprimed conjuncts over outputs only are state invariants the
        system can actually enforce; they hold at every state of a play,
        so moves into states they forbid are illegal and initial states
        must satisfy them.  Conjuncts that mention inputs stay step
        conjuncts evaluated at the source, since the next input is not
        the system's to control."""
        atoms = list(_atoms(stmt.expr))
        return not any(a.primed for a in atoms) and all(
            a.name in self._output_set for a in atoms
        )

    def _build_sys_ok(self) -> np.ndarray:
        """sys_ok[s, s'] = every sys safety conjunct holds for the step
        (state s, next full state s'), with output-only invariants also
        required at the target."""

        def lookup(atom):
            if atom.primed:
                return self._cur[atom.name][None, :]
            return self._cur[atom.name][:, None]

        acc = np.ones((self.S, self.S), dtype=bool)
        invariant = np.ones(self.S, dtype=bool)
        for s in self.spec.in_slot("sys_trans"):
            acc &= np.broadcast_to(_np_eval(s.expr, lookup), (self.S, self.S))
            if self._invariant_stmt(s):
                invariant &= self._eval_state(s.expr)
        self._sys_invariant = invariant
        return acc & invariant[None, :]

    # -- state packing helpers

    def state_of(self, assignment: Dict[str, bool]) -> int:
        s = 0
        for name, bit in self._state_bit.items():
            if assignment[name]:
                s |= 1 << bit
        return s

    def assignment_of(self, s: int) -> Dict[str, bool]:
        return {
            name: bool((s >> bit) & 1)
            for name, bit in self._state_bit.items()
        }

    def input_part(self, s: int) -> int:
        return s // self.Yn

    def x_assignment(self, x: int) -> Dict[str, bool]:
        n_in = len(self.inputs)
        return {
            name: bool((x >> (n_in - 1 - j)) & 1)
            for j, name in enumerate(self.inputs)
        }

    def y_assignment(self, s: int) -> Dict[str, bool]:
        return {
            name: bool((s >> self._state_bit[name]) & 1)
            for name in self.outputs
        }

    # -- predecessor operators

    def cox(self, Z: np.ndarray) -> np.ndarray:
        """System-controllable predecessors: for every admissible next
        input there is a legal system response landing in Z."""
        can = (self.sys_ok & Z[None, :]).reshape(self.S, self.Xn, self.Yn)
        exists_y = can.any(axis=2)
        return (~self.env_ok | exists_y).all(axis=1)

    def epre(self, W: np.ndarray) -> np.ndarray:
        """Environment-controllable predecessors: some admissible next
        input confines every legal system response to W (vacuously true
        when no legal response exists, i.e. forced deadlock)."""
        legal = self.sys_ok.reshape(self.S, self.Xn, self.Yn)
        inside = (~legal | W.reshape(1, self.Xn, self.Yn)).all(axis=2)
        return (self.env_ok & inside).any(axis=1)

    def all_legal_in(self, W: np.ndarray) -> np.ndarray:
        """[s, x'] table: every legal system response to x' lands in W."""
        legal = self.sys_ok.reshape(self.S, self.Xn, self.Yn)
        return (~legal | W.reshape(1, self.Xn, self.Yn)).all(axis=2)


def winning_set(arena: Arena):
    """Standard GR(1) triple fixpoint.

    Returns (Z, per_goal) where per_goal[j] is the last-pass reachability
    set for system goal j; a state outside Z is outside per_goal[j] for at
    least one j (its losing layer, used for goal marking).
    """
    goals = arena.sys_goals or [np.ones(arena.S, dtype=bool)]
    env_goals = arena.env_goals or [np.ones(arena.S, dtype=bool)]
    Z = np.ones(arena.S, dtype=bool)
    per_goal: List[np.ndarray] = [Z] * len(goals)
    while True:
        Z_old = Z
        for j, B in enumerate(goals):
            base = B & arena.cox(Z)
            Y = np.zeros(arena.S, dtype=bool)
            while True:
                coxY = arena.cox(Y)
                newY = np.zeros(arena.S, dtype=bool)
                for E in env_goals:
                    X = np.ones(arena.S, dtype=bool)
                    while True:
                        newX = base | coxY | (~E & arena.cox(X))
                        if (newX == X).all():
                            break
                        X = newX
                    newY |= X
                if (newY == Y).all():
                    break
                Y = newY
            per_goal[j] = Y
            Z = Y
        if (Z == Z_old).all():
            return Z, per_goal


def prevent_forever(arena: Arena, B: np.ndarray) -> np.ndarray:
    """νV. (¬B ∧ epre(V)): states from which the environment keeps the
    play going while never letting B hold.  Environment-liveness-free."""
    V = np.ones(arena.S, dtype=bool)
    while True:
        newV = ~B & arena.epre(V)
        if (newV == V).all():
            return V
        V = newV


def env_attractor(arena: Arena, target: np.ndarray):
    """μW. (target ∪ epre(W)) with per-state entry ranks.

    rank 0 = inside target; rank r = environment forces W_{r-1} in one
    step (including by deadlocking the system); -1 = unreachable.
    """
    rank = np.full(arena.S, -1, dtype=np.int64)
    W = target.copy()
    rank[W] = 0
    r = 1
    while True:
        E = arena.epre(W)
        new = E & ~W
        if not new.any():
            return W, rank
        rank[new] = r
        W |= new
        r += 1
