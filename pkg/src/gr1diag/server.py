"""HTTP backend of the interactive exploration game.

Sessions live in memory, keyed by random 128-bit hex ids.  In
counterstrategy mode the environment replays its extracted strategy; in
sandbox mode (realizable specs, or after the play leaves the strategy's
states) the environment picks admissible inputs uniformly at random from
a seeded generator.  Every proposed move is adjudicated by a single-step
SAT instance; rejections carry the mapped-back unsatisfiable core.
"""

from __future__ import annotations

import random
import secrets
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from fastapi import FastAPI, HTTPException

from . import sat
from .arena import Arena, DEFAULT_STATE_CAP
from .engine import map_back
from .errors import (
    EnvLivenessUnsupported,
    Gr1DiagError,
    SpecRealizable,
)
from .game import Counterstrategy, extract_counterstrategy
from .model import GR1Spec, at_step, evaluate
from .parser import parse_spec
from .unroll import _assignment_expr, state_formula


@dataclass
class GameSession:
    id: str
    spec: GR1Spec
    arena: Arena
    mode: str  # "counterstrategy" or "sandbox"
    rng: random.Random
    counterstrategy: Optional[Counterstrategy] = None
    cs_state: Optional[int] = None  # current counterstrategy state id
    state: Dict[str, bool] = field(default_factory=dict)
    pending_inputs: Dict[str, bool] = field(default_factory=dict)
    history: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def goal(self) -> Optional[dict]:
        goals = self.spec.in_slot("sys_goal")
        if not goals:
            return None
        if self.mode == "counterstrategy" and self.cs_state is not None:
            k = self.counterstrategy.gamma_goals[self.cs_state]
            k = min(k, len(goals))
            stmt = goals[k - 1]
        else:
            stmt = goals[0]
        return {"id": stmt.id, "text": stmt.text}

    def snapshot(self) -> dict:
        return {
            "v": 1,
            "state": dict(self.state),
            "pending_inputs": dict(self.pending_inputs),
            "goal": self.goal(),
            "history": list(self.history),
            "mode": self.mode,
        }


def _random_inputs(session: GameSession) -> Dict[str, bool]:
    """Uniform admissible next input for the current state (sandbox)."""
    arena = session.arena
    s = arena.state_of(session.state)
    options = np.flatnonzero(arena.env_ok[s])
    if len(options) == 0:
        return {name: False for name in arena.inputs}
    x = int(session.rng.choice(list(options)))
    return arena.x_assignment(x)


def _start_session(spec: GR1Spec, seed: Optional[int],
                   state_cap: int = DEFAULT_STATE_CAP) -> GameSession:
    arena = Arena(spec, state_cap)
    rng = random.Random(seed)
    sid = secrets.token_hex(16)
    session = GameSession(
        id=sid, spec=spec, arena=arena, mode="sandbox", rng=rng
    )
    cs = None
    try:
        cs = extract_counterstrategy(spec, state_cap)
    except (SpecRealizable, EnvLivenessUnsupported) as exc:
        session.notes.append(f"sandbox mode: {exc}")
    if cs is not None and cs.states:
        q0 = min(cs.q0)
        session.mode = "counterstrategy"
        session.counterstrategy = cs
        session.cs_state = q0
        session.state = cs.label(q0)
        session.pending_inputs = dict(cs.delta_e[q0])
        return session
    if cs is not None:
        session.notes.append(
            "sandbox mode: no system completion of the initial conditions"
        )
    # sandbox start: random admissible initial inputs, lowest initial outputs
    x_options = np.flatnonzero(arena.env_init_x)
    x0 = int(rng.choice(list(x_options))) if len(x_options) else 0
    init_blocks = arena.sys_init.reshape(arena.Xn, arena.Yn)
    ys = np.flatnonzero(init_blocks[x0])
    y0 = int(ys[0]) if len(ys) else 0
    session.state = arena.assignment_of(x0 * arena.Yn + y0)
    session.pending_inputs = _random_inputs(session)
    return session


def _adjudicate(session: GameSession, outputs: Dict[str, bool]):
    """One-step SAT instance for the proposed move; returns
    (accepted, core, notes)."""
    spec = session.spec
    gamma_x = {n: session.state[n] for n in session.arena.inputs}
    gamma_y = {n: session.state[n] for n in session.arena.outputs}
    triples = [
        (sat.STATE_ANCHOR_ID, 0, state_formula(gamma_x, gamma_y)),
        (sat.ENV_PIN_ID, 1, _assignment_expr(session.pending_inputs, 1)),
        (sat.MOVE_PIN_ID, 1, _assignment_expr(outputs, 1)),
    ]
    for s in spec.in_slot("sys_trans"):
        triples.append((s.id, 0, at_step(s.expr, 0)))
    cnf = sat.to_cnf(triples)
    res = sat.solve(cnf)
    if res.status == "SAT":
        nxt = dict(session.pending_inputs)
        nxt.update(outputs)
        cur = dict(session.state)

        def lookup(atom):
            return cur[atom.name] if atom.step == 0 else nxt[atom.name]

        for s in spec.in_slot("sys_trans"):
            if not evaluate(at_step(s.expr, 0), lookup):
                raise AssertionError(
                    f"SAT-accepted move violates statement {s.id}"
                )
        return True, None, []
    mus = sat.extract_mus(cnf)
    core, notes = map_back(spec, mus.core_groups)
    return False, core, notes


def _advance(session: GameSession, outputs: Dict[str, bool]) -> List[str]:
    notes: List[str] = []
    new_state = dict(session.pending_inputs)
    new_state.update(outputs)
    if session.mode == "counterstrategy":
        cs = session.counterstrategy
        succs = cs.delta_s[session.cs_state]
        match = [q for q in succs if cs.gamma_y[q] == outputs]
        if match:
            q = min(match)
        elif succs:
            q = min(succs)
            notes.append(
                "no counterstrategy successor matches the accepted move; "
                "advanced to the lowest-id successor"
            )
        else:
            session.mode = "sandbox"
            session.cs_state = None
            notes.append(
                "accepted move left the counterstrategy; continuing in "
                "sandbox mode"
            )
            session.state = new_state
            session.pending_inputs = _random_inputs(session)
            return notes
        session.cs_state = q
        session.state = cs.label(q)
        session.pending_inputs = dict(cs.delta_e[q])
        return notes
    session.state = new_state
    session.pending_inputs = _random_inputs(session)
    return notes


def create_app(default_spec: Optional[str] = None,
               seed: Optional[int] = None,
               state_cap: int = DEFAULT_STATE_CAP) -> FastAPI:
    app = FastAPI(title="gr1diag game server")
    sessions: Dict[str, GameSession] = {}

    def get_session(session_id: str) -> GameSession:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/api/session")
    def new_session(body: Optional[dict] = None):
        source = (body or {}).get("spec") or default_spec
        if not source:
            raise HTTPException(status_code=400, detail="no specification")
        try:
            spec = parse_spec(source)
            session = _start_session(spec, seed, state_cap)
        except Gr1DiagError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        sessions[session.id] = session
        return {
            "session_id": session.id,
            "snapshot": session.snapshot(),
            "notes": list(session.notes),
        }

    @app.get("/api/session/{session_id}")
    def session_state(session_id: str):
        return get_session(session_id).snapshot()

    @app.post("/api/session/{session_id}/move")
    def move(session_id: str, body: dict, dry: bool = False):
        session = get_session(session_id)
        outputs = body.get("outputs")
        names = set(session.arena.outputs)
        if (
            not isinstance(outputs, dict)
            or set(outputs) != names
            or not all(isinstance(v, bool) for v in outputs.values())
        ):
            raise HTTPException(
                status_code=400,
                detail="move must assign a boolean to every output",
            )
        accepted, core, notes = _adjudicate(session, outputs)
        if dry:
            return {
                "accepted": accepted,
                "snapshot": None,
                "core": _core_doc(core),
                "notes": notes,
            }
        entry = {
            "state": dict(session.state),
            "move": dict(outputs),
            "outcome": "accepted" if accepted else "rejected",
        }
        if accepted:
            notes = notes + _advance(session, outputs)
        session.history.append(entry)
        return {
            "accepted": accepted,
            "snapshot": session.snapshot(),
            "core": _core_doc(core),
            "notes": notes,
        }

    @app.get("/api/map/{session_id}")
    def workspace_map(session_id: str):
        session = get_session(session_id)
        topo = session.spec.topology
        if topo is None:
            return {"v": 1, "regions": [], "adjacency": []}
        return {
            "v": 1,
            "regions": list(topo.regions),
            "adjacency": sorted(sorted(pair) for pair in topo.adjacency),
        }

    return app


def _core_doc(core):
    if core is None:
        return None
    return [
        {"id": c.id, "text": c.text, "span": [c.span[0], list(c.span[1])]}
        for c in core
    ]
