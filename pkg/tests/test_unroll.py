import pytest

from gr1diag.errors import NotDeadlocked, UnknownGoal
from gr1diag.model import Not, TimedAtom
from gr1diag.sat import ENV_PIN_ID, STATE_ANCHOR_ID
from gr1diag.unroll import (
    deadlock_formula,
    env_unrolling,
    goal_clause,
    livelock_formula,
    pinned_input_triples,
    state_formula,
    unroll_from_init,
    unroll_from_state,
)
from gr1diag import extract_counterstrategy
from gr1diag.model import atoms_of, evaluate


def _steps(triples, sid):
    return sorted(step for s, step, _ in triples if s == sid)


def test_unroll_from_init_depth_zero(fixture_spec):
    # init at step 0 plus one copy of each safety conjunct
    spec = fixture_spec("spec2.spec")
    triples = unroll_from_init(spec, 0)
    assert [(sid, step) for sid, step, _ in triples] == [
        (1, 0), (2, 0), (3, 0),
    ]
    # the init and the unprimed safety both speak about step 0
    assert triples[0][2] == TimedAtom("kitchen", 0)
    assert triples[1][2] == Not(TimedAtom("kitchen", 0))
    # the primed conjunct reaches into step 1
    assert TimedAtom("camera", 1) in set(atoms_of(triples[2][2]))


def test_unroll_from_init_instantiates_safety_at_every_step(fixture_spec):
    spec = fixture_spec("spec2.spec")
    triples = unroll_from_init(spec, 4)
    assert _steps(triples, 1) == [0]
    assert _steps(triples, 2) == list(range(5))
    assert _steps(triples, 3) == list(range(5))


def test_goal_clause_lands_on_the_final_step(fixture_spec):
    spec = fixture_spec("spec1.spec")
    sid, step, expr = goal_clause(spec, 1, 9)
    assert sid == spec.sys_goal_by_index(1).id
    assert step == 9
    assert expr == TimedAtom("goal", 9)


def test_goal_clause_unknown_index(fixture_spec):
    spec = fixture_spec("spec1.spec")
    with pytest.raises(UnknownGoal):
        goal_clause(spec, 3, 5)


def test_state_formula_is_literal_complete():
    expr = state_formula({"person": True}, {"r5": False, "camera": True})
    atoms = {(a.name, a.step) for a in atoms_of(expr)}
    assert atoms == {("person", 0), ("r5", 0), ("camera", 0)}
    val = {"person": True, "r5": False, "camera": True}
    assert evaluate(expr, lambda a: val[a.name])
    assert not evaluate(expr, lambda a: not val[a.name])


def test_deadlock_formula_groups(fixture_spec):
    spec = fixture_spec("spec4.spec")
    cs = extract_counterstrategy(spec)
    q = cs.states[0]
    triples = deadlock_formula(cs, q, spec)
    sids = [sid for sid, _, _ in triples]
    assert sids[0] == STATE_ANCHOR_ID
    assert sids[1] == ENV_PIN_ID
    # one copy of each sys safety conjunct, at step 0
    assert sids[2:] == [2, 3, 4]
    assert all(step == 0 for _, step, _ in triples[2:])


def test_deadlock_formula_rejects_live_states(fixture_spec):
    spec = fixture_spec("spec1.spec")
    cs = extract_counterstrategy(spec)
    with pytest.raises(NotDeadlocked):
        deadlock_formula(cs, cs.states[0], spec)


def test_env_unrolling_cycles_modularly(fixture_spec):
    spec = fixture_spec("spec1.spec")
    cs = extract_counterstrategy(spec)
    cycle = (1, 2, 3, 2)
    pins = env_unrolling(cs, cycle, 6)
    assert len(pins) == 7
    for i, pin in enumerate(pins):
        assert pin == cs.gamma_x[cycle[i % len(cycle)]]


def test_pinned_input_triples_are_env_pin_groups():
    triples = pinned_input_triples([{"p": True}, {"p": False}])
    assert [(sid, step) for sid, step, _ in triples] == [
        (ENV_PIN_ID, 0), (ENV_PIN_ID, 1),
    ]


def test_unroll_from_state_has_anchor_and_full_safety(fixture_spec):
    spec = fixture_spec("spec4.spec")
    cs = extract_counterstrategy(spec)
    triples = unroll_from_state(cs, cs.states[0], spec, 2)
    assert triples[0][0] == STATE_ANCHOR_ID
    for sid in (2, 3, 4):
        assert _steps(triples, sid) == [0, 1, 2]


def test_livelock_formula_shape(fixture_spec):
    spec = fixture_spec("spec1.spec")
    cs = extract_counterstrategy(spec)
    d = 9
    triples = livelock_formula(cs, 1, (1, 2, 3, 2), spec, d)
    # pins cover steps 0..d+1
    assert _steps(triples, ENV_PIN_ID) == list(range(d + 2))
    # anchored at the counterstrategy's initial state
    anchors = [e for sid, step, e in triples if sid == STATE_ANCHOR_ID]
    assert len(anchors) == 1
    label = cs.label(cs.q0[0])
    assert evaluate(anchors[0], lambda a: label[a.name])
    # the goal is the last conjunct, at the final step
    gid, gstep, gexpr = triples[-1]
    assert gid == spec.sys_goal_by_index(1).id
    assert gstep == d
    assert gexpr == TimedAtom("goal", d)
