import random

import pytest

from gr1diag import (
    check_realizability,
    check_satisfiability,
    extract_counterstrategy,
    parse_spec,
)
from gr1diag.arena import Arena, env_attractor, prevent_forever, winning_set
from gr1diag.errors import (
    EnvLivenessUnsupported,
    SpecRealizable,
    StateSpaceTooLarge,
)
from gr1diag.game import Counterstrategy, Realizable, Unrealizable, parse_counterstrategy

from oracles import BruteForceGame
from specgen import random_spec_source


def test_realizable_spec(fixture_spec):
    res = check_realizability(fixture_spec("toy_realizable.spec"))
    assert isinstance(res, Realizable)


def test_unrealizable_spec_reports_bad_init(fixture_spec):
    res = check_realizability(fixture_spec("spec4.spec"))
    assert isinstance(res, Unrealizable)
    assert res.bad_init["r5"] is True
    assert res.bad_init["camera"] is True


def test_satisfiability_split(fixture_spec):
    assert not check_satisfiability(fixture_spec("spec2.spec"))
    assert not check_satisfiability(fixture_spec("spec3.spec"))
    assert check_satisfiability(fixture_spec("spec4.spec"))
    assert check_satisfiability(fixture_spec("spec1.spec"))


def test_state_cap_is_enforced(fixture_spec):
    with pytest.raises(StateSpaceTooLarge):
        check_realizability(fixture_spec("spec1.spec"), state_cap=2 ** 4)


def test_extract_counterstrategy_on_realizable_raises(fixture_spec):
    with pytest.raises(SpecRealizable):
        extract_counterstrategy(fixture_spec("toy_realizable.spec"))


def test_extract_counterstrategy_rejects_env_liveness():
    src = (
        "[INPUT]\nx\n[OUTPUT]\ny\n"
        "[SYS_TRANS]\nnext(y) <-> y\n"
        "[ENV_LIVENESS]\nx\n[SYS_LIVENESS]\nx <-> y\n"
    )
    with pytest.raises(EnvLivenessUnsupported):
        extract_counterstrategy(parse_spec(src))


def test_spec4_counterstrategy_matches_the_listing(fixture_spec):
    cs = extract_counterstrategy(fixture_spec("spec4.spec"))
    assert cs.states == (1,)
    assert cs.q0 == (1,)
    assert cs.gamma_y[1] == {"r5": True, "camera": True}
    assert cs.delta_e[1] == {"person": True}
    assert cs.delta_s[1] == ()


def test_spec1_counterstrategy_is_a_four_state_chain(fixture_spec):
    cs = extract_counterstrategy(fixture_spec("spec1.spec"))
    assert cs.states == (1, 2, 3, 4)
    assert cs.q0 == (1,)
    # the environment always sees a person
    for q in cs.states:
        assert cs.delta_e[q] == {"person": True}
    regions = [
        [n for n, v in cs.gamma_y[q].items() if v and n != "camera"]
        for q in cs.states
    ]
    assert regions == [["start"], ["r2"], ["r3"], ["r4"]]
    # moves walk the chain but never into r5
    assert cs.delta_s[1] == (2, 1)
    assert cs.delta_s[4] == (4, 3)
    assert all(cs.gamma_goals[q] == 1 for q in cs.states)


def test_counterstrategy_dump_parse_round_trip(fixture_spec):
    cs = extract_counterstrategy(fixture_spec("spec1.spec"))
    text = cs.dump()
    again = parse_counterstrategy(text, cs.inputs, cs.outputs)
    assert again == cs


def test_counterstrategy_successors_respect_the_input():
    cs = Counterstrategy(
        inputs=("p",), outputs=("y",),
        states=(1, 2), q0=(1,),
        gamma_x={1: {"p": False}, 2: {"p": True}},
        gamma_y={1: {"y": False}, 2: {"y": True}},
        delta_e={1: {"p": True}, 2: {"p": True}},
        delta_s={1: (2,), 2: ()},
        gamma_goals={1: 1, 2: 1},
    )
    assert cs.successors(1, {"p": True}) == (2,)
    assert cs.successors(1, {"p": False}) == ()


def test_winning_set_membership_matches_realizability(fixture_spec):
    spec = fixture_spec("spec5.spec")
    arena = Arena(spec)
    Z, per_goal = winning_set(arena)
    assert len(per_goal) == 1
    # winning states are exactly the last-pass goal-1 states here
    assert (Z == per_goal[0]).all()


def test_prevent_forever_excludes_goal_states(fixture_spec):
    import numpy as np

    spec = fixture_spec("spec1.spec")
    arena = Arena(spec)
    B = arena.sys_goals[0]
    V = prevent_forever(arena, B)
    assert not (V & B).any()
    # the start state with a person present is a preventable state
    label = {n: False for n in arena.inputs + arena.outputs}
    label.update({"person": True, "start": True, "camera": True})
    assert V[arena.state_of(label)]


def test_env_attractor_ranks(fixture_spec):
    import numpy as np

    spec = fixture_spec("spec4.spec")
    arena = Arena(spec)
    dead, rank = env_attractor(arena, np.zeros(arena.S, dtype=bool))
    label = {"person": False, "r5": True, "camera": True}
    s0 = arena.state_of(label)
    assert dead[s0]
    assert rank[s0] == 1  # one adversarial input forces the deadlock


def test_realizability_agrees_with_brute_force_oracle_small():
    rng = random.Random(99)
    agree = 0
    while agree < 25:
        src = random_spec_source(rng, n_inputs=rng.randint(1, 2),
                                 n_outputs=rng.randint(1, 2))
        spec = parse_spec(src)
        ours = isinstance(check_realizability(spec), Realizable)
        assert ours == BruteForceGame(spec).realizable()
        agree += 1
