"""Acceptance gate: one test per criterion A1..A9, each printing a single
PASS/FAIL line.  Run with `pytest tests/test_acceptance.py -v -s` to see
the lines even on success."""

import itertools
import random
import time

import pytest
from fastapi.testclient import TestClient

from gr1diag import (
    check_realizability,
    classify,
    diagnose,
    extract_counterstrategy,
    parse_spec,
    unreal_bmc,
    unreal_iterate,
)
from gr1diag.analysis import is_countertrace
from gr1diag.engine import _anchored_spec
from gr1diag.game import Realizable
from gr1diag.sat import CnfInstance, extract_mus
from gr1diag.server import create_app

from oracles import BruteForceGame, bfs_shortest_path, truth_table_sat
from specgen import random_spec_source


def _report(criterion: str, ok: bool, detail: str) -> None:
    print(f"{criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{criterion}: {detail}"


def test_a1_deadlock_core_is_exact(fixture_spec):
    start = time.perf_counter()
    diag = diagnose(fixture_spec("spec2.spec"))
    elapsed = time.perf_counter() - start
    ok = (
        diag.core_ids() == {1, 2}
        and diag.depth_used == 0
        and elapsed < 1.0
    )
    _report(
        "A1",
        ok,
        f"core={sorted(diag.core_ids())} first-unsat-depth={diag.depth_used} "
        f"({elapsed:.2f}s)",
    )


def test_a2_livelock_core_on_hospital_map(fixture_text):
    spec = parse_spec(
        fixture_text("spec3_rooms.spec").rstrip("\n")
        + "\n[TOPOLOGY]\n"
        + fixture_text("hospital.map")
    )
    start = time.perf_counter()
    diag = diagnose(spec, max_depth=15)
    elapsed = time.perf_counter() - start
    non_topo = {
        c.id for c in diag.core if "topology" not in c.tags
    }
    topo_ok = all(
        "topology" in c.tags for c in diag.core if c.id not in {1, 2, 4}
    )
    camera_id = 3
    ok = (
        non_topo == {1, 2, 4}
        and topo_ok
        and camera_id not in diag.core_ids()
        and elapsed < 5.0
    )
    _report(
        "A2",
        ok,
        f"core={sorted(diag.core_ids())} non-topology={sorted(non_topo)} "
        f"camera-excluded={camera_id not in diag.core_ids()} ({elapsed:.2f}s)",
    )


def test_a3_unrealizable_deadlock(fixture_spec):
    spec = fixture_spec("spec4.spec")
    start = time.perf_counter()
    cs = extract_counterstrategy(spec)
    diag = diagnose(spec)
    elapsed = time.perf_counter() - start
    ok = (
        cs.states == (1,)
        and cs.delta_e[1] == {"person": True}
        and cs.delta_s[1] == ()
        and diag.core_ids() == {2, 3}
        and elapsed < 5.0
    )
    _report(
        "A3",
        ok,
        f"|Q|={len(cs.states)} delta_e={cs.delta_e[1]} "
        f"delta_s={cs.delta_s[1]} core={sorted(diag.core_ids())} "
        f"({elapsed:.2f}s)",
    )


def test_a4_livelock_depth_threshold(fixture_spec, fixture_text):
    spec = fixture_spec("spec1.spec")
    cls = classify(spec)
    cs = cls.counterstrategy
    trace_ok = is_countertrace(cs)

    from gr1diag.workspace import parse_map_file

    w = parse_map_file(fixture_text("hallway.map"))
    oracle_threshold = bfs_shortest_path(
        [tuple(sorted(e)) for e in w.adjacency], "start", "goal"
    )
    if oracle_threshold != 9:
        print(
            f"A4: note - map fixture yields threshold {oracle_threshold}, "
            "not the documented 9; asserting against the BFS oracle"
        )

    def core_at(depth):
        diag = unreal_bmc(
            spec, cs, "livelock", goal_index=cls.goal_index,
            max_depth=depth, bad_init=dict(cls.bad_init),
        )
        return diag

    below = core_at(oracle_threshold - 1)
    at = core_at(oracle_threshold)
    below_topo_only = all(
        "topology" in c.tags or "goal" in c.tags for c in below.core
    )
    ok = (
        trace_ok
        and below_topo_only
        and "possibly-not-meaningful" in below.flags
        and 2 in at.core_ids()
        and 3 not in at.core_ids()
        and any("topology" in c.tags for c in at.core)
        and "possibly-not-meaningful" not in at.flags
    )
    _report(
        "A4",
        ok,
        f"countertrace={trace_ok} threshold={oracle_threshold} "
        f"core@{oracle_threshold - 1}={sorted(below.core_ids())} "
        f"flags={below.flags} core@{oracle_threshold}={sorted(at.core_ids())}",
    )


def test_a5_iterated_core_minimality_property():
    rng = random.Random(2024)
    start = time.perf_counter()
    checked = 0
    failures = []
    while checked < 100:
        src = random_spec_source(
            rng, n_inputs=rng.randint(1, 3), n_outputs=rng.randint(1, 3),
            max_sys_trans=8,
        )
        spec = parse_spec(src)
        cls = classify(spec)
        if cls.verdict == "Synthesizable":
            continue
        diag = unreal_iterate(spec, dict(cls.bad_init), cls.goal_index)
        trans_core = {
            c.id for c in diag.core
            if spec.statement(c.id).slot == "sys_trans"
        }
        bad = dict(cls.bad_init)
        kept = _anchored_spec(spec, bad, cls.goal_index, trans_core)
        if isinstance(check_realizability(kept), Realizable):
            failures.append((checked, "core slice is synthesizable"))
        for sid in trans_core:
            trial = _anchored_spec(
                spec, bad, cls.goal_index, trans_core - {sid}
            )
            if not isinstance(check_realizability(trial), Realizable):
                failures.append((checked, f"statement {sid} is removable"))
        checked += 1
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 300.0
    _report(
        "A5",
        ok,
        f"{checked} unsynthesizable specs, {len(failures)} violations "
        f"({elapsed:.1f}s)",
    )


def test_a6_mus_contract_against_power_set_oracle():
    rng = random.Random(64)
    checked = 0
    failures = 0
    while checked < 200:
        n_vars = rng.randint(2, 5)
        n_groups = rng.randint(2, 12)
        groups = {}
        for g in range(1, n_groups + 1):
            clauses = []
            for _ in range(rng.randint(1, 3)):
                lits = sorted(
                    {
                        (v if rng.random() < 0.5 else -v)
                        for v in (
                            rng.randint(1, n_vars)
                            for _ in range(rng.randint(1, 3))
                        )
                    },
                    key=abs,
                )
                clauses.append(lits)
            groups[(g, 0)] = clauses
        flat = [c for cs in groups.values() for c in cs]
        if truth_table_sat(flat, n_vars) is not None:
            continue
        checked += 1
        cnf = CnfInstance()
        cnf.n_vars = n_vars
        for key, clauses in groups.items():
            cnf.groups.setdefault(key, [])
            for c in clauses:
                cnf.add_clause(list(c), key)
        core = extract_mus(cnf).core_groups

        def unsat(subset):
            cs = [c for k in subset for c in groups[k]]
            return truth_table_sat(cs, n_vars) is None

        if not unsat(core):
            failures += 1
        elif any(unsat(set(core) - {k}) for k in core):
            failures += 1
    _report("A6", failures == 0, f"{checked} UNSAT instances, {failures} violations")


def test_a7_realizability_matches_brute_force_oracle():
    rng = random.Random(7777)
    checked = 0
    disagreements = 0
    while checked < 50:
        src = random_spec_source(
            rng, n_inputs=rng.randint(1, 2), n_outputs=rng.randint(1, 3),
        )
        spec = parse_spec(src)
        if 2 ** (len(spec.inputs) + len(spec.outputs)) > 2 ** 10:
            continue
        ours = isinstance(check_realizability(spec), Realizable)
        theirs = BruteForceGame(spec).realizable()
        if ours != theirs:
            disagreements += 1
        checked += 1
    _report("A7", disagreements == 0, f"{checked} specs, {disagreements} disagreements")


def test_a8_fine_core_beats_coarse_highlighting(fixture_spec):
    results = {}
    for name, coarse_slots in (
        ("fig5.spec", ("env_init", "sys_init", "env_trans", "sys_trans")),
        ("fig6.spec", ("env_trans", "sys_trans", "sys_goal")),
    ):
        spec = fixture_spec(name)
        diag = diagnose(spec)
        coarse = {
            s.id for s in spec.statements if s.slot in coarse_slots
        }
        results[name] = (len(diag.core_ids()), len(coarse))
    ok = all(fine < coarse for fine, coarse in results.values())
    detail = " ".join(
        f"{n}: |fine|={f} < |coarse|={c}" for n, (f, c) in results.items()
    )
    _report("A8", ok, detail)


def test_a9_server_explains_kitchen_rejection(fixture_text):
    app = create_app(default_spec=fixture_text("spec5.spec"), seed=0)
    client = TestClient(app)
    doc = client.post("/api/session", json={}).json()
    snap = doc["snapshot"]
    target_in_kitchen = snap["pending_inputs"]["t_kitchen"] is True
    resp = client.post(
        f"/api/session/{doc['session_id']}/move",
        json={"outputs": {"kitchen": True, "hall": False, "r1": False}},
    )
    body = resp.json()
    core_ids = [c["id"] for c in (body["core"] or [])]
    ok = (
        target_in_kitchen
        and body["accepted"] is False
        and core_ids == [7]
        and body["core"][0]["text"] == "!next(kitchen)"
    )
    _report(
        "A9",
        ok,
        f"target-in-kitchen={target_in_kitchen} accepted={body['accepted']} "
        f"core={core_ids}",
    )
