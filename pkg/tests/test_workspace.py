import pytest

from gr1diag import parse_map_file, parse_spec
from gr1diag.errors import SpecSyntaxError, UndeclaredRegion
from gr1diag.model import evaluate
from gr1diag.workspace import Workspace, compile_topology


def test_parse_map_file(fixture_text):
    w = parse_map_file(fixture_text("hallway.map"))
    assert w.regions[0] == "start" and w.regions[-1] == "goal"
    assert frozenset({"r4", "r5"}) in w.adjacency
    assert set(w.adjacent("r5")) == {"r4", "r6"}


def test_parse_map_file_rejects_garbage():
    with pytest.raises(SpecSyntaxError):
        parse_map_file("region a\nwall a b\n")


def test_workspace_rejects_adjacency_to_unknown_region():
    with pytest.raises(UndeclaredRegion):
        Workspace(("a",), frozenset({frozenset({"a", "ghost"})}))


def test_compiled_topology_semantics(fixture_text):
    w = parse_map_file(fixture_text("hallway.map"))
    stmts = compile_topology(w, first_id=10)
    assert all(s.tag == "topology" for s in stmts)
    assert [s.id for s in stmts] == list(range(10, 10 + len(stmts)))

    # a legal single hop satisfies every sys_trans conjunct
    def step(cur_region, nxt_region):
        def look(a):
            region = nxt_region if a.primed else cur_region
            return a.name == region

        return all(
            evaluate(s.expr, look) for s in stmts if s.slot == "sys_trans"
        )

    assert step("r4", "r5")
    assert step("r4", "r4")
    assert not step("r4", "r6")
    assert not step("start", "goal")


def test_map_merges_like_inline_topology(fixture_text):
    inline = parse_spec(fixture_text("spec1.spec"))
    merged = parse_spec(
        fixture_text("spec1_rooms.spec").rstrip("\n")
        + "\n[TOPOLOGY]\n"
        + fixture_text("hallway.map")
    )
    assert inline.topology.regions == merged.topology.regions
    assert inline.topology.adjacency == merged.topology.adjacency
    assert [
        (s.slot, s.expr) for s in inline.statements
    ] == [(s.slot, s.expr) for s in merged.statements]
