"""Tests for control flow graph construction and DOT output."""

import networkx as nx
import pytest

from decomposition import NodeKind, build_cfg, to_dot
from frontend import load_program, parse, preprocess, tokenize
from frontend.ast_nodes import IntLit


def cfg_of(source):
    return build_cfg(preprocess(parse(tokenize(source, "t.hyleak"), "t.hyleak")))


def kinds(cfg):
    return sorted(cfg.node(n).kind.value for n in cfg.nodes())


@pytest.mark.unit
class TestBuildCfg:
    """Test the if-goto shape of built graphs."""

    def test_straight_line(self):
        """Test each assignment is one node ending in End."""
        cfg = cfg_of("public int32 x;\nx := 1;\nx := 2;")
        assert len(cfg) == 3
        assert cfg.entry == 0
        assert cfg.node(cfg.exit).kind is NodeKind.END
        second = cfg.next(cfg.entry)
        assert cfg.next(second) == cfg.exit

    def test_if_without_else_gets_nop_arm(self):
        """Test an empty arm is filled by a nop node."""
        cfg = cfg_of("public int32 x;\nif x == 0 then x := 1; fi")
        branch = cfg.entry
        assert cfg.node(branch).kind is NodeKind.BRANCH
        on_true, on_false = cfg.branch_targets(branch)
        assert cfg.node(on_true).kind is NodeKind.ASSIGN
        assert cfg.node(on_false).kind is NodeKind.NOP
        assert cfg.node(on_false).part == "arm:else"
        assert cfg.graph.in_degree(cfg.exit) == 2

    def test_elif_tests_are_branch_nodes(self):
        """Test every elif test becomes its own branch node."""
        cfg = cfg_of(
            "public int32 x, y;\n"
            "if x == 0 then y := 1; elif x == 1 then y := 2; else y := 3; fi"
        )
        parts = sorted(cfg.node(n).part for n in cfg.nodes() if cfg.node(n).kind is NodeKind.BRANCH)
        assert parts == ["", "elif:1"]
        assert cfg.by_sid(cfg.node(cfg.entry).sid) == cfg.entry

    def test_while_loop_has_back_edge(self):
        """Test a while body links back to the loop head."""
        cfg = cfg_of("public int32 x;\nwhile x < 3 do x := x + 1; od")
        head = cfg.entry
        body, after = cfg.branch_targets(head)
        assert cfg.next(body) == head
        assert after == cfg.exit
        assert nx.find_cycle(cfg.graph, head)

    def test_code_after_return_dropped(self):
        """Test unreachable statements do not become nodes."""
        cfg = cfg_of("public int32 x;\nx := 1;\nreturn;\nx := 2;")
        assert kinds(cfg) == ["assign", "end", "return"]
        values = [cfg.node(n).expr for n in cfg.nodes() if cfg.node(n).kind is NodeKind.ASSIGN]
        assert values == [IntLit(1)]

    def test_loops_must_be_preprocessed(self):
        """Test for loops are rejected before preprocessing."""
        program = parse(tokenize("public int32 t;\nfor i in [0, 2] do t := i; od", "t.hyleak"))
        with pytest.raises(ValueError, match="preprocessed"):
            build_cfg(program)

    def test_random_walk_join(self, fixtures_dir):
        """Test all seven starting locations meet at the first random draw."""
        cfg = build_cfg(load_program(str(fixtures_dir / "random_walk.hyleak")))
        joins = [n for n in cfg.nodes() if cfg.graph.in_degree(n) == 7]
        assert len(joins) == 1
        assert cfg.node(joins[0]).is_random
        assert nx.is_directed_acyclic_graph(cfg.graph)


@pytest.mark.unit
class TestDot:
    """Test DOT rendering."""

    def test_simulate_nodes_are_red(self):
        """Test simulate statements are highlighted."""
        cfg = cfg_of("secret int1 h;\nobservable int1 o;\nsimulate;\no := h;")
        dot = to_dot(cfg)
        assert dot.startswith("digraph CFG {")
        assert 'label="3: simulate" color=red fontcolor=red' in dot
        assert "o := h" in dot

    def test_branch_edges_labelled(self):
        """Test branch edges carry T/F labels and branches are diamonds."""
        dot = to_dot(cfg_of("public int32 x;\nif x == 0 then x := 1; else x := 2; fi"))
        assert "shape=diamond" in dot
        assert '[label="T"]' in dot
        assert '[label="F"]' in dot

    def test_annotations_appended(self):
        """Test per-node annotations follow the statement label."""
        cfg = cfg_of("public int32 x;\nx := 1;")
        dot = to_dot(cfg, {cfg.entry: "TOT_OBS = 1; TOT_INT = 1"})
        assert '2: x := 1\\nTOT_OBS = 1; TOT_INT = 1' in dot
