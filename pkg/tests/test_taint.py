"""Tests for the secret-dependence check."""

import pytest

from decomposition import build_cfg, check_input_independent, tainted_variables
from decomposition.taint import control_region, post_dominators, written_names
from frontend import load_program, parse, preprocess, tokenize
from frontend.ast_nodes import Index, Var


def cfg_of(source):
    return build_cfg(preprocess(parse(tokenize(source, "t.hyleak"), "t.hyleak")))


HEADER = "secret int1 h;\npublic int1 t;\nobservable int1 o;\n"


@pytest.mark.unit
class TestTaint:
    """Test data and control dependence."""

    def test_data_flow(self):
        """Test taint follows assignments."""
        cfg = cfg_of(HEADER + "t := h;\no := t;")
        assert tainted_variables(cfg, cfg.entry) == {"h", "t", "o"}
        assert not check_input_independent(cfg, cfg.entry)

    def test_control_flow(self):
        """Test assignments under a secret branch are tainted."""
        cfg = cfg_of(HEADER + "if h == 1 then o := 1; fi")
        assert "o" in tainted_variables(cfg, cfg.entry)

    def test_join_ends_control_region(self):
        """Test assignments after the join are not controlled by the branch."""
        cfg = cfg_of(HEADER + "if h == 1 then t := 1; fi\no := 1;")
        tainted = tainted_variables(cfg, cfg.entry)
        assert "t" in tainted
        assert "o" not in tainted
        assert check_input_independent(cfg, cfg.entry)

    def test_flow_insensitive(self):
        """Test a later overwrite does not clear taint."""
        cfg = cfg_of(HEADER + "t := h;\nt := 0;\no := t;")
        assert not check_input_independent(cfg, cfg.entry)

    def test_public_only(self):
        """Test randomness alone does not create a dependence."""
        cfg = cfg_of(HEADER + "t := randombit(0.5);\no := t;")
        assert check_input_independent(cfg, cfg.entry)


@pytest.mark.unit
class TestRegions:
    """Test region-local checks."""

    def test_random_walk_tail_is_independent(self, fixtures_dir):
        """Test the walk after the start locations ignores the secret."""
        cfg = build_cfg(load_program(str(fixtures_dir / "random_walk.hyleak")))
        (join,) = [n for n in cfg.nodes() if cfg.graph.in_degree(n) == 7]
        assert check_input_independent(cfg, join)
        assert not check_input_independent(cfg, cfg.entry)

    def test_post_dominator_of_branch(self):
        """Test a branch is post-dominated by its join."""
        cfg = cfg_of(HEADER + "if h == 1 then t := 1; else t := 0; fi\no := t;")
        ipdom = post_dominators(cfg)
        branch = cfg.entry
        join = next(n for n in cfg.nodes() if cfg.graph.in_degree(n) == 2)
        assert ipdom[branch] == join
        assert control_region(cfg, branch, ipdom) == set(cfg.branch_targets(branch))


@pytest.mark.unit
class TestWrittenNames:
    """Test the write set of assignment targets."""

    def test_scalar(self):
        """Test a scalar target writes itself."""
        assert written_names(Var("x")) == {"x"}

    def test_dynamic_index(self):
        """Test a sized dynamic index may write any element."""
        assert written_names(Index("a", Var("j"), 3)) == {"a_0", "a_1", "a_2"}
