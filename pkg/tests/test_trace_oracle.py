"""Tests comparing the precise engine with a naive path-by-path enumerator."""

from fractions import Fraction

import pytest

from decomposition import build_cfg, decompose, estimate_ranges
from engines import enumerate_traces
from engines.encoding import encode
from engines.evaluator import bit_probability, evaluate, random_bounds, target_name
from engines.state import SecretSpace
from frontend import load_program
from frontend.ast_nodes import (
    Assign,
    If,
    IntLit,
    RandomBit,
    RandomCall,
    Return,
    Simulate,
    SimulateAbs,
    While,
)

ORACLE_CAP = 10**6


def run_block(block, states):
    """Run statements over (env, probability) pairs; returns (running, returned)."""
    running, returned = list(states), []
    for stmt in block:
        following = []
        for env, p in running:
            more, done = run_stmt(stmt, env, p)
            following += more
            returned += done
        running = following
    return running, returned


def run_stmt(stmt, env, p):
    look = env.__getitem__
    if isinstance(stmt, Assign):
        name = target_name(stmt.target, look, stmt.line)
        if isinstance(stmt.value, RandomCall):
            lo, hi = random_bounds(stmt.value, look, stmt.line)
            return [({**env, name: v}, p * Fraction(1, hi - lo + 1)) for v in range(lo, hi + 1)], []
        if isinstance(stmt.value, RandomBit):
            q = bit_probability(stmt.value, look, stmt.line)
            return [({**env, name: v}, p * w) for v, w in ((0, 1 - q), (1, q)) if w > 0], []
        return [({**env, name: evaluate(stmt.value, look, stmt.line)}, p)], []
    if isinstance(stmt, If):
        arms = [(stmt.cond, stmt.then)] + list(stmt.elifs)
        for cond, body in arms:
            if evaluate(cond, look, stmt.line):
                return run_block(body, [(env, p)])
        return run_block(stmt.orelse, [(env, p)])
    if isinstance(stmt, While):
        running, returned, finished = [(env, p)], [], []
        while running:
            looping = []
            for e, q in running:
                (looping if evaluate(stmt.cond, e.__getitem__, stmt.line) else finished).append((e, q))
            running, done = run_block(stmt.body, looping)
            returned += done
        return finished, returned
    if isinstance(stmt, Return):
        return [], [(env, p)]
    if isinstance(stmt, (Simulate, SimulateAbs)):
        return [(env, p)], []
    raise TypeError(f"unexpected statement {stmt!r}")


def brute_force(program):
    """Exact joint over (encoded secret, encoded observable) by walking every path."""
    space = SecretSpace(program)
    base = {}
    for decl in program.declarations:
        if decl.var_class != "secret":
            base[decl.name] = decl.initializer.value if isinstance(decl.initializer, IntLit) else 0
    joint = {}
    for valuation, mass in space.prior(program, ORACLE_CAP).items():
        env = {**base, **dict(zip(space.names, valuation))}
        running, returned = run_block(program.body, [(env, Fraction(1))])
        for final, p in running + returned:
            cell = (space.encode(valuation), encode(tuple(final[o] for o in program.observables)))
            joint[cell] = joint.get(cell, Fraction(0)) + p * mass
    return {cell: p for cell, p in joint.items() if p != 0}


def recombined(decomposition):
    """Exact joint of a decomposed program: prefix outcomes plus every saved state run to the end."""
    prefix = enumerate_traces(decomposition.cfg)
    joint = dict(prefix.outcomes)
    for saved in prefix.saved:
        rest = enumerate_traces(decomposition.cfg, initial=saved.state)
        assert not rest.saved
        for cell, p in rest.outcomes.items():
            joint[cell] = joint.get(cell, Fraction(0)) + p
    return joint


CASES = [
    ("reservoir.hyleak", {"N": 4, "K": 2}),
    ("dining3.hyleak", {}),
]


@pytest.mark.unit
class TestBruteForceOracle:
    """Test the precise engine against path-by-path enumeration."""

    @pytest.mark.parametrize("name,constants", CASES)
    def test_precise_engine_matches(self, fixtures_dir, name, constants):
        """Test state merging and lazy secret splitting give the exact joint."""
        program = load_program(str(fixtures_dir / name), constants)
        expected = brute_force(program)
        result = enumerate_traces(build_cfg(program))
        assert not result.saved
        assert result.outcomes == expected
        assert sum(expected.values()) == 1

    def test_loop_and_return(self, write_program):
        """Test a bounded loop and an early return on a small program."""
        path = write_program(
            "secret int2 h;\npublic int32 i := 0;\npublic int1 c;\nobservable int32 o;\n"
            "while i < h do i := i + 1; c := randombit(0.5); o := o + c; od\n"
            "if o == 0 then return; fi\no := o + 10;"
        )
        program = load_program(path)
        assert enumerate_traces(build_cfg(program)).outcomes == brute_force(program)

    @pytest.mark.slow
    def test_short_random_walk(self, fixtures_dir):
        """Test the walk with three steps."""
        program = load_program(str(fixtures_dir / "random_walk.hyleak"), {"MAX": 2})
        assert enumerate_traces(build_cfg(program)).outcomes == brute_force(program)


@pytest.mark.unit
class TestDecompositionPreservesJoint:
    """Test that splitting at simulate statements loses no probability mass."""

    @pytest.mark.parametrize("name,constants", CASES + [("random_walk.hyleak", {"MAX": 2})])
    @pytest.mark.parametrize("prefix_budget", [0, 8])
    def test_recombined_equals_whole(self, fixtures_dir, name, constants, prefix_budget):
        """Test prefix outcomes plus resumed saved states equal the undecomposed joint."""
        program = load_program(str(fixtures_dir / name), constants)
        cfg = build_cfg(program)
        whole = enumerate_traces(cfg).outcomes
        decomposition = decompose(cfg, estimate_ranges(cfg), prefix_budget=prefix_budget)
        assert recombined(decomposition) == whole

    def test_random_walk_actually_splits(self, fixtures_dir):
        """Test the walk is split into one saved state per starting location."""
        program = load_program(str(fixtures_dir / "random_walk.hyleak"), {"MAX": 2})
        cfg = build_cfg(program)
        decomposition = decompose(cfg, estimate_ranges(cfg))
        assert len(enumerate_traces(decomposition.cfg).saved) == 7
