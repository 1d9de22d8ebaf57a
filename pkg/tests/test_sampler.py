"""Tests for seeded concrete simulation."""

import numpy as np
import pytest

from decomposition import build_cfg
from engines import PreciseEngine, Sampler, make_rng
from exceptions import ProgramRuntimeError, RuntimeDivergenceError
from frontend import parse, preprocess, tokenize


def cfg_of(source):
    return build_cfg(preprocess(parse(tokenize(source, "t.hyleak"), "t.hyleak")))


def start(cfg):
    return PreciseEngine(cfg).initial_state()


@pytest.mark.unit
class TestMakeRng:
    """Test per-component random streams."""

    def test_reproducible(self):
        """Test the same key yields the same stream."""
        a = make_rng(7, 1, 0).integers(0, 1000, size=20)
        b = make_rng(7, 1, 0).integers(0, 1000, size=20)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        """Test components and batches get separate streams."""
        base = make_rng(7, 1, 0).integers(0, 1 << 30, size=8)
        assert not np.array_equal(base, make_rng(7, 2, 0).integers(0, 1 << 30, size=8))
        assert not np.array_equal(base, make_rng(7, 1, 1).integers(0, 1 << 30, size=8))


@pytest.mark.unit
class TestSampler:
    """Test sampling entry points."""

    def test_sample_identity(self, identity_source):
        """Test every run of a copy lands on the diagonal."""
        cfg = cfg_of(identity_source)
        counts = Sampler(cfg).sample(start(cfg), 200, make_rng(0, 0, 0))
        assert sum(counts.values()) == 200
        assert set(counts) <= {(0, 0), (1, 1)}
        assert len(counts) == 2

    def test_sample_deterministic_given_seed(self, coin_source):
        """Test counts repeat exactly for the same stream."""
        cfg = cfg_of(coin_source)
        sampler = Sampler(cfg)
        first = sampler.sample(start(cfg), 300, make_rng(3, 1, 0))
        second = sampler.sample(start(cfg), 300, make_rng(3, 1, 0))
        assert first == second

    def test_sample_abs_uses_smallest_secret(self):
        """Test input-independent sampling runs from the smallest secret."""
        cfg = cfg_of("secret int2 h;\nobservable int2 o;\no := h;")
        counts = Sampler(cfg).sample_abs(start(cfg), 50, make_rng(0, 0, 0))
        assert counts == {0: 50}

    def test_sample_known_prior(self, identity_source):
        """Test fixed run counts per secret."""
        cfg = cfg_of(identity_source)
        counts = Sampler(cfg).sample_known_prior(start(cfg), {0: 5, 1: 7}, make_rng(0, 0, 0))
        assert counts == {(0, 0): 5, (1, 1): 7}

    def test_known_prior_unreachable_secret(self, identity_source):
        """Test a secret outside the state's group is rejected."""
        cfg = cfg_of(identity_source)
        with pytest.raises(ProgramRuntimeError, match="not reachable"):
            Sampler(cfg).sample_known_prior(start(cfg), {3: 1}, make_rng(0, 0, 0))

    def test_coin_frequencies(self, coin_source):
        """Test sampled frequencies approach the exact ones."""
        cfg = cfg_of(coin_source)
        counts = Sampler(cfg).sample(start(cfg), 20000, make_rng(11, 0, 0))
        assert counts[(0, 0)] / 20000 == pytest.approx(0.5, abs=0.02)
        assert counts[(1, 1)] / 20000 == pytest.approx(0.25, abs=0.02)

    def test_step_cap(self):
        """Test a run that never ends hits the step cap."""
        cfg = cfg_of("secret int1 h;\npublic int1 t;\nobservable int1 o;\nwhile t == 0 do t := 0; od")
        with pytest.raises(RuntimeDivergenceError, match="step cap of 100"):
            Sampler(cfg, step_cap=100).run_once(start(cfg), (0,), make_rng(0, 0, 0))
