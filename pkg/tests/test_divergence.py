"""KL/JS divergence properties on binned densities."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from factorspec import SpectralDensity, ZeroHandlingPolicy, js_divergence, kl_divergence
from factorspec.divergence import js_divergence_masses
from factorspec.errors import BinMismatch


def masses_strategy(k=12, allow_zero=True):
    low = 0.0 if allow_zero else 1e-6
    return (
        st.lists(st.floats(low, 1.0), min_size=k, max_size=k)
        .filter(lambda v: sum(v) > 1e-6)
        .map(lambda v: np.array(v) / np.sum(v))
    )


def density(masses):
    edges = np.linspace(0.0, 1.0, len(masses) + 1)
    return SpectralDensity(bin_edges=edges, masses=masses)


@settings(max_examples=200, deadline=None)
@given(masses_strategy(), masses_strategy())
def test_js_symmetry(p, q):
    assert js_divergence(density(p), density(q)) == pytest.approx(
        js_divergence(density(q), density(p)), abs=1e-12
    )


@settings(max_examples=200, deadline=None)
@given(masses_strategy(), masses_strategy())
def test_js_nonnegative_and_bounded(p, q):
    d = js_divergence(density(p), density(q))
    assert -1e-12 <= d <= np.log(2.0) + 1e-12


@settings(max_examples=100, deadline=None)
@given(masses_strategy())
def test_js_zero_iff_equal(p):
    assert js_divergence(density(p), density(p)) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(masses_strategy(), masses_strategy())
def test_js_positive_when_distinct(p, q):
    if np.max(np.abs(p - q)) > 1e-5:
        assert js_divergence(density(p), density(q)) > 0.0


@settings(max_examples=100, deadline=None)
@given(masses_strategy(), masses_strategy())
def test_js_matches_reference(p, q):
    assert js_divergence(density(p), density(q)) == pytest.approx(
        oracles.js_reference(p, q), abs=1e-10
    )


@settings(max_examples=100, deadline=None)
@given(masses_strategy(allow_zero=False), masses_strategy(allow_zero=False))
def test_kl_nonnegative_and_matches_reference(p, q):
    d = kl_divergence(density(p), density(q))
    assert d >= -1e-12
    assert d == pytest.approx(oracles.kl_reference(p, q), abs=1e-10)


def test_kl_handles_zero_bins():
    p = np.array([0.5, 0.5, 0.0, 0.0])
    q = np.array([0.0, 0.0, 0.5, 0.5])
    d = kl_divergence(density(p), density(q))
    assert np.isfinite(d) and d > 0


def test_spike_sensitivity():
    """Moving mass into a far bin must increase the divergence."""
    base = np.array([0.55] + [0.05] * 9)
    mild = base.copy()
    mild[9] += 0.05
    mild[0] -= 0.05
    strong = base.copy()
    strong[9] += 0.3
    strong[0] -= 0.3
    d_mild = js_divergence(density(base), density(mild / mild.sum()))
    d_strong = js_divergence(density(base), density(strong / strong.sum()))
    assert 0 < d_mild < d_strong


def test_bin_mismatch_raises():
    p = density(np.full(12, 1 / 12))
    q = SpectralDensity(bin_edges=np.linspace(0, 2, 13), masses=np.full(12, 1 / 12))
    with pytest.raises(BinMismatch):
        js_divergence(p, q)
    with pytest.raises(BinMismatch):
        kl_divergence(p, q)


def test_policy_smoothing_preserves_total_mass():
    policy = ZeroHandlingPolicy(epsilon=1e-6)
    masses = np.array([0.7, 0.3, 0.0, 0.0])
    smoothed = policy.smooth(masses)
    assert smoothed.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(smoothed > 0)


def test_policy_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        ZeroHandlingPolicy(epsilon=0.0)
    with pytest.raises(ValueError):
        ZeroHandlingPolicy(epsilon=1.5)


def test_masses_variant_agrees_with_density_variant():
    rng = np.random.default_rng(0)
    p = rng.dirichlet(np.ones(15))
    q = rng.dirichlet(np.ones(15))
    assert js_divergence_masses(p, q) == pytest.approx(
        js_divergence(
            SpectralDensity(np.linspace(0, 1, 16), p),
            SpectralDensity(np.linspace(0, 1, 16), q),
        )
    )
