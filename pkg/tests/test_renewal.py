from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from immigrate_sim.heavytail_rng import ParetoAlpha, SeedSpec
from immigrate_sim.renewal import (
    RenewalPath,
    first_passage,
    shot_noise,
    simulate_walk,
)


@pytest.fixture
def fixture_path() -> RenewalPath:
    return RenewalPath.from_increments((1.0, 2.5, 3.0), horizon=6.0)


def test_from_increments_builds_zero_delayed_walk(fixture_path):
    assert np.array_equal(fixture_path.arrivals, [0.0, 1.0, 3.5, 6.5])
    assert fixture_path.horizon == 6.0


def test_path_validation():
    with pytest.raises(ValueError):
        RenewalPath(np.array([1.0, 2.0]), horizon=1.5)  # missing origin
    with pytest.raises(ValueError):
        RenewalPath(np.array([0.0, 2.0, 2.0]), horizon=1.0)  # not increasing
    with pytest.raises(ValueError):
        RenewalPath(np.array([0.0, 2.0]), horizon=3.0)  # no overshoot
    with pytest.raises(ValueError):
        RenewalPath(np.array([0.0, 2.0]), horizon=0.0)
    with pytest.raises(ValueError):
        RenewalPath.from_increments((1.0, -0.5), horizon=0.4)


def test_first_passage_fixture_values(fixture_path):
    assert first_passage(fixture_path, 3.5) == 3
    assert first_passage(fixture_path, 3.4999) == 2
    assert first_passage(fixture_path, 0.0) == 1
    assert first_passage(fixture_path, -1.0) == 0
    assert first_passage(fixture_path, 6.0) == 3
    with pytest.raises(ValueError):
        first_passage(fixture_path, 6.01)


def test_shot_noise_hand_sums(fixture_path):
    assert shot_noise(fixture_path, lambda x: np.ones_like(x), 6.0) == 3.0
    assert shot_noise(fixture_path, lambda x: x, 6.0) == 13.5
    assert shot_noise(fixture_path, lambda x: x, 0.0) == 0.0
    assert shot_noise(fixture_path, lambda x: x, -2.0) == 0.0
    # Scalar-valued responses broadcast over the active arrivals.
    assert shot_noise(fixture_path, lambda x: 2.0, 6.0) == 6.0


def test_simulate_walk_shape_and_truncation():
    path = simulate_walk(ParetoAlpha(0.6), horizon=500.0, seed=SeedSpec(1, 4))
    assert path.arrivals[0] == 0.0
    assert np.all(np.diff(path.arrivals) > 0.0)
    assert path.arrivals[-1] > 500.0
    # Exactly one overshoot point is kept.
    assert path.arrivals[-2] <= 500.0
    assert path.horizon == 500.0


def test_simulate_walk_deterministic():
    seed = SeedSpec(2026, 3)
    a = simulate_walk(ParetoAlpha(0.5), 100.0, seed)
    b = simulate_walk(ParetoAlpha(0.5), 100.0, seed)
    assert np.array_equal(a.arrivals, b.arrivals)
    c = simulate_walk(ParetoAlpha(0.5), 100.0, seed.child(4))
    assert not np.array_equal(a.arrivals, c.arrivals)


def test_walk_increments_have_unit_lower_bound():
    path = simulate_walk(ParetoAlpha(0.3), 200.0, SeedSpec(8))
    assert np.all(np.diff(path.arrivals) >= 1.0)


def test_simulate_walk_rejects_bad_horizon():
    with pytest.raises(ValueError):
        simulate_walk(ParetoAlpha(0.5), 0.0, SeedSpec(0))


@settings(max_examples=60, deadline=None)
@given(t=st.floats(min_value=-5.0, max_value=50.0), rep=st.integers(0, 40))
def test_first_passage_is_counting_measure(t, rep):
    path = simulate_walk(ParetoAlpha(0.6), 50.0, SeedSpec(31, rep))
    assert first_passage(path, t) == int(np.sum(path.arrivals <= t))


@settings(max_examples=30, deadline=None)
@given(t=st.floats(min_value=0.0, max_value=50.0), rep=st.integers(0, 20))
def test_shot_noise_matches_direct_sum(t, rep):
    path = simulate_walk(ParetoAlpha(0.5), 50.0, SeedSpec(17, rep))
    m = first_passage(path, t)
    expected = sum((t - s) ** 2 for s in path.arrivals[:m])
    assert shot_noise(path, lambda x: x**2, t) == pytest.approx(expected, rel=1e-12)
