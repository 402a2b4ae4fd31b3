import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from spectralsi.sampling import as_points, rejection_sample, uniform_ball, uniform_box


def test_as_points_shapes():
    assert as_points(0.5, 1).shape == (1, 1)
    assert as_points([0.1, 0.2, 0.3], 1).shape == (3, 1)
    assert as_points([0.1, 0.2], 2).shape == (1, 2)
    assert as_points(np.zeros((5, 2)), 2).shape == (5, 2)


@given(st.integers(0, 2**32), st.integers(1, 3))
def test_seeded_streams_reproduce(seed, dim):
    a = uniform_ball(500, 1.0, dim, seed, (1, 2))
    b = uniform_ball(500, 1.0, dim, seed, (1, 2))
    assert np.array_equal(a, b)
    assert np.all(np.linalg.norm(a, axis=1) < 1.0)


def test_distinct_tags_give_distinct_samples():
    assert not np.array_equal(uniform_box(100, [0], [1], 7, (1,)), uniform_box(100, [0], [1], 7, (2,)))


def test_prefix_stability_across_sizes():
    # samples are generated in fixed blocks so a longer draw extends a shorter one
    small = uniform_box(1000, [0], [1], 3, (9,))
    large = uniform_box(5000, [0], [1], 3, (9,))
    assert np.array_equal(small, large[:1000])


def test_ball_is_uniform_in_radius():
    x = uniform_ball(200_000, 1.0, 2, 0, (1,))
    r = np.linalg.norm(x, axis=1)
    # P(|x| < 1/2) = 1/4 in the plane
    assert abs(np.mean(r < 0.5) - 0.25) < 4 * np.sqrt(0.25 * 0.75 / len(r))


def test_sobol_sampler():
    x = uniform_box(1024, [-1, -1], [1, 1], 5, (1,), sampler="sobol")
    assert x.shape == (1024, 2)
    assert np.array_equal(x, uniform_box(1024, [-1, -1], [1, 1], 5, (1,), sampler="sobol"))


def test_rejection_on_empty_region_terminates():
    out = rejection_sample(lambda p: np.zeros(len(p), bool), 100, [0], [1], 0, (1,))
    assert len(out) == 0
