import numpy as np
import pytest

from sfpsolve.linops import write_vector
from sfpsolve.sets import (
    Ball,
    Box,
    FullSpace,
    L1Ball,
    NonnegativeOrthant,
    Singleton,
    interval_bounds,
    is_member,
    parse_set,
    project,
)

ALL_SETS = [
    FullSpace(4),
    NonnegativeOrthant(4),
    Singleton(np.array([0.5, -1.0, 2.0, 0.0])),
    Ball(np.array([1.0, 0.0, 0.0, -1.0]), 1.5),
    Box(np.array([-1.0, 0.0, -2.0, 0.5]), np.array([1.0, 0.5, 2.0, 0.5])),
    L1Ball(2.0, 4),
]


def l1_project_bisection(x, radius):
    """Independent l1-ball projection: bisection on the shrink threshold."""
    x = np.asarray(x, dtype=float)
    if np.abs(x).sum() <= radius:
        return x.copy()
    lo, hi = 0.0, float(np.abs(x).max())
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.maximum(np.abs(x) - mid, 0.0).sum() > radius:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    return np.sign(x) * np.maximum(np.abs(x) - theta, 0.0)


def test_singleton_projection_constant():
    S = Singleton(np.array([1.0, 2.0]))
    assert np.array_equal(S.project([9.0, -9.0]), [1.0, 2.0])


def test_ball_radial_scaling():
    S = Ball(np.zeros(2), 1.0)
    assert np.allclose(S.project([3.0, 4.0]), [0.6, 0.8], atol=1e-15)


def test_orthant_clamp():
    S = NonnegativeOrthant(2)
    assert np.array_equal(S.project([2.0, -3.0]), [2.0, 0.0])


def test_l1ball_known_points():
    S = L1Ball(1.0, 2)
    assert np.allclose(S.project([2.0, 0.0]), [1.0, 0.0], atol=1e-12)
    assert np.allclose(S.project([1.0, 1.0]), [0.5, 0.5], atol=1e-12)


def test_l1ball_known_points_against_grid():
    # Dense scan of ||v - x|| over the feasible grid confirms the two
    # closed-form answers above.
    S = L1Ball(1.0, 2)
    ax = np.arange(-1.0, 1.0 + 1e-9, 1e-3)
    V1, V2 = np.meshgrid(ax, ax, indexing="ij")
    mask = np.abs(V1) + np.abs(V2) <= 1.0 + 1e-12
    for x, expected in [([2.0, 0.0], [1.0, 0.0]), ([1.0, 1.0], [0.5, 0.5])]:
        d2 = (V1 - x[0]) ** 2 + (V2 - x[1]) ** 2
        d2[~mask] = np.inf
        i, j = np.unravel_index(np.argmin(d2), d2.shape)
        assert np.linalg.norm(np.array([ax[i], ax[j]]) - expected) <= 2e-3
        assert np.linalg.norm(S.project(x) - expected) <= 1e-12


def test_l1ball_matches_bisection_oracle():
    rng = np.random.default_rng(2)
    S = L1Ball(1.7, 6)
    for _ in range(100):
        x = rng.standard_normal(6) * rng.uniform(0.2, 4.0)
        assert np.linalg.norm(S.project(x) - l1_project_bisection(x, 1.7)) <= 1e-10


def test_ball_zero_radius_acts_as_singleton():
    S = Ball(np.array([1.0, -1.0]), 0.0)
    assert np.array_equal(S.project([5.0, 5.0]), [1.0, -1.0])


def test_is_member_examples():
    assert is_member(Ball(np.zeros(2), 1.0), [0.5, 0.0], 0.0)
    b = np.array([1.0, 2.0])
    assert is_member(Singleton(b), b, 0.0)
    box = Box(np.zeros(2), np.ones(2))
    assert is_member(box, [1.0005, 0.5], 1e-3)
    assert not is_member(box, [1.0005, 0.5], 1e-6)


@pytest.mark.parametrize("S", ALL_SETS, ids=lambda s: type(s).__name__)
def test_projection_idempotent(S):
    rng = np.random.default_rng(4)
    for _ in range(100):
        x = rng.standard_normal(S.dim) * 3.0
        p = project(S, x)
        assert np.linalg.norm(project(S, p) - p) <= 1e-12
        assert is_member(S, p, 1e-9)


@pytest.mark.parametrize("S", ALL_SETS, ids=lambda s: type(s).__name__)
def test_projection_nonexpansive(S):
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = rng.standard_normal(S.dim) * 3.0
        y = rng.standard_normal(S.dim) * 3.0
        lhs = np.linalg.norm(project(S, x) - project(S, y))
        assert lhs <= np.linalg.norm(x - y) + 1e-12


@pytest.mark.parametrize("S", ALL_SETS, ids=lambda s: type(s).__name__)
def test_projection_variational_inequality(S):
    rng = np.random.default_rng(6)
    for _ in range(50):
        x = rng.standard_normal(S.dim) * 3.0
        p = project(S, x)
        z = project(S, rng.standard_normal(S.dim) * 3.0)  # a point of S
        assert float((x - p) @ (z - p)) <= 1e-9


@pytest.mark.parametrize("S", [NonnegativeOrthant(5), FullSpace(5)], ids=["orthant", "fullspace"])
def test_cone_projection_homogeneous(S):
    rng = np.random.default_rng(8)
    for _ in range(100):
        x = rng.standard_normal(5) * 2.0
        alpha = rng.uniform(0.1, 10.0)
        assert np.linalg.norm(project(S, alpha * x) - alpha * project(S, x)) <= 1e-12


def test_invalid_constructions():
    with pytest.raises(ValueError):
        Ball(np.zeros(2), -1.0)
    with pytest.raises(ValueError):
        Box([1.0, 0.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        L1Ball(0.0, 3)
    with pytest.raises(ValueError):
        FullSpace(0)


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError, match="dimension mismatch"):
        project(FullSpace(3), [1.0, 2.0])


def test_interval_bounds():
    lo, hi = interval_bounds(NonnegativeOrthant(2))
    assert np.array_equal(lo, [0.0, 0.0]) and np.all(np.isinf(hi))
    assert interval_bounds(L1Ball(1.0, 2)) is None
    assert interval_bounds(Singleton(np.zeros(2))) is None


def test_parse_set_grammar(tmp_path):
    assert isinstance(parse_set("fullspace:3"), FullSpace)
    assert isinstance(parse_set("orthant:2"), NonnegativeOrthant)
    assert isinstance(parse_set("l1ball:1.5:4"), L1Ball)
    vec = tmp_path / "b.vec"
    write_vector(vec, np.array([1.0, 2.0]))
    s = parse_set(f"singleton:{vec}")
    assert isinstance(s, Singleton) and s.dim == 2
    ball = parse_set(f"ball:{vec}:0.5")
    assert isinstance(ball, Ball) and ball.radius == 0.5
    box = parse_set(f"box:{vec}:{vec}")
    assert isinstance(box, Box)


@pytest.mark.parametrize("bad", ["cube:3", "ball:nope.vec:1", "l1ball:2", "fullspace:x"])
def test_parse_set_rejects(bad):
    with pytest.raises(ValueError, match="invalid set specification"):
        parse_set(bad)
