from itertools import combinations
from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import optimize, stats

import oracles
from rsclab.complex import ComplexError, flag_completion
from rsclab.homology import n_components
from rsclab.models import geometric as geo
from rsclab.rng import as_generator, trial_generator


def equilateral(s, centre=(0.5, 0.5)):
    c = np.asarray(centre)
    ang = np.array([0, 2 * pi / 3, 4 * pi / 3]) + 0.3
    return c + (s / sqrt(3)) * np.column_stack([np.cos(ang), np.sin(ang)])


# ------------------------------------------------------------------ samples


def test_empty_processes():
    assert len(geo.sample_binomial_process(0, 2, 1)) == 0
    assert len(geo.sample_poisson_process(0, 2, 1)) == 0


def test_binomial_box_counts():
    g = as_generator(1)
    counts = np.array([np.sum(np.all(geo.sample_binomial_process(50, 2, g).points < 0.3, axis=1)) for _ in range(10_000)])
    mu, var = 50 * 0.09, 50 * 0.09 * 0.91
    assert abs(counts.mean() - mu) < 4 * sqrt(var / counts.size)
    assert abs(counts.var() / var - 1) < 0.1


def test_pair_distance_law_on_circle():
    g = as_generator(2)
    d = np.array([geo.toroidal_distance(*geo.sample_binomial_process(2, 1, g).points) for _ in range(5000)])
    # P(dist <= x) = min(2x, 1): uniform on [0, 1/2]
    assert stats.kstest(d, "uniform", args=(0, 0.5)).pvalue > 0.01


def test_poisson_mean_and_spatial_independence():
    g = as_generator(3)
    a, b, total = [], [], []
    for _ in range(10_000):
        P = geo.sample_poisson_process(30, 2, g).points
        total.append(len(P))
        a.append(np.sum(P[:, 0] < 0.4))
        b.append(np.sum(P[:, 0] >= 0.5))
    total = np.array(total)
    assert abs(total.mean() - 30) < 4 * sqrt(30 / total.size)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.05


def test_point_cloud_validation_and_csv():
    with pytest.raises(ValueError):
        geo.TorusPointCloud(np.array([[0.2, 1.0]]))
    P = geo.sample_binomial_process(20, 3, 4)
    Q = geo.TorusPointCloud.from_csv(P.to_csv())
    assert np.array_equal(P.points, Q.points) and Q.d == 3
    S = P.shifted([0.7, 0.7, 0.7])
    assert np.all((S.points >= 0) & (S.points < 1))


# ----------------------------------------------------------------- metric


def test_toroidal_distance_examples():
    assert geo.toroidal_distance([0.3, 0.3], [0.3, 0.3]) == 0.0
    assert geo.toroidal_distance([0.1], [0.9]) == pytest.approx(0.2)
    assert geo.toroidal_distance([0.0, 0.0], [0.5, 0.5]) == pytest.approx(sqrt(2) / 2)


def test_degree_helpers():
    assert geo.unit_ball_volume(2) == pytest.approx(pi)
    assert geo.unit_ball_volume(3) == pytest.approx(4 * pi / 3)
    r = geo.radius_for_degree(1000, 6.0, 2)
    assert geo.expected_degree(1000, r, 2) == pytest.approx(6.0)
    assert geo.GeometricParams(1000, r, 2).degree == pytest.approx(6.0)
    with pytest.raises(ValueError):
        geo.GeometricParams(10, 0.0, 2)


# ------------------------------------------------------------------ graphs


def test_geometric_graph_edge_cases():
    P = geo.sample_binomial_process(30, 2, 5)
    assert geo.geometric_graph(P, 1e-9).count(1) == 0
    assert geo.geometric_graph(np.array([[0.0], [0.5]]), 0.49).count(1) == 0
    with pytest.raises(ComplexError):
        geo.geometric_graph(P, 0.5)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_geometric_graph_matches_brute_force(d):
    pts = as_generator(d).random((60, d))
    r = 0.2
    X = geo.geometric_graph(pts, r)
    expect = [(i, j) for i, j in combinations(range(60), 2) if oracles.torus_distance(pts[i], pts[j]) <= r]
    assert list(map(tuple, X.level(1).tolist())) == expect


def test_box_metric_has_no_wraparound():
    pts = np.array([[0.02, 0.5], [0.98, 0.5]])
    assert geo.geometric_graph(pts, 0.1).count(1) == 1
    assert geo.geometric_graph(pts, 0.1, periodic=False).count(1) == 0


def test_geometric_connectivity_above_log_n():
    n = 2000
    r = geo.radius_for_degree(n, np.log(n) + 3, 2)
    hits = [n_components(geo.geometric_graph(geo.sample_binomial_process(n, 2, trial_generator(6, 0, t)), r)) == 1 for t in range(40)]
    assert np.mean(hits) > 0.5


# -------------------------------------------------------------------- Rips


def test_rips_triangle_and_birth():
    tri = equilateral(0.1)
    F = geo.rips_complex(tri, 0.15, 2, filtration=True)
    assert F.complex.count(2) == 1
    assert F.births[2][0] == pytest.approx(0.1)


def test_rips_is_flag_of_graph():
    pts = as_generator(7).random((80, 2))
    X = geo.rips_complex(pts, 0.15, 3)
    assert X == flag_completion(geo.geometric_graph(pts, 0.15), 3)


# --------------------------------------------------------------- miniballs


def _oracle_radius(pts):
    f = lambda c: np.max(np.linalg.norm(pts - c, axis=1))
    res = optimize.minimize(f, pts.mean(axis=0), method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-13, "maxiter": 20000})
    return res.fun


@pytest.mark.parametrize("seed", range(25))
def test_miniball_against_optimizer(seed):
    g = as_generator(seed)
    d = 2 + seed % 2
    pts = g.random((int(g.integers(2, d + 2)), d))
    exact = geo.miniball_radii(pts[None])[0]
    _, welzl = geo.welzl_miniball(pts)
    assert exact == pytest.approx(welzl, abs=1e-9)
    assert exact == pytest.approx(_oracle_radius(pts), abs=1e-6)
    assert exact <= _oracle_radius(pts) + 1e-9


@pytest.mark.parametrize("scale", [1e-6, 1e-4, 1e-2])
def test_miniball_is_scale_and_translation_free(scale):
    g = as_generator(8)
    shapes = g.random((200, 3, 2))
    unit = geo.miniball_radii(shapes)
    far = geo.miniball_radii(0.9 + scale * shapes)
    assert np.all(np.isfinite(far))
    assert np.allclose(far, scale * unit, rtol=1e-8)


def test_tiny_cech_triangles_are_filled():
    # small acute triangle far from the origin: its 2-simplex must be present
    tri = 0.7 + 1e-4 * np.array([[0.0, 0.0], [1.0, 0.1], [0.4, 0.9]])
    assert geo.cech_complex(tri, 2e-4, 2).count(2) == 1


def test_miniball_known_shapes():
    s = 0.1
    assert geo.miniball_radii(equilateral(s)[None])[0] == pytest.approx(s / sqrt(3))
    obtuse = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.1]])
    assert geo.miniball_radii(obtuse[None])[0] == pytest.approx(0.5)


# -------------------------------------------------------------------- Čech


def test_cech_edge_rule():
    pts = np.array([[0.1, 0.1], [0.2, 0.1]])
    assert geo.cech_complex(pts, 0.1, 1).count(1) == 1
    assert geo.cech_complex(pts, 0.0999, 1).count(1) == 0


def test_cech_equilateral_threshold():
    s = 0.1
    tri = equilateral(s)
    thr = 2 * s / sqrt(3)
    assert geo.cech_complex(tri, thr * (1 + 1e-9), 2).count(2) == 1
    mid = 0.5 * (s + thr)
    assert geo.cech_complex(tri, mid, 2).count(2) == 0
    assert geo.rips_complex(tri, mid, 2).count(2) == 1
    F = geo.cech_complex(tri, 0.2, 2, filtration=True)
    assert F.births[2][0] == pytest.approx(thr)


def test_cech_radius_limit():
    with pytest.raises(ComplexError):
        geo.cech_complex(np.zeros((2, 2)), 0.25, 2)


@pytest.mark.parametrize("seed", range(60))
def test_sandwich(seed):
    g = as_generator(1000 + seed)
    d = 2 + seed % 2
    n = int(g.integers(20, 201))
    pts = geo.sample_binomial_process(n, d, g).points
    r = float(g.uniform(0.05, 0.2)) if d == 2 else float(g.uniform(0.1, 0.24))
    a = sqrt((d + 1) / (2 * d))
    top = d
    small = set(geo.rips_complex(pts, a * r, top))
    C = set(geo.cech_complex(pts, r, top))
    big = set(geo.rips_complex(pts, r, top))
    assert small <= C <= big


@pytest.mark.parametrize("seed", range(10))
def test_skeletons_coincide_and_births_monotone(seed):
    g = as_generator(seed)
    pts = g.random((100, 2))
    G = geo.geometric_graph(pts, 0.15)
    F = geo.cech_complex(pts, 0.15, 3, filtration=True)
    assert F.complex.skeleton(1) == G
    assert geo.rips_complex(pts, 0.15, 3).skeleton(1) == G
    X = F.complex
    for k in range(1, X.dim + 1):
        assert np.all(F.births[k - 1][X.boundary_index(k)].max(axis=1) <= F.births[k])


@given(st.integers(0, 2**32 - 1), st.lists(st.floats(0, 0.999), min_size=2, max_size=2))
def test_translation_invariance(seed, shift):
    P = geo.sample_binomial_process(60, 2, seed)
    Q = P.shifted(shift)
    for build, r in ((geo.cech_complex, 0.2), (geo.rips_complex, 0.2)):
        assert set(build(P, r, 2)) == set(build(Q, r, 2))


def test_lifted_positions_wrap():
    pts = np.array([[0.99, 0.5], [0.01, 0.5]])
    L = geo.lifted_positions(pts, np.array([[0, 1]]))
    assert np.allclose(L[0, 1], [1.01, 0.5])
