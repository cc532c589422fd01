from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import closure, complex_set, random_simplices
from rsclab.complex import (
    ComplexError,
    Filtration,
    SimplicialComplex,
    degree_sequence,
    euler_characteristic,
    flag_completion,
    generalized_degree,
    k_shells,
    read_complex,
    vertex_degrees,
    write_complex,
)
from rsclab.rng import as_generator


def full(n, top):
    return SimplicialComplex(n, [tuple(range(n))]).skeleton(top)


simplex_lists = st.integers(1, 7).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.lists(st.integers(0, n - 1), min_size=1, max_size=4, unique=True), max_size=12),
    )
)


# ---------------------------------------------------------------- closure


def test_add_triangle_to_isolated_vertices():
    X = SimplicialComplex(3).add_with_closure((0, 1, 2))
    for s in [(0, 1), (0, 2), (1, 2), (0, 1, 2)]:
        assert s in X


def test_add_existing_simplex_is_idempotent():
    X = SimplicialComplex(4, [(0, 1, 2)])
    assert X.add_with_closure((0, 1)) == X
    assert X.add_with_closure((0, 1, 2)) == X


def test_tetrahedron_f_vector():
    assert SimplicialComplex(4).add_with_closure((0, 1, 2, 3)).f_vector() == (4, 6, 4, 1)


def test_out_of_range_vertex():
    with pytest.raises(ComplexError):
        SimplicialComplex(3).add_with_closure((0, 3))
    with pytest.raises(ComplexError):
        SimplicialComplex(3, [(1, 5)])


def test_duplicate_vertices_rejected():
    with pytest.raises(ComplexError):
        SimplicialComplex(3, [(1, 1)])


@given(simplex_lists)
def test_closure_matches_set_oracle(case):
    n, simplices = case
    X = SimplicialComplex(n, simplices)
    assert set(X) == complex_set(n, simplices)


@given(simplex_lists, st.data())
def test_repeated_insertion_stays_closed(case, data):
    n, simplices = case
    X = SimplicialComplex(n)
    for s in simplices:
        X = X.add_with_closure(s)
    faces = set(X)
    for s in faces:
        for k in range(1, len(s)):
            assert all(f in faces for f in combinations(s, k))


def test_levels_sorted_and_readonly():
    X = SimplicialComplex(6, [(3, 4, 5), (0, 2), (0, 1, 5)])
    for k in range(X.dim + 1):
        rows = [tuple(r) for r in X.level(k).tolist()]
        assert rows == sorted(rows)
    with pytest.raises(ValueError):
        X.level(1)[0, 0] = 9


def test_from_levels_closed_checks_closure():
    with pytest.raises(ComplexError):
        SimplicialComplex.from_levels(3, {2: np.array([[0, 1, 2]])}, closed=True)
    X = SimplicialComplex.from_levels(3, {2: np.array([[0, 1, 2]])})
    assert X.f_vector() == (3, 3, 1)


def test_restrict_and_skeleton():
    X = full(4, 3)
    assert X.skeleton(1).f_vector() == (4, 6)
    Y = X.restrict({1: np.ones(6, bool), 2: np.zeros(4, bool), 3: np.zeros(1, bool)})
    assert Y.f_vector() == (4, 6)


def test_text_roundtrip(tmp_path):
    X = SimplicialComplex(7, [(0, 3, 6), (1, 2), (4, 5, 6, 2)])
    text = X.to_text()
    assert text.splitlines()[0] == "n=7"
    body = text.splitlines()[1:]
    assert body == sorted(body, key=lambda ln: tuple(int(v) for v in ln.split(",")))
    assert SimplicialComplex.from_text(text) == X
    write_complex(X, tmp_path / "x.txt")
    assert read_complex(tmp_path / "x.txt") == X


def test_from_text_requires_header():
    with pytest.raises(ComplexError):
        SimplicialComplex.from_text("0,1\n")


# ----------------------------------------------------------------- shells


def test_shells_of_triangle_boundary():
    filled, empty = k_shells(SimplicialComplex(3, [(0, 1), (1, 2), (0, 2)]), 2)
    assert filled.shape[0] == 0 and empty.tolist() == [[0, 1, 2]]


def test_shells_of_k4():
    filled, empty = k_shells(full(4, 1), 2)
    assert filled.shape[0] + empty.shape[0] == 4 and filled.shape[0] == 0


def test_shells_of_full_triangle():
    filled, empty = k_shells(SimplicialComplex(3, [(0, 1, 2)]), 2)
    assert filled.tolist() == [[0, 1, 2]] and empty.shape[0] == 0


def test_shell_range_check():
    with pytest.raises(ComplexError):
        k_shells(SimplicialComplex(3), 3)


def _brute_shells(S, n, k):
    return sorted(c for c in combinations(range(n), k + 1) if all(f in S for f in combinations(c, k)))


@given(simplex_lists, st.integers(1, 3))
def test_shells_match_subset_enumeration(case, k):
    n, simplices = case
    if k >= n:
        return
    X = SimplicialComplex(n, simplices)
    S = set(X)
    filled, empty = k_shells(X, k)
    expect = _brute_shells(S, n, k)
    got = sorted(map(tuple, filled.tolist() + empty.tolist()))
    assert got == expect
    assert all(tuple(r) in S for r in filled.tolist())
    assert not any(tuple(r) in S for r in empty.tolist())


@given(simplex_lists, st.integers(1, 3))
def test_filling_empty_shells_exhausts_them(case, k):
    n, simplices = case
    if k >= n:
        return
    X = SimplicialComplex(n, simplices)
    _, empty = k_shells(X, k)
    Y = X.with_simplices(k, empty)
    assert k_shells(Y, k)[1].shape[0] == 0


# ------------------------------------------------------------------- flag


def test_flag_of_k4_is_simplex():
    assert flag_completion(full(4, 1), 3) == full(4, 3)


def test_flag_of_4_cycle():
    C = SimplicialComplex(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert flag_completion(C, 3).dim == 1


def test_flag_k5_minus_edge():
    G = SimplicialComplex(5, [e for e in combinations(range(5), 2) if e != (3, 4)])
    f = flag_completion(G, 4).f_vector()
    assert f + (0,) * (5 - len(f)) == (5, 9, 7, 2, 0)


@given(st.integers(2, 8), st.data())
def test_flag_matches_clique_oracle(n, data):
    edges = data.draw(st.lists(st.sampled_from(list(combinations(range(n), 2))), unique=True))
    X = flag_completion(SimplicialComplex(n, edges), 4)
    E = set(edges)
    cliques = {c for k in range(1, 6) for c in combinations(range(n), k) if all(e in E for e in combinations(c, 2))}
    assert set(X) == cliques
    assert flag_completion(X.skeleton(1), 4) == X


# ---------------------------------------------------------------- degrees


def test_generalized_degree():
    T = full(4, 3)
    assert generalized_degree(T, (0, 1), 2) == 2
    G = SimplicialComplex(4, [(0, 1), (0, 2), (0, 3)])
    assert generalized_degree(G, (0,), 1) == 3
    assert generalized_degree(SimplicialComplex(3, [(0, 1, 2)]), (0, 1, 2), 3) == 0
    with pytest.raises(ComplexError):
        generalized_degree(G, (1, 2), 2)


def test_degree_sequences():
    X = full(4, 2)
    assert degree_sequence(X, 2).tolist() == [2] * 6
    assert vertex_degrees(X, 2).tolist() == [3] * 4


# ------------------------------------------------------------------ euler


def test_euler_examples():
    assert euler_characteristic(SimplicialComplex(6)) == 6
    assert euler_characteristic(full(4, 3)) == 1
    assert euler_characteristic(full(4, 2)) == 2


# -------------------------------------------------------------- filtration


def test_filtration_monotone_check():
    X = SimplicialComplex(3, [(0, 1)])
    with pytest.raises(ComplexError):
        Filtration(X, {0: np.array([0.0, 0.5, 0.0]), 1: np.array([0.2])})
    with pytest.raises(ComplexError):
        Filtration(X, {0: np.zeros(3), 1: np.array([-1.0])})
    F = Filtration(X, {0: np.zeros(3), 1: np.array([0.2])})
    assert F.sublevel(0.1).count(1) == 0 and F.sublevel(0.2).count(1) == 1


def test_capacity_guard():
    with pytest.raises(Exception):
        full(300, 3)


def test_random_complexes_consistent_counts():
    g = as_generator(4)
    for _ in range(50):
        n = int(g.integers(1, 8))
        simplices = random_simplices(g, n)
        X = SimplicialComplex(n, simplices)
        assert len(X) == len(closure(simplices) | {(v,) for v in range(n)})
