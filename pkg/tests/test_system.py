from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.graph import vertex_weight
from src.core.system import (
    TwoLayerSystem,
    from_simplicial_complex,
    ground_graph,
    incidence_profile,
    induced_weights,
    is_locally_spherical,
    link_graph,
    link_mass,
    localized_mass,
    nonintersecting_graph,
    opposite_graph,
    opposite_mass_check,
    random_clique_system,
    random_grid_system,
    sphere_of_vertex,
    validate_system,
)
from src.errors import DomainError

seeds = st.integers(0, 2 ** 32 - 1)


@st.composite
def clique_systems(draw):
    rng = np.random.default_rng(draw(seeds))
    k = draw(st.integers(2, 3))
    return random_clique_system(rng, draw(st.integers(k + 1, 7)), k, draw(st.integers(1, 5)), max_weight=3)


@st.composite
def grid_systems(draw):
    rng = np.random.default_rng(draw(seeds))
    k = 2
    return random_grid_system(rng, draw(st.integers(4, 8)), k, draw(st.integers(1, 4)), max_weight=3)


@st.composite
def systems_with_subsets(draw):
    """随机系统与非空的 A ⊆ E、U ⊆ V"""
    x = draw(st.one_of(clique_systems(), grid_systems()))
    A = draw(st.frozensets(st.sampled_from(x.edge_names), min_size=1))
    U = draw(st.frozensets(st.sampled_from(x.vertices), min_size=1))
    return x, A, U


def test_triangle_is_a_223_system(triangle):
    validation = validate_system(triangle)
    assert validation.valid
    assert (validation.s, validation.k, validation.K) == (2, 2, 3)
    assert triangle.edge_names == ("a-b", "a-c", "b-c")


def test_triangle_weights(triangle):
    assert triangle.edge_weight == {"a-b": 1, "a-c": 1, "b-c": 1}
    assert triangle.vertex_weight == {"a": 1, "b": 1, "c": 1}
    assert triangle.link_vertex_weight["a"] == {"a-b": 1, "a-c": 1}
    assert link_mass(triangle, "a") == 2


def test_scaled_weights(triangle):
    half = triangle.scaled(Fraction(1, 2))
    assert half.edge_weight["a-b"] == Fraction(1, 2)
    assert half.validation.valid


def test_validation_reports_every_problem():
    x = TwoLayerSystem(
        ["a", "b", "c", "d"],
        {"ab": ["a", "b"], "abc": ["a", "b", "c"]},
        [(["ab", "abc"], 1)],
    )
    validation = validate_system(x)
    assert not validation.valid
    assert any("expected k=2" in v for v in validation.violations)
    assert any("'d' lies in no edge" in v for v in validation.violations)
    assert validation.s is None


def test_validation_rejects_multiplicity_one():
    x = TwoLayerSystem(["a", "b", "c", "d"], {"ab": ["a", "b"], "cd": ["c", "d"]}, [(["ab", "cd"], 1)])
    validation = validate_system(x)
    assert not validation.valid
    assert any("only one edge" in v for v in validation.violations)


def test_validation_rejects_non_positive_weight_and_duplicate_tops():
    edges = {"ab": "ab", "ac": "ac", "bc": "bc"}
    x = TwoLayerSystem("abc", edges, [(["ab", "ac", "bc"], 0), (["ab", "ac", "bc"], 1)])
    violations = validate_system(x).violations
    assert any("non-positive" in v for v in violations)
    assert any("equal as sets" in v for v in violations)


def test_validation_checks_declared_parameters():
    x = TwoLayerSystem("abc", {"ab": "ab", "ac": "ac", "bc": "bc"}, [(["ab", "ac", "bc"], 1)], s=2, k=2, K=4)
    assert any("declared K=4" in v for v in validate_system(x).violations)


def test_constructor_rejects_unknown_names():
    with pytest.raises(DomainError):
        TwoLayerSystem("ab", {"ab": "abc"}, [])
    with pytest.raises(DomainError):
        TwoLayerSystem("ab", {"ab": "ab"}, [(["zz"], 1)])


def test_require_valid_raises(triangle):
    bad = TwoLayerSystem("ab", {"ab": "ab"}, [(["ab"], 1)])
    with pytest.raises(DomainError):
        ground_graph(bad)
    assert triangle.require_valid() is triangle


def test_simplicial_complex_rejects_degenerate_input():
    with pytest.raises(DomainError):
        from_simplicial_complex([])
    with pytest.raises(DomainError):
        from_simplicial_complex([("a", "a", "b")])
    with pytest.raises(DomainError):
        from_simplicial_complex([("a", "b", "c"), ("c", "b", "a")])


def test_triangle_derived_graphs(triangle):
    g = ground_graph(triangle)
    assert sorted((u, v, w) for u, v, w in g.edges()) == [("a", "b", 1), ("a", "c", 1), ("b", "c", 1)]

    link = link_graph(triangle, "a")
    assert link.vertices == ("a-b", "a-c")
    assert link.weight("a-b", "a-c") == 1

    nint = nonintersecting_graph(triangle)
    assert nint.graph.is_edgeless
    assert (nint.q_min, nint.q_max, nint.r_nint) == (0, 0, 0)


def test_link_of_unknown_vertex(triangle):
    with pytest.raises(DomainError):
        link_graph(triangle, "z")


def test_grid_system_nonintersecting_ratio():
    rng = np.random.default_rng(7)
    x = random_grid_system(rng, 9, 3, 1)
    assert x.validation.valid
    nint = nonintersecting_graph(x)
    # 一个 σ 里每一行与另外两行不交
    assert (nint.q_min, nint.q_max, nint.r_nint) == (2, 2, 1)
    assert len(nint.graph.edge_weight) == 6


def test_two_triangles_share_an_edge():
    x = from_simplicial_complex([("a", "b", "c"), ("b", "c", "d")])
    assert x.edge_weight["b-c"] == 2
    assert x.vertex_weight["b"] == 2
    g = ground_graph(x)
    assert g.weight("b", "c") == 2
    link = link_graph(x, "b")
    assert set(link.vertices) == {"a-b", "b-c", "b-d"}
    assert link.weight("a-b", "b-c") == 1 and link.weight("b-c", "b-d") == 1
    assert link.weight("a-b", "b-d") == 0


def test_sphere_of_vertex_in_octahedron():
    """八面体：每个顶点的球面是对面的四边形"""
    octahedron = [
        ("n", "x", "y"), ("n", "y", "X"), ("n", "X", "Y"), ("n", "Y", "x"),
        ("s", "x", "y"), ("s", "y", "X"), ("s", "X", "Y"), ("s", "Y", "x"),
    ]
    x = from_simplicial_complex(octahedron)
    sphere = sphere_of_vertex(x, "n")
    assert set(sphere.vertices) == {"x", "y", "X", "Y"}
    assert len(sphere.edges) == 4
    assert all(w == 1 for w in sphere.edge_weight.values())
    assert is_locally_spherical(x).holds
    assert opposite_mass_check(x).holds
    assert opposite_graph(x).lambda_opp < 1


def test_single_triangle_is_locally_spherical(triangle):
    assert is_locally_spherical(triangle).holds
    assert sphere_of_vertex(triangle, "a").edges == ("b-c",)


def test_grid_system_is_not_locally_spherical():
    rng = np.random.default_rng(3)
    x = random_grid_system(rng, 4, 2, 1)
    check = is_locally_spherical(x)
    assert not check.holds
    assert not opposite_mass_check(x).applicable


def test_incidence_profile_and_localized_mass(triangle):
    profile = incidence_profile(triangle, ["a-b", "b-c"], ["a"])
    assert profile == {0: 1, 1: 1, 2: 0}
    assert localized_mass(triangle, "b", ["a-b", "b-c"]) == 2
    assert localized_mass(triangle, "a", ["b-c"]) == 0


@settings(max_examples=200)
@given(clique_systems())
def test_clique_weight_inequalities(x):
    assert x.validation.valid
    induced_weights(x)
    g = ground_graph(x)
    s, k = x.s, x.k
    for v in x.vertices:
        wv = x.vertex_weight[v]
        assert 2 * (k - 1) * wv <= vertex_weight(g, v) <= s * (k - 1) * wv
        assert 2 * wv <= link_mass(x, v) <= s * (s - 1) * wv


@settings(max_examples=200)
@given(grid_systems())
def test_grid_weight_inequalities(x):
    assert x.validation.valid
    assert x.s == 2 and x.K == 4
    _, vertex_weights = induced_weights(x)
    wE, wV = x.total_edge_weight, x.total_vertex_weight
    assert wE == wV
    nint = nonintersecting_graph(x)
    assert nint.r_nint == 1
    for v in x.vertices:
        link_graph(x, v)
        assert link_mass(x, v) == 2 * vertex_weights[v]


@settings(max_examples=200)
@given(st.one_of(clique_systems(), grid_systems()))
def test_nonintersecting_graph_weights(x):
    nint = nonintersecting_graph(x)
    for name in x.edge_names:
        m = sum(nint.graph.neighbors(name).values(), Fraction(0))
        assert nint.q_min * x.edge_weight[name] <= m <= nint.q_max * x.edge_weight[name]


@settings(max_examples=200)
@given(systems_with_subsets())
def test_nonintersecting_mass_of_edge_sets(case):
    x, A, _ = case
    nint = nonintersecting_graph(x)
    mass = sum((sum(nint.graph.neighbors(e).values(), Fraction(0)) for e in A), Fraction(0))
    wA = x.weight_of(A)
    assert nint.q_min * wA <= mass <= nint.q_max * wA


@settings(max_examples=200)
@given(systems_with_subsets())
def test_localized_mass_against_incidence_profile(case):
    """Σ_i i·w(A_U^i) ≤ Σ_{v∈U} m_v(A_v) ≤ (s-1)·Σ_i i·w(A_U^i) ≤ (s-1)k·w(A)"""
    x, A, U = case
    profile = incidence_profile(x, A, U)
    spread = sum((i * profile[i] for i in range(1, x.k + 1)), Fraction(0))
    local = sum((localized_mass(x, v, A) for v in U), Fraction(0))
    assert spread <= local <= (x.s - 1) * spread
    assert local <= (x.s - 1) * x.k * x.weight_of(A)


@settings(max_examples=200)
@given(st.one_of(clique_systems(), grid_systems()))
def test_opposite_mass_holds_wherever_it_applies(x):
    check = opposite_mass_check(x)
    assert check.holds or not check.applicable
    if not check.applicable:
        assert not is_locally_spherical(x).holds
