from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.core.code import (
    LinearCodeModel,
    amplified_constants,
    bitflip_correct,
    check_amplified_bound,
    check_extendibility,
    codewords,
    distance_bound_check,
    flip_vertex,
    indicator_code,
    nearest_codeword,
    rej,
    simplicial_code,
    sphere_code,
    sphere_correct_experimental,
    testability_constants,
    validate_modelling,
    verify_linear_dependency,
    violated_supports,
    weighted_norm,
)
from src.core.system import from_simplicial_complex, random_grid_system
from src.errors import CapacityError, DomainError, PreconditionError

OCTAHEDRON = [
    ("n", "x", "y"), ("n", "y", "X"), ("n", "X", "Y"), ("n", "Y", "x"),
    ("s", "x", "y"), ("s", "y", "X"), ("s", "X", "Y"), ("s", "Y", "x"),
]


@pytest.fixture
def octahedron_code():
    return simplicial_code(from_simplicial_complex(OCTAHEDRON), 2)


def test_triangle_code_is_well_modelled(triangle_code):
    assert validate_modelling(triangle_code).valid
    assert triangle_code.dimension == 1
    assert codewords(triangle_code).tolist() == [[0, 0, 0], [1, 1, 1]]
    assert triangle_code.contains({"a": 1, "b": 1, "c": 1})


def test_modelling_reports_missing_rows_and_dependencies(triangle):
    code = LinearCodeModel(triangle, 2, {"a-b": {"a": 1, "b": 1}, "a-c": {"a": 1, "c": 1}})
    violations = validate_modelling(code).violations
    assert "edge 'b-c' has no constraint row" in violations
    assert "top #0 is the support of no dependency" in violations


def test_modelling_reports_wrong_support(triangle):
    rows = {"a-b": {"a": 1}, "a-c": {"a": 1, "c": 1}, "b-c": {"b": 1, "c": 1}}
    code = LinearCodeModel(triangle, 2, rows, [{"a-b": 1, "a-c": 1, "b-c": 1}])
    validation = validate_modelling(code)
    assert not validation.valid
    assert any("differs from its edge" in v for v in validation.violations)
    assert any("ld.H = 0" in v for v in validation.violations)


def test_code_rejects_unknown_names(triangle):
    with pytest.raises(DomainError):
        LinearCodeModel(triangle, 2, {"a-z": {"a": 1}})
    with pytest.raises(DomainError):
        LinearCodeModel(triangle, 2, {"a-b": {"a": 1, "b": 1}}, [{"b-c": 1}])
    with pytest.raises(DomainError):
        LinearCodeModel(triangle, 4, {})


def test_verify_linear_dependency():
    H = [[1, 1, 0], [1, 0, 1], [0, 1, 1]]
    assert verify_linear_dependency(H, [1, 1, 1], 2)
    assert not verify_linear_dependency(H, [1, 1, 0], 2)
    assert not verify_linear_dependency(H, [1, 1, 1], 3)
    with pytest.raises(DomainError):
        verify_linear_dependency(H, [1, 1], 2)


def test_simplicial_code_needs_triangles():
    x = random_grid_system(np.random.default_rng(3), 4, 2, 1)
    with pytest.raises(DomainError):
        simplicial_code(x, 2)


def test_indicator_code_on_grid():
    x = random_grid_system(np.random.default_rng(3), 4, 2, 1)
    code = indicator_code(x, 3)
    assert validate_modelling(code).valid
    # 行与列两族系数相反
    assert sorted(code.dependencies[0].values()) == [1, 1, 2, 2]


def test_indicator_code_needs_bipartite_tops(triangle):
    with pytest.raises(DomainError):
        indicator_code(triangle, 2)


def test_word_validation(triangle_code):
    with pytest.raises(DomainError):
        triangle_code.word({"a": 1})
    with pytest.raises(DomainError):
        triangle_code.word([2, 0, 0])
    with pytest.raises(DomainError):
        triangle_code.word([0, 0])


def test_rejection_and_nearest_codeword(triangle_code):
    noisy = {"a": 1, "b": 0, "c": 0}
    assert violated_supports(triangle_code, noisy) == frozenset({"a-b", "a-c"})
    assert rej(triangle_code, noisy) == Fraction(2, 3)
    assert weighted_norm(triangle_code, noisy) == Fraction(1, 3)
    assert nearest_codeword(triangle_code, noisy) == ((0, 0, 0), Fraction(1, 3))
    assert rej(triangle_code, [1, 1, 1]) == 0


def test_codeword_cap(triangle_code):
    with pytest.raises(CapacityError):
        codewords(triangle_code, cap=1)


def test_flip_vertex(triangle_code):
    assert flip_vertex(triangle_code, (1, 0, 0), "a") == ((0, 0, 0), 0)
    word, fraction = flip_vertex(triangle_code, (1, 0, 0), "b")
    # 两个取值都留下一条违反的边，保持原值
    assert word == (1, 0, 0)
    assert fraction == Fraction(1, 2)


def test_bitflip_on_triangle(triangle_code):
    result = bitflip_correct(triangle_code, {"a": 1, "b": 0, "c": 0}, Fraction(3, 4))
    assert result.word == (0, 0, 0)
    assert result.flips == ["a"]
    assert result.in_code
    assert result.distance_moved == Fraction(1, 3)
    assert result.distance_bound == Fraction(4, 3)


def test_bitflip_leaves_codewords_alone(triangle_code):
    result = bitflip_correct(triangle_code, (1, 1, 1), Fraction(3, 4))
    assert result.flips == []
    assert result.distance_moved == 0


def test_bitflip_needs_delta_above_threshold(triangle_code):
    with pytest.raises(DomainError):
        bitflip_correct(triangle_code, (1, 0, 0), Fraction(1, 2))


def test_bitflip_on_octahedron(octahedron_code):
    word = {v: 0 for v in octahedron_code.vertices} | {"n": 1}
    result = bitflip_correct(octahedron_code, word, Fraction(3, 4))
    assert result.in_code
    assert result.flips == ["n"]
    assert result.distance_moved == Fraction(1, 6)
    assert result.distance_bound == Fraction(2, 3)


@given(st.lists(st.integers(0, 1), min_size=6, max_size=6), st.sampled_from([Fraction(3, 4), Fraction(9, 10)]))
def test_bitflip_ends_with_every_vertex_small(bits, delta):
    code = simplicial_code(from_simplicial_complex(OCTAHEDRON), 2)
    result = bitflip_correct(code, bits, delta)
    assert result.distance_moved <= result.distance_bound
    violated = violated_supports(code, result.word)
    x = code.system
    for v in x.vertices:
        local = sum((m for e, m in x.link_vertex_weight[v].items() if e in violated), Fraction(0))
        assert local < delta * sum(x.link_vertex_weight[v].values(), Fraction(0))


def test_amplified_constants():
    constants = amplified_constants(Fraction(3, 4), 2, 2, Fraction(1, 2), 1)
    assert constants.r == Fraction(1, 8)
    assert constants.t == 2
    with pytest.raises(DomainError):
        amplified_constants(Fraction(1, 2), 2, 2, Fraction(1, 2), 1)
    with pytest.raises(DomainError):
        amplified_constants(Fraction(3, 4), 2, 2, 0, 1)


def test_amplified_bound_on_noisy_triangle(triangle_code):
    check = check_amplified_bound(triangle_code, (1, 0, 0), Fraction(1, 8), 2)
    assert check.holds
    assert check.lhs == Fraction(2, 3)
    assert check.rhs == Fraction(1, 16)


def test_testability_constants(triangle_code):
    constants = testability_constants(triangle_code, Fraction(3, 4))
    assert constants.applicable
    assert constants.mu == Fraction(1, 57344)
    assert constants.r == Fraction(1, 229376)
    assert constants.eps0 == Fraction(1, 229376)
    assert constants.t == 3
    for delta in (Fraction(1, 2), 1):
        with pytest.raises(DomainError):
            testability_constants(triangle_code, delta)


def test_distance_bound(triangle_code):
    check = distance_bound_check(triangle_code)
    assert check.holds
    assert check.bound == Fraction(1, 2)
    assert check.true_distance == 1
    assert check.lambda_gr == 0


def test_sphere_code_of_octahedron(octahedron_code):
    local = sphere_code(octahedron_code, "n")
    assert set(local.vertices) == {"x", "y", "X", "Y"}
    assert len(local.rows) == 4


def test_extendibility(octahedron_code):
    assert check_extendibility(octahedron_code, "n", {"x": 1, "y": 1, "X": 1, "Y": 1}) == 1
    assert check_extendibility(octahedron_code, "n", {"x": 0, "y": 0, "X": 0, "Y": 0}) == 0
    with pytest.raises(PreconditionError):
        check_extendibility(octahedron_code, "n", {"x": 1, "y": 0, "X": 0, "Y": 0})
    with pytest.raises(PreconditionError) as info:
        check_extendibility(octahedron_code, "n", {"x": 0, "y": 0, "X": 0})
    assert info.value.item == "Y"


def test_sphere_correction_on_octahedron(octahedron_code):
    word = {v: 0 for v in octahedron_code.vertices} | {"n": 1}
    report = sphere_correct_experimental(octahedron_code, word, Fraction(3, 4))
    assert report.in_code
    assert report.corrected == ["n"]
    assert report.iterations == 1
    assert report.terminated_by == "no_candidate"
    assert report.locally_small


def test_sphere_correction_needs_locally_spherical_system():
    x = random_grid_system(np.random.default_rng(3), 4, 2, 1)
    code = indicator_code(x, 2)
    with pytest.raises(DomainError):
        sphere_correct_experimental(code, [0] * len(x.vertices), Fraction(3, 4))


@pytest.mark.slow
@pytest.mark.parametrize("p", [2, 3])
def test_bitflip_decodes_low_rejection_words_on_certified_systems(certified_systems, p):
    delta = Fraction(3, 4)
    slack = delta - Fraction(p - 1, p)
    checked = 0
    for x, thresholds in certified_systems:
        if (x.k, x.K) != (2, 3) or p ** len(x.vertices) > 2 ** 18:
            continue
        code = simplicial_code(x, p)
        words = np.array(list(product(range(p), repeat=len(x.vertices))), dtype=np.int64)
        violated = (words @ code.parity_matrix.T) % p != 0
        row_weights = code.row_weights.astype(np.int64)
        rejections = violated.astype(np.int64) @ row_weights
        total = int(row_weights.sum())
        for word, weight in zip(words, rejections):
            rejection = Fraction(int(weight), total)
            if rejection >= thresholds.eps0:
                continue
            assert rejection == rej(code, word)
            result = bitflip_correct(code, word, delta)
            assert result.in_code
            moved = weighted_norm(code, (np.array(result.word) - word) % p)
            assert moved <= Fraction(x.s, x.k) * rejection / (2 * slack)
            checked += 1
    assert checked
