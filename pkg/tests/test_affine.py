from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from pydantic import ValidationError

from src.api.schemas import AdmissibleSet, AffineCodeSpec
from src.core.affine import (
    admissible_sets,
    affine_expansion_check,
    affine_invariance_check,
    affine_testability_thresholds,
    build_affine_instance,
    dependency_of,
    ell_maps,
    general_position,
    gp_matrices,
    ordered_cover_check,
    orbit_supports,
)
from src.core.code import codewords
from src.errors import CapacityError, DomainError


def test_general_position():
    assert general_position([(0, 0), (1, 0), (0, 1)], 2)
    assert not general_position([(0, 0), (1, 0), (2, 0)], 3)
    assert general_position([(1, 1)], 2)
    assert not general_position([(0, 0), (1, 0), (0, 1), (1, 1)], 2)
    with pytest.raises(DomainError):
        general_position([], 2)


def test_spec_validation():
    with pytest.raises(ValidationError):
        AffineCodeSpec(q=4, n=2, p=2, tau0=((0, 0), (1, 0)))
    with pytest.raises(ValidationError):
        AffineCodeSpec(q=2, n=2, p=2, tau0=((0, 0), (0, 0)))
    with pytest.raises(ValidationError):
        AffineCodeSpec(q=2, n=2, p=2, tau0=((0, 0),))
    with pytest.raises(ValidationError):
        AffineCodeSpec(q=2, n=2, p=2, tau0=((0, 0), (2, 0)))


def test_plane_orbit_is_every_pair(plane_spec):
    assert orbit_supports(plane_spec) == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def test_flat_orbit_has_fourteen_planes(flat_spec):
    assert len(orbit_supports(flat_spec)) == 14


def test_admissible_sets_of_a_line(line_spec):
    sets, k_prime = admissible_sets(line_spec)
    assert [S.indices for S in sets] == [(0, 1), (0, 2), (1, 2)]
    assert k_prime == 2


def test_ell_maps_express_tau0(line_spec):
    M = ell_maps(line_spec, AdmissibleSet(indices=(0, 1)))
    assert M.tolist() == [[1, 0], [0, 1], [2, 2]]
    with pytest.raises(DomainError):
        ell_maps(line_spec, AdmissibleSet(indices=(0,)))


def test_ell_maps_of_a_flat(flat_spec):
    sets, k_prime = admissible_sets(flat_spec)
    assert k_prime == 3
    assert len(sets) == 4
    M = ell_maps(flat_spec, AdmissibleSet(indices=(0, 1, 2)))
    assert M[3].tolist() == [1, 1, 1]


def test_gp_matrices_of_plane(plane_spec):
    S = AdmissibleSet(indices=(0, 1))
    enum = gp_matrices(plane_spec, S, S)
    # 四个点两两不同的 2×2 排列
    assert enum.count == 24
    assert enum.candidates == 256
    assert enum.exhaustive
    assert enum.density == Fraction(24, 256)
    assert len(list(enum)) == 24


def test_gp_matrices_over_cap(flat_spec):
    S = AdmissibleSet(indices=(0, 1, 2))
    with pytest.raises(CapacityError):
        gp_matrices(flat_spec, S, S)
    estimate = gp_matrices(flat_spec, S, S, sample=True, seed=1)
    assert not estimate.exhaustive
    assert estimate.count <= estimate.candidates


def test_dependency_of_plane_matrix(plane_spec):
    S = AdmissibleSet(indices=(0, 1))
    ld, sigma = dependency_of(plane_spec, S, S, [[0, 1], [2, 3]])
    assert ld == {(0, 1): 1, (2, 3): 1, (0, 2): -1, (1, 3): -1}
    assert sigma == frozenset(ld)
    coordinates = [[(0, 0), (0, 1)], [(1, 0), (1, 1)]]
    assert dependency_of(plane_spec, S, S, coordinates)[0] == ld
    with pytest.raises(DomainError):
        dependency_of(plane_spec, S, S, [[0, 0], [1, 2]])


def test_build_plane_instance(plane_spec):
    instance = build_affine_instance(plane_spec)
    x = instance.system
    assert instance.k_prime == 2
    assert instance.gp_count == 24
    assert not instance.independence_checked
    assert len(x.edge_names) == 6
    assert len(x.tops) == 3
    assert set(x.top_weight) == {8}
    assert set(x.edge_weight.values()) == {16}
    assert set(x.vertex_weight.values()) == {24}
    assert codewords(instance.code).tolist() == [[0, 0, 0, 0], [1, 1, 1, 1]]


def test_build_line_instance_checks_independence(line_spec):
    instance = build_affine_instance(line_spec)
    assert instance.independence_checked
    assert len(instance.system.edge_names) == 12
    assert len(instance.admissible) == 3


def test_build_flat_instance_is_over_cap(flat_spec):
    with pytest.raises(CapacityError):
        build_affine_instance(flat_spec)


def test_plane_is_invariant_and_covers(plane_spec):
    instance = build_affine_instance(plane_spec)
    assert affine_invariance_check(instance, seed=3).holds
    verdicts = ordered_cover_check(instance)
    assert "nonintersecting" in verdicts
    assert all(v.passed for v in verdicts.values())


def test_expansion_needs_large_field(plane_spec):
    report = affine_expansion_check(build_affine_instance(plane_spec))
    assert not report.applicable
    assert not report.passed


def test_thresholds_for_plane(plane_spec):
    t = affine_testability_thresholds(plane_spec, Fraction(3, 4))
    assert t.size_requirement == 57344
    assert t.eps0 == Fraction(1, 229376)
    assert t.r == Fraction(1, 229376)
    assert t.t == 3
    assert t.corollary_size_requirement == 131072
    assert t.corollary_r == Fraction(1, 524288)
    assert t.corollary_delta == Fraction(3, 4)
    with pytest.raises(DomainError):
        affine_testability_thresholds(plane_spec, Fraction(1, 2))


def seeded_threshold_case(seed: int):
    """由种子确定 (p, k, δ)，δ = a/b 严格落在 ((p-1)/p, 1) 内"""
    rng = np.random.default_rng(seed)
    p = int(rng.choice([2, 3, 5, 7, 11]))
    k = int(rng.integers(2, 7))
    m = int(rng.integers(2, 11))
    b = p * m
    a = int(rng.integers(m * (p - 1) + 1, b))
    return p, k, a, b


@pytest.mark.parametrize("seed", range(20))
def test_thresholds_match_integer_evaluation(seed):
    p, k, a, b = seeded_threshold_case(seed)
    spec = AffineCodeSpec(q=p, n=3, p=p, tau0=tuple(product(range(p), repeat=3))[:k])
    t = affine_testability_thresholds(spec, Fraction(a, b))

    # (1-δ) = (b-a)/b，1+15δ = (b+15a)/b
    mu = Fraction(7 * (b - a) ** 3, 512 * b * b * (b + 15 * a))
    assert t.size_requirement == Fraction(128 * k ** 4 * b * (b + 15 * a), 7 * (b - a) ** 2)
    assert t.eps0 == mu / k ** 2
    assert t.r == mu * Fraction(a * p - b * (p - 1), b * p)
    assert t.t == 3
    assert t.corollary_size_requirement == 2048 * p ** 2 * k ** 4
    assert t.corollary_r == Fraction(1, 32768 * p ** 4)
    assert t.corollary_delta == Fraction(2 * p - 1, 2 * p)

    at_corollary = affine_testability_thresholds(spec, t.corollary_delta)
    assert at_corollary.size_requirement <= t.corollary_size_requirement
    assert at_corollary.r >= t.corollary_r


@pytest.mark.slow
def test_two_points_in_f2_5_expand():
    spec = AffineCodeSpec(q=2, n=5, p=2, tau0=((0, 0, 0, 0, 0), (1, 0, 0, 0, 0)))
    instance = build_affine_instance(spec)
    assert instance.gp_count == 863040
    assert len(instance.system.edge_names) == 496
    report = affine_expansion_check(instance, covers=False)
    assert report.applicable
    assert report.target == Fraction(16, 32)
    assert report.passed
