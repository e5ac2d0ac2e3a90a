import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.core.fields import (
    all_points,
    batched_rank_mod,
    encode_points,
    index_to_vector,
    inverse_mod,
    is_prime,
    nullspace_mod,
    primitive_root,
    rank_mod,
    require_prime,
    solve_mod,
    vector_to_index,
)
from src.errors import DomainError

PRIMES = st.sampled_from([2, 3, 5, 7])


def test_is_prime_small_values():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_require_prime_rejects_composites():
    with pytest.raises(DomainError):
        require_prime(4)
    with pytest.raises(DomainError):
        require_prime(1)


def test_inverse_mod_of_zero_fails():
    with pytest.raises(DomainError):
        inverse_mod(0, 5)


@given(PRIMES, st.integers(min_value=1, max_value=100))
def test_inverse_mod(p, a):
    if a % p == 0:
        return
    assert (a * inverse_mod(a, p)) % p == 1


@pytest.mark.parametrize("q, root", [(2, 1), (3, 2), (5, 2), (7, 3), (11, 2), (13, 2)])
def test_primitive_root(q, root):
    assert primitive_root(q) == root
    if q > 2:
        assert len({pow(root, e, q) for e in range(1, q)}) == q - 1


def test_rank_over_two_differs_from_rationals():
    M = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert rank_mod(M, 2) == 2
    assert rank_mod(M, 3) == 3


def test_rank_of_empty_matrix():
    assert rank_mod(np.zeros((0, 3), dtype=np.int64), 5) == 0


@given(PRIMES, st.integers(1, 4), st.integers(1, 5), st.integers(0, 2 ** 16))
def test_nullspace_vectors_are_annihilated(p, m, n, seed):
    M = np.random.default_rng(seed).integers(0, p, size=(m, n))
    basis = nullspace_mod(M, p)
    assert basis.shape == (n - rank_mod(M, p), n)
    assert not ((M @ basis.T) % p).any()


@given(PRIMES, st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 16))
def test_solve_mod_solves_consistent_systems(p, m, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, p, size=(m, n))
    x0 = rng.integers(0, p, size=n)
    b = (A @ x0) % p
    x = solve_mod(A, b, p)
    assert ((A @ x - b) % p == 0).all()


def test_solve_mod_inconsistent():
    with pytest.raises(DomainError):
        solve_mod([[1, 0], [1, 0]], [0, 1], 3)


@given(PRIMES, st.integers(1, 6), st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 16))
def test_batched_rank_matches_row_reduction(p, N, r, n, seed):
    mats = np.random.default_rng(seed).integers(0, p, size=(N, r, n))
    expected = [rank_mod(M, p) for M in mats]
    assert batched_rank_mod(mats, p).tolist() == expected


def test_point_encoding_is_big_endian():
    coords = all_points(3, 2)
    assert coords.shape == (9, 2)
    assert coords[5].tolist() == [1, 2]
    assert encode_points(coords, 3).tolist() == list(range(9))
    assert vector_to_index((1, 2), 3) == 5
    assert index_to_vector(5, 3, 2) == (1, 2)


def test_encode_points_reduces_modulo_q():
    assert int(encode_points(np.array([2, 3]), 2)) == 1
