"""
素域 F_p 上的线性代数：行化简、秩、零空间、线性方程求解
"""
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import DomainError


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def require_prime(p: int, what: str = "p") -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise DomainError(f"{what} must be a prime, got {p}")
    return int(p)


def inverse_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise DomainError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


@lru_cache(maxsize=None)
def primitive_root(q: int) -> int:
    """F_q^* 的最小生成元"""
    require_prime(q, "q")
    if q == 2:
        return 1
    order = q - 1
    factors = set()
    n, d = order, 2
    while d * d <= n:
        while n % d == 0:
            factors.add(d)
            n //= d
        d += 1
    if n > 1:
        factors.add(n)
    for g in range(2, q):
        if all(pow(g, order // f, q) != 1 for f in factors):
            return g
    raise DomainError(f"no primitive root mod {q}")


def row_reduce(matrix, p: int) -> Tuple[np.ndarray, List[int]]:
    """
    F_p 上的简化行阶梯形（部分主元按行序选取）

    Args:
        matrix: m x n 整数矩阵
        p: 素数

    Returns:
        (R, pivot_cols)
    """
    R = np.array(matrix, dtype=np.int64, copy=True) % p
    if R.ndim != 2:
        raise DomainError("row_reduce expects a 2-d matrix")
    m, n = R.shape
    pivot_cols: List[int] = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        nonzero = np.nonzero(R[row:, col])[0]
        if nonzero.size == 0:
            continue
        found = row + int(nonzero[0])
        if found != row:
            R[[row, found]] = R[[found, row]]
        R[row] = (R[row] * inverse_mod(int(R[row, col]), p)) % p
        for other in range(m):
            if other != row and R[other, col] != 0:
                R[other] = (R[other] - R[other, col] * R[row]) % p
        pivot_cols.append(col)
        row += 1
    return R, pivot_cols


def rank_mod(matrix, p: int) -> int:
    M = np.asarray(matrix, dtype=np.int64)
    if M.size == 0:
        return 0
    _, pivots = row_reduce(M, p)
    return len(pivots)


def nullspace_mod(matrix, p: int, n_cols: Optional[int] = None) -> np.ndarray:
    """
    右零空间 {x : M x = 0} 的一组基

    Returns:
        形状 (dim, n) 的数组，每行一个基向量
    """
    M = np.asarray(matrix, dtype=np.int64)
    if M.size == 0:
        n = n_cols if n_cols is not None else (M.shape[1] if M.ndim == 2 else 0)
        return np.eye(n, dtype=np.int64)
    R, pivots = row_reduce(M, p)
    n = R.shape[1]
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for b, f in enumerate(free):
        basis[b, f] = 1
        for r, pc in enumerate(pivots):
            basis[b, pc] = (-R[r, f]) % p
    return basis


def solve_mod(A, b, p: int) -> np.ndarray:
    """求解 A x = b（自由变量取 0），无解时抛出 DomainError"""
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    aug = np.concatenate([A, b], axis=1)
    R, pivots = row_reduce(aug, p)
    n = A.shape[1]
    if n in pivots:
        raise DomainError("linear system has no solution over F_p")
    x = np.zeros(n, dtype=np.int64)
    for r, pc in enumerate(pivots):
        x[pc] = R[r, n]
    return x


def vector_to_index(vec: Sequence[int], q: int) -> int:
    """向量按 q 进制（大端）编码为整数"""
    index = 0
    for x in vec:
        index = index * q + int(x)
    return index


def index_to_vector(index: int, q: int, n: int) -> Tuple[int, ...]:
    digits = []
    for _ in range(n):
        digits.append(index % q)
        index //= q
    return tuple(reversed(digits))


def all_points(q: int, n: int) -> np.ndarray:
    """F_q^n 全部点的坐标，行号即点的编码"""
    count = q ** n
    idx = np.arange(count, dtype=np.int64)
    coords = np.zeros((count, n), dtype=np.int64)
    for j in range(n - 1, -1, -1):
        coords[:, j] = idx % q
        idx //= q
    return coords


def encode_points(coords: np.ndarray, q: int) -> np.ndarray:
    """沿最后一维把坐标编码为点的整数编号"""
    n = coords.shape[-1]
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (coords % q) @ weights


def batched_rank_mod(mats: np.ndarray, p: int) -> np.ndarray:
    """
    一批小矩阵的秩（F_p），逐列消元，每个矩阵各自选主元

    Args:
        mats: 形状 (N, r, n) 的整数数组

    Returns:
        长度 N 的秩数组
    """
    A = np.array(mats, dtype=np.int64, copy=True) % p
    if A.ndim != 3:
        raise DomainError("batched_rank_mod expects an (N, r, n) array")
    N, r, n = A.shape
    rank = np.zeros(N, dtype=np.int64)
    if r == 0 or N == 0:
        return rank
    inverses = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inverses[a] = inverse_mod(a, p)
    rows = np.arange(r)
    for col in range(n):
        eligible = (rows[None, :] >= rank[:, None]) & (A[:, :, col] != 0)
        active = np.nonzero(eligible.any(axis=1))[0]
        if active.size == 0:
            continue
        pivot = np.argmax(eligible[active], axis=1)
        target = rank[active]
        # 主元行换到 target 位置
        pivot_rows = A[active, pivot].copy()
        A[active, pivot] = A[active, target]
        A[active, target] = (pivot_rows * inverses[pivot_rows[:, col]][:, None]) % p
        coef = A[active, :, col].copy()
        coef[np.arange(active.size), target] = 0
        A[active] = (A[active] - coef[:, :, None] * A[active, target][:, None, :]) % p
        rank[active] += 1
        if (rank == r).all():
            break
    return rank
