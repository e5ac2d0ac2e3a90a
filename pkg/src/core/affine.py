"""
仿射不变码模块 - 单轨道仿射不变码及其二层系统：轨道、admissible 集、ℓ^S、一般位置矩阵、依赖与扩张估计

点 x ∈ F_q^n 以大端 q 进制编码为整数；E 的元素以排好序的点编号元组命名。
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.api.schemas import AdmissibleSet, AffineCodeSpec, AffineExpansionReport, AffineThresholds, CoverVerdict, LocalCheck
from src.config import settings
from src.core.code import LinearCodeModel, validate_modelling
from src.core.fields import all_points, batched_rank_mod, encode_points, primitive_root, rank_mod, solve_mod
from src.core.graph import (
    Number,
    WeightedGraph,
    as_fraction,
    check_weak_cover,
    cheeger_constant,
    is_lambda_expander,
    second_eigenvalue,
)
from src.core.system import TwoLayerSystem, ground_graph, link_graph, nonintersecting_graph
from src.errors import CapacityError, DomainError, check_cap, ensure

Support = Tuple[int, ...]


# ---------------------------------------------------------------------------
# 一般位置与轨道
# ---------------------------------------------------------------------------

def general_position(vs: Sequence[Sequence[int]], q: int) -> bool:
    """x₂-x₁, …, x_m-x₁ 在 F_q 上线性无关"""
    vs = np.asarray(vs, dtype=np.int64)
    if vs.ndim != 2 or len(vs) == 0:
        raise DomainError("general position needs a non-empty sequence of vectors")
    m, n = vs.shape
    if m == 1:
        return True
    if m > n + 1:
        return False
    return rank_mod(vs[1:] - vs[0], q) == m - 1


def point_coords(spec: AffineCodeSpec) -> np.ndarray:
    check_cap(spec.size, settings.affine_point_cap, "affine point count q^n")
    return all_points(spec.q, spec.n)


def base_points(spec: AffineCodeSpec) -> np.ndarray:
    """τ₀ 各点的编号，按固定下标顺序"""
    return encode_points(np.array(spec.tau0, dtype=np.int64), spec.q)


def _generator_permutations(spec: AffineCodeSpec, coords: np.ndarray) -> List[np.ndarray]:
    """
    Aff(F_q^n) 的生成元在点上的置换：基向量平移、初等 transvection x_i += x_j、
    以及 x_0 乘以 F_q^* 的生成元
    """
    q, n = spec.q, spec.n
    perms = []
    for i in range(n):
        moved = coords.copy()
        moved[:, i] += 1
        perms.append(encode_points(moved, q))
    for i in range(n):
        for j in range(n):
            if i != j:
                moved = coords.copy()
                moved[:, i] += moved[:, j]
                perms.append(encode_points(moved, q))
    g = primitive_root(q)
    if g != 1:
        moved = coords.copy()
        moved[:, 0] *= g
        perms.append(encode_points(moved, q))
    return perms


def orbit_supports(spec: AffineCodeSpec) -> Tuple[Support, ...]:
    """
    τ₀ 在 Aff(F_q^n) 作用下的轨道（作为无序支撑），用生成元闭包的 BFS 求得

    Returns:
        按字典序排列的支撑元组

    Raises:
        CapacityError: q^n 超过 affine_point_cap
    """
    coords = point_coords(spec)
    perms = _generator_permutations(spec, coords)
    start = tuple(sorted(int(x) for x in base_points(spec)))
    seen = {start}
    frontier = np.array([start], dtype=np.int64)
    while len(frontier):
        found = []
        for perm in perms:
            images = np.sort(perm[frontier], axis=1)
            for row in map(tuple, images.tolist()):
                if row not in seen:
                    seen.add(row)
                    found.append(row)
        frontier = np.array(found, dtype=np.int64).reshape(-1, spec.k)
    logger.debug(f"Orbit of tau0: {len(seen)} supports")
    return tuple(sorted(seen))


# ---------------------------------------------------------------------------
# admissible 集与 ℓ^S
# ---------------------------------------------------------------------------

def admissible_sets(spec: AffineCodeSpec) -> Tuple[List[AdmissibleSet], int]:
    """
    全部极大一般位置下标集（0 起）及其公共大小 k'

    断言各 admissible 集大小相同、2 ≤ k' ≤ min{k, n+1}，且任意两个下标同属某个 admissible 集
    """
    vectors = np.array(spec.tau0, dtype=np.int64)
    k = spec.k
    in_gp = {S for size in range(1, k + 1) for S in combinations(range(k), size)
             if general_position(vectors[list(S)], spec.q)}
    maximal = sorted(S for S in in_gp
                     if not any(tuple(sorted(S + (i,))) in in_gp for i in range(k) if i not in S))
    sizes = {len(S) for S in maximal}
    ensure(len(sizes) == 1, f"admissible sets have different sizes {sorted(sizes)}")
    k_prime = sizes.pop()
    ensure(2 <= k_prime <= min(k, spec.n + 1), f"k' = {k_prime} outside [2, min(k, n+1)]")
    for pair in combinations(range(k), 2):
        ensure(any(set(pair) <= set(S) for S in maximal), f"indices {pair} lie in no admissible set")
    return [AdmissibleSet(indices=S) for S in maximal], k_prime


def _require_admissible(spec: AffineCodeSpec, S: AdmissibleSet) -> None:
    sets, _ = admissible_sets(spec)
    if S.indices not in {A.indices for A in sets}:
        raise DomainError(f"index set {S.indices} is not admissible")


def ell_maps(spec: AffineCodeSpec, S: AdmissibleSet) -> np.ndarray:
    """
    M_S（k × k'）：x_i = Σ_{j∈S} β_ij x_j，各行和为 1，j₀ 取 S 中最小下标

    Raises:
        DomainError: S 不是 admissible 集
    """
    _require_admissible(spec, S)
    q = spec.q
    vectors = np.array(spec.tau0, dtype=np.int64)
    j0 = S.indices[0]
    rest = list(S.indices[1:])
    D = (vectors[rest] - vectors[j0]).T % q  # n × (k'-1)
    M = np.zeros((spec.k, len(S.indices)), dtype=np.int64)
    for i in range(spec.k):
        if rest:
            alpha = solve_mod(D, vectors[i] - vectors[j0], q)
        else:
            alpha = np.zeros(0, dtype=np.int64)
        M[i, 1:] = alpha
        M[i, 0] = (1 - int(alpha.sum())) % q

    ensure(((M.sum(axis=1) - 1) % q == 0).all(), "rows of M_S do not sum to 1")
    ensure((((M @ vectors[list(S.indices)]) - vectors) % q == 0).all(), "M_S does not reproduce tau0")
    for pos, i in enumerate(S.indices):
        unit = np.zeros(len(S.indices), dtype=np.int64)
        unit[pos] = 1
        ensure((M[i] == unit).all(), f"row {i} of M_S is not the coordinate map")
    return M


# ---------------------------------------------------------------------------
# 一般位置矩阵
# ---------------------------------------------------------------------------

class GpMatrix(NamedTuple):
    B: np.ndarray  # k' × k' 点编号
    S1: AdmissibleSet
    S2: AdmissibleSet


@dataclass
class GpEnumeration:
    """gp_matrices 的结果；exhaustive 为 False 时只是抽样估计"""
    S1: AdmissibleSet
    S2: AdmissibleSet
    matrices: np.ndarray  # (N, k', k') 点编号
    products: np.ndarray  # (N, k, k) M_{S1} B M_{S2}^t 的点编号
    count: int
    candidates: int
    exhaustive: bool
    lower_bound: Fraction = Fraction(0)

    @property
    def density(self) -> Fraction:
        return Fraction(self.count, self.candidates) if self.candidates else Fraction(0)

    def __iter__(self) -> Iterator[GpMatrix]:
        for B in self.matrices:
            yield GpMatrix(B, self.S1, self.S2)


def _gp_filter(
    spec: AffineCodeSpec, coords: np.ndarray, M1: np.ndarray, M2: np.ndarray, flat: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    一批候选 B（每行 k'² 个点编号）中处于一般位置的掩码及其乘积矩阵的点编号
    """
    q, n, k = spec.q, spec.n, spec.k
    kp = M1.shape[1]
    N = len(flat)
    Bc = coords[flat].reshape(N, kp, kp, n)

    rows = np.einsum("ia,Nabx->Nibx", M1, Bc) % q        # M_{S1} B 的各行
    cols = np.einsum("Nabx,jb->Najx", Bc, M2) % q        # B M_{S2}^t 的各列
    row_diffs = (rows[:, :, 1:, :] - rows[:, :, :1, :]).reshape(N * k, kp - 1, n)
    col_vecs = np.transpose(cols, (0, 2, 1, 3))          # (N, k, k', n)
    col_diffs = (col_vecs[:, :, 1:, :] - col_vecs[:, :, :1, :]).reshape(N * k, kp - 1, n)
    mask = (batched_rank_mod(row_diffs, q) == kp - 1).reshape(N, k).all(axis=1)
    mask &= (batched_rank_mod(col_diffs, q) == kp - 1).reshape(N, k).all(axis=1)

    P = np.einsum("ia,Nabx,jb->Nijx", M1, Bc, M2) % q
    points = encode_points(P, q)                          # (N, k, k)
    ordered = np.sort(points.reshape(N, k * k), axis=1)
    mask &= (np.diff(ordered, axis=1) != 0).all(axis=1)
    return mask, points


def _decode_chunk(start: int, stop: int, base: int, width: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.zeros((len(idx), width), dtype=np.int64)
    for j in range(width - 1, -1, -1):
        digits[:, j] = idx % base
        idx //= base
    return digits


def gp_matrices(
    spec: AffineCodeSpec,
    S1: AdmissibleSet,
    S2: AdmissibleSet,
    cap: Optional[int] = None,
    sample: bool = False,
    seed: Optional[int] = None,
) -> GpEnumeration:
    """
    枚举相对 (S1, S2) 处于一般位置的 k'×k' 矩阵 B

    候选数 (q^n)^{k'²} 不超过 gp_candidate_cap 时穷举并断言计数下界
    (q^n)^{k'²}·(1 - k²/q^n)；超过时若 sample 为 True 则改为抽样估计密度，否则抛出 CapacityError。
    """
    coords = point_coords(spec)
    M1, M2 = ell_maps(spec, S1), ell_maps(spec, S2)
    Q, kp = spec.size, len(S1.indices)
    width = kp * kp
    total = Q ** width
    cap = settings.gp_candidate_cap if cap is None else cap
    lower = Fraction(total) * (1 - Fraction(spec.k ** 2, Q))

    if total > cap:
        if not sample:
            raise CapacityError(f"general-position candidates: {total} exceeds cap {cap}", cap=cap, requested=total)
        return gp_density_estimate(spec, S1, S2, seed=seed)

    kept_B, kept_P = [], []
    chunk = max(1, settings.cheeger_chunk_size)
    for start in range(0, total, chunk):
        flat = _decode_chunk(start, min(start + chunk, total), Q, width)
        mask, points = _gp_filter(spec, coords, M1, M2, flat)
        kept_B.append(flat[mask].reshape(-1, kp, kp))
        kept_P.append(points[mask])
    matrices = np.concatenate(kept_B) if kept_B else np.zeros((0, kp, kp), dtype=np.int64)
    products = np.concatenate(kept_P) if kept_P else np.zeros((0, spec.k, spec.k), dtype=np.int64)
    count = len(matrices)
    ensure(count >= lower, f"general-position count {count} is below the lower bound {lower}")
    logger.debug(f"General-position matrices: {count} of {total}")
    return GpEnumeration(S1, S2, matrices, products, count, total, True, lower)


def gp_density_estimate(
    spec: AffineCodeSpec, S1: AdmissibleSet, S2: AdmissibleSet, seed: Optional[int] = None, samples: Optional[int] = None
) -> GpEnumeration:
    """均匀抽样估计一般位置矩阵的密度，与 1 - k²/q^n 对照"""
    coords = point_coords(spec)
    M1, M2 = ell_maps(spec, S1), ell_maps(spec, S2)
    Q, kp = spec.size, len(S1.indices)
    samples = settings.gp_sample_size if samples is None else samples
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    flat = rng.integers(0, Q, size=(samples, kp * kp))
    mask, points = _gp_filter(spec, coords, M1, M2, flat)
    count = int(mask.sum())
    logger.warning(f"General-position enumeration over cap; sampled density {count}/{samples} "
                   f"vs guaranteed {float(1 - Fraction(spec.k ** 2, Q)):.4f}")
    return GpEnumeration(S1, S2, flat[mask].reshape(-1, kp, kp), points[mask], count, samples, False,
                         Fraction(samples) * (1 - Fraction(spec.k ** 2, Q)))


def _as_point_matrix(spec: AffineCodeSpec, B, kp: int) -> np.ndarray:
    B = np.asarray(B, dtype=np.int64)
    if B.shape == (kp, kp, spec.n):
        return encode_points(B, spec.q)
    if B.shape == (kp, kp):
        return B
    raise DomainError(f"B must be a {kp}x{kp} matrix of points")


def dependency_of(
    spec: AffineCodeSpec, S1: AdmissibleSet, S2: AdmissibleSet, B
) -> Tuple[Dict[Support, int], FrozenSet[Support]]:
    """
    ld_{B,S1,S2}：M_{S1} B M_{S2}^t 的行支撑取 +1，列支撑取 -1

    Returns:
        (ld, σ)，σ 为 2k 个支撑

    Raises:
        DomainError: B 不处于一般位置
    """
    coords = point_coords(spec)
    M1, M2 = ell_maps(spec, S1), ell_maps(spec, S2)
    kp = len(S1.indices)
    B = _as_point_matrix(spec, B, kp)
    mask, points = _gp_filter(spec, coords, M1, M2, B.reshape(1, kp * kp))
    if not mask[0]:
        raise DomainError("B is not in general position with respect to (S1, S2)")
    P = points[0]
    ld: Dict[Support, int] = {}
    for row in P:
        ld[tuple(sorted(int(x) for x in row))] = 1
    for col in P.T:
        ld[tuple(sorted(int(x) for x in col))] = -1
    ensure(len(ld) == 2 * spec.k, "rows and columns of M B M^t do not give 2k distinct supports")

    # 每个点在 +1 行中出现一次、在 -1 列中出现一次
    balance: Dict[int, int] = {}
    for support, sign in ld.items():
        for x in support:
            balance[x] = balance.get(x, 0) + sign
    ensure(all(v == 0 for v in balance.values()), "dependency does not cancel symbolically")
    return ld, frozenset(ld)


# ---------------------------------------------------------------------------
# 构造
# ---------------------------------------------------------------------------

def _support_codes(points: np.ndarray, Q: int) -> np.ndarray:
    """沿最后一维把点编号序列（视为 Q 进制数字）编码为整数"""
    k = points.shape[-1]
    weights = Q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return points @ weights


def _decode_support(code: int, Q: int, k: int) -> Support:
    digits = []
    for _ in range(k):
        digits.append(code % Q)
        code //= Q
    return tuple(int(d) for d in reversed(digits))


def _tops_from(enum: GpEnumeration, Q: int, k: int) -> Tuple[Dict[FrozenSet[Support], int], Dict[FrozenSet[Support], Dict[Support, int]]]:
    """按支撑 σ 统计 B 的个数；每个 σ 的依赖取首个 B 的行/列符号"""
    P = enum.products
    N = len(P)
    row_codes = _support_codes(np.sort(P, axis=2), Q)                       # (N, k)
    col_codes = _support_codes(np.sort(np.transpose(P, (0, 2, 1)), axis=2), Q)
    keys = np.sort(np.concatenate([row_codes, col_codes], axis=1), axis=1)  # (N, 2k)
    unique, first, counts = np.unique(keys, axis=0, return_index=True, return_counts=True)

    weights: Dict[FrozenSet[Support], int] = {}
    signs: Dict[FrozenSet[Support], Dict[Support, int]] = {}
    for key, i, count in zip(unique, first, counts):
        sigma = frozenset(_decode_support(int(c), Q, k) for c in key)
        weights[sigma] = int(count)
        ld = {_decode_support(int(c), Q, k): 1 for c in row_codes[i]}
        ld.update({_decode_support(int(c), Q, k): -1 for c in col_codes[i]})
        signs[sigma] = ld
    ensure(sum(weights.values()) == N, "weights do not add up to the number of matrices")
    return weights, signs


@dataclass
class AffineInstance:
    """单轨道仿射不变码实例：系统、码、所用的 admissible 对及构造数据"""
    spec: AffineCodeSpec
    system: TwoLayerSystem
    code: LinearCodeModel
    admissible: List[AdmissibleSet]
    k_prime: int
    pair: Tuple[AdmissibleSet, AdmissibleSet]
    enumeration: GpEnumeration
    independence_checked: bool
    weights: Dict[FrozenSet[Support], int] = field(repr=False, default_factory=dict)

    @property
    def gp_count(self) -> int:
        return self.enumeration.count


def _pairs(sets: List[AdmissibleSet]) -> List[Tuple[AdmissibleSet, AdmissibleSet]]:
    return [(a, b) for a in sets for b in sets]


def build_affine_instance(spec: AffineCodeSpec, cap: Optional[int] = None) -> AffineInstance:
    """
    构造二层系统与码：V = F_q^n，E 为 τ₀ 的轨道，T 与 w 来自字典序最小的 admissible 对上的一般位置矩阵

    断言：(2, k, 2k)-系统且 R_nint = 1；w 在 E 与 V 上为常数；换用第二个 admissible 对得到相同的 (T, w)；
    码满足 validate_modelling

    Raises:
        DomainError: T 为空（需要 q^n > k²）
        CapacityError: 穷举超过上限
    """
    Q, k = spec.size, spec.k
    check_cap(Q, settings.affine_point_cap, "affine point count q^n")
    if Q ** k >= 2 ** 62:
        raise CapacityError(f"support codes need q^(nk) < 2^62, got {Q}^{k}", cap=2 ** 62, requested=Q ** k)
    sets, k_prime = admissible_sets(spec)
    pairs = _pairs(sets)
    S1, S2 = pairs[0]
    enum = gp_matrices(spec, S1, S2, cap=cap)
    if enum.count == 0:
        raise DomainError(f"no matrix is in general position: T is empty (guaranteed non-empty when q^n > k^2 = {k * k})")
    weights, signs = _tops_from(enum, Q, k)

    independence_checked = len(pairs) > 1
    if independence_checked:
        other = gp_matrices(spec, *pairs[1], cap=cap)
        other_weights, _ = _tops_from(other, Q, k)
        ensure(other_weights == weights, "(T, w) depends on the admissible pair")
    else:
        logger.warning("Only one admissible pair; independence of (T, w) not checked")

    orbit = orbit_supports(spec)
    orbit_set = set(orbit)
    for sigma in weights:
        ensure(sigma <= orbit_set, "a dependency support is not in the orbit of tau0")
    system = TwoLayerSystem(
        range(Q),
        {support: support for support in orbit},
        [(sigma, w) for sigma, w in sorted(weights.items(), key=lambda item: sorted(item[0]))],
        s=2, k=k, K=2 * k,
    )
    validation = system.validation
    ensure(validation.valid, f"affine system is invalid: {validation.violations[:1]}")
    ensure(system.observed_s == 2, f"affine system has multiplicity {system.observed_s}, expected 2")
    ensure(nonintersecting_graph(system).r_nint == 1, "affine system does not have R_nint = 1")
    ensure(len(set(system.edge_weight.values())) == 1, "w is not constant on E")
    ensure(len(set(system.vertex_weight.values())) == 1, "w is not constant on V")

    p = spec.p
    rows = {support: {x: 1 for x in support} for support in orbit}
    deps = [{support: sign % p for support, sign in signs[sigma].items()} for sigma in system.tops]
    code = LinearCodeModel(system, p, rows, deps)
    modelling = validate_modelling(code)
    ensure(modelling.valid, f"affine code is not modelled over its system: {modelling.violations[:1]}")

    logger.info(f"Affine instance built: |V|={Q}, |E|={len(orbit)}, |T|={len(system.tops)}, gp={enum.count}")
    return AffineInstance(spec, system, code, sets, k_prime, (S1, S2), enum, independence_checked, weights)


# ---------------------------------------------------------------------------
# 有序覆盖图
# ---------------------------------------------------------------------------

def _ordered_tables(instance: AffineInstance) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    P = instance.enumeration.products
    Q = instance.spec.size
    rows = _support_codes(P, Q)                             # (N, k) 行的有序编码
    cols = _support_codes(np.transpose(P, (0, 2, 1)), Q)    # (N, k) 列的有序编码
    return P, rows, cols


def _cover_from_pairs(a: np.ndarray, b: np.ndarray, Q: int, k: int) -> Tuple[WeightedGraph, Dict[Support, Support]]:
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    pairs, counts = np.unique(np.stack([lo, hi], axis=1), axis=0, return_counts=True)
    codes = sorted(set(int(c) for c in pairs.ravel()))
    names = {c: _decode_support(c, Q, k) for c in codes}
    graph = WeightedGraph(
        [names[c] for c in codes],
        [(names[int(u)], names[int(v)], int(w)) for (u, v), w in zip(pairs, counts)],
    )
    proj = {name: tuple(sorted(name)) for name in names.values()}
    return graph, proj


def ordered_nonintersecting_graph(instance: AffineInstance) -> Tuple[WeightedGraph, Dict[Support, Support]]:
    """
    有序 non-intersecting 图：同一 M B M^t 中的两行或两列相连，权重为这样的 B 的个数

    Returns:
        (覆盖图, 到无序支撑的投影)
    """
    _, rows, cols = _ordered_tables(instance)
    k = instance.spec.k
    left, right = [], []
    for a, b in combinations(range(k), 2):
        left += [rows[:, a], cols[:, a]]
        right += [rows[:, b], cols[:, b]]
    return _cover_from_pairs(np.concatenate(left), np.concatenate(right), instance.spec.size, k)


def ordered_link_graph(instance: AffineInstance, x: int) -> Tuple[WeightedGraph, Dict[Support, Support]]:
    """点 x 的有序 link：M B M^t 中交于 x 的行与列相连"""
    P, rows, cols = _ordered_tables(instance)
    k = instance.spec.k
    where = np.nonzero(P == x)  # (matrix, i, j)
    if where[0].size == 0:
        raise DomainError(f"point {x} appears in no matrix")
    return _cover_from_pairs(rows[where[0], where[1]], cols[where[0], where[2]], instance.spec.size, k)


def _compare_cover(cover: WeightedGraph, base: WeightedGraph, proj: Dict) -> CoverVerdict:
    """弱覆盖校验后比较 h(base) ≥ h(cover)；超过 Cheeger 上限时比较 λ₂(base) ≤ λ₂(cover)"""
    verdict = check_weak_cover(cover, base, proj)
    if not verdict.passed:
        return verdict
    cap = settings.cheeger_vertex_cap
    if len(cover.vertices) <= cap and len(base.vertices) <= cap:
        h_base, h_cover = cheeger_constant(base), cheeger_constant(cover)
        if h_base < h_cover:
            return CoverVerdict(passed=False, reason=f"h(base) = {h_base} < h(cover) = {h_cover}")
        return CoverVerdict(passed=True, reason=f"h(base) = {h_base} >= h(cover) = {h_cover}")
    if not (cover.is_connected() and base.is_connected()) or cover.isolated_vertices() or base.isolated_vertices():
        return CoverVerdict(passed=True, reason="weak cover; spectral comparison skipped (disconnected)")
    lam_base, lam_cover = second_eigenvalue(base), second_eigenvalue(cover)
    if lam_base > lam_cover + settings.affine_guard_band:
        return CoverVerdict(passed=False, reason=f"lambda2(base) = {lam_base:.9g} > lambda2(cover) = {lam_cover:.9g}")
    return CoverVerdict(passed=True, reason=f"lambda2(base) = {lam_base:.6g} <= lambda2(cover) = {lam_cover:.6g}")


def ordered_cover_check(instance: AffineInstance) -> Dict[str, CoverVerdict]:
    """有序 non-intersecting 图与各有序 link 是否弱覆盖无序图，且 Cheeger 常数不增"""
    system = instance.system
    verdicts: Dict[str, CoverVerdict] = {}
    cover, proj = ordered_nonintersecting_graph(instance)
    verdicts["nonintersecting"] = _compare_cover(cover, nonintersecting_graph(system).graph, proj)
    for x in system.vertices:
        cover, proj = ordered_link_graph(instance, x)
        verdicts[f"link:{x}"] = _compare_cover(cover, link_graph(system, x), proj)
    failing = [name for name, v in verdicts.items() if not v.passed]
    if failing:
        logger.warning(f"Ordered cover check failed at {failing[0]}")
    return verdicts


# ---------------------------------------------------------------------------
# 扩张与不变性
# ---------------------------------------------------------------------------

def affine_expansion_check(instance: AffineInstance, covers: bool = True) -> AffineExpansionReport:
    """
    q^n > 4k² 时验证 ground、non-intersecting 与每个 link 都是 (4k²/q^n)-expander
    （Cheeger 上限外用谱证书，guard 取 affine_guard_band）
    """
    spec, system = instance.spec, instance.system
    Q, k = spec.size, spec.k
    if Q <= 4 * k * k:
        return AffineExpansionReport(applicable=False, passed=False,
                                     reason=f"needs q^n > 4k^2, got {Q} <= {4 * k * k}")
    target = Fraction(4 * k * k, Q)
    guard = settings.affine_guard_band

    g = ground_graph(system)
    n = len(g.vertices)
    complete = len(g.edge_weight) == n * (n - 1) // 2 and len(set(g.edge_weight.values())) == 1
    ground = is_lambda_expander(g, target, guard=guard)
    nint_graph = nonintersecting_graph(system).graph
    if nint_graph.is_edgeless:
        nint = is_lambda_expander(nint_graph, target, guard=guard).model_copy(
            update={"passed": True, "certificate": "edgeless", "reason": "totally disconnected"})
    else:
        nint = is_lambda_expander(nint_graph, target, guard=guard)
    links = {x: is_lambda_expander(link_graph(system, x), target, guard=guard) for x in system.vertices}
    cover_verdicts = ordered_cover_check(instance) if covers else {}

    passed = (ground.passed and nint.passed and all(v.passed for v in links.values())
              and all(v.passed for v in cover_verdicts.values()))
    logger.info(f"Affine expansion check: target={target}, passed={passed}")
    return AffineExpansionReport(applicable=True, target=target, ground=ground, ground_complete_constant=complete,
                                 nonintersecting=nint, links=links, covers=cover_verdicts, passed=passed)


def affine_invariance_check(instance: AffineInstance, seed: Optional[int] = None, trials: int = 5) -> LocalCheck:
    """随机可逆仿射变换保持 E、T 与 w"""
    spec, system = instance.spec, instance.system
    q, n = spec.q, spec.n
    coords = point_coords(spec)
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    edges = {system.support[e] for e in system.edge_names}
    tops = {frozenset(system.support[e] for e in sigma): w for sigma, w in zip(system.tops, system.top_weight)}
    for trial in range(trials):
        while True:
            L = rng.integers(0, q, size=(n, n))
            if rank_mod(L, q) == n:
                break
        y = rng.integers(0, q, size=n)
        perm = encode_points(coords @ L.T + y, q)

        def image(support) -> FrozenSet[int]:
            return frozenset(int(perm[x]) for x in support)

        if {image(e) for e in edges} != edges:
            return LocalCheck(holds=False, counterexample=(trial,), reason="E is not preserved")
        moved = {frozenset(image(e) for e in sigma): w for sigma, w in tops.items()}
        if moved != tops:
            return LocalCheck(holds=False, counterexample=(trial,), reason="(T, w) is not preserved")
    return LocalCheck(holds=True)


def affine_testability_thresholds(spec: AffineCodeSpec, delta: Number) -> AffineThresholds:
    """
    仿射码的可测性常数：
    q^n ≥ k⁴·128(1+15δ)/(7(1-δ)²)，ε₀ = 7(1-δ)³/(512(1+15δ))/k²，
    r = 7(1-δ)³(δ-(p-1)/p)/(512(1+15δ))，t = 3；
    δ = (2p-1)/(2p) 时简化为 2048p²k⁴ 与 r = 1/(2¹⁵p⁴)
    """
    d = as_fraction(delta)
    p, k = spec.p, spec.k
    if not Fraction(p - 1, p) < d < 1:
        raise DomainError(f"delta must lie in ((p-1)/p, 1), got {d}")
    requirement = Fraction(k ** 4 * 128) * (1 + 15 * d) / (7 * (1 - d) ** 2)
    mu = 7 * (1 - d) ** 3 / (512 * (1 + 15 * d))
    return AffineThresholds(
        size_requirement=requirement,
        eps0=mu / k ** 2,
        r=mu * (d - Fraction(p - 1, p)),
        t=3,
        corollary_size_requirement=2048 * p ** 2 * k ** 4,
        corollary_r=Fraction(1, 2 ** 15 * p ** 4),
        corollary_delta=Fraction(2 * p - 1, 2 * p),
    )
