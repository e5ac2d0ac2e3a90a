"""
带权图模块 - 精确有理边权、Cheeger 常数、随机游走谱与二部图抽样引理
"""
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger

from src.api.schemas import AlmostCompleteBound, CoverVerdict, ExpanderVerdict, InequalityCheck
from src.config import settings
from src.errors import DomainError, PreconditionError, check_cap

Vertex = Hashable
Number = Union[int, Fraction, float, str]


def as_fraction(value: Number) -> Fraction:
    """把 int / Fraction / float / "a/b" 字符串转成精确有理数（float 取其精确二进制值）"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"boolean is not a number: {value!r}")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise DomainError(f"non-finite number: {value!r}")
        return Fraction(float(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(f"not a rational number: {value!r}") from e
    raise DomainError(f"unsupported number type: {type(value).__name__}")


class WeightedGraph:
    """
    带正有理边权的无向简单图，构造后不可变

    顶点按给定顺序编号；孤立顶点允许存在（派生图会产生孤立点）。
    """

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Tuple[Vertex, Vertex, Number]]):
        self.vertices: Tuple[Vertex, ...] = tuple(vertices)
        self.index: Dict[Vertex, int] = {}
        for i, v in enumerate(self.vertices):
            if v in self.index:
                raise DomainError(f"duplicate vertex {v!r}")
            self.index[v] = i

        weights: Dict[FrozenSet[Vertex], Fraction] = {}
        for u, v, w in edges:
            if u not in self.index or v not in self.index:
                raise DomainError(f"edge {u!r}-{v!r} uses an unknown vertex")
            if u == v:
                raise DomainError(f"self-loop at {u!r}")
            key = frozenset((u, v))
            if key in weights:
                raise DomainError(f"duplicate edge {u!r}-{v!r}")
            weight = as_fraction(w)
            if weight <= 0:
                raise DomainError(f"edge {u!r}-{v!r} has non-positive weight {weight}")
            weights[key] = weight
        self.edge_weight: Dict[FrozenSet[Vertex], Fraction] = weights

        adjacency: List[Dict[int, Fraction]] = [dict() for _ in self.vertices]
        for key, w in weights.items():
            u, v = tuple(key)
            i, j = self.index[u], self.index[v]
            adjacency[i][j] = w
            adjacency[j][i] = w
        self._adjacency = adjacency
        self._vertex_weight = [sum(a.values(), Fraction(0)) for a in adjacency]

    @classmethod
    def from_weights(cls, vertices: Iterable[Vertex], weights: Mapping[FrozenSet[Vertex], Number]) -> "WeightedGraph":
        """由 {frozenset({u, v}): weight} 构造（派生图使用）"""
        edges = []
        for key, w in weights.items():
            u, v = tuple(key)
            edges.append((u, v, w))
        return cls(vertices, edges)

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={len(self.vertices)}, edges={len(self.edge_weight)})"

    def edges(self) -> Iterator[Tuple[Vertex, Vertex, Fraction]]:
        """按 (较小下标, 较大下标) 字典序输出边"""
        for i, neighbours in enumerate(self._adjacency):
            for j in sorted(neighbours):
                if i < j:
                    yield self.vertices[i], self.vertices[j], neighbours[j]

    def neighbors(self, v: Vertex) -> Dict[Vertex, Fraction]:
        i = self._require_vertex(v)
        return {self.vertices[j]: w for j, w in sorted(self._adjacency[i].items())}

    def weight(self, u: Vertex, v: Vertex) -> Fraction:
        return self.edge_weight.get(frozenset((u, v)), Fraction(0))

    @property
    def is_edgeless(self) -> bool:
        return not self.edge_weight

    def isolated_vertices(self) -> List[Vertex]:
        return [v for v, a in zip(self.vertices, self._adjacency) if not a]

    @cached_property
    def nx_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.vertices)))
        g.add_weighted_edges_from((i, j, float(w)) for i, a in enumerate(self._adjacency) for j, w in a.items() if i < j)
        return g

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        return nx.is_connected(self.nx_graph)

    def component_count(self) -> int:
        return nx.number_connected_components(self.nx_graph)

    def _require_vertex(self, v: Vertex) -> int:
        try:
            return self.index[v]
        except (KeyError, TypeError):
            raise DomainError(f"unknown vertex {v!r}") from None

    def _indices(self, U: Iterable[Vertex], what: str = "vertex set") -> List[int]:
        indices = sorted({self._require_vertex(u) for u in U})
        if not indices:
            raise DomainError(f"{what} is empty")
        return indices


class BipartiteGraph(WeightedGraph):
    """二部带权图：边只连接 V₁ 与 V₂"""

    def __init__(self, left: Iterable[Vertex], right: Iterable[Vertex], edges: Iterable[Tuple[Vertex, Vertex, Number]]):
        left = tuple(left)
        right = tuple(right)
        left_set, right_set = set(left), set(right)
        if left_set & right_set:
            raise DomainError("bipartite sides are not disjoint")
        edges = list(edges)
        for u, v, _ in edges:
            if not ((u in left_set and v in right_set) or (u in right_set and v in left_set)):
                raise DomainError(f"edge {u!r}-{v!r} does not cross the bipartition")
        super().__init__(left + right, edges)
        self.left: Tuple[Vertex, ...] = left
        self.right: Tuple[Vertex, ...] = right

    def neighborhood(self, U: Iterable[Vertex]) -> List[Vertex]:
        """N(U)，按顶点编号排序"""
        found = set()
        for i in self._indices(U):
            found.update(self._adjacency[i])
        return [self.vertices[j] for j in sorted(found)]


# ---------------------------------------------------------------------------
# 基本量
# ---------------------------------------------------------------------------

def vertex_weight(g: WeightedGraph, v: Vertex) -> Fraction:
    """m(v) = Σ_{e∋v} m(e)，孤立点为 0"""
    return g._vertex_weight[g._require_vertex(v)]


def total_weight(g: WeightedGraph) -> Fraction:
    return sum(g._vertex_weight, Fraction(0))


def set_weight(g: WeightedGraph, U: Iterable[Vertex]) -> Fraction:
    return sum((g._vertex_weight[i] for i in {g._require_vertex(u) for u in U}), Fraction(0))


def boundary_weight(g: WeightedGraph, U1: Iterable[Vertex], U2: Iterable[Vertex]) -> Fraction:
    """
    m(U₁, U₂)：有序对 (u₁, u₂) ∈ U₁×U₂ 上的边权和，m(U, U) 内部边计两次

    Raises:
        DomainError: 空集或未知顶点
    """
    first = g._indices(U1, "U1")
    second = set(g._indices(U2, "U2"))
    total = Fraction(0)
    for i in first:
        for j, w in g._adjacency[i].items():
            if j in second:
                total += w
    return total


# ---------------------------------------------------------------------------
# Cheeger 常数
# ---------------------------------------------------------------------------

def _scaled_integer_weights(g: WeightedGraph) -> Tuple[List[Tuple[int, int, int]], List[int]]:
    """h 对整体缩放不变：乘以分母的最小公倍数后全部是整数"""
    denominators = [w.denominator for w in g.edge_weight.values()] or [1]
    scale = lcm(*denominators)
    edges = []
    vertex_weights = [0] * len(g.vertices)
    for i, a in enumerate(g._adjacency):
        for j, w in a.items():
            value = int(w * scale)
            vertex_weights[i] += value
            if i < j:
                edges.append((i, j, value))
    return edges, vertex_weights


def _mask_indices(mask: int, n: int) -> Tuple[int, ...]:
    return tuple(i for i in range(n) if (mask >> i) & 1)


def cheeger_cut(g: WeightedGraph, cap: Optional[int] = None) -> Tuple[Fraction, FrozenSet[Vertex]]:
    """
    穷举 2^|V|-2 个子集求 (广义) Cheeger 常数及取到最小值的 U

    浮点向量化扫描只用于筛选候选，最终比较全部用整数精确完成。
    并列时取顶点编号元组字典序最小的 U。

    Args:
        g: 带权图
        cap: 顶点数上限，默认 settings.cheeger_vertex_cap

    Returns:
        (h_G, U)
    """
    n = len(g.vertices)
    if n < 2:
        raise DomainError("Cheeger constant needs at least two vertices")
    zero = [v for v, w in zip(g.vertices, g._vertex_weight) if w == 0]
    if zero:
        raise DomainError(f"Cheeger constant undefined: vertex {zero[0]!r} has zero weight")
    check_cap(n, settings.cheeger_vertex_cap if cap is None else cap, "exhaustive Cheeger vertex count")

    edges, weights = _scaled_integer_weights(g)
    total = sum(weights)
    exact_dtype = np.int64 if total < 2 ** 62 else object
    vw = np.array(weights, dtype=exact_dtype)
    ei = np.array([e[0] for e in edges], dtype=np.int64)
    ej = np.array([e[1] for e in edges], dtype=np.int64)
    ew = np.array([e[2] for e in edges], dtype=exact_dtype)
    shifts = np.arange(n, dtype=np.int64)
    full = (1 << n) - 1
    chunk = max(1, settings.cheeger_chunk_size)

    best = np.inf
    candidates: List[Tuple[int, int, int, float]] = []
    for start in range(1, full, chunk):
        masks = np.arange(start, min(start + chunk, full), dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(bool)
        mass = bits.astype(exact_dtype) @ vw
        if len(edges):
            crossing = bits[:, ei] ^ bits[:, ej]
            cut = crossing.astype(exact_dtype) @ ew
        else:
            cut = np.zeros(len(masks), dtype=exact_dtype)
        mass_f = mass.astype(np.float64)
        ratio = cut.astype(np.float64) * float(total) / (mass_f * (float(total) - mass_f))
        chunk_min = float(ratio.min())
        if chunk_min > best * (1 + 1e-9) + 1e-300:
            continue
        best = min(best, chunk_min)
        keep = np.nonzero(ratio <= best * (1 + 1e-9) + 1e-300)[0]
        bound = best * (1 + 1e-9) + 1e-300
        candidates = [c for c in candidates if c[3] <= bound]
        candidates.extend((int(masks[k]), int(cut[k]), int(mass[k]), float(ratio[k])) for k in keep)

    # 精确比较：h = cut·M / (m(U)·(M - m(U)))
    best_value: Optional[Fraction] = None
    best_key: Optional[Tuple[int, ...]] = None
    for mask, cut_value, mass_value, _ in candidates:
        value = Fraction(cut_value * total, mass_value * (total - mass_value))
        if best_value is None or value < best_value:
            best_value, best_key = value, _mask_indices(mask, n)
        elif value == best_value:
            key = _mask_indices(mask, n)
            if key < best_key:
                best_key = key
    witness = frozenset(g.vertices[i] for i in best_key)
    logger.debug(f"Cheeger scan: n={n}, h={best_value}, candidates={len(candidates)}")
    return best_value, witness


def cheeger_constant(g: WeightedGraph, cap: Optional[int] = None) -> Fraction:
    """h_G ∈ [0, 2]；不连通时为 0"""
    return cheeger_cut(g, cap)[0]


# ---------------------------------------------------------------------------
# 谱
# ---------------------------------------------------------------------------

def _normalized_adjacency(g: WeightedGraph, cap: Optional[int]) -> np.ndarray:
    n = len(g.vertices)
    check_cap(n, settings.spectral_vertex_cap if cap is None else cap, "dense eigensolver vertex count")
    isolated = g.isolated_vertices()
    if isolated:
        raise DomainError(f"random walk undefined: vertex {isolated[0]!r} is isolated")
    A = np.zeros((n, n), dtype=np.float64)
    for i, a in enumerate(g._adjacency):
        for j, w in a.items():
            A[i, j] = float(w)
    inv_sqrt = 1.0 / np.sqrt(A.sum(axis=1))
    return A * inv_sqrt[:, None] * inv_sqrt[None, :]


def spectrum(g: WeightedGraph, cap: Optional[int] = None) -> np.ndarray:
    """随机游走算子 M 的全部特征值（升序），经由对称化 D^{-1/2} A D^{-1/2}"""
    if not g.vertices:
        raise DomainError("empty graph has no spectrum")
    return np.linalg.eigvalsh(_normalized_adjacency(g, cap))


def second_eigenvalue(g: WeightedGraph, cap: Optional[int] = None) -> float:
    """
    M 的第二大特征值 λ ∈ [-1, 1)

    Raises:
        DomainError: 少于两个顶点，或图不连通（特征值 1 的重数 > 1）
        CapacityError: 超过稠密求解器上限
    """
    if len(g.vertices) < 2:
        raise DomainError("second eigenvalue needs at least two vertices")
    eigenvalues = spectrum(g, cap)
    lam = float(eigenvalues[-2])
    if lam >= 1.0 - settings.eigen_tolerance or not g.is_connected():
        raise DomainError("graph is disconnected: eigenvalue 1 has multiplicity > 1")
    return max(-1.0, lam)


def is_lambda_expander(
    g: WeightedGraph,
    lam: Number,
    cheeger_cap: Optional[int] = None,
    spectral_cap: Optional[int] = None,
    guard: Optional[float] = None,
) -> ExpanderVerdict:
    """
    λ-expander 判定：连通且 1 - h_G ≤ λ；超过 Cheeger 上限时改用 λ₂ ≤ λ（Cheeger 不等式保证其充分性）

    负面结果不抛异常，通过 reason 说明。
    """
    target = as_fraction(lam)
    n = len(g.vertices)
    cheeger_cap = settings.cheeger_vertex_cap if cheeger_cap is None else cheeger_cap
    spectral_cap = settings.spectral_vertex_cap if spectral_cap is None else spectral_cap
    guard = settings.spectral_guard_band if guard is None else guard

    if n < 2:
        return ExpanderVerdict(passed=False, certificate="none", lambda_target=target, n_vertices=n,
                               reason="fewer than two vertices")
    if g.isolated_vertices() or not g.is_connected():
        return ExpanderVerdict(passed=False, certificate="none", lambda_target=target, n_vertices=n,
                               reason="disconnected")

    if n <= cheeger_cap:
        h = cheeger_constant(g, cheeger_cap)
        passed = 1 - h <= target
        return ExpanderVerdict(
            passed=passed, certificate="cheeger", lambda_target=target, n_vertices=n, cheeger=h,
            reason=None if passed else f"1 - h = {1 - h} exceeds {target}",
        )
    if n <= spectral_cap:
        lam2 = second_eigenvalue(g, spectral_cap)
        passed = lam2 + guard <= float(target)
        logger.warning(f"Cheeger cap {cheeger_cap} exceeded (n={n}); using spectral certificate lambda2={lam2:.6g}")
        return ExpanderVerdict(
            passed=passed, certificate="spectral", lambda_target=target, n_vertices=n, second_eigenvalue=lam2,
            reason=None if passed else f"second eigenvalue {lam2:.9g} exceeds {float(target):.9g} - guard",
        )
    return ExpanderVerdict(passed=False, certificate="none", lambda_target=target, n_vertices=n,
                           reason=f"capacity exceeded: {n} vertices > spectral cap {spectral_cap}")


# ---------------------------------------------------------------------------
# 不等式检查
# ---------------------------------------------------------------------------

def _proper_subset(g: WeightedGraph, U: Iterable[Vertex]) -> List[int]:
    indices = g._indices(U, "U")
    if len(indices) == len(g.vertices):
        raise DomainError("U must be a proper subset of V")
    return indices


def alon_chung_check(g: WeightedGraph, U: Iterable[Vertex]) -> InequalityCheck:
    """m(U)·(λ + (1-λ)·m(U)/m(V)) ≥ m(U,U)，λ 为 M 的第二大特征值"""
    U = [g.vertices[i] for i in _proper_subset(g, U)]
    lam = second_eigenvalue(g)
    mU = set_weight(g, U)
    mV = total_weight(g)
    lhs = float(mU) * (lam + (1 - lam) * float(mU / mV))
    rhs = boundary_weight(g, U, U)
    tol = settings.eigen_tolerance * max(1.0, float(mV))
    return InequalityCheck(holds=lhs + tol >= float(rhs), lhs=lhs, rhs=rhs, relation=">=")


def mass_concentration_check(g: WeightedGraph, U: Iterable[Vertex], lam: Optional[Number] = None) -> InequalityCheck:
    """m(U)·(λ + m(U)/m(V)) ≥ m(U,U)，λ 默认取 max(0, 1 - h_G)，精确计算"""
    U = [g.vertices[i] for i in g._indices(U, "U")]
    if lam is None:
        lam_value = max(Fraction(0), 1 - cheeger_constant(g))
    else:
        lam_value = as_fraction(lam)
    mU = set_weight(g, U)
    lhs = mU * (lam_value + mU / total_weight(g))
    rhs = boundary_weight(g, U, U)
    return InequalityCheck(holds=lhs >= rhs, lhs=lhs, rhs=rhs, relation=">=")


def almost_complete_bound(g: WeightedGraph) -> Optional[AlmostCompleteBound]:
    """
    最小的 β ∈ [0, 1) 使每个顶点 m(v) ≥ max_e m(e)·(1-β)·|V|，此时 h_G ≥ 1 - 2β

    Returns:
        不存在这样的 β 时返回 None
    """
    n = len(g.vertices)
    if n == 0 or g.is_edgeless:
        return None
    heaviest = max(g.edge_weight.values())
    lightest_vertex = min(g._vertex_weight)
    beta = max(Fraction(0), 1 - lightest_vertex / (heaviest * n))
    if beta >= 1:
        return None
    return AlmostCompleteBound(beta=beta, guarantee=1 - 2 * beta)


def check_weak_cover(g_cover: WeightedGraph, g_base: WeightedGraph, proj: Mapping[Vertex, Vertex]) -> CoverVerdict:
    """
    判断 proj 是否把 g_cover 弱覆盖到 g_base：顶点满射、边映到边且满射、每条底边的权等于原像权和
    """
    for v in g_cover.vertices:
        if v not in proj:
            return CoverVerdict(passed=False, reason=f"projection leaves cover vertex {v!r} unmapped")
        if proj[v] not in g_base.index:
            return CoverVerdict(passed=False, reason=f"cover vertex {v!r} maps outside the base graph")
    image = {proj[v] for v in g_cover.vertices}
    missing = [v for v in g_base.vertices if v not in image]
    if missing:
        return CoverVerdict(passed=False, reason=f"projection is not surjective: base vertex {missing[0]!r} has no preimage")

    sums: Dict[FrozenSet[Vertex], Fraction] = {}
    for u, v, w in g_cover.edges():
        a, b = proj[u], proj[v]
        if a == b:
            return CoverVerdict(passed=False, reason=f"edge {u!r}-{v!r} collapses to a self-loop at {a!r}")
        key = frozenset((a, b))
        if key not in g_base.edge_weight:
            return CoverVerdict(passed=False, reason=f"image of edge {u!r}-{v!r} is not a base edge")
        sums[key] = sums.get(key, Fraction(0)) + w
    for a, b, w in g_base.edges():
        key = frozenset((a, b))
        if key not in sums:
            return CoverVerdict(passed=False, reason=f"base edge {a!r}-{b!r} has no preimage")
        if sums[key] != w:
            return CoverVerdict(passed=False, reason=f"base edge {a!r}-{b!r} weight {w} != preimage sum {sums[key]}")
    return CoverVerdict(passed=True)


# ---------------------------------------------------------------------------
# 二部图
# ---------------------------------------------------------------------------

def bipartite_spectral_expansion(g: BipartiteGraph) -> float:
    """D₁^{-1/2} W D₂^{-1/2} 的第二大奇异值；只接受连通图"""
    if not g.left or not g.right or not g.is_connected():
        raise DomainError("bipartite spectral expansion needs a connected graph")
    check_cap(len(g.vertices), settings.spectral_vertex_cap, "dense SVD vertex count")
    W = np.zeros((len(g.left), len(g.right)), dtype=np.float64)
    offset = len(g.left)
    for i in range(len(g.left)):
        for j, w in g._adjacency[i].items():
            W[i, j - offset] = float(w)
    d1 = W.sum(axis=1)
    d2 = W.sum(axis=0)
    N = W / np.sqrt(d1)[:, None] / np.sqrt(d2)[None, :]
    singular = np.linalg.svd(N, compute_uv=False)
    return float(singular[1]) if len(singular) > 1 else 0.0


def _left_indices(g: BipartiteGraph, U: Iterable[Vertex]) -> List[int]:
    indices = g._indices(U, "U")
    if any(i >= len(g.left) for i in indices):
        raise DomainError("U must be a subset of the left side")
    return indices


def bipartite_sampling_deviation(
    g: BipartiteGraph, U: Iterable[Vertex], alpha: Number
) -> Tuple[List[Vertex], InequalityCheck]:
    """
    抽样引理：N(U)_{≥α} = {v ∈ N(U) : |m(v,U)/m(v) - m(U)/m(V₁)| ≥ α}，并验证 m(N(U)_{≥α}) ≤ (λ²/α²)·m(U)
    """
    a = as_fraction(alpha)
    if not 0 < a < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {a}")
    indices = _left_indices(g, U)
    lam = bipartite_spectral_expansion(g)

    members = set(indices)
    mU = sum((g._vertex_weight[i] for i in indices), Fraction(0))
    mV1 = sum((g._vertex_weight[i] for i in range(len(g.left))), Fraction(0))
    baseline = mU / mV1

    deviating: List[Vertex] = []
    deviating_mass = Fraction(0)
    for v in g.neighborhood([g.vertices[i] for i in indices]):
        j = g.index[v]
        into_u = sum((w for i, w in g._adjacency[j].items() if i in members), Fraction(0))
        if abs(into_u / g._vertex_weight[j] - baseline) >= a:
            deviating.append(v)
            deviating_mass += g._vertex_weight[j]
    rhs = lam ** 2 / float(a) ** 2 * float(mU)
    holds = float(deviating_mass) <= rhs + settings.eigen_tolerance * max(1.0, rhs)
    return deviating, InequalityCheck(holds=holds, lhs=deviating_mass, rhs=rhs, relation="<=")


def bipartite_covered_mass_bound(
    g: BipartiteGraph, U: Iterable[Vertex], W: Iterable[Vertex], delta: Number
) -> InequalityCheck:
    """
    N(U) 引理：若每个 u ∈ U 落在 W 中的邻域权重比例 ≥ δ，则 m(U)/m(W) ≤ (4/(3δ))·(2λ/√δ + m(U)/m(V₁))

    Raises:
        PreconditionError: 某个 u 的 W-比例 < δ，item 为该 u
    """
    d = as_fraction(delta)
    if not 0 < d <= 1:
        raise DomainError(f"delta must lie in (0, 1], got {d}")
    indices = _left_indices(g, U)
    right_members = set(g._indices(W, "W"))
    if any(j < len(g.left) for j in right_members):
        raise DomainError("W must be a subset of the right side")

    for i in indices:
        into_w = sum((w for j, w in g._adjacency[i].items() if j in right_members), Fraction(0))
        if g._vertex_weight[i] == 0 or into_w / g._vertex_weight[i] < d:
            raise PreconditionError(f"vertex {g.vertices[i]!r} sends less than a {d} fraction into W", item=g.vertices[i])

    lam = bipartite_spectral_expansion(g)
    mU = sum((g._vertex_weight[i] for i in indices), Fraction(0))
    mW = sum((g._vertex_weight[j] for j in right_members), Fraction(0))
    mV1 = sum((g._vertex_weight[i] for i in range(len(g.left))), Fraction(0))
    lhs = mU / mW
    rhs = 4 / (3 * float(d)) * (2 * lam / float(d) ** 0.5 + float(mU / mV1))
    holds = float(lhs) <= rhs + settings.eigen_tolerance * max(1.0, rhs)
    return InequalityCheck(holds=holds, lhs=lhs, rhs=rhs, relation="<=")


def characteristic_spectrum(g: WeightedGraph) -> np.ndarray:
    """直接由 M 的特征多项式求根（小图交叉验证用），升序实部"""
    n = len(g.vertices)
    isolated = g.isolated_vertices()
    if isolated:
        raise DomainError(f"random walk undefined: vertex {isolated[0]!r} is isolated")
    M = np.zeros((n, n), dtype=np.float64)
    for i, a in enumerate(g._adjacency):
        for j, w in a.items():
            M[i, j] = float(w / g._vertex_weight[i])
    roots = np.roots(np.poly(M))
    return np.sort(roots.real)
