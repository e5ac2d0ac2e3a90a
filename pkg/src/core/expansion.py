"""
扩张模块 - HDE 证书、locally small 分类、主定理阈值与 unique neighbor expansion 的证伪搜索
"""
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import lcm, sqrt
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Tuple

import numpy as np
from loguru import logger

from src.api.schemas import ExpanderVerdict, HdeCertificate, InequalityCheck, LocalClassification, SphereMassCheck, Thresholds
from src.config import settings
from src.core.graph import (
    Number,
    WeightedGraph,
    as_fraction,
    boundary_weight,
    cheeger_constant,
    is_lambda_expander,
    second_eigenvalue,
)
from src.core.system import (
    EdgeName,
    TwoLayerSystem,
    Vertex,
    edge_node,
    ground_graph,
    incidence_profile,
    link_graph,
    localized_mass,
    nonintersecting_graph,
    opposite_graph,
    sphere_of_vertex,
    vertex_node,
)
from src.errors import DomainError, PreconditionError, check_cap


# ---------------------------------------------------------------------------
# 证书
# ---------------------------------------------------------------------------

def _edgeless_verdict(target: Fraction, n: int) -> ExpanderVerdict:
    return ExpanderVerdict(passed=True, certificate="edgeless", lambda_target=target, n_vertices=n,
                           reason="totally disconnected")


def _certify_links(x: TwoLayerSystem, target: Fraction, workers: int) -> Dict[Vertex, ExpanderVerdict]:
    """各 link 相互独立，按顶点顺序合并"""
    def one(v: Vertex) -> ExpanderVerdict:
        return is_lambda_expander(link_graph(x, v), target)

    if workers <= 1 or len(x.vertices) < 2:
        verdicts = [one(v) for v in x.vertices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(one, x.vertices))
    return dict(zip(x.vertices, verdicts))


def _certify(
    x: TwoLayerSystem,
    ground_target: Fraction,
    link_target: Fraction,
    nint_target: Fraction,
    thresholds: Optional[Thresholds],
    workers: Optional[int],
) -> HdeCertificate:
    x.require_valid()
    workers = settings.workers if workers is None else workers

    ground = is_lambda_expander(ground_graph(x), ground_target)
    links = _certify_links(x, link_target, workers)
    nint = nonintersecting_graph(x)
    if nint.graph.is_edgeless:
        nint_verdict = _edgeless_verdict(nint_target, len(nint.graph))
    else:
        nint_verdict = is_lambda_expander(nint.graph, nint_target)

    passed = ground.passed and nint_verdict.passed and all(v.passed for v in links.values())
    certificate = HdeCertificate(
        lambda_target=ground_target,
        ground=ground,
        links=links,
        nonintersecting=nint_verdict,
        nonintersecting_edgeless=nint.graph.is_edgeless,
        r_nint=nint.r_nint,
        thresholds=thresholds,
        passed=passed,
    )
    if passed:
        logger.info(f"HDE certificate passed: {x}")
    else:
        logger.info(f"HDE certificate failed at {', '.join(certificate.failing_components())}")
    return certificate


def certify_hde(x: TwoLayerSystem, lam: Number, workers: Optional[int] = None) -> HdeCertificate:
    """
    判断 X 是否为 λ-HDE 系统：ground graph 与全部 link 是 λ-expander，
    non-intersecting graph 无边或是 λ-expander

    Args:
        x: 合法的二层系统
        lam: 目标 λ
        workers: link 并行线程数，默认 settings.workers

    Returns:
        HdeCertificate，passed 为各分量判定的合取
    """
    target = as_fraction(lam)
    return _certify(x, target, target, target, None, workers)


def certify_at_thresholds(x: TwoLayerSystem, thresholds: Thresholds, workers: Optional[int] = None) -> HdeCertificate:
    """ground 用 λ_gr、link 用 λ_loc、non-intersecting 用 λ_nint"""
    return _certify(x, thresholds.lambda_gr, thresholds.lambda_loc, thresholds.lambda_nint, thresholds, workers)


# ---------------------------------------------------------------------------
# locally small
# ---------------------------------------------------------------------------

def _link_ratios(x: TwoLayerSystem, A: FrozenSet[EdgeName]) -> Tuple[Dict[Vertex, Fraction], Dict[Vertex, Fraction]]:
    masses, ratios = {}, {}
    for v in x.vertices:
        total = sum(x.link_vertex_weight[v].values(), Fraction(0))
        inside = localized_mass(x, v, A)
        masses[v] = inside
        ratios[v] = inside / total if total else Fraction(0)
    return masses, ratios


def classify_locally_small(x: TwoLayerSystem, A: Iterable[EdgeName], delta: Number, alpha: Number = 0) -> LocalClassification:
    """
    v 为 δ-small 当且仅当 m_v(A_v)/m_v(E_v) < δ；
    A 为 (δ,α)-locally small 当且仅当 Σ_{v δ-large} m_v(A_v) ≤ α·w(A)
    """
    A = x.edge_subset(A, allow_empty=False)
    d, a = as_fraction(delta), as_fraction(alpha)
    masses, ratios = _link_ratios(x, A)
    labels = {v: ("large" if ratios[v] >= d else "small") for v in x.vertices}
    large_mass = sum((masses[v] for v in x.vertices if labels[v] == "large"), Fraction(0))
    wA = x.weight_of(A)
    ratio = large_mass / wA
    return LocalClassification(
        A=A, delta=d, alpha=a, labels=labels, ratios=ratios,
        large_mass_ratio=ratio, locally_small=ratio <= a,
    )


# ---------------------------------------------------------------------------
# 阈值
# ---------------------------------------------------------------------------

def main_theorem_thresholds(s: int, k: int, K: int, R: Number, delta: Number, alpha: Number = 0) -> Thresholds:
    """
    主扩张定理的 λ_gr, λ_loc, λ_nint, ε₀（精确有理数）

    Raises:
        DomainError: δ ∉ (0, 1/(s-1))，α ∉ [0, 1)，R ∉ (0, 1]，或 s, k, K < 2
    """
    R, d, a = as_fraction(R), as_fraction(delta), as_fraction(alpha)
    if s < 2 or k < 2 or K < 2:
        raise DomainError(f"parameters must satisfy s, k, K >= 2, got ({s}, {k}, {K})")
    if not 0 < d < Fraction(1, s - 1):
        raise DomainError(f"delta must lie in (0, 1/(s-1)) = (0, {Fraction(1, s - 1)}), got {d}")
    if not 0 <= a < 1:
        raise DomainError(f"alpha must lie in [0, 1), got {a}")
    if not 0 < R <= 1:
        raise DomainError(f"R must lie in (0, 1], got {R}")

    gap = 1 - (s - 1) * d          # 1 - (s-1)δ
    spread = 1 + 15 * (s - 1) * d  # 1 + 15(s-1)δ
    lambda_gr = (1 - a) * gap / (4 * s * (s - 1) ** 2 * k * (k - 1)) * min(7 * gap / (4 * spread), Fraction(1, 2))
    lambda_loc = (1 - a) * gap / (8 * k * (s - 1))
    lambda_nint = R * (1 - a) * gap / (4 * K)
    eps0 = min(
        R ** 2 * (1 - a) * gap / (4 * K),
        7 * (1 - a) ** 2 * gap ** 3 / (64 * spread * s ** 3 * (s - 1) ** 4 * k ** 2),
    )
    return Thresholds(s=s, k=k, K=K, R=R, delta=d, alpha=a,
                      lambda_gr=lambda_gr, lambda_loc=lambda_loc, lambda_nint=lambda_nint, eps0=eps0)


def effective_r(x: TwoLayerSystem) -> Fraction:
    """R_nint；non-intersecting graph 无边时取 1（其引理项为零）"""
    nint = nonintersecting_graph(x)
    if nint.graph.is_edgeless:
        return Fraction(1)
    if nint.r_nint == 0:
        raise DomainError("R_nint = 0 while the non-intersecting graph has edges: main theorem does not apply")
    return nint.r_nint


def system_thresholds(x: TwoLayerSystem, delta: Number, alpha: Number = 0) -> Thresholds:
    x.require_valid()
    return main_theorem_thresholds(x.s, x.k, x.K, effective_r(x), delta, alpha)


# ---------------------------------------------------------------------------
# unique neighbor expansion
# ---------------------------------------------------------------------------

def unique_neighbor_witness(x: TwoLayerSystem, A: Iterable[EdgeName]) -> Optional[int]:
    """返回第一个满足 |A ∩ σ| = 1 的 σ 的编号，不存在时返回 None"""
    A = x.edge_subset(A, allow_empty=False)
    for j, sigma in enumerate(x.tops):
        if len(sigma & A) == 1:
            return j
    return None


class _SearchTables:
    """证伪搜索用的整数化关联表"""

    def __init__(self, x: TwoLayerSystem, delta: Fraction, alpha: Fraction, eps0: Fraction):
        self.x = x
        self.delta, self.alpha = delta, alpha
        scale = lcm(*[w.denominator for w in x.top_weight])
        self.edge_w = [int(x.edge_weight[e] * scale) for e in x.edge_names]
        self.bound = eps0 * sum(self.edge_w)  # w(A) < ε₀·w(E)
        self.tops_of = [x.tops_of_edge[e] for e in x.edge_names]
        self.link_of: List[List[Tuple[int, int]]] = []
        for e in x.edge_names:
            self.link_of.append([(x.vertex_index[v], int(x.link_vertex_weight[v][e] * scale))
                                 for v in x.support[e] if e in x.link_vertex_weight[v]])
        self.link_total = [int(sum(x.link_vertex_weight[v].values(), Fraction(0)) * scale) for v in x.vertices]
        self.reset()

    def reset(self) -> None:
        self.top_count = [0] * len(self.x.tops)
        self.unique = 0
        self.local = [0] * len(self.x.vertices)
        self.mass = 0

    def add(self, i: int, sign: int) -> None:
        self.mass += sign * self.edge_w[i]
        for j in self.tops_of[i]:
            before = self.top_count[j]
            after = before + sign
            self.top_count[j] = after
            self.unique += (after == 1) - (before == 1)
        for v, m in self.link_of[i]:
            self.local[v] += sign * m

    def locally_small(self) -> bool:
        large = sum(m for m, total in zip(self.local, self.link_total) if total and m >= self.delta * total)
        return large <= self.alpha * self.mass


def _exhaustive_search(t: _SearchTables) -> Optional[List[int]]:
    """按边序深度优先枚举，w(A) 达到上界的分支剪掉"""
    n = len(t.edge_w)
    chosen: List[int] = []

    def visit(start: int) -> Optional[List[int]]:
        for i in range(start, n):
            if t.mass + t.edge_w[i] >= t.bound:
                continue
            t.add(i, 1)
            chosen.append(i)
            if t.unique == 0 and t.locally_small():
                return list(chosen)
            found = visit(i + 1)
            if found is not None:
                return found
            chosen.pop()
            t.add(i, -1)
        return None

    return visit(0)


def _randomized_search(t: _SearchTables, budget: int, seed: int) -> Optional[List[int]]:
    """
    每次抽样先取随机目标质量，再按随机顺序加入边直到达到目标；
    一半的样本沿共享 σ 的边生长（能抓到整块的反例）
    """
    rng = np.random.default_rng(seed)
    n = len(t.edge_w)
    neighbours = [sorted({e for j in t.tops_of[i] for e in (t.x.edge_index[f] for f in t.x.tops[j])} - {i})
                  for i in range(n)]
    for _ in range(budget):
        t.reset()
        target = float(rng.random()) * float(t.bound)
        chosen: List[int] = []
        if rng.random() < 0.5:
            order = [int(i) for i in rng.permutation(n)]
        else:
            start = int(rng.integers(n))
            order, seen = [start], {start}
            frontier = [start]
            while frontier:
                i = frontier.pop(int(rng.integers(len(frontier))))
                for f in neighbours[i]:
                    if f not in seen:
                        seen.add(f)
                        order.append(f)
                        frontier.append(f)
            order += [int(i) for i in rng.permutation(n) if int(i) not in seen]
        for i in order:
            if chosen and t.mass >= target:
                break
            if t.mass + t.edge_w[i] < t.bound:
                t.add(i, 1)
                chosen.append(i)
        if chosen and t.unique == 0 and t.locally_small():
            return sorted(chosen)
    return None


def unique_neighbor_falsification_search(
    x: TwoLayerSystem,
    delta: Number,
    alpha: Number,
    eps0: Number,
    mode: Literal["exhaustive", "randomized"] = "exhaustive",
    budget: int = 1000,
    seed: Optional[int] = None,
    cap: Optional[int] = None,
) -> Optional[FrozenSet[EdgeName]]:
    """
    寻找非空 A：w(A)/w(E) < ε₀，(δ,α)-locally small，却没有 σ 恰含 A 的一个元素

    Args:
        mode: exhaustive 枚举全部子集（|E| 受 cap 限制），randomized 抽 budget 个样本
        seed: 随机模式的种子，默认 settings.default_seed

    Returns:
        第一个反例（按搜索顺序），没有时返回 None
    """
    x.require_valid()
    d, a, e0 = as_fraction(delta), as_fraction(alpha), as_fraction(eps0)
    if mode not in ("exhaustive", "randomized"):
        raise DomainError(f"unknown search mode {mode!r}")
    if mode == "exhaustive":
        check_cap(len(x.edge_names), settings.unn_exhaustive_cap if cap is None else cap, "exhaustive search edge count")
    if e0 <= 0:
        return None

    tables = _SearchTables(x, d, a, e0)
    if mode == "exhaustive":
        found = _exhaustive_search(tables)
    else:
        if budget < 1:
            raise DomainError("budget must be >= 1")
        found = _randomized_search(tables, budget, settings.default_seed if seed is None else seed)

    if found is None:
        logger.debug(f"Falsification search ({mode}) found no counterexample")
        return None
    counterexample = frozenset(x.edge_names[i] for i in found)
    logger.info(f"Unique-neighbor counterexample found: |A|={len(counterexample)}")
    return counterexample


# ---------------------------------------------------------------------------
# 球面质量
# ---------------------------------------------------------------------------

def spherically_large_mass_check(x: TwoLayerSystem, A: Iterable[EdgeName], delta: Number) -> SphereMassCheck:
    """
    v 为 δ-spherically large 当且仅当 m_opp(E_sph(v)∩A)/m_opp(v) ≥ δ；
    验证 w(V_large)/w(A) ≤ (4kK/(3δ))·(2λ_opp/√δ + (sK/δ)·w(A)/w(E))
    """
    A = x.edge_subset(A, allow_empty=False)
    d = as_fraction(delta)
    if not 0 < d <= 1:
        raise DomainError(f"delta must lie in (0, 1], got {d}")
    opposite = opposite_graph(x)
    g = opposite.graph
    if g.is_edgeless or g.isolated_vertices() or not g.is_connected():
        return SphereMassCheck(applicable=False, holds=False, lambda_opp=opposite.lambda_opp,
                               reason="opposite graph is disconnected")

    large: List[Vertex] = []
    for v in x.vertices:
        node = vertex_node(v)
        total = g._vertex_weight[g.index[node]]
        inside = sum((g.weight(node, edge_node(e)) for e in sphere_of_vertex(x, v).edges if e in A), Fraction(0))
        if inside >= d * total:
            large.append(v)

    s, k, K = x.s, x.k, x.K
    wA = x.weight_of(A)
    lhs = sum((x.vertex_weight[v] for v in large), Fraction(0)) / wA
    lam = opposite.lambda_opp
    rhs = 4 * k * K / (3 * float(d)) * (2 * lam / sqrt(float(d)) + s * K / float(d) * float(wA / x.total_edge_weight))
    holds = float(lhs) <= rhs + settings.eigen_tolerance * max(1.0, rhs)
    return SphereMassCheck(applicable=True, holds=holds, large_vertices=large, lhs=lhs, rhs=rhs, lambda_opp=lam)


# ---------------------------------------------------------------------------
# 引理检查
# ---------------------------------------------------------------------------

def measured_lambda(g: WeightedGraph) -> Fraction:
    """
    使 g 成为 λ-expander 的最小可证 λ：Cheeger 上限内取 max(0, 1-h)，否则取 max(0, λ₂)；
    不连通时为 1
    """
    if len(g.vertices) < 2 or g.isolated_vertices() or not g.is_connected():
        return Fraction(1)
    if len(g.vertices) <= settings.cheeger_vertex_cap:
        return max(Fraction(0), 1 - cheeger_constant(g))
    return max(Fraction(0), as_fraction(second_eigenvalue(g)))


def _mu(mu: Number) -> Fraction:
    value = as_fraction(mu)
    if not 0 < value < 1:
        raise DomainError(f"mu must lie in (0, 1), got {value}")
    return value


def ground_lemma_check(
    x: TwoLayerSystem, A: Iterable[EdgeName], U: Iterable[Vertex], mu: Number, lambda_gr: Optional[Number] = None
) -> InequalityCheck:
    """
    U ⊆ V_{μ-large}，w(A)/w(E) ≤ 4μ²/(s³(s-1)²) 时：
    s(s-1)(k-1)/(2μ)·λ + s³(s-1)²/(4μ²)·w(A)/w(E) ≥ (1 - s(s-1)(k-1)/(2μ)·λ)·Σ_{i≥2}(i-1)w(A_U^i)/w(A)
    """
    x.require_valid()
    A = x.edge_subset(A, allow_empty=False)
    U = frozenset(U)
    m = _mu(mu)
    _, ratios = _link_ratios(x, A)
    for u in sorted(U, key=x.vertex_index.__getitem__):
        if ratios[x.require_vertex(u)] < m:
            raise PreconditionError(f"vertex {u!r} is not {m}-large", item=u)

    s, k = x.s, x.k
    density = x.weight_of(A) / x.total_edge_weight
    cap = 4 * m ** 2 / (s ** 3 * (s - 1) ** 2)
    lam = measured_lambda(ground_graph(x)) if lambda_gr is None else as_fraction(lambda_gr)
    coefficient = Fraction(s * (s - 1) * (k - 1)) / (2 * m) * lam
    lhs = coefficient + Fraction(s ** 3 * (s - 1) ** 2) / (4 * m ** 2) * density
    profile = incidence_profile(x, A, U)
    spread = sum(((i - 1) * profile[i] for i in range(2, k + 1)), Fraction(0)) / x.weight_of(A)
    rhs = (1 - coefficient) * spread
    if density > cap:
        return InequalityCheck(holds=lhs >= rhs, lhs=lhs, rhs=rhs, relation=">=", applicable=False,
                               reason=f"w(A)/w(E) = {density} exceeds {cap}")
    return InequalityCheck(holds=lhs >= rhs, lhs=lhs, rhs=rhs, relation=">=")


def links_lemma_check(
    x: TwoLayerSystem, A: Iterable[EdgeName], U: Iterable[Vertex], mu: Number, lambda_loc: Optional[Number] = None
) -> InequalityCheck:
    """U ⊆ V_{μ-small} 时：(s-1)(λ+μ)·Σ_{i≥1} i·w(A_U^i) ≥ Σ_{v∈U} m_v(A_v, A_v)"""
    x.require_valid()
    A = x.edge_subset(A, allow_empty=False)
    U = sorted(frozenset(U), key=lambda u: x.vertex_index[x.require_vertex(u)])
    m = _mu(mu)
    _, ratios = _link_ratios(x, A)
    for u in U:
        if ratios[u] >= m:
            raise PreconditionError(f"vertex {u!r} is not {m}-small", item=u)

    if lambda_loc is None:
        lam = max((measured_lambda(link_graph(x, u)) for u in U), default=Fraction(0))
    else:
        lam = as_fraction(lambda_loc)
    profile = incidence_profile(x, A, U)
    lhs = (x.s - 1) * (lam + m) * sum((i * profile[i] for i in range(1, x.k + 1)), Fraction(0))
    rhs = Fraction(0)
    for u in U:
        inside = [e for e in x.edges_of_vertex[u] if e in A]
        if inside:
            rhs += boundary_weight(link_graph(x, u), inside, inside)
    return InequalityCheck(holds=lhs >= rhs, lhs=lhs, rhs=rhs, relation=">=")


def disjoint_pair_weight(x: TwoLayerSystem, A: Iterable[EdgeName]) -> Fraction:
    """w(D_nint^{≥2})：含两个不相交 A-元素的 σ 的总权重"""
    A = x.edge_subset(A)
    total = Fraction(0)
    for j, sigma in enumerate(x.tops):
        inside = [x.support[e] for e in x.ordered_top(j) if e in A]
        if any(not (inside[a] & inside[b]) for a in range(len(inside)) for b in range(a + 1, len(inside))):
            total += x.top_weight[j]
    return total


def nint_lemma_check(x: TwoLayerSystem, A: Iterable[EdgeName], lambda_nint: Optional[Number] = None) -> InequalityCheck:
    """non-intersecting graph 是 λ-expander 且 R > 0 时：(1/(2R))·(λ + (1/R)·w(A)/w(E)) ≥ w(D_nint^{≥2})/w(A)"""
    x.require_valid()
    A = x.edge_subset(A, allow_empty=False)
    nint = nonintersecting_graph(x)
    wA = x.weight_of(A)
    rhs = disjoint_pair_weight(x, A) / wA
    if nint.graph.is_edgeless or nint.r_nint == 0:
        return InequalityCheck(holds=rhs == 0, lhs=Fraction(0), rhs=rhs, relation=">=", applicable=False,
                               reason="non-intersecting graph is edgeless or R_nint = 0")
    R = nint.r_nint
    lam = measured_lambda(nint.graph) if lambda_nint is None else as_fraction(lambda_nint)
    lhs = (lam + wA / x.total_edge_weight / R) / (2 * R)
    return InequalityCheck(holds=lhs >= rhs, lhs=lhs, rhs=rhs, relation=">=")
