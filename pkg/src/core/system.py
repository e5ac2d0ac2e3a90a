"""
二层系统模块 - (s,k,K) 二层系统、诱导权重与派生带权图（ground / link / non-intersecting / opposite）
"""
from collections import defaultdict
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.api.schemas import LocalCheck, SphereOfVertex, SystemValidation
from src.core.graph import BipartiteGraph, Number, WeightedGraph, as_fraction, bipartite_spectral_expansion
from src.errors import DomainError, ensure

Vertex = Hashable
EdgeName = Hashable

MAX_VIOLATIONS = 10


class TwoLayerSystem:
    """
    二层系统 X = (V, E, T)，T 上带正有理权 w(σ)

    E 的元素有名字（文件格式中的 ename），T 的元素是 E-名字的集合。
    构造时只检查引用是否存在；定义层面的条件由 validate_system 给出结论。

    Args:
        vertices: 顶点序列，顺序即编号
        edges: {ename: 顶点集合}，顺序即 E 的编号
        tops: [(ename 集合, 权重)]
        s, k, K: 声明的参数（可选）
    """

    def __init__(
        self,
        vertices: Iterable[Vertex],
        edges: Mapping[EdgeName, Iterable[Vertex]],
        tops: Iterable[Tuple[Iterable[EdgeName], Number]],
        s: Optional[int] = None,
        k: Optional[int] = None,
        K: Optional[int] = None,
    ):
        self.vertices: Tuple[Vertex, ...] = tuple(vertices)
        self.vertex_index: Dict[Vertex, int] = {}
        for i, v in enumerate(self.vertices):
            if v in self.vertex_index:
                raise DomainError(f"duplicate vertex {v!r}")
            self.vertex_index[v] = i

        self.edge_names: Tuple[EdgeName, ...] = tuple(edges)
        self.edge_index: Dict[EdgeName, int] = {name: i for i, name in enumerate(self.edge_names)}
        self.support: Dict[EdgeName, FrozenSet[Vertex]] = {}
        for name, members in edges.items():
            members = frozenset(members)
            unknown = [v for v in members if v not in self.vertex_index]
            if unknown:
                raise DomainError(f"edge {name!r} uses unknown vertex {unknown[0]!r}")
            self.support[name] = members

        self.tops: List[FrozenSet[EdgeName]] = []
        self.top_weight: List[Fraction] = []
        for members, weight in tops:
            members = frozenset(members)
            unknown = [e for e in members if e not in self.edge_index]
            if unknown:
                raise DomainError(f"top element uses unknown edge {unknown[0]!r}")
            self.tops.append(members)
            self.top_weight.append(as_fraction(weight))

        self.declared_s, self.declared_k, self.declared_K = s, k, K

    def __repr__(self) -> str:
        return f"TwoLayerSystem(|V|={len(self.vertices)}, |E|={len(self.edge_names)}, |T|={len(self.tops)})"

    # ------------------------------------------------------------------
    # 关联结构（按需缓存）
    # ------------------------------------------------------------------

    def sorted_support(self, name: EdgeName) -> Tuple[Vertex, ...]:
        """τ 的顶点，按顶点编号排序"""
        return tuple(sorted(self.support[name], key=self.vertex_index.__getitem__))

    def ordered_top(self, j: int) -> Tuple[EdgeName, ...]:
        return tuple(sorted(self.tops[j], key=self.edge_index.__getitem__))

    @cached_property
    def top_vertices(self) -> List[FrozenSet[Vertex]]:
        """v ∈ σ 当且仅当 v 属于 σ 中某个 τ"""
        return [frozenset().union(*(self.support[e] for e in sigma)) for sigma in self.tops]

    @cached_property
    def multiplicity(self) -> List[Dict[Vertex, int]]:
        """|{τ ∈ σ : v ∈ τ}|，按 σ 编号"""
        result = []
        for sigma in self.tops:
            counts: Dict[Vertex, int] = defaultdict(int)
            for e in sigma:
                for v in self.support[e]:
                    counts[v] += 1
            result.append(dict(counts))
        return result

    @cached_property
    def tops_of_edge(self) -> Dict[EdgeName, List[int]]:
        result: Dict[EdgeName, List[int]] = {name: [] for name in self.edge_names}
        for j, sigma in enumerate(self.tops):
            for e in sigma:
                result[e].append(j)
        return result

    @cached_property
    def tops_of_vertex(self) -> Dict[Vertex, List[int]]:
        result: Dict[Vertex, List[int]] = {v: [] for v in self.vertices}
        for j, members in enumerate(self.top_vertices):
            for v in members:
                result[v].append(j)
        return result

    @cached_property
    def edges_of_vertex(self) -> Dict[Vertex, List[EdgeName]]:
        """E_v，按 E 的编号排序"""
        result: Dict[Vertex, List[EdgeName]] = {v: [] for v in self.vertices}
        for name in self.edge_names:
            for v in self.support[name]:
                result[v].append(name)
        return result

    @cached_property
    def co_vertices(self) -> Dict[Vertex, FrozenSet[Vertex]]:
        """与 v 同属某个 τ 的顶点（不含 v）"""
        result: Dict[Vertex, set] = {v: set() for v in self.vertices}
        for members in self.support.values():
            for v in members:
                result[v].update(members)
        return {v: frozenset(others - {v}) for v, others in result.items()}

    @cached_property
    def edge_weight(self) -> Dict[EdgeName, Fraction]:
        """w(τ) = Σ_{σ∋τ} w(σ)"""
        return {name: sum((self.top_weight[j] for j in self.tops_of_edge[name]), Fraction(0)) for name in self.edge_names}

    @cached_property
    def vertex_weight(self) -> Dict[Vertex, Fraction]:
        """w(v) = Σ_{σ∋v} w(σ)"""
        return {v: sum((self.top_weight[j] for j in self.tops_of_vertex[v]), Fraction(0)) for v in self.vertices}

    @cached_property
    def link_vertex_weight(self) -> Dict[Vertex, Dict[EdgeName, Fraction]]:
        """m_v(τ)：τ 在 v 的 link 中的顶点权重"""
        result: Dict[Vertex, Dict[EdgeName, Fraction]] = {v: {} for v in self.vertices}
        for j, sigma in enumerate(self.tops):
            w = self.top_weight[j]
            for v, count in self.multiplicity[j].items():
                if count < 2:
                    continue
                for e in sigma:
                    if v in self.support[e]:
                        result[v][e] = result[v].get(e, Fraction(0)) + w * (count - 1)
        return result

    @property
    def total_edge_weight(self) -> Fraction:
        return sum(self.edge_weight.values(), Fraction(0))

    @property
    def total_vertex_weight(self) -> Fraction:
        return sum(self.vertex_weight.values(), Fraction(0))

    def weight_of(self, A: Iterable[EdgeName]) -> Fraction:
        """w(A)"""
        return sum((self.edge_weight[e] for e in self.edge_subset(A)), Fraction(0))

    def edge_subset(self, A: Iterable[EdgeName], allow_empty: bool = True) -> FrozenSet[EdgeName]:
        A = frozenset(A)
        unknown = [e for e in A if e not in self.edge_index]
        if unknown:
            raise DomainError(f"unknown edge {unknown[0]!r}")
        if not A and not allow_empty:
            raise DomainError("edge set A is empty")
        return A

    def require_vertex(self, v: Vertex) -> Vertex:
        if v not in self.vertex_index:
            raise DomainError(f"unknown vertex {v!r}")
        return v

    # ------------------------------------------------------------------
    # 参数
    # ------------------------------------------------------------------

    @property
    def k(self) -> int:
        if self.declared_k is not None:
            return self.declared_k
        return len(self.support[self.edge_names[0]]) if self.edge_names else 0

    @property
    def K(self) -> int:
        if self.declared_K is not None:
            return self.declared_K
        return len(self.tops[0]) if self.tops else 0

    @cached_property
    def observed_s(self) -> int:
        return max((c for counts in self.multiplicity for c in counts.values()), default=0)

    @property
    def s(self) -> int:
        if self.declared_s is not None:
            return self.declared_s
        return max(2, self.observed_s)

    @cached_property
    def validation(self) -> SystemValidation:
        return validate_system(self)

    def require_valid(self) -> "TwoLayerSystem":
        if not self.validation.valid:
            raise DomainError(f"invalid two-layer system: {'; '.join(self.validation.violations)}")
        return self

    def scaled(self, factor: Number) -> "TwoLayerSystem":
        """所有 w(σ) 乘以 factor 的副本"""
        factor = as_fraction(factor)
        return TwoLayerSystem(
            self.vertices,
            {name: self.support[name] for name in self.edge_names},
            [(sigma, w * factor) for sigma, w in zip(self.tops, self.top_weight)],
            self.declared_s, self.declared_k, self.declared_K,
        )


def validate_system(x: TwoLayerSystem) -> SystemValidation:
    """
    检查 (s,k,K) 二层系统定义的全部条款，最多记录 MAX_VIOLATIONS 条违规

    Returns:
        SystemValidation，valid 为 False 时 violations 给出原因
    """
    violations: List[str] = []

    def report(message: str) -> None:
        if len(violations) < MAX_VIOLATIONS:
            violations.append(message)

    if not x.vertices:
        report("vertex set is empty")
    if not x.edge_names:
        report("edge set E is empty")
    if not x.tops:
        report("top set T is empty")

    k = x.k
    if x.declared_k is not None and x.edge_names:
        observed = {len(x.support[e]) for e in x.edge_names}
        if observed != {x.declared_k}:
            report(f"declared k={x.declared_k} but edge sizes are {sorted(observed)}")
    for name in x.edge_names:
        if len(x.support[name]) != k:
            report(f"edge {name!r} has {len(x.support[name])} vertices, expected k={k}")
    seen_supports: Dict[FrozenSet[Vertex], EdgeName] = {}
    for name in x.edge_names:
        other = seen_supports.setdefault(x.support[name], name)
        if other != name:
            report(f"edges {other!r} and {name!r} have the same support")
    covered = set().union(*x.support.values()) if x.support else set()
    for v in x.vertices:
        if v not in covered:
            report(f"vertex {v!r} lies in no edge")

    K = x.K
    if x.declared_K is not None and x.tops:
        observed = {len(sigma) for sigma in x.tops}
        if observed != {x.declared_K}:
            report(f"declared K={x.declared_K} but top sizes are {sorted(observed)}")
    seen_tops: Dict[FrozenSet[EdgeName], int] = {}
    for j, sigma in enumerate(x.tops):
        if len(sigma) != K:
            report(f"top #{j} has {len(sigma)} edges, expected K={K}")
        if x.top_weight[j] <= 0:
            report(f"top #{j} has non-positive weight {x.top_weight[j]}")
        first = seen_tops.setdefault(sigma, j)
        if first != j:
            report(f"tops #{first} and #{j} are equal as sets")
    used = set().union(*x.tops) if x.tops else set()
    for name in x.edge_names:
        if name not in used:
            report(f"edge {name!r} lies in no top")

    observed_s = x.observed_s
    s = x.s
    if x.declared_s is not None and x.declared_s < observed_s:
        report(f"declared s={x.declared_s} is below the observed multiplicity {observed_s}")
    for j, counts in enumerate(x.multiplicity):
        for v in sorted(counts, key=x.vertex_index.__getitem__):
            c = counts[v]
            if c < 2:
                report(f"vertex {v!r} lies in only one edge of top #{j}")
            elif c > s:
                report(f"vertex {v!r} lies in {c} edges of top #{j}, above s={s}")

    valid = not violations
    if not valid:
        logger.debug(f"System validation failed: {violations[0]}")
    return SystemValidation(valid=valid, violations=violations, s=s if valid else None,
                            k=k if valid else None, K=K if valid else None)


def induced_weights(x: TwoLayerSystem) -> Tuple[Dict[EdgeName, Fraction], Dict[Vertex, Fraction]]:
    """
    诱导权重 w(τ)、w(v)，并断言 2w(v) ≤ w({τ∋v}) ≤ s·w(v) 与 (2/k)w(V) ≤ w(E) ≤ (s/k)w(V)
    """
    x.require_valid()
    s, k = x.s, x.k
    for v in x.vertices:
        around = sum((x.edge_weight[e] for e in x.edges_of_vertex[v]), Fraction(0))
        ensure(2 * x.vertex_weight[v] <= around <= s * x.vertex_weight[v],
               f"edge mass around {v!r} violates 2w(v) <= w(E_v) <= s w(v)")
    wV, wE = x.total_vertex_weight, x.total_edge_weight
    ensure(Fraction(2, k) * wV <= wE <= Fraction(s, k) * wV, "w(E) outside [(2/k) w(V), (s/k) w(V)]")
    return dict(x.edge_weight), dict(x.vertex_weight)


# ---------------------------------------------------------------------------
# 派生图
# ---------------------------------------------------------------------------

def ground_graph(x: TwoLayerSystem) -> WeightedGraph:
    """ground graph：m_gr({u,v}) = Σ_{τ∋u,v} w(τ)"""
    x.require_valid()
    weights: Dict[FrozenSet[Vertex], Fraction] = defaultdict(Fraction)
    for name in x.edge_names:
        w = x.edge_weight[name]
        for u, v in combinations(x.sorted_support(name), 2):
            weights[frozenset((u, v))] += w
    g = WeightedGraph.from_weights(x.vertices, weights)
    s, k = x.s, x.k
    for v in x.vertices:
        m = g._vertex_weight[g.index[v]]
        wv = x.vertex_weight[v]
        ensure(2 * (k - 1) * wv <= m <= s * (k - 1) * wv, f"ground weight of {v!r} violates 2(k-1)w(v) <= m_gr(v) <= s(k-1)w(v)")
    return g


def link_graph(x: TwoLayerSystem, v: Vertex) -> WeightedGraph:
    """
    v 的 link：顶点 E_v，τ ≠ τ′ 同属某个 σ 时相连，m_v({τ,τ′}) = Σ_{σ∋τ,τ′} w(σ)

    断言 w(τ) ≤ m_v(τ) ≤ (s-1)w(τ) 与 2w(v) ≤ m_v(E_v) ≤ s(s-1)w(v)
    """
    x.require_vertex(v)
    members = x.edges_of_vertex[v]
    if not members:
        raise DomainError(f"vertex {v!r} lies in no edge")
    weights: Dict[FrozenSet[EdgeName], Fraction] = defaultdict(Fraction)
    for j in x.tops_of_vertex[v]:
        inside = [e for e in x.ordered_top(j) if v in x.support[e]]
        for a, b in combinations(inside, 2):
            weights[frozenset((a, b))] += x.top_weight[j]
    g = WeightedGraph.from_weights(members, weights)

    if x.validation.valid:
        s = x.s
        for name in members:
            m = g._vertex_weight[g.index[name]]
            w = x.edge_weight[name]
            ensure(w <= m <= (s - 1) * w, f"link weight of {name!r} at {v!r} violates w(tau) <= m_v(tau) <= (s-1)w(tau)")
        total = sum(g._vertex_weight, Fraction(0))
        wv = x.vertex_weight[v]
        ensure(2 * wv <= total <= s * (s - 1) * wv, f"link mass at {v!r} violates 2w(v) <= m_v(E_v) <= s(s-1)w(v)")
    return g


class NonIntersecting(NamedTuple):
    graph: WeightedGraph
    q_min: int
    q_max: int
    r_nint: Fraction


def nonintersecting_graph(x: TwoLayerSystem) -> NonIntersecting:
    """
    non-intersecting graph：τ∩τ′ = ∅ 且同属某个 σ 时相连，m_nint = Σ_{σ∋τ,τ′} w(σ)

    Returns:
        (图, Q_min, Q_max, R_nint)，Q_max = 0 时 R_nint = 0
    """
    x.require_valid()
    weights: Dict[FrozenSet[EdgeName], Fraction] = defaultdict(Fraction)
    q_min: Optional[int] = None
    q_max = 0
    for j in range(len(x.tops)):
        sigma = x.ordered_top(j)
        partners = {e: 0 for e in sigma}
        for a, b in combinations(sigma, 2):
            if not (x.support[a] & x.support[b]):
                weights[frozenset((a, b))] += x.top_weight[j]
                partners[a] += 1
                partners[b] += 1
        counts = partners.values()
        q_min = min(counts) if q_min is None else min(q_min, min(counts))
        q_max = max(q_max, max(counts))
    q_min = q_min or 0
    r_nint = Fraction(q_min, q_max) if q_max else Fraction(0)
    g = WeightedGraph.from_weights(x.edge_names, weights)

    for name in x.edge_names:
        m = g._vertex_weight[g.index[name]]
        w = x.edge_weight[name]
        ensure(q_min * w <= m <= q_max * w, f"non-intersecting weight of {name!r} outside [Q_min w, Q_max w]")
    logger.debug(f"Non-intersecting graph: edges={len(weights)}, Q_min={q_min}, Q_max={q_max}, R={r_nint}")
    return NonIntersecting(g, q_min, q_max, r_nint)


# ---------------------------------------------------------------------------
# 球面与 opposite graph
# ---------------------------------------------------------------------------

def sphere_of_vertex(x: TwoLayerSystem, v: Vertex) -> SphereOfVertex:
    """
    E_sph(v) = {τ : v ∉ τ，τ 的每个顶点与 v 同属某个 τ′，且存在 σ 同时含 v 与 τ}

    m_sph(v)(τ) = Σ_{σ∋τ, v∈σ} w(σ)
    """
    x.require_vertex(v)
    near = x.co_vertices[v]
    weights: Dict[EdgeName, Fraction] = {}
    for j in x.tops_of_vertex[v]:
        for e in x.tops[j]:
            members = x.support[e]
            if v in members or not members <= near:
                continue
            weights[e] = weights.get(e, Fraction(0)) + x.top_weight[j]
    edges = tuple(sorted(weights, key=x.edge_index.__getitem__))
    vertex_mass: Dict[Vertex, Fraction] = {}
    for e in edges:
        for u in x.support[e]:
            vertex_mass[u] = vertex_mass.get(u, Fraction(0)) + weights[e]
    vertices = tuple(sorted(vertex_mass, key=x.vertex_index.__getitem__))
    return SphereOfVertex(
        center=v,
        edges=edges,
        vertices=vertices,
        edge_weight={e: weights[e] for e in edges},
        vertex_weight={u: vertex_mass[u] for u in vertices},
    )


def is_locally_spherical(x: TwoLayerSystem) -> LocalCheck:
    """对每个 σ 与其中的 v ≠ u，要求存在 τ ∈ E_sph(v) ∩ σ 且 u ∈ τ"""
    x.require_valid()
    for v in x.vertices:
        sphere = set(sphere_of_vertex(x, v).edges)
        for j in x.tops_of_vertex[v]:
            candidates = [e for e in x.ordered_top(j) if e in sphere]
            for u in sorted(x.top_vertices[j], key=x.vertex_index.__getitem__):
                if u == v:
                    continue
                if not any(u in x.support[e] for e in candidates):
                    return LocalCheck(
                        holds=False, counterexample=(v, u, j),
                        reason=f"no sphere edge of {v!r} inside top #{j} contains {u!r}",
                    )
    return LocalCheck(holds=True)


def vertex_node(v: Vertex) -> Tuple[str, Vertex]:
    return ("v", v)


def edge_node(name: EdgeName) -> Tuple[str, EdgeName]:
    return ("e", name)


class OppositeGraph(NamedTuple):
    graph: BipartiteGraph
    lambda_opp: float


def opposite_graph(x: TwoLayerSystem) -> OppositeGraph:
    """
    opposite graph：左侧 V，右侧 E，τ ∈ E_sph(v) 时 v–τ 相连，m_opp = Σ_{σ∋v,τ} w(σ)

    λ_opp 为归一化二部游走的第二奇异值；不连通（含空图）时取 1
    """
    x.require_valid()
    edges = []
    for v in x.vertices:
        sphere = sphere_of_vertex(x, v)
        for e in sphere.edges:
            edges.append((vertex_node(v), edge_node(e), sphere.edge_weight[e]))
    g = BipartiteGraph([vertex_node(v) for v in x.vertices], [edge_node(e) for e in x.edge_names], edges)
    if g.is_edgeless or g.isolated_vertices() or not g.is_connected():
        lam = 1.0
    else:
        lam = bipartite_spectral_expansion(g)

    if is_locally_spherical(x).holds:
        failure = _opposite_mass_failure(x, g)
        ensure(failure is None, f"opposite-graph mass bound fails at {failure!r}")
    logger.debug(f"Opposite graph: edges={len(edges)}, lambda_opp={lam:.6g}")
    return OppositeGraph(g, lam)


def _opposite_mass_failure(x: TwoLayerSystem, g: BipartiteGraph) -> Optional[Any]:
    k, K = x.k, x.K
    for v in x.vertices:
        m = g._vertex_weight[g.index[vertex_node(v)]]
        w = x.vertex_weight[v]
        if not (m / K <= w <= m):
            return v
    for name in x.edge_names:
        m = g._vertex_weight[g.index[edge_node(name)]]
        if not m / (k * K) <= x.edge_weight[name]:
            return name
    return None


def opposite_mass_check(x: TwoLayerSystem) -> LocalCheck:
    """(1/K)m_opp(v) ≤ w(v) ≤ m_opp(v) 与 (1/(kK))m_opp(τ) ≤ w(τ)，仅对 locally spherical 系统有意义"""
    spherical = is_locally_spherical(x)
    if not spherical.holds:
        return LocalCheck(holds=False, applicable=False, counterexample=spherical.counterexample,
                          reason="system is not locally spherical")
    g = opposite_graph(x).graph
    failure = _opposite_mass_failure(x, g)
    if failure is not None:
        return LocalCheck(holds=False, counterexample=(failure,), reason=f"opposite mass bound fails at {failure!r}")
    return LocalCheck(holds=True)


# ---------------------------------------------------------------------------
# 局部量
# ---------------------------------------------------------------------------

def incidence_profile(x: TwoLayerSystem, A: Iterable[EdgeName], U: Iterable[Vertex]) -> Dict[int, Fraction]:
    """i ↦ w(A_U^i)，A_U^i = {τ ∈ A : |τ ∩ U| = i}，0 ≤ i ≤ k"""
    A = x.edge_subset(A)
    U = frozenset(x.require_vertex(u) for u in U)
    profile = {i: Fraction(0) for i in range(x.k + 1)}
    for e in A:
        i = len(x.support[e] & U)
        profile[i] = profile.get(i, Fraction(0)) + x.edge_weight[e]
    return profile


def localized_mass(x: TwoLayerSystem, v: Vertex, A: Iterable[EdgeName]) -> Fraction:
    """m_v(A_v)：A_v = A ∩ E_v 在 link 中的顶点权重和"""
    x.require_vertex(v)
    A = x.edge_subset(A)
    masses = x.link_vertex_weight[v]
    return sum((m for e, m in masses.items() if e in A), Fraction(0))


def link_mass(x: TwoLayerSystem, v: Vertex) -> Fraction:
    """m_v(E_v)"""
    x.require_vertex(v)
    return sum(x.link_vertex_weight[v].values(), Fraction(0))


# ---------------------------------------------------------------------------
# 构造
# ---------------------------------------------------------------------------

def _edge_label(a: Vertex, b: Vertex) -> str:
    return f"{a}-{b}"


def from_simplicial_complex(triangles: Iterable[Iterable[Vertex]]) -> TwoLayerSystem:
    """
    二维单纯复形 → (2,2,3) 二层系统：E 为三角形的边，每个三角形给出一个 σ，w(σ) = 1

    Raises:
        DomainError: 空输入、退化三角形或重复三角形
    """
    triangles = [tuple(t) for t in triangles]
    if not triangles:
        raise DomainError("triangle list is empty")
    order: Dict[Vertex, int] = {}
    seen = set()
    for t in triangles:
        if len(t) != 3 or len(set(t)) != 3:
            raise DomainError(f"degenerate triangle {t!r}")
        key = frozenset(t)
        if key in seen:
            raise DomainError(f"duplicate triangle {t!r}")
        seen.add(key)
        for v in t:
            order.setdefault(v, len(order))

    edges: Dict[str, FrozenSet[Vertex]] = {}
    tops = []
    for t in triangles:
        a, b, c = sorted(t, key=order.__getitem__)
        names = []
        for u, v in ((a, b), (a, c), (b, c)):
            name = _edge_label(u, v)
            edges.setdefault(name, frozenset((u, v)))
            names.append(name)
        tops.append((names, 1))
    x = TwoLayerSystem(list(order), edges, tops, s=2, k=2, K=3)
    logger.debug(f"Simplicial complex system: {x}")
    return x


def _merge_tops(tops: Sequence[Tuple[FrozenSet[EdgeName], int]]) -> List[Tuple[FrozenSet[EdgeName], int]]:
    """相同的 σ 合并为一个，权重相加"""
    merged: Dict[FrozenSet[EdgeName], int] = {}
    for sigma, w in tops:
        merged[sigma] = merged.get(sigma, 0) + w
    return list(merged.items())


def _assemble(edge_sets: Dict[EdgeName, FrozenSet[int]], tops, s: int, k: int, K: int) -> TwoLayerSystem:
    used = sorted(set().union(*edge_sets.values()))
    names = sorted(edge_sets)
    return TwoLayerSystem(used, {name: edge_sets[name] for name in names}, _merge_tops(tops), s=s, k=k, K=K)


def random_clique_system(
    rng: np.random.Generator, n_vertices: int, k: int, n_tops: int, max_weight: int = 1
) -> TwoLayerSystem:
    """随机 (k, k, k+1) 系统：每个 σ 是某个随机 (k+1)-集的全部 k-子集（k = 2 时即单纯复形）"""
    if k < 2 or n_vertices < k + 1 or n_tops < 1 or max_weight < 1:
        raise DomainError("random clique system needs k >= 2, n_vertices >= k+1, n_tops >= 1, max_weight >= 1")
    edge_sets: Dict[EdgeName, FrozenSet[int]] = {}
    tops = []
    for _ in range(n_tops):
        clique = sorted(int(v) for v in rng.choice(n_vertices, size=k + 1, replace=False))
        names = []
        for face in combinations(clique, k):
            edge_sets.setdefault(face, frozenset(face))
            names.append(face)
        tops.append((frozenset(names), int(rng.integers(1, max_weight + 1))))
    return _assemble(edge_sets, tops, s=k, k=k, K=k + 1)


def random_grid_system(
    rng: np.random.Generator, n_vertices: int, k: int, n_tops: int, max_weight: int = 1
) -> TwoLayerSystem:
    """随机 (2, k, 2k) 系统：每个 σ 是一个随机 k×k 顶点阵列的全部行与列"""
    if k < 2 or n_vertices < k * k or n_tops < 1 or max_weight < 1:
        raise DomainError("random grid system needs k >= 2, n_vertices >= k^2, n_tops >= 1, max_weight >= 1")
    edge_sets: Dict[EdgeName, FrozenSet[int]] = {}
    tops = []
    for _ in range(n_tops):
        grid = rng.choice(n_vertices, size=k * k, replace=False).reshape(k, k)
        names = []
        for line in list(grid) + list(grid.T):
            face = tuple(sorted(int(v) for v in line))
            edge_sets.setdefault(face, frozenset(face))
            names.append(face)
        tops.append((frozenset(names), int(rng.integers(1, max_weight + 1))))
    return _assemble(edge_sets, tops, s=2, k=k, K=2 * k)
