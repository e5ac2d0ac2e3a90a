"""
码模型模块 - 建模在二层系统上的 F_p 线性码：rej、bit-flip 纠错、放大可测性与距离界
"""
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger

from src.api.schemas import (
    AmplifiedConstants,
    CorrectionResult,
    DistanceCheck,
    InequalityCheck,
    ModellingValidation,
    SphereCorrectionReport,
    TestabilityConstants,
)
from src.config import settings
from src.core.expansion import classify_locally_small, effective_r, measured_lambda
from src.core.fields import all_points, encode_points, nullspace_mod, require_prime
from src.core.graph import Number, as_fraction
from src.core.system import EdgeName, TwoLayerSystem, Vertex, ground_graph, is_locally_spherical, sphere_of_vertex
from src.errors import CapacityError, DomainError, PreconditionError, check_cap, ensure

WordLike = Union[Mapping[Vertex, int], Sequence[int], np.ndarray]


class LinearCodeModel:
    """
    建模在 X 上的线性码：每条约束行对应 E 中的一个元素（行以 ename 为键即为 Φ），
    每个线性依赖 ld 是 ename → F_p 的映射

    Args:
        system: 二层系统
        p: 素数
        rows: {ename: {vertex: coeff}}
        dependencies: [{ename: coeff}]
    """

    def __init__(
        self,
        system: TwoLayerSystem,
        p: int,
        rows: Mapping[EdgeName, Mapping[Vertex, int]],
        dependencies: Sequence[Mapping[EdgeName, int]] = (),
    ):
        self.system = system
        self.p = require_prime(p)
        self.rows: Dict[EdgeName, Dict[Vertex, int]] = {}
        for name, coeffs in rows.items():
            if name not in system.edge_index:
                raise DomainError(f"row names unknown edge {name!r}")
            for v in coeffs:
                system.require_vertex(v)
            self.rows[name] = {v: int(a) % self.p for v, a in coeffs.items()}
        self.row_names: Tuple[EdgeName, ...] = tuple(self.rows)
        self.row_index = {name: i for i, name in enumerate(self.row_names)}

        self.dependencies: List[Dict[EdgeName, int]] = []
        for ld in dependencies:
            for name in ld:
                if name not in self.row_index:
                    raise DomainError(f"dependency uses unknown row {name!r}")
            self.dependencies.append({name: int(a) % self.p for name, a in ld.items()})
        self._codeword_table: Optional[np.ndarray] = None

    def __repr__(self) -> str:
        return f"LinearCodeModel(p={self.p}, rows={len(self.rows)}, deps={len(self.dependencies)})"

    @property
    def vertices(self) -> Tuple[Vertex, ...]:
        return self.system.vertices

    @cached_property
    def parity_matrix(self) -> np.ndarray:
        """H：行按 row_names，列按顶点编号"""
        H = np.zeros((len(self.row_names), len(self.vertices)), dtype=np.int64)
        for i, name in enumerate(self.row_names):
            for v, a in self.rows[name].items():
                H[i, self.system.vertex_index[v]] = a
        return H

    def row_support(self, name: EdgeName) -> FrozenSet[Vertex]:
        return frozenset(v for v, a in self.rows[name].items() if a)

    def dependency_vector(self, ld: Mapping[EdgeName, int]) -> np.ndarray:
        vec = np.zeros(len(self.row_names), dtype=np.int64)
        for name, a in ld.items():
            vec[self.row_index[name]] = a
        return vec

    @cached_property
    def row_weights(self) -> np.ndarray:
        """w(e) = w(supp(e))，按公分母整数化"""
        weights = [self.system.edge_weight[name] for name in self.row_names]
        scale = lcm(*[w.denominator for w in weights]) if weights else 1
        return np.array([int(w * scale) for w in weights], dtype=object)

    @cached_property
    def vertex_weights(self) -> np.ndarray:
        weights = [self.system.vertex_weight[v] for v in self.vertices]
        scale = lcm(*[w.denominator for w in weights]) if weights else 1
        return np.array([int(w * scale) for w in weights], dtype=object)

    def word(self, c: WordLike) -> np.ndarray:
        """把映射或序列规范化为按顶点编号排列的数组"""
        n = len(self.vertices)
        if isinstance(c, Mapping):
            missing = [v for v in self.vertices if v not in c]
            if missing:
                raise DomainError(f"word is missing coordinate {missing[0]!r}")
            values = [c[v] for v in self.vertices]
        else:
            values = list(c)
            if len(values) != n:
                raise DomainError(f"word has {len(values)} coordinates, expected {n}")
        arr = np.array([int(a) for a in values], dtype=np.int64)
        bad = np.nonzero((arr < 0) | (arr >= self.p))[0]
        if bad.size:
            raise DomainError(f"coordinate {self.vertices[int(bad[0])]!r} = {int(arr[bad[0]])} outside F_{self.p}")
        return arr

    def syndrome(self, c: WordLike) -> np.ndarray:
        return (self.parity_matrix @ self.word(c)) % self.p

    def contains(self, c: WordLike) -> bool:
        return not self.syndrome(c).any()

    @cached_property
    def basis(self) -> np.ndarray:
        """码的一组基（H 的右零空间）"""
        return nullspace_mod(self.parity_matrix, self.p, n_cols=len(self.vertices))

    @property
    def dimension(self) -> int:
        return int(self.basis.shape[0])

    def random_codeword(self, rng: np.random.Generator) -> np.ndarray:
        if self.dimension == 0:
            return np.zeros(len(self.vertices), dtype=np.int64)
        coeffs = rng.integers(0, self.p, size=self.dimension)
        return (coeffs @ self.basis) % self.p


# ---------------------------------------------------------------------------
# 构造
# ---------------------------------------------------------------------------

def simplicial_code(x: TwoLayerSystem, p: int) -> LinearCodeModel:
    """
    (2,2,3) 系统上的差分码：边 {a,b}（a 编号较小）给出 x_a - x_b，
    三角形 a<b<c 的依赖为 (ab) + (bc) - (ac)
    """
    p = require_prime(p)
    if x.k != 2 or x.K != 3:
        raise DomainError("simplicial code needs a (2, 2, 3) system")
    rows = {}
    for name in x.edge_names:
        a, b = x.sorted_support(name)
        rows[name] = {a: 1, b: p - 1}
    deps = []
    by_support = {x.support[name]: name for name in x.edge_names}
    for j in range(len(x.tops)):
        a, b, c = sorted(x.top_vertices[j], key=x.vertex_index.__getitem__)
        try:
            ab, bc, ac = (by_support[frozenset(pair)] for pair in ((a, b), (b, c), (a, c)))
        except KeyError:
            raise DomainError(f"top #{j} is not the edge set of a triangle") from None
        deps.append({ab: 1, bc: 1, ac: p - 1})
    return LinearCodeModel(x, p, rows, deps)


def indicator_code(x: TwoLayerSystem, p: int) -> LinearCodeModel:
    """
    指示约束码：每条约束是其支撑上的全 1 行；σ 的相交图二染色后，
    一侧系数 +1，另一侧 -1（首个元素所在一侧为 +1）
    """
    p = require_prime(p)
    rows = {name: {v: 1 for v in x.support[name]} for name in x.edge_names}
    deps = []
    for j in range(len(x.tops)):
        members = x.ordered_top(j)
        meets = nx.Graph()
        meets.add_nodes_from(members)
        meets.add_edges_from((a, b) for i, a in enumerate(members) for b in members[i + 1:] if x.support[a] & x.support[b])
        if not nx.is_connected(meets) or not nx.is_bipartite(meets):
            raise DomainError(f"top #{j} does not split into two families of disjoint edges")
        colour = nx.bipartite.color(meets)
        first = colour[members[0]]
        deps.append({name: 1 if colour[name] == first else p - 1 for name in members})
    return LinearCodeModel(x, p, rows, deps)


# ---------------------------------------------------------------------------
# 校验
# ---------------------------------------------------------------------------

def verify_linear_dependency(rows, ld, p: int) -> bool:
    """Σ_e ld(e)·e = 0（即 ld·H = 0 mod p）"""
    H = np.asarray(rows, dtype=np.int64)
    vec = np.asarray(ld, dtype=np.int64)
    if H.ndim != 2 or vec.shape != (H.shape[0],):
        raise DomainError("dependency length must equal the number of rows")
    return not ((vec @ H) % p).any()


def validate_modelling(code: LinearCodeModel) -> ModellingValidation:
    """Φ 为到 E 的双射、支撑互不相同、依赖支撑恰为 T，且每个 ld·H = 0"""
    x = code.system
    violations: List[str] = []

    def report(message: str) -> None:
        if len(violations) < 10:
            violations.append(message)

    if not x.validation.valid:
        report(f"backing system is invalid: {x.validation.violations[0]}")
    supports: Dict[FrozenSet[Vertex], EdgeName] = {}
    for name in code.row_names:
        support = code.row_support(name)
        if support != x.support[name]:
            report(f"row {name!r} has support of size {len(support)} that differs from its edge")
        other = supports.setdefault(support, name)
        if other != name:
            report(f"rows {other!r} and {name!r} have the same support")
    for name in x.edge_names:
        if name not in code.rows:
            report(f"edge {name!r} has no constraint row")

    tops = set(x.tops)
    covered = set()
    H = code.parity_matrix
    for i, ld in enumerate(code.dependencies):
        support = frozenset(name for name, a in ld.items() if a)
        if support not in tops:
            report(f"dependency #{i} has a support that is not in T")
        covered.add(support)
        if not verify_linear_dependency(H, code.dependency_vector(ld), code.p):
            report(f"dependency #{i} does not satisfy ld.H = 0")
    for j, sigma in enumerate(x.tops):
        if sigma not in covered:
            report(f"top #{j} is the support of no dependency")
    return ModellingValidation(valid=not violations, violations=violations)


# ---------------------------------------------------------------------------
# rej 与距离
# ---------------------------------------------------------------------------

def violated_supports(code: LinearCodeModel, c: WordLike) -> FrozenSet[EdgeName]:
    """A(c)：被 c 违反的约束的支撑（以 ename 表示）"""
    syndrome = code.syndrome(c)
    return frozenset(code.row_names[i] for i in np.nonzero(syndrome)[0])


def rej(code: LinearCodeModel, c: WordLike) -> Fraction:
    """w(𝒜(c)) / w(ℰ)"""
    violated = code.syndrome(c) != 0
    total = sum(code.row_weights)
    return Fraction(int(sum(code.row_weights[violated])), int(total))


def weighted_norm(code: LinearCodeModel, c: WordLike) -> Fraction:
    """||c|| = Σ_{c(v)≠0} w(v) / w(V)"""
    nonzero = code.word(c) != 0
    return Fraction(int(sum(code.vertex_weights[nonzero])), int(sum(code.vertex_weights)))


def codewords(code: LinearCodeModel, cap: Optional[int] = None) -> np.ndarray:
    """
    全部码字（字典序），p^dim 受 codeword_space_cap 限制

    Raises:
        CapacityError: p^dim 超过上限
    """
    dim = code.dimension
    check_cap(code.p ** dim, settings.codeword_space_cap if cap is None else cap, "codeword space size")
    if code._codeword_table is None:
        if dim == 0:
            words = np.zeros((1, len(code.vertices)), dtype=np.int64)
        else:
            words = (all_points(code.p, dim) @ code.basis) % code.p
            words = words[np.argsort(encode_points(words, code.p), kind="stable")]
        code._codeword_table = words
    return code._codeword_table


def nearest_codeword(code: LinearCodeModel, c: WordLike, cap: Optional[int] = None) -> Tuple[Tuple[int, ...], Fraction]:
    """
    暴力求 min_{c'∈C} ||c - c'||，并列时取字典序最小的码字

    Returns:
        (码字, 精确距离)
    """
    word = code.word(c)
    words = codewords(code, cap)
    diff = (words != word[None, :]).astype(np.int64)
    # diff 为 0/1，每个距离不超过总权重；总权重 < 2^62 时 int64 乘积不会溢出，否则退回 object
    weights = code.vertex_weights.astype(np.int64) if sum(code.vertex_weights) < 2 ** 62 else code.vertex_weights
    distances = diff @ weights
    best = int(np.argmin(distances))
    return tuple(int(a) for a in words[best]), Fraction(int(distances[best]), int(sum(code.vertex_weights)))


# ---------------------------------------------------------------------------
# bit-flip
# ---------------------------------------------------------------------------

def _local_masses(code: LinearCodeModel, violated: FrozenSet[EdgeName]) -> Dict[Vertex, Fraction]:
    """m_v(A_v)"""
    x = code.system
    return {v: sum((m for e, m in x.link_vertex_weight[v].items() if e in violated), Fraction(0)) for v in x.vertices}


def _link_totals(code: LinearCodeModel) -> Dict[Vertex, Fraction]:
    x = code.system
    return {v: sum(x.link_vertex_weight[v].values(), Fraction(0)) for v in x.vertices}


def flip_vertex(code: LinearCodeModel, c: WordLike, v0: Vertex) -> Tuple[Tuple[int, ...], Fraction]:
    """
    只改 v0 的取值，使 v0 处被违反的 link 质量最小（并列取最小的平移量 t）

    Returns:
        (c', 新的违反比例)，比例 ≤ (p-1)/p
    """
    x = code.system
    x.require_vertex(v0)
    word = code.word(c)
    p = code.p
    i0 = x.vertex_index[v0]
    masses = x.link_vertex_weight[v0]
    total = sum(masses.values(), Fraction(0))
    through = [name for name in x.edges_of_vertex[v0] if name in code.rows]
    if total == 0 or not through:
        return tuple(int(a) for a in word), Fraction(0)

    H = code.parity_matrix[[code.row_index[name] for name in through]]
    base = (H @ word) % p
    column = H[:, i0]
    best_t, best_mass = 0, None
    for t in range(p):
        violated = (base + t * column) % p != 0
        mass = sum((masses.get(name, Fraction(0)) for name, bad in zip(through, violated) if bad), Fraction(0))
        if best_mass is None or mass < best_mass:
            best_t, best_mass = t, mass
    fraction = best_mass / total
    ensure(fraction <= Fraction(p - 1, p), f"flip at {v0!r} leaves violated fraction {fraction} above (p-1)/p")
    flipped = word.copy()
    flipped[i0] = (flipped[i0] + best_t) % p
    return tuple(int(a) for a in flipped), fraction


def bitflip_correct(code: LinearCodeModel, c: WordLike, delta: Number, round_cap: Optional[int] = None) -> CorrectionResult:
    """
    反复选取编号最小的 δ-large 顶点并调用 flip_vertex，直到所有顶点 δ-small

    s = 2 时逐步断言 w(A) 至少下降 2(δ-(p-1)/p)·w(v)，并断言
    ||c - c'|| ≤ (s/k)·rej(c)/(2(δ-(p-1)/p))；s ≥ 3 时断言 v 处 link 质量下降并限制轮数。

    Raises:
        DomainError: δ ≤ (p-1)/p
        CapacityError: 超过 bitflip_round_cap 轮
    """
    x = code.system
    x.require_valid()
    d = as_fraction(delta)
    p = code.p
    slack = d - Fraction(p - 1, p)
    if slack <= 0:
        raise DomainError(f"delta must exceed (p-1)/p = {Fraction(p - 1, p)}, got {d}")
    round_cap = settings.bitflip_round_cap if round_cap is None else round_cap

    original = code.word(c)
    current = tuple(int(a) for a in original)
    totals = _link_totals(code)
    two_regular = x.s == 2
    flips: List[Vertex] = []
    rounds = 0
    while True:
        violated = violated_supports(code, current)
        local = _local_masses(code, violated)
        chosen = next((v for v in x.vertices if totals[v] and local[v] >= d * totals[v]), None)
        if chosen is None:
            break
        if rounds >= round_cap:
            raise CapacityError(f"bit-flip did not settle within {round_cap} rounds", cap=round_cap, requested=rounds + 1)
        before_weight = x.weight_of(violated)
        current, _ = flip_vertex(code, current, chosen)
        after = violated_supports(code, current)
        if two_regular:
            ensure(x.weight_of(after) <= before_weight - 2 * slack * x.vertex_weight[chosen],
                   f"flip at {chosen!r} did not decrease w(A) by 2(delta-(p-1)/p)w(v)")
        else:
            after_local = sum((m for e, m in x.link_vertex_weight[chosen].items() if e in after), Fraction(0))
            ensure(after_local <= local[chosen] - slack * totals[chosen],
                   f"flip at {chosen!r} did not decrease the link mass by (delta-(p-1)/p) m_v(E_v)")
        flips.append(chosen)
        rounds += 1

    moved = weighted_norm(code, (np.array(current) - original) % p)
    bound = None
    if two_regular:
        flipped_mass = sum((x.vertex_weight[v] for v in flips), Fraction(0)) / x.total_vertex_weight
        bound = Fraction(x.s, x.k) * rej(code, original) / (2 * slack)
        ensure(moved <= flipped_mass <= bound, f"bit-flip moved {moved}, above the bound {bound}")
    in_code = code.contains(current)
    logger.debug(f"Bit-flip finished: flips={len(flips)}, in_code={in_code}")
    return CorrectionResult(word=current, flips=flips, in_code=in_code, distance_moved=moved, distance_bound=bound)


# ---------------------------------------------------------------------------
# 可测性
# ---------------------------------------------------------------------------

def amplified_constants(delta: Number, p: int, s: int, mu: Number, t_prime: int) -> AmplifiedConstants:
    """unique neighbor expansion 推出的放大可测常数：r = 2μ(δ-(p-1)/p)/s，t = t'+1"""
    d, m = as_fraction(delta), as_fraction(mu)
    slack = d - Fraction(p - 1, p)
    if slack <= 0:
        raise DomainError(f"delta must exceed (p-1)/p = {Fraction(p - 1, p)}, got {d}")
    if m <= 0 or t_prime < 0 or s < 2:
        raise DomainError("mu must be positive, t' non-negative and s >= 2")
    return AmplifiedConstants(r=2 * m * slack / s, t=t_prime + 1)


def check_amplified_bound(code: LinearCodeModel, c: WordLike, r: Number, t: int, cap: Optional[int] = None) -> InequalityCheck:
    """rej(c) ≥ k·r·min{dist(c, C), 1/k^t}"""
    k = code.system.k
    r = as_fraction(r)
    lhs = rej(code, c)
    _, dist = nearest_codeword(code, c, cap)
    rhs = k * r * min(dist, Fraction(1, k ** t))
    return InequalityCheck(holds=lhs >= rhs, lhs=lhs, rhs=rhs, relation=">=")


def testability_constants(code: LinearCodeModel, delta: Number) -> TestabilityConstants:
    """
    s = 2 组合定理：R_nint²/K ≥ 1/k² 时码是 (ε₀, r, t)-放大可测的

    μ = 7(1-δ)³/(512(1+15δ))，r = μ(δ-(p-1)/p)，t = 3，ε₀ = min{R²(1-δ)/(4K), μ/k²}
    """
    x = code.system
    x.require_valid()
    d = as_fraction(delta)
    p = code.p
    if not Fraction(p - 1, p) < d < 1:
        raise DomainError(f"delta must lie in ((p-1)/p, 1), got {d}")
    mu = 7 * (1 - d) ** 3 / (512 * (1 + 15 * d))
    r = mu * (d - Fraction(p - 1, p))
    k, K = x.k, x.K
    if x.s != 2:
        return TestabilityConstants(applicable=False, reason=f"needs s = 2, system has s = {x.s}", mu=mu, r=r, t=3)
    R = effective_r(x)
    if R ** 2 / K < Fraction(1, k ** 2):
        return TestabilityConstants(applicable=False, reason=f"R^2/K = {R ** 2 / K} is below 1/k^2", mu=mu, r=r, t=3)
    eps0 = min(R ** 2 * (1 - d) / (4 * K), mu / k ** 2)
    return TestabilityConstants(applicable=True, mu=mu, eps0=eps0, r=r, t=3)


def distance_bound_check(code: LinearCodeModel, cap: Optional[int] = None) -> DistanceCheck:
    """距离定理：min ||c|| ≥ 16/(s⁴(s-1)²k)·(1 - s(s-1)(k-1)λ_gr)，λ_gr = max(0, 1-h_ground)"""
    x = code.system
    x.require_valid()
    s, k = x.s, x.k
    lam = measured_lambda(ground_graph(x))
    bound = Fraction(16, s ** 4 * (s - 1) ** 2 * k) * (1 - s * (s - 1) * (k - 1) * lam)
    words = codewords(code, cap)
    nonzero = words[words.any(axis=1)]
    if not len(nonzero):
        return DistanceCheck(holds=True, bound=bound, true_distance=None, lambda_gr=lam)
    weights = code.vertex_weights
    masses = [int(sum(weights[row != 0])) for row in nonzero]
    true_distance = Fraction(min(masses), int(sum(weights)))
    holds = true_distance >= bound
    if not holds:
        logger.warning(f"Distance bound violated: true {true_distance} < bound {bound}")
    return DistanceCheck(holds=holds, bound=bound, true_distance=true_distance, lambda_gr=lam)


# ---------------------------------------------------------------------------
# 球面码
# ---------------------------------------------------------------------------

class SphereCode(NamedTuple):
    center: Vertex
    vertices: Tuple[Vertex, ...]
    rows: Dict[EdgeName, Dict[Vertex, int]]
    weights: Dict[EdgeName, Fraction]


def sphere_code(code: LinearCodeModel, v: Vertex) -> SphereCode:
    """ℰ_sph(v) = {e : supp(e) ∈ E_sph(v)}，权重为 m_sph(v)"""
    sphere = sphere_of_vertex(code.system, v)
    rows = {name: dict(code.rows[name]) for name in sphere.edges if name in code.rows}
    return SphereCode(v, sphere.vertices, rows, dict(sphere.edge_weight))


def check_extendibility(code: LinearCodeModel, v: Vertex, c_sph: Mapping[Vertex, int]) -> Optional[int]:
    """
    对球面码字 c_sph 找最小的 a ∈ F_p，使延拓满足所有经过 v 的约束

    Raises:
        PreconditionError: c_sph 不是球面码字，或经过 v 的约束伸出球面之外
    """
    p = code.p
    local = sphere_code(code, v)
    missing = [u for u in local.vertices if u not in c_sph]
    if missing:
        raise PreconditionError(f"sphere word is missing coordinate {missing[0]!r}", item=missing[0])
    for name, coeffs in local.rows.items():
        if sum(a * int(c_sph[u]) for u, a in coeffs.items()) % p:
            raise PreconditionError(f"sphere word violates constraint {name!r}", item=name)

    domain = set(local.vertices) | {v}
    through = [name for name in code.system.edges_of_vertex[v] if name in code.rows]
    for name in through:
        if not code.system.support[name] <= domain:
            raise PreconditionError(f"constraint {name!r} through {v!r} leaves the sphere", item=name)
    for a in range(p):
        if all((coeffs[v] * a + sum(c * int(c_sph[u]) for u, c in coeffs.items() if u != v)) % p == 0
               for coeffs in (code.rows[name] for name in through)):
            return a
    return None


def sphere_correct_experimental(
    code: LinearCodeModel, c: WordLike, delta: Number, alpha: Number = 0
) -> SphereCorrectionReport:
    """
    实验性的球面纠错：每步取编号最小的、球面 δ-spherically small 而 link δ-large 且取值会改变的顶点，
    能延拓时用球面码字的延拓值，否则退回 flip_vertex；至多 |V|·p 步

    不对结果作定理级断言，只报告终态。
    """
    x = code.system
    x.require_valid()
    if not is_locally_spherical(x).holds:
        raise DomainError("sphere correction needs a locally spherical system")
    d = as_fraction(delta)
    p = code.p
    word = [int(a) for a in code.word(c)]
    totals = _link_totals(code)
    spheres = {v: sphere_of_vertex(x, v) for v in x.vertices}
    sphere_totals = {v: sum(spheres[v].edge_weight.values(), Fraction(0)) for v in x.vertices}
    cap = len(x.vertices) * p

    corrected: List[Vertex] = []
    iterations = 0
    terminated_by = "no_candidate"
    while True:
        if iterations >= cap:
            terminated_by = "iteration_cap"
            break
        violated = violated_supports(code, word)
        local = _local_masses(code, violated)
        step = None
        for v in x.vertices:
            if not totals[v] or local[v] < d * totals[v]:
                continue
            sphere = spheres[v]
            bad = sum((sphere.edge_weight[e] for e in sphere.edges if e in violated), Fraction(0))
            if sphere_totals[v] and bad >= d * sphere_totals[v]:
                continue
            symbol = None
            if bad == 0:
                try:
                    symbol = check_extendibility(code, v, {u: word[x.vertex_index[u]] for u in sphere.vertices})
                except PreconditionError:
                    symbol = None
            if symbol is None:
                symbol = flip_vertex(code, word, v)[0][x.vertex_index[v]]
            if symbol != word[x.vertex_index[v]]:
                step = (v, symbol)
                break
        if step is None:
            break
        v, symbol = step
        word[x.vertex_index[v]] = symbol
        corrected.append(v)
        iterations += 1

    final_violated = violated_supports(code, word)
    locally_small = True
    if final_violated:
        locally_small = classify_locally_small(x, final_violated, d, alpha).locally_small
    report = SphereCorrectionReport(word=tuple(word), iterations=iterations, corrected=corrected,
                                    terminated_by=terminated_by, locally_small=locally_small,
                                    in_code=code.contains(word))
    logger.info(f"Sphere correction: iterations={iterations}, in_code={report.in_code}, stop={terminated_by}")
    return report
