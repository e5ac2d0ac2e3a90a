"""
API Schemas - Pydantic 模型
"""
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.fields import is_prime

Rational = Fraction
Real = Union[Fraction, float]


class HdeModel(BaseModel):
    """所有结果模型的基类：允许 Fraction 字段，构造后只读"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ---------------------------------------------------------------------------
# graph-core
# ---------------------------------------------------------------------------

class ExpanderVerdict(HdeModel):
    """λ-expander 判定结果"""
    passed: bool
    certificate: Literal["cheeger", "spectral", "edgeless", "none"]
    lambda_target: Rational
    reason: Optional[str] = None
    n_vertices: int = 0
    cheeger: Optional[Rational] = None
    second_eigenvalue: Optional[float] = None

    @property
    def one_minus_h(self) -> Optional[Rational]:
        if self.cheeger is None:
            return None
        return 1 - self.cheeger


class InequalityCheck(HdeModel):
    """一条不等式的两侧数值；relation 表示 lhs 与 rhs 应满足的关系"""
    holds: bool
    lhs: Real
    rhs: Real
    relation: Literal[">=", "<="]
    applicable: bool = True
    reason: Optional[str] = None


class AlmostCompleteBound(HdeModel):
    beta: Rational
    guarantee: Rational  # h_G >= 1 - 2β


class CoverVerdict(HdeModel):
    passed: bool
    reason: Optional[str] = None


# ---------------------------------------------------------------------------
# two-layer
# ---------------------------------------------------------------------------

class SystemValidation(HdeModel):
    """二层系统校验结果（最多记录 10 条违规）"""
    valid: bool
    violations: List[str] = Field(default_factory=list)
    s: Optional[int] = None
    k: Optional[int] = None
    K: Optional[int] = None


class LocalCheck(HdeModel):
    holds: bool
    applicable: bool = True
    counterexample: Optional[Tuple[Any, ...]] = None
    reason: Optional[str] = None


class SphereOfVertex(HdeModel):
    """顶点 v 的球面：E_sph(v)、V_sph(v) 与权重 m_sph(v)"""
    center: Any
    edges: Tuple[Any, ...]
    vertices: Tuple[Any, ...]
    edge_weight: Dict[Any, Rational]
    vertex_weight: Dict[Any, Rational]

    @property
    def is_empty(self) -> bool:
        return not self.edges


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------

class Thresholds(HdeModel):
    """主扩张定理给出的阈值"""
    s: int
    k: int
    K: int
    R: Rational
    delta: Rational
    alpha: Rational
    lambda_gr: Rational
    lambda_loc: Rational
    lambda_nint: Rational
    eps0: Rational


class HdeCertificate(HdeModel):
    """HDE 证书：各图的判定与总判定"""
    lambda_target: Rational
    ground: ExpanderVerdict
    links: Dict[Any, ExpanderVerdict]
    nonintersecting: ExpanderVerdict
    nonintersecting_edgeless: bool
    r_nint: Rational
    thresholds: Optional[Thresholds] = None
    passed: bool

    @model_validator(mode="after")
    def _overall_is_conjunction(self):
        expected = self.ground.passed and self.nonintersecting.passed and all(v.passed for v in self.links.values())
        if self.passed != expected:
            raise ValueError("overall verdict must equal the conjunction of component verdicts")
        return self

    def failing_components(self) -> List[str]:
        failing = []
        if not self.ground.passed:
            failing.append("ground")
        failing.extend(f"link:{v}" for v, verdict in self.links.items() if not verdict.passed)
        if not self.nonintersecting.passed:
            failing.append("nonintersecting")
        return failing


class LocalClassification(HdeModel):
    """A 的 (δ,α)-locally small 分类"""
    A: frozenset
    delta: Rational
    alpha: Rational
    labels: Dict[Any, Literal["small", "large"]]
    ratios: Dict[Any, Rational]
    large_mass_ratio: Rational
    locally_small: bool


class SphereMassCheck(HdeModel):
    applicable: bool
    holds: bool
    large_vertices: List[Any] = Field(default_factory=list)
    lhs: Optional[Rational] = None
    rhs: Optional[float] = None
    lambda_opp: Optional[float] = None
    reason: Optional[str] = None


# ---------------------------------------------------------------------------
# code-model
# ---------------------------------------------------------------------------

class ModellingValidation(HdeModel):
    valid: bool
    violations: List[str] = Field(default_factory=list)


class CorrectionResult(HdeModel):
    """bit-flip 纠错结果"""
    word: Tuple[int, ...]
    flips: List[Any]
    in_code: bool
    distance_moved: Rational
    distance_bound: Optional[Rational] = None


class DistanceCheck(HdeModel):
    holds: bool
    bound: Rational
    true_distance: Optional[Rational]
    lambda_gr: Rational


class AmplifiedConstants(HdeModel):
    r: Rational
    t: int


class TestabilityConstants(HdeModel):
    """s=2 组合定理的常数"""
    applicable: bool
    reason: Optional[str] = None
    mu: Rational
    eps0: Optional[Rational] = None
    r: Rational
    t: int


class SphereCorrectionReport(HdeModel):
    word: Tuple[int, ...]
    iterations: int
    corrected: List[Any]
    terminated_by: Literal["no_candidate", "iteration_cap"]
    locally_small: bool
    in_code: bool


# ---------------------------------------------------------------------------
# affine-invariant
# ---------------------------------------------------------------------------

class AffineCodeSpec(HdeModel):
    """单轨道仿射不变码的参数，τ₀ 的下标顺序固定"""
    q: int
    n: int
    p: int
    tau0: Tuple[Tuple[int, ...], ...]

    @field_validator("q", "p")
    @classmethod
    def _prime(cls, value: int) -> int:
        if not is_prime(value):
            raise ValueError(f"{value} is not a prime")
        return value

    @field_validator("n")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("n must be positive")
        return value

    @model_validator(mode="after")
    def _check_tau0(self):
        if len(self.tau0) < 2:
            raise ValueError("tau0 needs at least two vectors (k >= 2)")
        for vec in self.tau0:
            if len(vec) != self.n:
                raise ValueError(f"vector {vec} does not have length n={self.n}")
            if any(not 0 <= x < self.q for x in vec):
                raise ValueError(f"vector {vec} has entries outside F_{self.q}")
        if len(set(self.tau0)) != len(self.tau0):
            raise ValueError("tau0 entries must be distinct")
        return self

    @property
    def k(self) -> int:
        return len(self.tau0)

    @property
    def size(self) -> int:
        return self.q ** self.n


class AdmissibleSet(HdeModel):
    indices: Tuple[int, ...]  # 0-based 下标

    @property
    def size(self) -> int:
        return len(self.indices)


class AffineThresholds(HdeModel):
    """仿射码可测性常数"""
    size_requirement: Rational
    eps0: Rational
    r: Rational
    t: int
    corollary_size_requirement: int
    corollary_r: Rational
    corollary_delta: Rational


class AffineExpansionReport(HdeModel):
    applicable: bool
    target: Optional[Rational] = None
    ground: Optional[ExpanderVerdict] = None
    ground_complete_constant: Optional[bool] = None
    nonintersecting: Optional[ExpanderVerdict] = None
    links: Dict[Any, ExpanderVerdict] = Field(default_factory=dict)
    covers: Dict[str, CoverVerdict] = Field(default_factory=dict)
    passed: bool
    reason: Optional[str] = None


# ---------------------------------------------------------------------------
# cli-harness
# ---------------------------------------------------------------------------

class ExperimentConfig(HdeModel):
    """拒绝率实验配置"""
    code_path: Path
    system_path: Optional[Path] = None
    delta: Rational
    alpha: Rational = Fraction(0)
    eps0: Optional[Rational] = None
    r: Optional[Rational] = None
    t: int = 3
    rates: List[Rational]
    samples: int = 1
    seed: int = 0
    out: Optional[Path] = None
    workers: int = 1

    @field_validator("samples")
    @classmethod
    def _samples_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("samples must be >= 1")
        return value

    @field_validator("rates")
    @classmethod
    def _rates_in_unit_interval(cls, value: List[Fraction]) -> List[Fraction]:
        if not value:
            raise ValueError("rate grid is empty")
        for rate in value:
            if not 0 <= rate <= 1:
                raise ValueError(f"corruption rate {rate} outside [0, 1]")
        return value

    @field_validator("t", "workers")
    @classmethod
    def _at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value


class ExperimentRow(HdeModel):
    seed: int
    rate: Rational
    sample: int
    dist: Optional[Rational]
    rej: Rational
    bound_rhs: Optional[Rational]
    corrector_flips: Optional[int]  # 纠错超出轮数上限时为空
    corrected_in_code: Optional[bool]
    grid_index: int = 0
