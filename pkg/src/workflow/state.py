"""
LangGraph 工作流状态定义
"""
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Literal, Optional, TypedDict

from src.api.schemas import HdeCertificate, SystemValidation, Thresholds
from src.core.system import TwoLayerSystem
from src.errors import CapacityError, DomainError, InvariantError, ParseError


class SearchMode(str, Enum):
    """反例搜索模式"""
    EXHAUSTIVE = "exhaustive"
    RANDOMIZED = "randomized"
    AUTO = "auto"


class ErrorKind(str, Enum):
    """失败原因分类，决定 CLI 退出码"""
    PARSE = "parse"
    DOMAIN = "domain"
    CAPACITY = "capacity"
    INVARIANT = "invariant"
    OTHER = "other"


class CertificationState(TypedDict, total=False):
    """认证流水线状态"""

    # 输入
    system_path: str
    lam: Optional[Fraction]  # 统一的 λ；缺省时按 δ 的主定理阈值逐图认证
    delta: Optional[Fraction]
    alpha: Fraction
    eps0: Optional[Fraction]  # 搜索用的 ε₀；缺省取主定理阈值
    workers: Optional[int]

    # 开关
    run_validate: bool
    run_certify: bool
    run_thresholds: bool
    run_search: bool
    search_mode: SearchMode
    search_budget: int
    seed: Optional[int]

    # 中间结果
    system: TwoLayerSystem
    validation: Optional[SystemValidation]
    thresholds: Optional[Thresholds]
    certificate: Optional[HdeCertificate]
    counterexample: Optional[List[str]]
    search_ran: bool

    # 判定
    verdicts: Dict[str, bool]

    # 状态
    status: Literal["loading", "validating", "certifying", "thresholding", "searching", "completed", "invalid", "failed"]
    error_message: Optional[str]
    error_kind: Optional[ErrorKind]


def classify_error(e: BaseException) -> ErrorKind:
    if isinstance(e, ParseError):
        return ErrorKind.PARSE
    if isinstance(e, DomainError):
        return ErrorKind.DOMAIN
    if isinstance(e, CapacityError):
        return ErrorKind.CAPACITY
    if isinstance(e, InvariantError):
        return ErrorKind.INVARIANT
    return ErrorKind.OTHER


def mark_failed(state: CertificationState, e: BaseException) -> CertificationState:
    """节点失败时的统一记录"""
    state["status"] = "failed"
    state["error_message"] = str(e)
    state["error_kind"] = classify_error(e)
    return state
