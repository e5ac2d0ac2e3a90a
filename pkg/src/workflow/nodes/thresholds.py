"""
Thresholds 节点 - 主定理阈值
"""
import asyncio

from loguru import logger

from src.core.expansion import system_thresholds
from src.errors import DomainError
from src.workflow.state import CertificationState, mark_failed


async def thresholds_node(state: CertificationState) -> CertificationState:
    """
    计算 (λ_gr, λ_loc, λ_nint, ε₀)；run_search 且未显式给出 eps0 时搜索也需要它
    """
    needed_by_search = state.get("run_search") and state.get("eps0") is None
    if not (state.get("run_thresholds") or needed_by_search):
        return state
    try:
        thresholds = state.get("thresholds")
        if thresholds is None:
            delta = state.get("delta")
            if delta is None:
                raise DomainError("thresholds need --delta")
            state["status"] = "thresholding"
            thresholds = await asyncio.to_thread(system_thresholds, state["system"], delta, state.get("alpha", 0))
        state["thresholds"] = thresholds
        logger.info(f"Thresholds: eps0={thresholds.eps0}, lambda_gr={thresholds.lambda_gr}")
        return state

    except Exception as e:
        logger.exception(f"Thresholds failed: {e}")
        return mark_failed(state, e)
