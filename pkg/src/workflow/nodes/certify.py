"""
Certify 节点 - HDE 认证
"""
import asyncio

from loguru import logger

from src.core.expansion import certify_at_thresholds, certify_hde, system_thresholds
from src.errors import DomainError
from src.workflow.state import CertificationState, mark_failed


async def certify_node(state: CertificationState) -> CertificationState:
    """
    给定 lam 时按统一的 λ 认证；否则按 δ 的主定理阈值逐图认证

    Returns:
        更新后的 state，包含 certificate（run_certify 为 False 时原样返回）
    """
    if not state.get("run_certify"):
        return state
    try:
        x = state["system"]
        state["status"] = "certifying"
        lam = state.get("lam")
        workers = state.get("workers")
        if lam is not None:
            logger.info(f"Certify node: lambda={lam}")
            certificate = await asyncio.to_thread(certify_hde, x, lam, workers)
        else:
            delta = state.get("delta")
            if delta is None:
                raise DomainError("certify needs --lambda or --delta")
            thresholds = await asyncio.to_thread(system_thresholds, x, delta, state.get("alpha", 0))
            state["thresholds"] = thresholds
            logger.info(f"Certify node: thresholds at delta={delta}")
            certificate = await asyncio.to_thread(certify_at_thresholds, x, thresholds, workers)

        state["certificate"] = certificate
        state["verdicts"]["certified"] = certificate.passed
        return state

    except Exception as e:
        logger.exception(f"Certify failed: {e}")
        return mark_failed(state, e)
