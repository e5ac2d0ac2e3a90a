"""
Validate 节点 - 二层系统定义校验
"""
import asyncio

from loguru import logger

from src.core.system import validate_system
from src.workflow.state import CertificationState, mark_failed


async def validate_node(state: CertificationState) -> CertificationState:
    """
    校验 (V, E, T) 是否为 (s,k,K)-系统；不合法时后续节点不再运行

    合法性总会检查（认证与搜索都以它为前提），run_validate 只决定是否把它记为一项判定。
    """
    try:
        x = state["system"]
        state["status"] = "validating"
        validation = await asyncio.to_thread(validate_system, x)
        state["validation"] = validation
        if state.get("run_validate", True):
            state["verdicts"]["valid"] = validation.valid

        if not validation.valid:
            logger.warning(f"System invalid: {validation.violations[0]}")
            state["status"] = "invalid"
        else:
            logger.info(f"System valid: s={validation.s}, k={validation.k}, K={validation.K}")
        return state

    except Exception as e:
        logger.exception(f"Validate failed: {e}")
        return mark_failed(state, e)
