"""
Load 节点 - 读取二层系统文件
"""
import asyncio

from loguru import logger

from src.errors import DomainError
from src.services.file_parser import file_parser
from src.workflow.state import CertificationState, mark_failed


async def load_node(state: CertificationState) -> CertificationState:
    """
    解析 system_path 指向的 #tls 文件

    Args:
        state: 包含 system_path

    Returns:
        更新后的 state，包含 system
    """
    try:
        path = state.get("system_path")
        if not path:
            raise DomainError("Missing required field: system_path")

        logger.info(f"Load node: {path}")
        state["status"] = "loading"
        state["system"] = await asyncio.to_thread(file_parser.read_system, path)
        state.setdefault("verdicts", {})
        return state

    except Exception as e:
        logger.exception(f"Load failed: {e}")
        return mark_failed(state, e)
