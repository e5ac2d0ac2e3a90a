"""
Search 节点 - unique neighbor expansion 反例搜索
"""
import asyncio

from loguru import logger

from src.config import settings
from src.core.expansion import unique_neighbor_falsification_search
from src.errors import DomainError
from src.workflow.state import CertificationState, SearchMode, mark_failed


def _resolve_mode(state: CertificationState) -> str:
    mode = SearchMode(state.get("search_mode", SearchMode.AUTO))
    if mode != SearchMode.AUTO:
        return mode.value
    if len(state["system"].edge_names) <= settings.unn_exhaustive_cap:
        return SearchMode.EXHAUSTIVE.value
    return SearchMode.RANDOMIZED.value


async def search_node(state: CertificationState) -> CertificationState:
    """
    在 ε₀ 以下搜索没有 unique neighbor 的 (δ,α)-locally small 集合

    ε₀ 优先取 state 中给定的值，否则取主定理阈值；α 可以 ≥ 1（此时只能显式给出 ε₀）。

    Returns:
        更新后的 state，包含 counterexample（按 E 的顺序排列的 ename 列表，没有时为 None）
    """
    if not state.get("run_search"):
        state["status"] = "completed"
        return state
    try:
        x = state["system"]
        delta = state.get("delta")
        if delta is None:
            raise DomainError("unn-search needs --delta")
        alpha = state.get("alpha", 0)
        eps0 = state.get("eps0")
        if eps0 is None:
            eps0 = state["thresholds"].eps0
        mode = _resolve_mode(state)
        state["status"] = "searching"
        logger.info(f"Search node: mode={mode}, delta={delta}, alpha={alpha}, eps0={eps0}")
        found = await asyncio.to_thread(
            unique_neighbor_falsification_search,
            x, delta, alpha, eps0, mode,
            state.get("search_budget", 1000), state.get("seed"),
        )
        state["counterexample"] = None if found is None else sorted(found, key=x.edge_index.__getitem__)
        state["search_ran"] = True
        state["verdicts"]["no_counterexample"] = found is None
        state["status"] = "completed"
        return state

    except Exception as e:
        logger.exception(f"Search failed: {e}")
        return mark_failed(state, e)
