"""
LangGraph 工作流定义
"""
from typing import Literal

from langgraph.graph import END, StateGraph
from loguru import logger

from src.workflow.nodes import certify_node, load_node, search_node, thresholds_node, validate_node
from src.workflow.state import CertificationState


def route_on_failure(state: CertificationState) -> Literal["continue", "end"]:
    if state.get("status") in ("failed", "invalid"):
        return "end"
    return "continue"


def create_workflow():
    """
    创建认证工作流：load -> validate -> certify -> thresholds -> search

    Returns:
        编译后的工作流图
    """
    workflow = StateGraph(CertificationState)

    workflow.add_node("load", load_node)
    workflow.add_node("validate", validate_node)
    workflow.add_node("certify", certify_node)
    workflow.add_node("thresholds", thresholds_node)
    workflow.add_node("search", search_node)

    workflow.set_entry_point("load")

    # 每一步失败（或系统不合法）都直接结束
    for source, target in (("load", "validate"), ("validate", "certify"), ("certify", "thresholds"), ("thresholds", "search")):
        workflow.add_conditional_edges(
            source,
            route_on_failure,
            {
                "continue": target,
                "end": END,
            },
        )
    workflow.add_edge("search", END)

    # 运行短小且可由输入复现，不挂 checkpointer
    app = workflow.compile()

    logger.debug("Certification workflow created")

    return app


# 全局工作流实例
certification_app = create_workflow()
