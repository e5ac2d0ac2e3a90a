"""
LangGraph 工作流节点
"""
from .load import load_node
from .validate import validate_node
from .certify import certify_node
from .thresholds import thresholds_node
from .search import search_node

__all__ = [
    "load_node",
    "validate_node",
    "certify_node",
    "thresholds_node",
    "search_node",
]
