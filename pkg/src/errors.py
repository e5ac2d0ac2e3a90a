"""
异常定义
"""
from typing import Any, Optional


class HdeError(Exception):
    """所有 HDE 错误的基类"""


class DomainError(HdeError, ValueError):
    """参数或对象不满足定义"""


class PreconditionError(DomainError):
    """前置条件不成立，item 记录出问题的元素"""

    def __init__(self, message: str, item: Any = None):
        super().__init__(message)
        self.item = item


class CapacityError(HdeError):
    """超出配置的穷举上限"""

    def __init__(self, message: str, cap: Optional[int] = None, requested: Optional[int] = None):
        super().__init__(message)
        self.cap = cap
        self.requested = requested


class ParseError(HdeError):
    """文本格式解析失败"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        location = self.path or "<input>"
        if self.line is not None:
            location = f"{location}:{self.line}"
        return f"{location}: {self.message}"


class InvariantError(HdeError):
    """运行时断言的命题不成立（视为发现，不做静默修正）"""


def ensure(condition: bool, message: str) -> None:
    if not condition:
        raise InvariantError(message)


def check_cap(requested: int, cap: int, what: str) -> None:
    """超过上限时抛出 CapacityError"""
    if requested > cap:
        raise CapacityError(f"{what}: {requested} exceeds cap {cap}", cap=cap, requested=requested)
