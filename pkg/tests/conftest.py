"""
测试公共夹具：三角形系统与码、两个不交三角形、小的仿射码参数、文件格式样例
"""
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings
from loguru import logger

from src.api.schemas import AffineCodeSpec
from src.core.code import simplicial_code
from src.core.expansion import certify_at_thresholds, system_thresholds
from src.core.system import from_simplicial_complex, random_clique_system, random_grid_system
from src.errors import DomainError

CERTIFY_DELTA = Fraction(3, 4)

hypothesis_settings.register_profile(
    "hde", max_examples=40, deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.load_profile("hde")


TRIANGLE_TLS = """#tls v1 s=2 k=2 K=3
# one triangle
vertex a
vertex b
vertex c
edge ab a b
edge ac a c
edge bc b c
top ab ac bc
"""

TRIANGLE_CODE = """#code v1 p=2 system=triangle.tls
row ab 1 1
row ac 1 1
row bc 1 1
dep ab:1 ac:1 bc:1
"""

TWO_TRIANGLES_TLS = """#tls v1 s=2 k=2 K=3
vertex a
vertex b
vertex c
vertex d
vertex e
vertex f
edge ab a b
edge ac a c
edge bc b c
edge de d e
edge df d f
edge ef e f
top ab ac bc
top de df ef
"""

BROKEN_TLS = """#tls v1
vertex a
vertex b
vertex c
edge ab a b
edge abc a b c
top ab abc
"""


@pytest.fixture(autouse=True)
def quiet_logs():
    """测试期间只保留 WARNING 以上的日志"""
    logger.remove()
    logger.add(lambda message: None, level="WARNING")
    yield
    # CLI 测试会重新配置日志，这里整体清掉
    logger.remove()


@pytest.fixture
def triangle():
    return from_simplicial_complex([("a", "b", "c")])


@pytest.fixture
def two_triangles():
    return from_simplicial_complex([("a", "b", "c"), ("d", "e", "f")])


@pytest.fixture
def triangle_code(triangle):
    return simplicial_code(triangle, 2)


@pytest.fixture
def plane_spec():
    """F_2^2 中的两点：轨道为全部 6 条直线"""
    return AffineCodeSpec(q=2, n=2, p=2, tau0=((0, 0), (1, 0)))


@pytest.fixture
def line_spec():
    """F_3^2 中一条直线的三个点"""
    return AffineCodeSpec(q=3, n=2, p=3, tau0=((0, 0), (1, 0), (2, 0)))


@pytest.fixture
def flat_spec():
    """F_2^3 中的一个 2-flat"""
    return AffineCodeSpec(q=2, n=3, p=2, tau0=((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)))


@pytest.fixture
def files(tmp_path: Path):
    """把样例文本写到临时目录，返回 名字 -> 路径"""
    written = {}
    for name, text in (
        ("triangle.tls", TRIANGLE_TLS),
        ("triangle.code", TRIANGLE_CODE),
        ("two_triangles.tls", TWO_TRIANGLES_TLS),
        ("broken.tls", BROKEN_TLS),
        ("noisy.word", "word a=1 b=0 c=0\n"),
        ("clean.word", "word a=1\nword b=1 c=1\n"),
        ("plane.affine", "#affine v1 q=2 n=2 p=2\ntau 0,0 1,0\n"),
    ):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        written[name] = path
    return written


@pytest.fixture(scope="session")
def small_random_systems():
    """种子固定的 s = 2 小系统：k = 2 的单纯复形与 2×2 阵列系统，n_vertices = 3 时必为单个三角形"""
    systems = []
    for seed in range(24):
        rng = np.random.default_rng(seed)
        systems.append(random_clique_system(rng, 3 + seed % 4, 2, 1 + seed % 4, max_weight=1 + seed % 3))
        systems.append(random_grid_system(rng, 4 + seed % 4, 2, 1 + seed % 3, max_weight=1 + seed % 2))
    return systems


@pytest.fixture(scope="session")
def certified_systems(small_random_systems):
    """在 δ = 3/4、α = 0 的主定理阈值下通过认证的 (系统, 阈值)"""
    certified = []
    for x in small_random_systems:
        try:
            thresholds = system_thresholds(x, CERTIFY_DELTA)
        except DomainError:
            continue
        if certify_at_thresholds(x, thresholds, workers=1).passed:
            certified.append((x, thresholds))
    return certified
