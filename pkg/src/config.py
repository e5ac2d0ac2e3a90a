"""
配置管理模块
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """HDE 工具配置（环境变量前缀 HDE_）"""

    # 穷举 / 稠密计算上限
    cheeger_vertex_cap: int = 20
    spectral_vertex_cap: int = 4000
    unn_exhaustive_cap: int = 22
    codeword_space_cap: int = 2 ** 20
    affine_point_cap: int = 4096
    gp_candidate_cap: int = 2 ** 24

    # 数值容差
    eigen_tolerance: float = 1e-9
    spectral_guard_band: float = 1e-9
    affine_guard_band: float = 1e-6

    # 抽样 / 迭代
    gp_sample_size: int = 20000
    bitflip_round_cap: int = 100000
    cheeger_chunk_size: int = 65536

    # 并发与随机种子
    workers: int = 1
    default_seed: int = 0

    # 日志
    log_level: str = "INFO"

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", env_prefix="HDE_")


# 全局配置实例
settings = Settings()
