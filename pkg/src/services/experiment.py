"""
拒绝率实验模块 - 随机码字加噪后记录 rej、真实距离、纠错结果与放大可测界
"""
import csv
import io
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from src.api.schemas import ExperimentConfig, ExperimentRow
from src.core.code import LinearCodeModel, amplified_constants, bitflip_correct, codewords, nearest_codeword, rej
from src.core.expansion import system_thresholds
from src.errors import CapacityError, DomainError

CSV_COLUMNS = ["seed", "rate", "sample", "dist", "rej", "bound_rhs", "corrector_flips", "corrected_in_code"]


def corrupt(code: LinearCodeModel, c: np.ndarray, rate: Fraction, rng: np.random.Generator) -> np.ndarray:
    """每个坐标以概率 rate 独立地换成另一个随机符号"""
    p = code.p
    hit = rng.random(len(c)) < float(rate)
    shift = rng.integers(1, p, size=len(c))
    return (c + hit * shift) % p


def resolve_constants(code: LinearCodeModel, cfg: ExperimentConfig) -> Tuple[Optional[Fraction], Fraction]:
    """
    (ε₀, r)：ε₀ 缺省取主定理阈值；r 缺省取推论给出的 2μ(δ-(p-1)/p)/s，μ = ε₀·k^{t-1}

    Returns:
        ε₀ 无法得到时为 None，此时也必须显式给出 r
    """
    x = code.system
    eps0 = cfg.eps0
    if eps0 is None:
        try:
            eps0 = system_thresholds(x, cfg.delta, cfg.alpha).eps0
        except DomainError as e:
            logger.warning(f"No main-theorem threshold for this system: {e}")
            eps0 = None
    if cfg.r is not None:
        return eps0, cfg.r
    if eps0 is None:
        raise DomainError("r cannot be derived without eps0; pass --r or --eps0")
    mu = eps0 * x.k ** (cfg.t - 1)
    return eps0, amplified_constants(cfg.delta, code.p, x.s, mu, cfg.t - 1).r


def run_sample(
    code: LinearCodeModel, cfg: ExperimentConfig, r: Fraction, grid_index: int, sample: int
) -> ExperimentRow:
    """单个样本；子种子由 (seed, 网格下标, 样本下标) 决定"""
    rate = cfg.rates[grid_index]
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, grid_index, sample]))
    clean = code.random_codeword(rng)
    word = corrupt(code, clean, rate, rng)

    rejection = rej(code, word)
    try:
        _, dist = nearest_codeword(code, word)
    except CapacityError:
        dist = None
    k = code.system.k
    bound_rhs = None if dist is None else k * r * min(dist, Fraction(1, k ** cfg.t))

    try:
        result = bitflip_correct(code, word, cfg.delta)
        flips, in_code = len(result.flips), result.in_code
    except CapacityError as e:
        logger.warning(f"Bit-flip gave up on sample {sample} at rate {rate}: {e}")
        flips, in_code = None, None
    return ExperimentRow(
        seed=cfg.seed, rate=rate, sample=sample, dist=dist, rej=rejection, bound_rhs=bound_rhs,
        corrector_flips=flips, corrected_in_code=in_code, grid_index=grid_index,
    )


def run_rejection_experiment(code: LinearCodeModel, cfg: ExperimentConfig) -> List[ExperimentRow]:
    """
    对每个网格点与样本运行一次实验

    结果按 (网格下标, 样本下标) 排序，与线程数无关。
    """
    code.system.require_valid()
    _, r = resolve_constants(code, cfg)
    # 线程共享的缓存先在主线程算好
    _ = (code.parity_matrix, code.basis, code.row_weights, code.vertex_weights, code.system.link_vertex_weight)
    try:
        codewords(code)
    except CapacityError:
        logger.warning("Codeword space over cap; dist and bound_rhs columns left empty")
    jobs = [(g, s) for g in range(len(cfg.rates)) for s in range(cfg.samples)]
    workers = cfg.workers
    logger.info(f"Running experiment: {len(cfg.rates)} rates x {cfg.samples} samples, seed={cfg.seed}, workers={workers}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda job: run_sample(code, cfg, r, *job), jobs))
    else:
        rows = [run_sample(code, cfg, r, g, s) for g, s in jobs]
    rows.sort(key=lambda row: (row.grid_index, row.sample))

    in_code = sum(bool(row.corrected_in_code) for row in rows)
    logger.info(f"Experiment finished: {len(rows)} rows, corrector reached the code in {in_code}")
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render_csv(rows: List[ExperimentRow]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        data = row.model_dump()
        writer.writerow({name: _cell(data[name]) for name in CSV_COLUMNS})
    return buffer.getvalue()
