"""
HDE 命令行入口

用法：python -m src.main <子命令> ...（或 python scripts/hde.py ...）
"""
import argparse
import sys
from fractions import Fraction
from typing import List, Optional

from loguru import logger
from pydantic import ValidationError

from src.api.commands import EXIT_FAIL, EXIT_USAGE, dispatch
from src.config import settings
from src.core.graph import as_fraction
from src.errors import CapacityError, DomainError, InvariantError, ParseError


def rational(text: str) -> Fraction:
    """argparse 用的有理数类型：整数、小数或 a/b"""
    try:
        return as_fraction(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def rational_list(text: str) -> List[Fraction]:
    return [rational(part) for part in text.split(",") if part.strip()]


def _add_pipeline_options(parser: argparse.ArgumentParser, delta_required: bool = False) -> None:
    parser.add_argument("--delta", type=rational, required=delta_required, help="δ，主定理阈值的参数")
    parser.add_argument("--alpha", type=rational, default=None, help="α（默认 0）")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hde", description="二层系统的 HDE 认证、码模型与仿射不变码工具")
    parser.add_argument("--log-level", default=None, help="loguru 日志级别（默认取 HDE_LOG_LEVEL）")
    parser.add_argument("--workers", type=int, default=None, help="并行线程数（默认取 HDE_WORKERS）")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="校验 #tls 系统文件")
    p.add_argument("system")

    p = sub.add_parser("graphs", help="导出派生图（#wgraph）")
    p.add_argument("system")
    p.add_argument("--emit", choices=["ground", "links", "nonint", "opposite"], required=True)
    p.add_argument("--out", default=None, help="输出目录；缺省写到 stdout")

    p = sub.add_parser("certify", help="HDE 认证")
    p.add_argument("system")
    p.add_argument("--lambda", dest="lam", type=rational, default=None, help="统一的 λ")
    _add_pipeline_options(p)

    p = sub.add_parser("thresholds", help="主定理阈值：给系统文件时参数取自系统，否则用 --s/--k/--K/--R")
    p.add_argument("system", nargs="?", default=None)
    _add_pipeline_options(p, delta_required=True)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--K", dest="K", type=int, default=None)
    p.add_argument("--R", dest="R", type=rational, default=None, help="R_nint（默认 1）")

    p = sub.add_parser("unn-search", help="unique neighbor expansion 反例搜索")
    p.add_argument("system")
    _add_pipeline_options(p, delta_required=True)
    p.add_argument("--eps0", type=rational, default=None, help="覆盖主定理给出的 ε₀")
    p.add_argument("--mode", choices=["auto", "exhaustive", "randomized"], default="auto")
    p.add_argument("--budget", type=int, default=1000, help="随机模式的样本数")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("rej", help="拒绝率 rej(c)")
    p.add_argument("code")
    p.add_argument("--word", required=True)

    p = sub.add_parser("correct", help="bit-flip 纠错")
    p.add_argument("code")
    p.add_argument("--word", required=True)
    p.add_argument("--delta", type=rational, required=True)
    p.add_argument("--out", default=None, help="纠错后码字的输出文件")

    p = sub.add_parser("distance", help="距离界检查")
    p.add_argument("code")

    p = sub.add_parser("amp-check", help="放大可测界 rej(c) ≥ k·r·min{dist, 1/k^t}")
    p.add_argument("code")
    p.add_argument("--word", required=True)
    p.add_argument("--r", type=rational, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--delta", type=rational, default=None, help="未给 --r/--t 时由 s=2 组合定理推出")

    p = sub.add_parser("sphere-correct", help="实验性的球面纠错（只报告）")
    p.add_argument("code")
    p.add_argument("--word", required=True)
    p.add_argument("--delta", type=rational, required=True)
    p.add_argument("--alpha", type=rational, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("affine-build", help="构造单轨道仿射不变码")
    p.add_argument("spec")
    p.add_argument("--out-system", required=True)
    p.add_argument("--out-code", required=True)

    p = sub.add_parser("affine-check", help="仿射码的可测性常数、扩张与不变性检查")
    p.add_argument("spec")
    p.add_argument("--delta", type=rational, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--skip-covers", action="store_true", help="跳过有序覆盖图检查")

    p = sub.add_parser("experiment", help="拒绝率-距离实验，输出 CSV")
    p.add_argument("code")
    p.add_argument("--system", default=None, help="覆盖码文件头里的 system=")
    p.add_argument("--delta", type=rational, required=True)
    p.add_argument("--alpha", type=rational, default=None)
    p.add_argument("--eps0", type=rational, default=None)
    p.add_argument("--r", type=rational, default=None)
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--rates", type=rational_list, required=True, help="逗号分隔的噪声率，如 0,1/10,1/5")
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV 输出文件；缺省写到 stdout")

    return parser


def configure_logging(level: Optional[str]) -> None:
    logger.remove()
    logger.add(sys.stderr, level=(level or settings.log_level).upper())


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be >= 1")

    try:
        return dispatch(args)
    except (ParseError, DomainError, CapacityError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.stdout.write(f"error={e}\n")
        return EXIT_USAGE
    except ValidationError as e:
        message = e.errors()[0]["msg"]
        logger.error(f"Invalid arguments: {message}")
        sys.stdout.write(f"error={message}\n")
        return EXIT_USAGE
    except InvariantError as e:
        logger.error(f"Invariant violated: {e}")
        sys.stdout.write(f"error={e}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
