"""
CLI 命令模块 - 每个子命令一个处理函数，stdout 输出 key=value 报告，返回退出码
"""
import asyncio
import sys
from argparse import Namespace
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List

from loguru import logger

from src.api.schemas import ExperimentConfig
from src.config import settings
from src.core.affine import (
    affine_expansion_check,
    affine_invariance_check,
    affine_testability_thresholds,
    build_affine_instance,
)
from src.core.code import (
    bitflip_correct,
    check_amplified_bound,
    distance_bound_check,
    rej,
    sphere_correct_experimental,
    testability_constants,
    violated_supports,
)
from src.core.expansion import main_theorem_thresholds
from src.core.system import ground_graph, is_locally_spherical, link_graph, nonintersecting_graph, opposite_graph
from src.errors import DomainError
from src.services.experiment import render_csv, run_rejection_experiment
from src.services.file_parser import file_parser
from src.workflow.graph import certification_app
from src.workflow.state import CertificationState, ErrorKind, SearchMode

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return ",".join(_format(v) for v in value)
    return str(value)


def emit(**pairs: Any) -> None:
    """按顺序输出 key=value 行"""
    for key, value in pairs.items():
        sys.stdout.write(f"{key}={_format(value)}\n")


def _exit_for(verdicts: List[bool]) -> int:
    return EXIT_PASS if all(verdicts) else EXIT_FAIL


# ---------------------------------------------------------------------------
# 认证流水线（validate / certify / thresholds / unn-search）
# ---------------------------------------------------------------------------

async def report_certificate(state: CertificationState) -> CertificationState:
    """运行认证工作流，返回最终状态"""
    return await certification_app.ainvoke(state)


def _pipeline_state(args: Namespace, **flags: Any) -> CertificationState:
    state: CertificationState = {
        "system_path": str(args.system),
        "lam": getattr(args, "lam", None),
        "delta": getattr(args, "delta", None),
        "alpha": getattr(args, "alpha", None) or Fraction(0),
        "eps0": getattr(args, "eps0", None),
        "workers": args.workers,
        "run_validate": False,
        "run_certify": False,
        "run_thresholds": False,
        "run_search": False,
        "search_mode": SearchMode(getattr(args, "mode", "auto")),
        "search_budget": getattr(args, "budget", 1000),
        "seed": getattr(args, "seed", None),
        "verdicts": {},
    }
    state.update(flags)
    return state


def _report_pipeline(final: CertificationState) -> int:
    status = final.get("status")
    if status == "failed":
        kind = final.get("error_kind")
        emit(status="failed", error=final.get("error_message"))
        return EXIT_FAIL if kind == ErrorKind.INVARIANT else EXIT_USAGE

    validation = final.get("validation")
    if validation is not None:
        emit(valid=validation.valid, s=validation.s, k=validation.k, K=validation.K)
        for i, message in enumerate(validation.violations, start=1):
            emit(**{f"violation_{i}": message})
    if status == "invalid":
        return EXIT_FAIL

    certificate = final.get("certificate")
    if certificate is not None:
        emit(certified=certificate.passed, ground=certificate.ground.passed,
             ground_certificate=certificate.ground.certificate,
             nonintersecting=certificate.nonintersecting.passed,
             nonintersecting_edgeless=certificate.nonintersecting_edgeless,
             links_passed=sum(v.passed for v in certificate.links.values()),
             links_total=len(certificate.links), r_nint=certificate.r_nint)
        for name in certificate.failing_components():
            emit(failing=name)

    thresholds = final.get("thresholds")
    if thresholds is not None and (final.get("run_thresholds") or final.get("run_search")):
        emit(lambda_gr=thresholds.lambda_gr, lambda_loc=thresholds.lambda_loc,
             lambda_nint=thresholds.lambda_nint, eps0=thresholds.eps0, R=thresholds.R)

    if final.get("search_ran"):
        found = final.get("counterexample")
        emit(counterexample_found=found is not None, counterexample=found)

    return _exit_for(list(final.get("verdicts", {}).values()))


def _run_pipeline(args: Namespace, **flags: Any) -> int:
    final = asyncio.run(report_certificate(_pipeline_state(args, **flags)))
    return _report_pipeline(final)


def cmd_validate(args: Namespace) -> int:
    code = _run_pipeline(args, run_validate=True)
    if code == EXIT_PASS:
        x = file_parser.read_system(args.system)
        emit(locally_spherical=is_locally_spherical(x).holds)
    return code


def cmd_certify(args: Namespace) -> int:
    if args.lam is None and args.delta is None:
        raise DomainError("certify needs --lambda or --delta")
    return _run_pipeline(args, run_certify=True)


def cmd_thresholds(args: Namespace) -> int:
    if args.system is not None:
        return _run_pipeline(args, run_thresholds=True)
    if None in (args.s, args.k, args.K):
        raise DomainError("thresholds needs a system file or all of --s, --k and --K")
    R = Fraction(1) if args.R is None else args.R
    t = main_theorem_thresholds(args.s, args.k, args.K, R, args.delta, args.alpha or 0)
    emit(lambda_gr=t.lambda_gr, lambda_loc=t.lambda_loc, lambda_nint=t.lambda_nint, eps0=t.eps0, R=t.R)
    return EXIT_PASS


def cmd_unn_search(args: Namespace) -> int:
    return _run_pipeline(args, run_search=True)


# ---------------------------------------------------------------------------
# 派生图
# ---------------------------------------------------------------------------

def cmd_graphs(args: Namespace) -> int:
    x = file_parser.read_system(args.system)
    x.require_valid()
    vertex_tokens, _ = file_parser.system_tokens(x)
    graphs = []
    if args.emit == "ground":
        graphs.append(("ground", ground_graph(x)))
    elif args.emit == "links":
        graphs += [(f"link_{vertex_tokens[v]}", link_graph(x, v)) for v in x.vertices]
    elif args.emit == "nonint":
        graphs.append(("nonint", nonintersecting_graph(x).graph))
    else:
        graphs.append(("opposite", opposite_graph(x).graph))

    for name, g in graphs:
        if args.out is None:
            file_parser.write_graph(g)
        else:
            path = Path(args.out) / f"{name}.wgraph"
            file_parser.write_graph(g, path)
            emit(wrote=path)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# 码
# ---------------------------------------------------------------------------

def _load_code_and_word(args: Namespace):
    code = file_parser.read_code(args.code)
    word = file_parser.read_word(args.word, code)
    return code, word


def cmd_rej(args: Namespace) -> int:
    code, word = _load_code_and_word(args)
    emit(rej=rej(code, word), violated=len(violated_supports(code, word)), in_code=code.contains(word))
    return EXIT_PASS


def cmd_correct(args: Namespace) -> int:
    code, word = _load_code_and_word(args)
    result = bitflip_correct(code, word, args.delta)
    emit(in_code=result.in_code, flips=len(result.flips), distance_moved=result.distance_moved,
         distance_bound=result.distance_bound)
    if args.out is not None:
        file_parser.write_text(file_parser.render_word(code, result.word), args.out)
    return _exit_for([result.in_code])


def cmd_distance(args: Namespace) -> int:
    code = file_parser.read_code(args.code)
    check = distance_bound_check(code)
    emit(holds=check.holds, bound=check.bound, true_distance=check.true_distance, lambda_gr=check.lambda_gr)
    return _exit_for([check.holds])


def cmd_amp_check(args: Namespace) -> int:
    code, word = _load_code_and_word(args)
    r, t = args.r, args.t
    if r is None or t is None:
        if args.delta is None:
            raise DomainError("amp-check needs --r and --t, or --delta to derive them")
        constants = testability_constants(code, args.delta)
        if not constants.applicable:
            raise DomainError(f"cannot derive r and t: {constants.reason}")
        r = constants.r if r is None else r
        t = constants.t if t is None else t
    check = check_amplified_bound(code, word, r, t)
    emit(holds=check.holds, lhs=check.lhs, rhs=check.rhs, r=r, t=t)
    return _exit_for([check.holds])


def cmd_sphere_correct(args: Namespace) -> int:
    code, word = _load_code_and_word(args)
    report = sphere_correct_experimental(code, word, args.delta, args.alpha or 0)
    emit(in_code=report.in_code, iterations=report.iterations, terminated_by=report.terminated_by,
         locally_small=report.locally_small)
    if args.out is not None:
        file_parser.write_text(file_parser.render_word(code, report.word), args.out)
    return _exit_for([report.in_code])


# ---------------------------------------------------------------------------
# 仿射码
# ---------------------------------------------------------------------------

def cmd_affine_build(args: Namespace) -> int:
    spec = file_parser.read_affine_spec(args.spec)
    instance = build_affine_instance(spec)
    x = instance.system
    file_parser.write_system(x, args.out_system)
    file_parser.write_code(instance.code, args.out_code, args.out_system)
    emit(vertices=len(x.vertices), edges=len(x.edge_names), tops=len(x.tops), gp_count=instance.gp_count,
         k_prime=instance.k_prime, admissible_sets=len(instance.admissible),
         independence_checked=instance.independence_checked,
         out_system=args.out_system, out_code=args.out_code)
    return EXIT_PASS


def cmd_affine_check(args: Namespace) -> int:
    spec = file_parser.read_affine_spec(args.spec)
    thresholds = affine_testability_thresholds(spec, args.delta)
    emit(size=spec.size, size_requirement=thresholds.size_requirement, size_ok=spec.size >= thresholds.size_requirement,
         eps0=thresholds.eps0, r=thresholds.r, t=thresholds.t,
         corollary_size_requirement=thresholds.corollary_size_requirement, corollary_r=thresholds.corollary_r)

    instance = build_affine_instance(spec)
    invariance = affine_invariance_check(instance, seed=args.seed)
    report = affine_expansion_check(instance, covers=not args.skip_covers)
    emit(invariant=invariance.holds, expansion_applicable=report.applicable, expansion_passed=report.passed,
         target=report.target, ground_complete_constant=report.ground_complete_constant)
    if report.reason:
        emit(reason=report.reason)
    for name, verdict in report.covers.items():
        if not verdict.passed:
            emit(failing=f"cover:{name}")
    if report.nonintersecting is not None and not report.nonintersecting.passed:
        emit(failing="nonintersecting")
    for v, verdict in report.links.items():
        if not verdict.passed:
            emit(failing=f"link:{v}")
    return _exit_for([invariance.holds, report.applicable, report.passed])


# ---------------------------------------------------------------------------
# 实验
# ---------------------------------------------------------------------------

def cmd_experiment(args: Namespace) -> int:
    cfg = ExperimentConfig(
        code_path=args.code, system_path=args.system, delta=args.delta, alpha=args.alpha or Fraction(0),
        eps0=args.eps0, r=args.r, t=args.t, rates=args.rates, samples=args.samples,
        seed=settings.default_seed if args.seed is None else args.seed, out=args.out,
        workers=args.workers or settings.workers,
    )
    code = file_parser.read_code(cfg.code_path, cfg.system_path)
    rows = run_rejection_experiment(code, cfg)
    file_parser.write_text(render_csv(rows), cfg.out)
    if cfg.out is not None:
        emit(rows=len(rows), out=cfg.out, seed=cfg.seed)
    return EXIT_PASS


COMMANDS: Dict[str, Any] = {
    "validate": cmd_validate,
    "graphs": cmd_graphs,
    "certify": cmd_certify,
    "thresholds": cmd_thresholds,
    "unn-search": cmd_unn_search,
    "rej": cmd_rej,
    "correct": cmd_correct,
    "distance": cmd_distance,
    "amp-check": cmd_amp_check,
    "sphere-correct": cmd_sphere_correct,
    "affine-build": cmd_affine_build,
    "affine-check": cmd_affine_check,
    "experiment": cmd_experiment,
}


def dispatch(args: Namespace) -> int:
    logger.debug(f"Command: {args.command}")
    return COMMANDS[args.command](args)
