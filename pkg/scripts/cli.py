#!/usr/bin/env python3
"""Batch verifier entry point.

Usage:
    python scripts/cli.py analyze-nl --scenario scenarios/s1.ini
    python scripts/cli.py fm --scenario scenarios/s1.ini --machine
    python scripts/cli.py sd-check --scenario scenarios/s2.ini
    python scripts/cli.py kodaira --type I5
    python scripts/cli.py kodaira --all --output-dir out

Exit codes: 0 all checks pass, 1 a verified check failed, 2 input error,
3 unexpected internal failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any

from config import load_config
from errors import EngineError, InputError, handle_exception, safe_run
from fourier_mukai import (
    POINT_CLASS,
    STRUCTURE_SHEAF,
    det_transform,
    fm_consistency,
    transform_matrices,
)
from kodaira import bundled_fiber_names, forced_multiple_check, parse_fiber_name, zariski_check
from lattice_core import polarization
from log_utils import log, log_warning
from mukai import admissibility_check, cup_orthogonal, wit_genericity
from nl_divisor import lemma1_analyze, uniqueness_identities, uniqueness_scan
from output_writer import write_report_output
from report import Report, allow_unbounded_int_text
from scenario import Scenario, describe, load_scenario
from validate_report import validate_report
from verlinde import (
    build_L,
    pushforward_rank,
    sd_counts,
    theta_correction,
    theta_normalization,
    twist_T,
    verlinde_pair,
)

COMMANDS = ("analyze-nl", "fm", "sd-check", "kodaira")


def _require_scenario(scenario: Scenario | None, command: str) -> Scenario:
    if scenario is None:
        raise InputError(f"{command} needs --scenario PATH")
    return scenario


def run_analyze_nl(scenario: Scenario, cfg: dict[str, Any], report: Report) -> None:
    if scenario.ell == 1:
        raise InputError("analyze-nl requires the hypothesis ell != 1 (got ell = 1)")
    model = scenario.build_model()
    h = polarization(model)
    f = model.fiber()
    report.info("model.rank", model.rank)
    report.info("model.fibers", [block.config.name for block in model.fibers])
    report.info("model.H", str(h))

    result = lemma1_analyze(model, h, f, reflect_cap=cfg["reflect_cap"])
    report.extend_checks("lemma1", result.checks)
    report.info("lemma1.fiber", str(result.fiber))
    report.info("lemma1.section", str(result.section))

    bound = scenario.options.get("bound", cfg["enum_bound"])
    degree = scenario.options.get("degree", 1)
    scan = uniqueness_scan(model, h, bound=bound, degree=degree, cap=cfg["search_cap"])
    found = scan.classes
    report.info("uniqueness.bound", bound)
    report.info("uniqueness.degree", degree)
    report.info("uniqueness.complete", scan.complete)
    report.info("uniqueness.classes", [str(c) for c in found])
    if degree == 1:
        report.check(
            "uniqueness.only_fiber",
            found == [result.fiber],
            [str(c) for c in found],
            warning="" if scan.complete else f"search stopped at the node cap after {scan.nodes} nodes",
        )
        for idx, cand in enumerate(found):
            ids = uniqueness_identities(model, cand)
            report.check(
                f"uniqueness.{idx}.identities",
                ids["R_square_identity"] and ids["R_dot_sigma_identity"],
                ids,
            )


def run_fm(scenario: Scenario | None, cfg: dict[str, Any], report: Report) -> None:
    forward, inverse, record = transform_matrices()
    report.info("M", [list(row) for row in forward.rows])
    report.info("M_T", [list(row) for row in inverse.rows])
    report.info("M.derivation.solution", record["solution"])
    report.check("M.det_unimodular", abs(forward.det()) == 1, forward.det())
    report.check("M.isometry", forward.is_isometry(), True)
    product = forward.compose(inverse)
    minus_identity = tuple(tuple(-1 if i == j else 0 for j in range(4)) for i in range(4))
    report.check("M.M_T_is_minus_identity", product.rows == minus_identity, [list(row) for row in product.rows])
    for label, cls in (("O_X", STRUCTURE_SHEAF), ("point", POINT_CLASS)):
        det, _ = det_transform(cls)
        report.info(f"det_S.{label}", list(det))

    if scenario is None:
        return
    model = scenario.build_model()
    v, w = scenario.mukai_vectors(model)
    admissible = admissibility_check(v, w, scenario.ell)
    report.extend_checks("admissibility", admissible["checks"])
    if not admissible["passed"]:
        report.info("fm.skipped", "admissibility failed")
        return
    result = fm_consistency(v, w, scenario.ell)
    report.info("fm.S_E_dual", str(result["S_E_dual"]))
    report.info("fm.S_F", str(result["S_F"]))
    report.info("fm.lengths", list(result["lengths"]))
    report.info("fm.L", str(result["L"]))
    report.info("fm.L_square", result["L_square"])
    report.extend_checks("fm", result["checks"])


def run_sd_check(scenario: Scenario, cfg: dict[str, Any], report: Report) -> None:
    model = scenario.build_model()
    v, w = scenario.mukai_vectors(model)
    ell = scenario.ell
    admissible = admissibility_check(v, w, ell)
    report.extend_checks("admissibility", admissible["checks"])

    if cup_orthogonal(v, w) != 0:
        report.info("sd.skipped", "v and w are not orthogonal")
        return

    sd = sd_counts(v, w, ell)
    fiberwise, universal = build_L(v, w, ell)
    report.info("L", str(fiberwise))
    report.info("L.universal", universal)
    report.info("chi_L", sd.chi_L)
    report.info("d_v", sd.d_v)
    report.info("d_w", sd.d_w)
    report.check("d_v_plus_d_w_equals_chi_L", sd.d_v + sd.d_w == sd.chi_L, sd.d_v + sd.d_w)
    report.info("h0_v", sd.h0_v)
    report.info("h0_w", sd.h0_w)
    report.check("h0_equal", sd.h0_v == sd.h0_w, sd.h0_v == sd.h0_w)

    d, e = scenario.d, scenario.e
    norm = theta_normalization(v, w, ell, d, e)
    report.info("theta.alpha", norm.alpha)
    report.info("theta.beta", norm.beta)
    report.info("theta.restriction_exponent", norm.restriction_exponent)
    report.info("theta.normalization_exponent", norm.normalization_exponent)
    report.info("theta.correction", theta_correction(v, w, ell, d, e))
    report.info("twist_T", twist_T(v.r, w.r, d, e).to_dict())
    report.info("pushforward_rank", pushforward_rank(v, w, ell))
    pair = verlinde_pair(v, w, ell)
    report.info("verlinde.W.twist", pair["W"]["twist"].to_dict())
    report.info("verlinde.V.twist", pair["V"]["twist"].to_dict())

    if scenario.genericity is not None:
        generic = wit_genericity(scenario.genericity, v.r)
        report.extend_checks("genericity", generic["checks"])


def run_kodaira(args: argparse.Namespace, scenario: Scenario | None, cfg: dict[str, Any], report: Report) -> None:
    if args.all:
        configs = [parse_fiber_name(name) for name in bundled_fiber_names()]
    elif args.type:
        configs = [parse_fiber_name(args.type, args.attach)]
    elif scenario is not None and scenario.fibers:
        configs = list(scenario.fibers)
    else:
        raise InputError("kodaira needs --type NAME, --all or a scenario with fibers")

    box = scenario.options.get("box", cfg["brute_box"]) if scenario is not None else cfg["brute_box"]
    for config in configs:
        name = config.name
        zariski = zariski_check(config)
        report.extend_checks(f"{name}.zariski", zariski["checks"])
        report.info(f"{name}.multiplicities", zariski["kernel"])
        if not zariski["passed"]:
            continue
        forced = forced_multiple_check(config, box=box, cap=cfg["search_cap"], workers=cfg["workers"])
        report.info(f"{name}.cokernel", forced.cokernel)
        report.check(
            f"{name}.nonneg_only_fiber_multiples",
            forced.nonneg_case["only_fiber_multiples"],
            {"box": box, "complete": forced.nonneg_case["complete"]},
        )
        for idx, cert in enumerate(forced.certificates):
            report.check(
                f"{name}.pattern.{idx}",
                not cert["snf"]["solvable"],
                {
                    "pattern": cert["pattern"],
                    "invariant_factors": cert["snf"]["augmented_invariant_factors"],
                    "box_solutions": len(cert["box_solutions"]),
                    "box_complete": cert["box_complete"],
                },
            )
        report.check(f"{name}.forced_multiple", forced.forced, forced.forced)


def run_and_report(
    command: str,
    scenario: Scenario | None,
    cfg: dict[str, Any],
    args: argparse.Namespace,
) -> Report:
    report = Report(command)
    if scenario is not None:
        report.info("scenario", describe(scenario))
    if command == "analyze-nl":
        run_analyze_nl(_require_scenario(scenario, command), cfg, report)
    elif command == "fm":
        run_fm(scenario, cfg, report)
    elif command == "sd-check":
        run_sd_check(_require_scenario(scenario, command), cfg, report)
    else:
        run_kodaira(args, scenario, cfg, report)
    return report


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Exact lattice verifier for elliptic K3 strange duality.")
    parser.add_argument("command", choices=COMMANDS, help="Verification to run")
    parser.add_argument("--scenario", default="", help="Path to scenario file")
    parser.add_argument("--bound", type=int, default=None, help="Coefficient bound for uniqueness_search")
    parser.add_argument("--machine", action="store_true", help="Emit name<TAB>verdict<TAB>value records")
    parser.add_argument("--type", default="", help="Kodaira fiber name, e.g. I5, Istar2, IIstar")
    parser.add_argument("--attach", type=int, default=0, help="Index of the component meeting the section")
    parser.add_argument("--all", action="store_true", help="Run every bundled Kodaira fiber type")
    parser.add_argument("--output-dir", default=None, help="Directory for the JSON report")
    return parser.parse_args(argv)


@safe_run
def main(argv: list[str] | None = None) -> int:
    allow_unbounded_int_text()
    args = parse_args(argv)
    try:
        cfg = load_config({"enum_bound": args.bound, "output_dir": args.output_dir})
    except ValueError as exc:
        return handle_exception(InputError(f"Configuration error: {exc}"), context=args.command)

    log(f"Command: {args.command}")
    log("Config keys in use: enum_bound, brute_box, search_cap, reflect_cap, workers, output_dir")
    try:
        scenario = None
        if args.scenario:
            log(f"Scenario: {args.scenario}")
            scenario = load_scenario(args.scenario)
            if args.bound is not None:
                scenario.options["bound"] = args.bound
        report = run_and_report(args.command, scenario, cfg, args)
    except EngineError as exc:
        return handle_exception(exc, context=args.command, output_dir=cfg["output_dir"])

    if cfg["output_dir"]:
        payload = report.to_dict()
        validate_report(payload)
        write_report_output(args.command, payload, cfg["output_dir"])

    sys.stdout.write(report.render_machine() if args.machine else report.render_human())
    for warning in report.warnings():
        log_warning(warning)
    log(f"Outcome: {'pass' if report.passed else 'fail'} ({len(report.entries)} entries)")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
