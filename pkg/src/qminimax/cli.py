"""Command-line interface: solve, verify, best-response, classical.

Exit codes: 0 success/converged, 1 invalid input, 2 not certified
(solver hit max_iters, or a verify suite exceeded its slack).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import gamespec
from .classical import lift_to_quantum, solve_classical
from .energy import best_response_max, best_response_min
from .errors import OracleNumericalError, QMinimaxError, SpecValidationError
from .measures import spectral_masses, write_csv
from .payoff import response_operator_blue, response_operator_red
from .solver import solve

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CERTIFIED = 2


def _overrides(args) -> dict:
    return {"gap_tol": args.gap_tol, "max_iters": args.max_iters}


def cmd_solve(args) -> int:
    game = gamespec.load_game(args.spec, _overrides(args))
    result = solve(game)
    report = gamespec.result_to_json(result, game)
    out = Path(args.out)
    gamespec.write_report(report, out)
    gamespec.write_gap_history_csv(result, out.with_suffix(".gap_history.csv"))
    write_csv(
        spectral_masses(result.rho_star, game.blue_decomp),
        out.with_suffix(".marginals_blue.csv"),
    )
    write_csv(
        spectral_masses(result.phi_star, game.red_decomp),
        out.with_suffix(".marginals_red.csv"),
    )
    status = "converged" if result.converged else "not converged"
    print(
        f"{status}: value={result.value!r} gap={result.gap!r} "
        f"iterations={result.iterations} -> {out}"
    )
    return EXIT_OK if result.converged else EXIT_NOT_CERTIFIED


def cmd_verify(args) -> int:
    from .verify import run_suites

    game = gamespec.load_game(args.spec, _overrides(args))
    reports = run_suites(game, args.samples, args.seed)
    all_passed = True
    for rep in reports:
        flag = "PASS" if rep.passed else "FAIL"
        print(
            f"{rep.name}: trials={rep.trials} max_violation={rep.max_violation:.3e} "
            f"slack={rep.slack:.1e} {flag}"
        )
        all_passed = all_passed and rep.passed
    return EXIT_OK if all_passed else EXIT_NOT_CERTIFIED


def cmd_best_response(args) -> int:
    game = gamespec.load_game(args.spec, _overrides(args))
    opponent = gamespec.load_state(args.opponent)
    gap_tol = args.gap_tol if args.gap_tol is not None else 1e-9
    if args.side == "blue":
        if opponent.dim != game.red.dim:
            raise SpecValidationError(
                "<state-file>", f"opponent state dim {opponent.dim} != red dim {game.red.dim}"
            )
        q = spectral_masses(opponent, game.red_decomp)
        objective = response_operator_blue(game.kernel, game.blue_decomp, q)
        res = best_response_max(objective, game.constraint_blue, gap_tol)
    else:
        if opponent.dim != game.blue.dim:
            raise SpecValidationError(
                "<state-file>", f"opponent state dim {opponent.dim} != blue dim {game.blue.dim}"
            )
        p = spectral_masses(opponent, game.blue_decomp)
        objective = response_operator_red(game.kernel, game.red_decomp, p)
        res = best_response_min(objective, game.constraint_red, gap_tol)
    print(
        json.dumps(
            {
                "side": args.side,
                "value": res.primal_value,
                "dual_value": res.dual_value,
                "multiplier": res.multiplier,
                "gap": res.gap,
                "state": gamespec.state_to_json(res.state),
            },
            indent=2,
            sort_keys=True,
        )
    )
    return EXIT_OK


def cmd_classical(args) -> int:
    doc = gamespec.load_document(args.spec)
    if not gamespec.is_classical(doc):
        raise SpecValidationError("type", "classical command needs a spec with type=classical")
    game, e_blue, e_red = gamespec.parse_classical(doc)
    params = gamespec.parse_solver(doc.get("solver"), _overrides(args))
    classical = solve_classical(
        game, params.gap_tol, params.max_iters, params.check_interval
    )
    quantum = solve(lift_to_quantum(game, e_blue, e_red, params))
    print(
        json.dumps(
            {
                "classical": {
                    "value": classical.value,
                    "p": classical.p.tolist(),
                    "q": classical.q.tolist(),
                    "gap": classical.gap,
                    "converged": classical.converged,
                },
                "quantum": {
                    "value": quantum.value,
                    "gap": quantum.gap,
                    "converged": quantum.converged,
                },
                "difference": abs(classical.value - quantum.value),
            },
            indent=2,
            sort_keys=True,
        )
    )
    certified = classical.converged and quantum.converged
    return EXIT_OK if certified else EXIT_NOT_CERTIFIED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qminimax",
        description="Solve and certify energy-capped quantum zero-sum games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("spec", help="game spec JSON path")
        p.add_argument("--gap-tol", type=float, default=None, dest="gap_tol")
        p.add_argument("--max-iters", type=int, default=None, dest="max_iters")

    p = sub.add_parser("solve", help="compute the certified game value")
    common(p)
    p.add_argument("--out", default="report.json", help="report JSON path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run the randomized invariant suites")
    common(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("best-response", help="certified one-sided best response")
    common(p)
    p.add_argument("--side", choices=("blue", "red"), required=True)
    p.add_argument("--opponent", required=True, help="opponent state JSON path")
    p.set_defaults(func=cmd_best_response)

    p = sub.add_parser("classical", help="classical value and lifted quantum value")
    common(p)
    p.set_defaults(func=cmd_classical)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleNumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CERTIFIED
    except (SpecValidationError, QMinimaxError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
