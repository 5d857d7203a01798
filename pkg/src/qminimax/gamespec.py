"""Game-spec JSON documents, report serialization, and CSV exports.

Complex matrices travel as nested [re, im] pairs. Floats are written with
Python's shortest round-trip representation, so a report read back yields
bit-identical matrices.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone

import numpy as np

from .classical import ClassicalGame
from .energy import EnergyConstraint
from .errors import QMinimaxError, SpecValidationError
from .measures import spectral_masses
from .operators import DensityOperator, HermitianOperator
from .payoff import builtin_kernel, table_kernel
from .solver import GameInstance, SaddleResult, SolverParams, build_game

SOLVER_DEFAULTS = {"gap_tol": 1e-3, "max_iters": 200000, "check_interval": 25, "seed": 0}


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def load_document(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecValidationError("<file>", f"cannot read spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecValidationError(
            "<file>", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise SpecValidationError("<root>", "spec must be a JSON object")
    return doc


def _require(doc: dict, field: str, path: str):
    if field not in doc:
        raise SpecValidationError(f"{path}{field}", "missing required field")
    return doc[field]


def _as_number(value, field: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SpecValidationError(field, f"expected a number, got {value!r}")
    return float(value)


def parse_complex_matrix(node, field: str) -> np.ndarray:
    """Nested [re, im] pairs into a complex square matrix."""
    if not isinstance(node, list) or not node:
        raise SpecValidationError(field, "expected a nonempty list of rows")
    n = len(node)
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(node):
        if not isinstance(row, list) or len(row) != n:
            raise SpecValidationError(f"{field}[{i}]", f"expected a row of {n} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in entry)
            ):
                raise SpecValidationError(
                    f"{field}[{i}][{j}]", "expected an [re, im] pair of numbers"
                )
            out[i, j] = complex(entry[0], entry[1])
    return out


def matrix_to_pairs(matrix: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def parse_operator(node, field: str) -> HermitianOperator:
    if not isinstance(node, dict):
        raise SpecValidationError(field, "expected an object")
    kind = _require(node, "type", f"{field}.")
    if kind == "dense_hermitian":
        entries = parse_complex_matrix(_require(node, "matrix", f"{field}."), f"{field}.matrix")
        try:
            return HermitianOperator(entries)
        except ValueError as exc:
            raise SpecValidationError(f"{field}.matrix", str(exc)) from exc
    if kind == "diagonal":
        eigs = _require(node, "eigenvalues", f"{field}.")
        if not isinstance(eigs, list) or not eigs:
            raise SpecValidationError(f"{field}.eigenvalues", "expected a nonempty list")
        vals = [_as_number(x, f"{field}.eigenvalues") for x in eigs]
        return HermitianOperator(np.diag(vals))
    raise SpecValidationError(
        f"{field}.type", f"unknown operator type {kind!r}; use dense_hermitian or diagonal"
    )


def parse_kernel(node, field: str = "payoff"):
    if not isinstance(node, dict):
        raise SpecValidationError(field, "expected an object")
    kind = _require(node, "type", f"{field}.")
    if kind == "table":
        values = _require(node, "values", f"{field}.")
        try:
            return table_kernel(values)
        except (ValueError, QMinimaxError) as exc:
            raise SpecValidationError(f"{field}.values", str(exc)) from exc
    if kind == "builtin":
        name = _require(node, "name", f"{field}.")
        shift = _as_number(node.get("shift", 0.0), f"{field}.shift")
        try:
            return builtin_kernel(name, shift)
        except QMinimaxError as exc:
            raise SpecValidationError(f"{field}.name", str(exc)) from exc
    raise SpecValidationError(f"{field}.type", f"unknown kernel type {kind!r}")


def parse_energy(node, field: str) -> EnergyConstraint:
    if not isinstance(node, dict):
        raise SpecValidationError(field, "expected an object")
    cap = _as_number(_require(node, "cap", f"{field}."), f"{field}.cap")
    if "eigenvalues" in node:
        eigs = node["eigenvalues"]
        if not isinstance(eigs, list) or not eigs:
            raise SpecValidationError(f"{field}.eigenvalues", "expected a nonempty list")
        op = HermitianOperator(np.diag([_as_number(x, f"{field}.eigenvalues") for x in eigs]))
    elif "matrix" in node:
        try:
            op = HermitianOperator(parse_complex_matrix(node["matrix"], f"{field}.matrix"))
        except ValueError as exc:
            raise SpecValidationError(f"{field}.matrix", str(exc)) from exc
    else:
        raise SpecValidationError(field, "energy needs 'eigenvalues' or 'matrix'")
    try:
        return EnergyConstraint(op, cap)
    except QMinimaxError as exc:
        raise SpecValidationError(field, str(exc)) from exc


def parse_solver(node, overrides: dict | None = None) -> SolverParams:
    merged = dict(SOLVER_DEFAULTS)
    if node is not None:
        if not isinstance(node, dict):
            raise SpecValidationError("solver", "expected an object")
        unknown = set(node) - set(SOLVER_DEFAULTS)
        if unknown:
            raise SpecValidationError("solver", f"unknown keys {sorted(unknown)}")
        merged.update(node)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SolverParams(
            gap_tol=_as_number(merged["gap_tol"], "solver.gap_tol"),
            max_iters=int(merged["max_iters"]),
            check_interval=int(merged["check_interval"]),
            seed=int(merged["seed"]),
        )
    except (TypeError, ValueError) as exc:
        raise SpecValidationError("solver", str(exc)) from exc


def is_classical(doc: dict) -> bool:
    return doc.get("type") == "classical"


def parse_classical(doc: dict) -> tuple[ClassicalGame, EnergyConstraint | None, EnergyConstraint | None]:
    blue_moves = _require(doc, "blue_moves", "")
    red_moves = _require(doc, "red_moves", "")
    payoff = _require(doc, "payoff", "")
    try:
        game = ClassicalGame(blue_moves, red_moves, payoff)
    except (ValueError, QMinimaxError) as exc:
        raise SpecValidationError("payoff", str(exc)) from exc
    e_blue = parse_energy(doc["energy_blue"], "energy_blue") if "energy_blue" in doc else None
    e_red = parse_energy(doc["energy_red"], "energy_red") if "energy_red" in doc else None
    return game, e_blue, e_red


def build_from_document(doc: dict, overrides: dict | None = None) -> GameInstance:
    """Quantum game instance from a parsed spec document."""
    if is_classical(doc):
        from .classical import lift_to_quantum

        game, e_blue, e_red = parse_classical(doc)
        params = parse_solver(doc.get("solver"), overrides)
        return lift_to_quantum(game, e_blue, e_red, params)
    blue = parse_operator(_require(doc, "blue_operator", ""), "blue_operator")
    red = parse_operator(_require(doc, "red_operator", ""), "red_operator")
    kernel = parse_kernel(_require(doc, "payoff", ""))
    e_blue = parse_energy(doc["energy_blue"], "energy_blue") if "energy_blue" in doc else None
    e_red = parse_energy(doc["energy_red"], "energy_red") if "energy_red" in doc else None
    params = parse_solver(doc.get("solver"), overrides)
    try:
        return build_game(
            blue, red, kernel,
            constraint_blue=e_blue, constraint_red=e_red, params=params,
        )
    except QMinimaxError as exc:
        raise SpecValidationError("<game>", str(exc)) from exc


def load_game(path, overrides: dict | None = None) -> GameInstance:
    return build_from_document(load_document(path), overrides)


def parse_state(doc, field: str = "state") -> DensityOperator:
    if not isinstance(doc, dict):
        raise SpecValidationError(field, "expected an object with a 'matrix' key")
    entries = parse_complex_matrix(_require(doc, "matrix", f"{field}."), f"{field}.matrix")
    try:
        return DensityOperator(entries)
    except ValueError as exc:
        raise SpecValidationError(f"{field}.matrix", str(exc)) from exc


def load_state(path) -> DensityOperator:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecValidationError("<state-file>", f"cannot read state: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecValidationError(
            "<state-file>", f"invalid JSON at line {exc.lineno}: {exc.msg}"
        ) from exc
    return parse_state(doc)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def state_to_json(state: DensityOperator) -> dict:
    return {"matrix": matrix_to_pairs(state.matrix)}


def result_to_json(result: SaddleResult, game: GameInstance) -> dict:
    p = spectral_masses(result.rho_star, game.blue_decomp)
    q = spectral_masses(result.phi_star, game.red_decomp)
    return {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "converged": result.converged,
        "iterations": result.iterations,
        "value": result.value,
        "value_lower": result.value_lower,
        "value_upper": result.value_upper,
        "gap": result.gap,
        "gap_tol": game.params.gap_tol,
        "rho_star": state_to_json(result.rho_star),
        "phi_star": state_to_json(result.phi_star),
        "marginals": {
            "blue": {"support": p.support.tolist(), "masses": p.masses.tolist()},
            "red": {"support": q.support.tolist(), "masses": q.masses.tolist()},
        },
        "gap_history": [[c.iteration, c.lower, c.upper, c.gap] for c in result.gap_history],
    }


def write_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_report(path) -> dict:
    with open(path) as fh:
        report = json.load(fh)
    for key in ("rho_star", "phi_star"):
        report[key] = {"matrix": parse_complex_matrix(report[key]["matrix"], key)}
    return report


def write_gap_history_csv(result: SaddleResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "lower", "upper", "gap"])
        for c in result.gap_history:
            writer.writerow([c.iteration, repr(c.lower), repr(c.upper), repr(c.gap)])
