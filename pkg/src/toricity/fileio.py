"""Model file ingestion and emission.

Two input formats: matrix JSON ({"C": [["1","-1",...],...], "M": [[...]],
"mode": "positive"}, with rational entries as "p/q" strings, or {"N": ...}
from which a coefficient row basis is derived) and reaction network text in
the grammar of the parser.  Matrix JSON written by the tool re-parses to
bit-identical matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .core import GroupMode, VerticalSystem
from .crn import ReactionNetwork, parse_network
from .exactalg import IntegerMatrix, RationalMatrix


class ModelFormatError(ValueError):
    pass


class ModelDimensionError(ValueError):
    """Structurally valid input whose matrix shapes are inconsistent."""


@dataclass
class ModelInput:
    kind: str                        # "matrix" | "network"
    system: VerticalSystem | None
    network: ReactionNetwork | None
    stoichiometric: IntegerMatrix | None   # N when available
    mode: GroupMode


def parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise ModelFormatError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelFormatError(f"not a rational: {value!r}") from exc
    raise ModelFormatError(f"not a rational: {value!r}")


def rational_to_string(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _mode_from_string(text: str | None) -> GroupMode:
    if text is None:
        return GroupMode.POSITIVE
    for mode in GroupMode:
        if mode.value == text:
            return mode
    raise ModelFormatError(f"unknown mode {text!r}")


def load_matrix_model(data: dict) -> ModelInput:
    if "M" not in data:
        raise ModelFormatError("matrix model needs an exponent matrix 'M'")
    try:
        M = IntegerMatrix(data["M"])
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"bad exponent matrix: {exc}") from exc
    mode = _mode_from_string(data.get("mode"))
    N = None
    if "C" in data:
        C = RationalMatrix([[parse_rational(x) for x in row] for row in data["C"]])
    elif "N" in data:
        N = IntegerMatrix(data["N"])
        C = N.to_rational().row_basis()
        if C.rows == 0:
            raise ModelFormatError("stoichiometric matrix is zero")
    else:
        raise ModelFormatError("matrix model needs 'C' or 'N'")
    if C.cols != M.cols:
        raise ModelDimensionError(
            f"column mismatch: C has {C.cols} columns, M has {M.cols}")
    try:
        system = VerticalSystem(C, M)
    except ValueError as exc:
        raise ModelDimensionError(str(exc)) from exc
    return ModelInput("matrix", system, None, N, mode)


def read_model(path: str | Path) -> ModelInput:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    stripped = text.lstrip()
    if path.suffix == ".json" or stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ModelFormatError("matrix model must be a JSON object")
        return load_matrix_model(data)
    net = parse_network(text)
    return ModelInput("network", None, net, None, GroupMode.POSITIVE)


def matrix_model_dict(system: VerticalSystem, mode: GroupMode = GroupMode.POSITIVE) -> dict:
    return {
        "C": [[rational_to_string(system.C.entry(i, j)) for j in range(system.m)]
              for i in range(system.s)],
        "M": system.M.to_lists(),
        "mode": mode.value,
    }


def write_matrix_json(system: VerticalSystem, path: str | Path,
                      mode: GroupMode = GroupMode.POSITIVE) -> None:
    Path(path).write_text(
        json.dumps(matrix_model_dict(system, mode), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
