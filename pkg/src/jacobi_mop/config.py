"""Run configuration: JSON documents validated against a fixed schema.

Complex scalars are written either as plain numbers or as ``[re, im]``
pairs; matrices are nested lists of rows and matrix polynomials are lists
of matrices in ascending powers.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import precision as prec
from .weights import PearsonWeight

SUITES = ("biorth", "jumps", "ode1", "ode2", "split", "zerocurv", "dpiv")

_scalar = {"oneOf": [{"type": "number"},
                     {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}
_matrix = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _scalar}}
_poly = {"type": "array", "minItems": 1, "items": _matrix}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["weight", "n_max"],
    "properties": {
        "name": {"type": "string"},
        "weight": {
            "type": "object",
            "additionalProperties": False,
            "required": ["N", "alpha", "beta"],
            "properties": {
                "N": {"type": "integer", "minimum": 1},
                "alpha": _matrix, "beta": _matrix,
                "W0L": _matrix, "W0R": _matrix,
                "HL": _poly, "HR": _poly,
                "cL": _scalar, "cR": _scalar,
            },
        },
        "n_max": {"type": "integer", "minimum": 1, "maximum": 40},
        "precision": {"enum": list(prec.PRECISIONS)},
        "method": {"enum": ["quadrature", "semi-analytic", "auto"]},
        "points": {"type": "array", "items": _scalar},
        "jump_points": {"type": "array", "items": {"type": "number"}},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        "command": {"enum": ["moments", "recurrence", "verify", "report"]},
        "which": {"type": "array", "items": {"enum": list(SUITES) + ["all"]}},
    },
}

DEFAULT_POINTS = (-1.0, -0.5 + 0.5j, 0.5 + 0.5j, 2.0 + 1.0j, 0.3 - 0.4j)
DEFAULT_JUMP_POINTS = (0.3, 0.5, 0.7, 2.0)


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (CLI exit code 2)."""


def _c(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _mat(rows, n: int, what: str) -> np.ndarray:
    if any(len(row) != n for row in rows) or len(rows) != n:
        raise ConfigError(f"{what} must be an {n}x{n} matrix")
    return np.array([[_c(x) for x in row] for row in rows], dtype=complex)


@dataclass(frozen=True)
class RunConfig:
    weight: PearsonWeight
    n_max: int
    precision: str = prec.DOUBLE
    method: str = "quadrature"
    points: tuple = DEFAULT_POINTS
    jump_points: tuple = DEFAULT_JUMP_POINTS
    tolerances: dict = field(default_factory=dict)
    name: str = ""
    command: str | None = None
    which: tuple = ("all",)
    digest: str = ""

    def tol(self, identity: str, default: float) -> float:
        """Override lookup: exact entry name, then its catalog base name, then ``*``."""
        base = identity.split("/")[0]
        for key in (identity, base, "*"):
            if key in self.tolerances:
                return float(self.tolerances[key])
        return default

    def with_overrides(self, precision: str | None = None, n_max: int | None = None) -> "RunConfig":
        from dataclasses import replace
        kw = {}
        if precision is not None:
            kw["precision"] = prec.check(precision)
        if n_max is not None:
            if n_max < 1:
                raise ConfigError("n_max must be positive")
            kw["n_max"] = n_max
        return replace(self, **kw)


def config_hash(doc: dict) -> str:
    """sha256 of the canonical JSON encoding of ``doc``."""
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def build_weight(spec: dict, name: str = "") -> PearsonWeight:
    n = spec["N"]
    eye = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    try:
        return PearsonWeight(
            alpha=_mat(spec["alpha"], n, "alpha"),
            beta=_mat(spec["beta"], n, "beta"),
            W0L=_mat(spec.get("W0L", eye), n, "W0L"),
            W0R=_mat(spec.get("W0R", eye), n, "W0R"),
            HL=np.array([_mat(m, n, "HL coefficient") for m in spec.get("HL", [eye])]),
            HR=np.array([_mat(m, n, "HR coefficient") for m in spec.get("HR", [eye])]),
            cL=_c(spec.get("cL", 0.0)),
            cR=_c(spec.get("cR", 0.0)),
            name=name,
        )
    except ConfigError:
        raise
    except ValueError as exc:  # WeightError and shape problems
        raise ConfigError(f"invalid weight: {exc}") from exc


def parse_config(doc: dict) -> RunConfig:
    """Validate ``doc`` against :data:`SCHEMA` and build the weight."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema violation at {where}: {exc.message}") from exc
    name = doc.get("name", "")
    w = build_weight(doc["weight"], name)
    return RunConfig(
        weight=w,
        n_max=doc["n_max"],
        precision=doc.get("precision", prec.DOUBLE),
        method=doc.get("method", "quadrature"),
        points=tuple(_c(z) for z in doc.get("points", DEFAULT_POINTS)),
        jump_points=tuple(float(t) for t in doc.get("jump_points", DEFAULT_JUMP_POINTS)),
        tolerances=dict(doc.get("tolerances", {})),
        name=name,
        command=doc.get("command"),
        which=tuple(doc.get("which", ["all"])),
        digest=config_hash(doc),
    )


def load_config(path: str | Path) -> RunConfig:
    """Read a config file; a bare name such as ``legendre`` resolves to a shipped config."""
    p = Path(path)
    if not p.exists():
        shipped = resources.files("jacobi_mop") / "configs" / f"{Path(path).stem}.json"
        if not shipped.is_file():
            raise ConfigError(f"config {path} not found")
        text = shipped.read_text()
    else:
        text = p.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(doc)


def shipped_configs() -> list:
    return sorted(p.name[:-5] for p in (resources.files("jacobi_mop") / "configs").iterdir()
                  if p.name.endswith(".json"))
