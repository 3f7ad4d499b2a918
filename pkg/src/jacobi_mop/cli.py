"""Command-line driver.

Verbs::

    jacobi-mop moments    --config CFG [--precision P] [--nmax N] [--out PATH]
    jacobi-mop recurrence --config CFG [...]
    jacobi-mop verify     --config CFG [--which biorth,jumps,...|all] [...]
    jacobi-mop report     --config CFG [--which ...] [...]

``CFG`` is a JSON file or the name of a shipped config (``legendre``,
``jacobi_exp``, ...).  Exit codes: 0 success, 1 some residual above its
tolerance, 2 invalid configuration, 3 numerical failure.  The environment
variable ``JACOBI_MOP_LOG`` sets the log level.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from pathlib import Path

import mpmath
import numpy as np

from . import __version__
from . import precision as prec
from .config import SUITES, ConfigError, RunConfig, load_config
from .linalg import LinalgError
from .pipeline import Pipeline
from .quadrature import QuadratureNotConverged
from .report import ResidualReport

EXIT_OK, EXIT_RESIDUAL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("jacobi_mop")


class NumericalFailure(RuntimeError):
    pass


# -- encoding -----------------------------------------------------------------------

def encode_float(x) -> dict:
    """Exact hex (of the nearest double) plus a decimal mirror.

    For double-double input the decimal mirror carries 32 significant digits.
    """
    if isinstance(x, (mpmath.mpf, mpmath.mpc)) and not isinstance(x, float):
        with prec.dd_context():
            return {"hex": float(x).hex(), "dec": mpmath.nstr(x, 32)}
    x = float(x)
    return {"hex": x.hex(), "dec": repr(x)}


def encode_complex(z) -> dict:
    if isinstance(z, mpmath.mpc):
        return {"re": encode_float(z.real), "im": encode_float(z.imag)}
    z = complex(z)
    return {"re": encode_float(z.real), "im": encode_float(z.imag)}


def encode_matrix(m) -> list:
    return [[encode_complex(x) for x in row] for row in np.asarray(m)]


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _header(cfg: RunConfig, command: str) -> dict:
    return {"artifact_version": __version__, "command": command, "config": cfg.name,
            "config_hash": cfg.digest, "precision": cfg.precision, "n_max": cfg.n_max}


def _encode_detail(v):
    """A detail value is one residual or a short list of them (raw jump defects)."""
    if isinstance(v, (list, tuple)):
        return [encode_float(x) for x in v]
    return encode_float(v)


def report_document(rep: ResidualReport, cfg: RunConfig, which, elapsed: float | None) -> dict:
    doc = _header(cfg, "verify")
    doc["which"] = list(which)
    doc["passed"] = rep.passed
    doc["entries"] = [{
        "name": e.name,
        "anchor": e.anchor,
        "max_residual": encode_float(e.residual),
        "tolerance": encode_float(e.tol),
        "passed": e.passed,
        "detail": [{"point": str(lab), "residual": _encode_detail(v)} for lab, v in e.detail],
    } for e in rep.entries]
    # kept on its own line so reports can be compared with it stripped
    doc["timing_seconds"] = None if elapsed is None else round(elapsed, 3)
    return doc


def strip_timing(text: str) -> str:
    """Report text without the timing line (for determinism comparisons)."""
    return "".join(line for line in text.splitlines(True) if '"timing_seconds"' not in line)


# -- commands --------------------------------------------------------------------------

def _pipeline(cfg: RunConfig) -> Pipeline:
    return Pipeline.build(cfg.weight, cfg.n_max, cfg.precision, method=cfg.method)


def cmd_moments(cfg: RunConfig, out: str | None = None) -> int:
    from .moments import compute_moments
    table = compute_moments(cfg.weight, cfg.n_max, precision=cfg.precision, method=cfg.method)
    doc = _header(cfg, "moments")
    doc["method"] = table.method
    doc["estimated_error"] = [encode_float(e) for e in np.ravel(table.est_error)]
    doc["moments"] = [{"index": k, "value": encode_matrix(table[k])} for k in range(len(table))]
    _write(_dump(doc), out)
    return EXIT_OK


def recurrence_csv(sysm) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "quantity", "row", "col", "re", "im"])
    for n in range(sysm.n_max + 1):
        for name, seq in (("betaL", sysm.betaL), ("gammaL", sysm.gammaL), ("betaR", sysm.betaR),
                          ("gammaR", sysm.gammaR), ("C", sysm.C)):
            m = prec.to_double(seq[n])
            for i in range(m.shape[0]):
                for j in range(m.shape[1]):
                    wr.writerow([n, name, i, j, repr(float(m[i, j].real)), repr(float(m[i, j].imag))])
    return buf.getvalue()


def cmd_recurrence(cfg: RunConfig, out: str | None = None) -> int:
    pl = _pipeline(cfg)
    s = pl.sys
    doc = _header(cfg, "recurrence")
    doc["coefficients"] = [{
        "n": n,
        "betaL": encode_matrix(s.betaL[n]), "gammaL": encode_matrix(s.gammaL[n]),
        "betaR": encode_matrix(s.betaR[n]), "gammaR": encode_matrix(s.gammaR[n]),
        "C": encode_matrix(s.C[n]),
    } for n in range(s.n_max + 1)]
    _write(_dump(doc), out)
    table = recurrence_csv(s)
    if out:
        Path(out).with_suffix(".csv").write_text(table)
    return EXIT_OK


def run_verify(cfg: RunConfig, which) -> tuple:
    from .suites import run_suites
    t0 = time.perf_counter()
    pl = _pipeline(cfg)
    rep = run_suites(pl, cfg, which)
    return rep, time.perf_counter() - t0


def cmd_verify(cfg: RunConfig, which, out: str | None = None) -> int:
    rep, elapsed = run_verify(cfg, which)
    _write(_dump(report_document(rep, cfg, which, elapsed)), out)
    return EXIT_OK if rep.passed else EXIT_RESIDUAL


def cmd_report(cfg: RunConfig, which, out: str | None = None) -> int:
    """Human-readable table of the same suites ``verify`` runs."""
    rep, _ = run_verify(cfg, which)
    head = (f"config {cfg.name or '-'}  hash {cfg.digest[:16]}  precision {cfg.precision}  "
            f"n_max {cfg.n_max}\n")
    lines = [head, rep.summary(), "", f"overall: {'PASS' if rep.passed else 'FAIL'}", ""]
    _write("\n".join(lines), out)
    return EXIT_OK if rep.passed else EXIT_RESIDUAL


# -- entry point ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jacobi-mop", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb in ("moments", "recurrence", "verify", "report"):
        p = sub.add_parser(verb)
        p.add_argument("--config", required=True, help="JSON config path or shipped config name")
        p.add_argument("--precision", choices=prec.PRECISIONS)
        p.add_argument("--nmax", type=int)
        p.add_argument("--out", help="output file (default: stdout)")
        if verb in ("verify", "report"):
            p.add_argument("--which", help=f"comma separated subset of {','.join(SUITES)} or 'all'")
    return ap


def _which(arg: str | None, cfg: RunConfig) -> tuple:
    if arg is None:
        return cfg.which
    from .suites import expand_which
    items = tuple(x.strip() for x in arg.split(",") if x.strip())
    try:
        expand_which(items)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return items


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("JACOBI_MOP_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).with_overrides(args.precision, args.nmax)
        if args.verb == "moments":
            return cmd_moments(cfg, args.out)
        if args.verb == "recurrence":
            return cmd_recurrence(cfg, args.out)
        which = _which(args.which, cfg)
        if args.verb == "verify":
            return cmd_verify(cfg, which, args.out)
        return cmd_report(cfg, which, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, LinalgError, QuadratureNotConverged, NumericalFailure, ValueError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
