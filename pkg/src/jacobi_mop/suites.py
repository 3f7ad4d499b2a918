"""Identity suites selectable from the command line.

Each suite takes a built :class:`~jacobi_mop.pipeline.Pipeline` and a
:class:`~jacobi_mop.config.RunConfig` and returns a ResidualReport.  The
default tolerances depend on the working precision; config overrides win.
"""
from __future__ import annotations

import numpy as np

from . import precision as prec
from . import rh
from .biorth import check_sum_formulas, check_three_term, verify_biorthogonality
from .config import SUITES, RunConfig
from .odecheck import first_order_residual, second_order_residual, split_relation_residual
from .painleve import (NotCommutative, SingularMu, commutative_reduction, dpiv_report,
                       reduction_report)
from .pipeline import Pipeline
from .report import ResidualReport
from .secondkind import verify_second_kind
from .weights import WeightError, folded_left_h

_DEFAULT_TOL = {
    prec.DOUBLE: {
        "biorthogonality": 1e-9, "three-term-left": 1e-8, "three-term-right": 1e-8, "p1-sum": 1e-8,
        "p2-recursion": 1e-8, "p2-sum-ordered": 1e-8, "beta-similarity": 1e-8,
        "z-jump-01": 1e-5, "z-jump-1inf": 1e-5, "plemelj": 1e-6, "y-inverse": 1e-12, "transfer": 1e-8,
        "transfer-det": 1e-8, "q-recurrence": 1e-8, "q-asymptotics": 5.0, "p1-q1-identity": 1e-9,
        "first-order-ode": 1e-7, "second-order-ode": 1e-6, "split-relations": 1e-7,
        "zero-curvature": 1e-9, "m-closed-form": 1e-6, "m-left-right": 1e-8,
        "dpiv-1": 1e-6, "dpiv-2": 1e-6, "dpiv-reduction-xi": 1e-6, "dpiv-reduction-mu": 1e-6,
        "dpiv-reduction-nu": 1e-6,
    },
}
_DEFAULT_TOL[prec.DD] = dict(_DEFAULT_TOL[prec.DOUBLE], **{
    "biorthogonality": 1e-20, "three-term-left": 1e-20, "three-term-right": 1e-20, "p1-sum": 1e-20,
    "p2-recursion": 1e-20, "p2-sum-ordered": 1e-20, "beta-similarity": 1e-20, "zero-curvature": 1e-15,
    "p1-q1-identity": 1e-20,
    "dpiv-1": 1e-10, "dpiv-2": 1e-10, "dpiv-reduction-xi": 1e-10, "dpiv-reduction-mu": 1e-10,
    "dpiv-reduction-nu": 1e-10,
})


def _retol(rep: ResidualReport, cfg: RunConfig, precision: str) -> ResidualReport:
    """Apply precision defaults and config overrides to every entry."""
    defaults = _DEFAULT_TOL[precision]
    for e in rep.entries:
        base = e.name.split("/")[0]
        e.tol = cfg.tol(e.name, defaults.get(base, e.tol))
    return rep


def _degrees(pl: Pipeline, top: int, margin: int) -> list:
    return list(range(1, min(top, pl.n_max - margin) + 1))


def suite_biorth(pl: Pipeline, cfg: RunConfig) -> ResidualReport:
    rep = verify_biorthogonality(pl.sys, pl.table)
    rep.extend(check_three_term(pl.sys, pl.table))
    sums = check_sum_formulas(pl.sys)
    # the full double-sum form of p^2 is a recorded discrepancy, not part of the suite
    rep.extend(ResidualReport([e for e in sums.entries if e.name != "p2-sum-as-printed"]))
    return rep


def suite_jumps(pl: Pipeline, cfg: RunConfig) -> ResidualReport:
    rep = ResidualReport()
    for n in _degrees(pl, 3, 1):
        for e in rh.verify_Z_jump(pl, cfg.jump_points, n).entries:
            e.detail = [(f"n={n} {lab}", v) for lab, v in e.detail]
            rep.entries.append(e)
    ns = _degrees(pl, 3, 1)
    rep.add("plemelj", [rh.verify_plemelj(pl, 0.3, n) for n in ns], 1e-6, [f"n={n} t=0.3" for n in ns])
    vals, labels = [], []
    for n in ns:
        for z in cfg.points:
            vals.append(rh.y_inverse_residual(pl, z, n))
            labels.append(f"n={n} z={z}")
    rep.add("y-inverse", vals, 1e-12, labels)
    rep.extend(rh.verify_transfer(pl, cfg.points, ns))
    rep.extend(verify_second_kind(pl.sys, pl.table, pl.ev, cfg.points, ns))
    return rep


def suite_ode1(pl: Pipeline, cfg: RunConfig) -> ResidualReport:
    rep = ResidualReport()
    for n in _degrees(pl, 4, 1):
        rep.extend(first_order_residual(pl, n, cfg.points))
    return _merge(rep)


def suite_ode2(pl: Pipeline, cfg: RunConfig) -> ResidualReport:
    rep = ResidualReport()
    for n in _degrees(pl, 4, 1):
        rep.extend(second_order_residual(pl, n, cfg.points))
    return _merge(rep)


def suite_split(pl: Pipeline, cfg: RunConfig) -> ResidualReport:
    grid = np.linspace(0.05, 0.95, 7)
    rep = ResidualReport()
    for n in _degrees(pl, 4, 1):
        rep.extend(split_relation_residual(pl, n, grid, cfg.points))
    return _merge(rep)


def suite_zerocurv(pl: Pipeline, cfg: RunConfig) -> ResidualReport:
    ns = _degrees(pl, 5, 2)
    rep = ResidualReport()
    rep.add("zero-curvature", [rh.zero_curvature_coefficients(pl, n) for n in ns], 1e-9,
            [f"n={n}" for n in ns])
    rep.extend(rh.closed_vs_numeric(pl, cfg.points, ns))
    vals = [rh.m_left_right_residual(pl, z, n) for n in ns for z in cfg.points]
    rep.add("m-left-right", vals, 1e-8, [f"n={n} z={z}" for n in ns for z in cfg.points])
    return _merge(rep)


def suite_dpiv(pl: Pipeline, cfg: RunConfig) -> ResidualReport:
    """Both non-Abelian equations; the commutative reduction too when ``h`` commutes.

    Weights whose ``h^R`` is not scalar (so ``W^R`` cannot be taken as ``I``)
    or whose ``h`` is not quadratic produce an empty report.
    """
    rep = ResidualReport()
    try:
        h = folded_left_h(pl.w)
    except WeightError:
        return rep
    if h.shape[0] > 3:
        return rep
    ns = list(range(0, pl.n_max - 1))
    rep.extend(dpiv_report(pl.sys, h, ns))
    try:
        red = commutative_reduction(pl.sys, h, pl.n_max - 1)
    except NotCommutative:
        return rep
    except SingularMu:
        red = commutative_reduction(pl.sys, h, pl.n_max - 1, with_nu=False)
    sub = reduction_report(red)
    # the printed nu relation is a recorded discrepancy
    rep.extend(ResidualReport([e for e in sub.entries if e.name != "dpiv-reduction-nu/printed"]))
    return rep


def _merge(rep: ResidualReport) -> ResidualReport:
    """Fold entries sharing a name into one (max residual, concatenated detail)."""
    out = ResidualReport()
    for e in rep.entries:
        try:
            tgt = out[e.name]
        except KeyError:
            out.entries.append(e)
            continue
        tgt.detail = tgt.detail + e.detail
        tgt.residual = max(tgt.residual, e.residual)
    return out


RUNNERS = {
    "biorth": suite_biorth, "jumps": suite_jumps, "ode1": suite_ode1, "ode2": suite_ode2,
    "split": suite_split, "zerocurv": suite_zerocurv, "dpiv": suite_dpiv,
}
assert tuple(RUNNERS) == SUITES


def expand_which(which) -> list:
    names = []
    for w in which:
        for s in (SUITES if w == "all" else (w,)):
            if s not in SUITES:
                raise ValueError(f"unknown suite {s!r}")
            if s not in names:
                names.append(s)
    return names


def run_suites(pl: Pipeline, cfg: RunConfig, which) -> ResidualReport:
    rep = ResidualReport()
    for s in expand_which(which):
        sub = _merge(RUNNERS[s](pl, cfg))
        for e in sub.entries:
            e.detail = [(f"[{s}] {lab}", v) for lab, v in e.detail]
        rep.extend(sub)
    return _retol(rep, cfg, pl.precision)
