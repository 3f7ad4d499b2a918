import numpy as np
import pytest

from jacobi_mop import precision as prec
from jacobi_mop import painleve as pv
from jacobi_mop.pipeline import Pipeline
from jacobi_mop.weights import folded_left_h, scalar_jacobi

from conftest import pipeline

A, B, C = 0.5, 1 / 3, 1.0


@pytest.fixture(scope="module")
def je():
    return pipeline("jacobi_exp"), pv.exact_scalar_h(A, B, C, prec.DD)


def test_exact_h_values():
    h = pv.exact_scalar_h(A, B, C)
    assert np.allclose(h.ravel(), [A, C - A - B, -C])


@pytest.mark.parametrize("variant", ["corrected", "pre-display"])
def test_dpiv_holds_on_exponential_jacobi(je, variant):
    pl, h = je
    for n in range(7):
        r1, r2 = pv.dpiv_residuals(pl.sys, h, n, variant)
        assert r1 < 1e-18 and r2 < 1e-18


def test_verbatim_signs_fail(je):
    pl, h = je
    r1, r2 = pv.dpiv_residuals(pl.sys, h, 2, "verbatim")
    assert r1 > 1.0
    assert r2 < 1e-20


def test_interpolated_h_is_accurate_to_double(je):
    pl, _ = je
    h = folded_left_h(pl.w)
    assert max(max(pv.dpiv_residuals(pl.sys, h, n)) for n in range(7)) < 1e-13


def test_scalar_matrix_weight_has_vanishing_commutators():
    pl = pipeline("scalar_matrix")
    h = folded_left_h(pl.w)
    for n in range(7):
        assert max(pv.dpiv_residuals(pl.sys, h, n)) < 1e-13
        assert max(pv.commutator_terms(pl.sys, h, n).values()) < 1e-30


def test_noncommuting_weight_has_live_commutators():
    pl = pipeline("noncommuting")
    terms = pv.commutator_terms(pl.sys, folded_left_h(pl.w), 3)
    assert terms["[S_n,h2]S_n+1"] > 1e-3 and terms["[S_n,S_n+1]"] > 1e-6


def test_depth_is_checked(je):
    pl, h = je
    with pytest.raises(pv.InsufficientDepth):
        pv.dpiv_residuals(pl.sys, h, pl.n_max - 1)
    with pytest.raises(ValueError):
        pv.dpiv_residuals(pl.sys, h, 1, "other")


def test_report_names(je):
    pl, h = je
    rep = pv.dpiv_report(pl.sys, h, [0, 1, 2])
    assert [e.name for e in rep.entries] == ["dpiv-1/corrected", "dpiv-2/corrected"]
    assert rep.passed


def test_ordered_p2_is_required(je):
    pl, h = je
    st = pv.state_from_system(pl.sys, h)
    with prec.dd_context():
        assert prec.norm(st.p2(4) - pl.sys.p("L", 4, 2)) < 1e-25
        assert prec.norm(st.p2(4, ordered=False) - pl.sys.p("L", 4, 2)) > 0.1
        assert prec.norm(st.p1(4) - pl.sys.p("L", 4, 1)) < 1e-25


def test_state_rejects_cubic_h(je):
    pl, _ = je
    with pytest.raises(ValueError):
        pv.state_from_system(pl.sys, np.zeros((4, 1, 1)))


def test_commutative_reduction(je):
    pl, h = je
    red = pv.commutative_reduction(pl.sys, h, 6)
    for key in ("mu", "xi", "nu-corrected", "nu-sum"):
        assert max(red.residuals[key]) < 1e-18, key
    assert min(red.residuals["nu-printed"]) > 1e-2
    assert len(red.xi) == 8 and len(red.residuals["xi"]) == 7


def test_reduction_requires_commuting_h():
    pl = pipeline("noncommuting")
    with pytest.raises(pv.NotCommutative):
        pv.commutative_reduction(pl.sys, folded_left_h(pl.w), 3)


def test_reduction_without_exponential_has_singular_h2():
    pl = pipeline("jacobi")
    h = pv.exact_scalar_h(0.5, 1.0, 0.0, prec.DD)
    with pytest.raises(pv.SingularMu):
        pv.commutative_reduction(pl.sys, h, 4)
    red = pv.commutative_reduction(pl.sys, h, 4, with_nu=False)
    assert red.nu is None
    assert max(red.residuals["xi"]) < 1e-18


def test_reduction_report_names(je):
    pl, h = je
    rep = pv.reduction_report(pv.commutative_reduction(pl.sys, h, 3))
    assert {e.name for e in rep.entries} == {"dpiv-reduction-mu", "dpiv-reduction-xi", "dpiv-reduction-nu/printed",
                                             "dpiv-reduction-nu/corrected", "dpiv-reduction-nu/sum"}


def test_forward_iteration_reproduces_then_diverges():
    dd, dbl = pipeline("jacobi_exp"), pipeline("jacobi_exp", prec.DOUBLE)
    st_d = pv.dpiv_forward_iterate(pv.exact_scalar_h(A, B, C), dbl.sys.betaL[0], 8)
    st_q = pv.dpiv_forward_iterate(pv.exact_scalar_h(A, B, C, prec.DD), dd.sys.betaL[0], 8, prec.DD)
    depth_d, depth_q = pv.agreement_depth(st_d, dbl.sys), pv.agreement_depth(st_q, dd.sys)
    assert depth_d >= 2
    assert depth_q >= depth_d + 2
    k = pv.divergence_index(st_d, dbl.sys)
    assert k is not None and k > depth_d
    # the instability amplifies errors monotonically past the first steps
    mm = pv.forward_mismatch(st_d, dbl.sys)
    assert all(mm[i + 1] > mm[i] for i in range(1, 6))


def test_forward_iteration_errors():
    with pytest.raises(pv.StepSingular):
        pv.dpiv_forward_iterate(pv.exact_scalar_h(A, B, 0.0), np.array([[0.5]]), 3)
    pl = pipeline("noncommuting")
    with pytest.raises(pv.NotCommutative):
        pv.dpiv_forward_iterate(folded_left_h(pl.w), np.eye(2), 3)


def test_forward_iteration_on_legendre_with_exponential():
    w = scalar_jacobi(0.0, 0.0, 1.0)
    depths = {}
    for p, n_max in ((prec.DOUBLE, 8), (prec.DD, 10)):
        pl = Pipeline.build(w, n_max, p, method="auto")
        st = pv.dpiv_forward_iterate(pv.exact_scalar_h(0.0, 0.0, 1.0, p), pl.sys.betaL[0], n_max - 1, p)
        depths[p] = pv.agreement_depth(st, pl.sys)
    assert depths[prec.DD] >= 4
    assert depths[prec.DD] >= depths[prec.DOUBLE] + 2


def test_residuals_shrink_with_precision():
    dbl, dd = pipeline("jacobi_exp", prec.DOUBLE), pipeline("jacobi_exp")
    for n in range(1, 6):
        r_d = pv.dpiv_residuals(dbl.sys, pv.exact_scalar_h(A, B, C), n)
        r_q = pv.dpiv_residuals(dd.sys, pv.exact_scalar_h(A, B, C, prec.DD), n)
        assert r_q[0] < r_d[0] and r_q[1] < r_d[1]
