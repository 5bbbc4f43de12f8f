import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import delta1_naive, eta_theta_slice
from paramodular.errors import CapTooLarge, ConstancyFailure, FTableTooSmall, PrecisionLoss
from paramodular.exact import ScaledSymplecticMatrix
from paramodular.groups import SiegelPoint, make_kappa, make_vbar
from paramodular.jacobi import expand_f_table
from paramodular.siegel import (MAX_CAP, SiegelSeries, build_delta1, character_scan, collect_characters,
                                cusp_leading_exponents, evaluate, precision_margin, sample_points_for,
                                series_mul, series_power, slash_ratio, snap_root_of_unity, standard_points)
from paramodular.verify import element_stream

pytestmark = pytest.mark.filterwarnings("ignore::RuntimeWarning")


def test_leading_terms(delta24):
    assert cusp_leading_exponents(delta24) == (1, 1, 1)
    assert delta24[(1, 1, 1)] == 1 and delta24[(1, -1, 1)] == -1
    cube = series_power(delta24, 3)
    assert cusp_leading_exponents(cube) == (3, 3, 3) and cube[(3, 3, 3)] == 1
    with pytest.raises(ValueError):
        cusp_leading_exponents(SiegelSeries({}, 10))


def test_first_slice_is_r_half_minus_r_minus_half(delta24):
    # the q^1/6 s^1/2 part is r^1/2 - r^-1/2 and nothing else
    assert {k: v for k, v in delta24.coeffs.items() if k[0] == 1 and k[2] == 1} == {(1, 1, 1): 1, (1, -1, 1): -1}


def test_term_counts(delta24, delta96):
    assert len(delta24) == 48 and len(delta96) == 796


def test_truncation_stable(delta24, delta96):
    for cap in (24, 30, 60):
        assert build_delta1(cap + 6).truncate(cap) == build_delta1(cap)
    assert delta96.truncate(24) == delta24


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_factor_order_irrelevant(seed):
    assert build_delta1(48, shuffle_seed=seed) == build_delta1(48)


def test_naive_oracle():
    f = expand_f_table(16)
    assert delta1_naive(30, f.entries) == build_delta1(30).coeffs


def test_eta_theta_slice(delta96):
    depth = (96 - 2) // 6
    slice_ = {(N, b): v for (a, b, c), v in delta96.coeffs.items() if c == 1 for N in [(a - 1) // 6]}
    assert slice_ == eta_theta_slice(depth)


def test_fricke_symmetry_and_oddness(delta96):
    for (a, b, c), v in delta96.coeffs.items():
        assert delta96[(c, b, a)] == v
        assert delta96[(a, -b, c)] == -v


def test_koecher(delta96):
    assert all(4 * a * c >= 3 * b * b for a, b, c in delta96.coeffs)
    assert all(a % 6 == 1 and c % 6 == 1 and b % 2 for a, b, c in delta96.coeffs)


def test_power_chain(delta24):
    sq = delta24 * delta24
    assert series_power(delta24, 2) == sq
    assert series_power(delta24, 3) == series_mul(sq, delta24)
    with pytest.raises(ValueError):
        series_power(delta24, 0)
    assert sq.cap == 24 + 2


def test_product_precision_rule():
    # the product is exact through min(cap_x + v_y, cap_y + v_x)
    d30, d60 = build_delta1(30), build_delta1(60)
    prod = d30 * d60
    assert prod.cap == 32
    assert prod == (d60 * d60).truncate(32)


def test_serialization(tmp_path, delta24):
    path = tmp_path / "d.siegel"
    delta24.save(path)
    assert SiegelSeries.load(path) == delta24
    assert path.read_text().splitlines()[0] == "siegel cap=24 p=3"
    assert SiegelSeries.loads("siegel cap=8\n1 1 1 1\n").p == 3
    with pytest.raises(ValueError):
        SiegelSeries.loads("ftable qmax=2\n")


def test_limits():
    with pytest.raises(CapTooLarge):
        build_delta1(MAX_CAP + 1)
    with pytest.raises(FTableTooSmall):
        build_delta1(60, f=expand_f_table(2))
    assert len(build_delta1(1)) == 0


# -- evaluation --------------------------------------------------------------

TAU = SiegelPoint(2j, 0.3 + 0.5j, 18j)


def test_evaluate_empty():
    assert evaluate(SiegelSeries({}, 10), TAU) == (0j, 0.0)


def test_evaluate_leading_term_dominates(delta96):
    big = SiegelPoint(10j, 0.2 + 1j, 90j)
    val = evaluate(delta96, big, tol=1e-12).value
    q, s = cmath.exp(2j * math.pi * 10j / 6), cmath.exp(2j * math.pi * 10j / 2)
    r = cmath.exp(2j * math.pi * (0.2 + 1j) / 3)
    lead = q * s * (r ** 0.5 - r ** -0.5)
    assert abs(val / lead - 1) < 1e-6


def test_vanishes_on_the_diagonal(delta24):
    assert abs(evaluate(delta24, SiegelPoint(2j, 0, 18j)).value) < 1e-300


def test_tail_bounds_truncation_error(delta24, delta96):
    for tau in standard_points(5, seed=4):
        lo = evaluate(delta24, tau)
        hi = evaluate(delta96, tau)
        assert abs(hi.value - lo.value) <= lo.tail


def test_evaluate_matches_mpmath(delta24):
    for tau in standard_points(3, seed=5):
        a = evaluate(delta24, tau).value
        b = evaluate(delta24, tau, dps=40).value
        assert abs(a - b) <= 1e-12 * abs(b)


def test_precision_loss_and_bad_input(delta24):
    low = SiegelPoint(0.3j, 0.01j, 2.7j)
    with pytest.raises(PrecisionLoss):
        evaluate(delta24, low, tol=1e-8)
    with pytest.raises(ValueError):
        evaluate(delta24, TAU, convention="x")
    with pytest.raises(ValueError):
        evaluate(delta24, TAU, chart="x")


def test_margin_tracks_realized_digits(delta96):
    # the margin only steers the point search; acceptance always goes through the tail
    for tau in standard_points(5, seed=6):
        ev = evaluate(delta96, tau)
        digits = -math.log10(ev.tail / abs(ev.value))
        margin = precision_margin(delta96, tau)
        assert abs(digits - margin) <= 0.1 * margin + 2


# -- slash ratios ------------------------------------------------------------

def test_snap():
    assert snap_root_of_unity(cmath.exp(2j * math.pi * 5 / 6), 6) == (5, pytest.approx(0, abs=1e-12))
    assert snap_root_of_unity(-1.0 + 0j, 6)[0] == 3


def test_identity_ratio(delta24):
    assert slash_ratio(delta24, ScaledSymplecticMatrix.identity(3), 1, TAU) == pytest.approx(1)


def test_vbar_and_kappa_on_the_cube(cube96):
    vb = [slash_ratio(cube96, make_vbar(3), 3, t, tol=1e-5) for t in standard_points(3, seed=1)]
    assert all(abs(r + 1) < 1e-6 for r in vb)
    rep, = character_scan(cube96, [make_kappa(3)], 3, 6)
    assert rep.snapped == 0 and rep.residual < 1e-4


def test_delta1_ratios_are_sixth_roots(delta96):
    res = collect_characters(delta96, element_stream(3, 11), 1, 6, 8)
    assert len(res.reports) == 8
    assert all(r.snapped is not None for r in res.reports)


def test_sample_points_are_accurate(delta96):
    g = make_kappa(3)
    pts = sample_points_for(delta96, g, 3, seed=2)
    assert len(pts) == 3
    for tau in pts:
        evaluate(delta96, tau, tol=1e-5)


def test_no_i_convention_is_not_modular(delta96):
    with pytest.raises(ConstancyFailure):
        collect_characters(delta96, element_stream(3, 42), 1, 6, 3, convention="no-i")


def test_no_i_divergence_is_precision_loss(delta24):
    # exp(2 pi tau2) with Re tau2 large moves the sum outside its domain
    with pytest.raises(PrecisionLoss):
        evaluate(delta24, SiegelPoint(1j, 4 + 0.1j, 9j), convention="no-i")


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6))
def test_ratio_constant_in_tau(seed):
    d = build_delta1(60)
    pts = standard_points(2, seed=seed)
    ratios = [slash_ratio(d, make_vbar(3), 1, t) for t in pts]
    assert abs(ratios[0] - ratios[1]) < 1e-6
