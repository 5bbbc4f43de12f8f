import pytest
from hypothesis import given, strategies as st

from oracles import f_table_reversed
from paramodular.errors import FTableTooSmall, WindowOverflow
from paramodular.jacobi import BiSeries, FTable, bi_mul, expand_f_table, theta_quotient_table


def bi(d, qmax=5, lcap=None):
    return BiSeries(d, qmax, lcap)


def test_bi_series_examples():
    a = BiSeries.binomial(1, 1, 1, 4)
    b = BiSeries.binomial(1, -1, -1, 4)
    assert (a * b).coeffs == {(0, 0): 1, (1, 1): 1, (1, -1): -1, (2, 0): -1}
    assert bi({(6, 0): 1, (0, 0): 0}).coeffs == {}
    assert BiSeries.binomial(0, 0, 1, 3).coeffs == {(0, 0): 2}
    assert bi({(1, -2): 1, (2, 3): 1}).lmin == -2 and bi({(1, -2): 1, (2, 3): 1}).lmax == 3
    assert bi({(1, 1): 1}).shift_r(-1).coeffs == {(1, 0): 1}


def test_truncation_keeps_smaller_order():
    a = bi({(0, 0): 1, (3, 0): 1}, qmax=5)
    b = bi({(0, 0): 1, (2, 1): 1}, qmax=3)
    out = bi_mul(a, b)
    assert out.qmax == 3 and (5, 1) not in out.coeffs and (3, 0) in out.coeffs


def test_window_overflow():
    with pytest.raises(WindowOverflow):
        BiSeries({(0, 3): 1}, 4, lcap=2)
    with pytest.raises(WindowOverflow):
        bi_mul(BiSeries({(0, 2): 1}, 4, lcap=2), BiSeries({(0, 1): 1}, 4, lcap=2))


def ft_poly(f):
    return {k: v for k, v in f.entries.items() if v}


@pytest.mark.parametrize("qmax", [0, 1, 4, 12])
def test_f_table_against_reversed_product(qmax):
    assert ft_poly(expand_f_table(qmax)) == f_table_reversed(qmax)


@pytest.mark.parametrize("qmax", [0, 3, 12])
def test_f_table_against_theta_quotient(qmax):
    assert ft_poly(expand_f_table(qmax)) == ft_poly(theta_quotient_table(qmax))


def test_f_table_known_values():
    f = expand_f_table(12)
    assert [f[0, l] for l in (-1, 0, 1)] == [1, 2, 1]
    assert f[0, 2] == 0 and f[-1, 0] == 0
    assert f[1, 3] == f[1, -3] == -2
    assert len(f.entries) == 211
    assert f.support_excess() == 1


@given(st.integers(0, 10))
def test_f_table_symmetry_and_support(qmax):
    f = expand_f_table(qmax)
    for (n, l), c in f.entries.items():
        assert f[n, -l] == c
        assert l * l <= 12 * n + 1


def test_f_table_too_small():
    f = expand_f_table(2)
    with pytest.raises(FTableTooSmall):
        f[3, 0]
    with pytest.raises(FTableTooSmall):
        f.row(3)
    assert f.row(0) == {-1: 1, 0: 2, 1: 1}
    with pytest.raises(ValueError):
        expand_f_table(-1)


def test_f_table_round_trip(tmp_path):
    f = expand_f_table(6)
    path = tmp_path / "f.txt"
    f.save(path)
    g = FTable.load(path)
    assert g.qmax == 6 and g.entries == f.entries
    with pytest.raises(ValueError):
        FTable.loads("siegel cap=3\n")
