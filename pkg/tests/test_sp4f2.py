import itertools

import pytest
from hypothesis import given, strategies as st

from oracles import s6_sign
from paramodular.errors import AuditFailed, NotInGammaStar, NotInGroup
from paramodular.exact import ScaledSymplecticMatrix, mod2_reduce
from paramodular.f2 import IOTA, J2, F2Matrix
from paramodular.groups import (Chart, GroupId, GroupKind, Sampler, SamplerConfig, default_generators,
                                make_h1, make_h2, make_kappa, make_wtilde)
from paramodular.sp4f2 import (centralizer, derived_subgroup, enumerate_sp4f2, f2_inverse,
                               generated_by_images, index_two_subgroups, lemma_suite, pi_star, sign_char,
                               uniqueness_audit)


@pytest.fixture(scope="module")
def table():
    return enumerate_sp4f2()


def test_order_matches_formula(table):
    q = 2
    assert len(table) == q ** 4 * (q ** 2 - 1) * (q ** 4 - 1) == 720


def test_brute_force_count():
    # independent of the package: count 4x4 matrices over F2 with M J M^T = J
    j = ((0, 0, 1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, 1, 0, 0))
    n = 0
    for bits in itertools.product((0, 1), repeat=16):
        m = [bits[4 * i:4 * i + 4] for i in range(4)]
        mj = [[sum(m[i][k] * j[k][l] for k in range(4)) % 2 for l in range(4)] for i in range(4)]
        if all(sum(mj[i][k] * m[l][k] for k in range(4)) % 2 == j[i][l] for i in range(4) for l in range(4)):
            n += 1
    assert n == 720


def test_group_structure(table):
    assert len(derived_subgroup(table)) == 360
    assert len(table.conjugacy_classes()) == 11
    orders = sorted(map(len, table.conjugacy_classes()))
    # class sizes of S6
    assert orders == sorted([1, 15, 15, 45, 40, 40, 90, 120, 144, 90, 120])


def test_sign_agrees_with_s6_action(table):
    for m in table.elements:
        assert sign_char(m, table) == s6_sign(m.rows)
    assert sign_char(IOTA, table) == -1


def test_sign_is_a_homomorphism(table):
    els = table.elements
    for a, b in itertools.islice(itertools.product(els[::7], els[::11]), 5000):
        assert sign_char(a @ b, table) == sign_char(a, table) * sign_char(b, table)


def test_unique_index_two_subgroup(table):
    subs = index_two_subgroups(table)
    assert len(subs) == 1
    assert {table.elements[k] for k in subs[0]} == derived_subgroup(table)


def test_inverse_and_membership(table):
    for m in table.elements[::13]:
        assert (m @ f2_inverse(m)).is_identity()
    with pytest.raises(NotInGroup):
        table.idx(F2Matrix.from_rows([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))
    assert J2 in table


def test_centralizer_of_iota(table):
    c = centralizer(IOTA, table)
    # iota is a transposition-type involution in S6: centraliser of order 48
    assert len(c) == 48 and IOTA in c


@pytest.mark.parametrize("p", [3, 5, 7])
def test_pi_star_examples(p):
    assert pi_star(make_wtilde(p), p) == IOTA
    assert pi_star(make_kappa(p), p).is_identity()
    assert pi_star(ScaledSymplecticMatrix.identity(p), p).is_identity()
    assert pi_star(make_h1(p), p) == mod2_reduce(make_h1(p))


def test_pi_star_rejects():
    with pytest.raises(NotInGammaStar):
        pi_star(make_wtilde(5), 3)
    with pytest.raises(NotInGammaStar):
        pi_star(make_h2(3), 5)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_reduction_is_surjective(p, table):
    assert len(generated_by_images(default_generators(p), table)) == 720


@given(st.integers(0, 10 ** 6), st.sampled_from([3, 5]), st.booleans(), st.booleans())
def test_pi_star_multiplicative(seed, p, fg, fh):
    s = Sampler(GroupId(GroupKind.GAMMA_CIRCLE, Chart.TILDE, p), SamplerConfig(seed, 8))
    w = make_wtilde(p)
    g, h = s.sample(), s.sample()
    g = w @ g if fg else g
    h = h @ w if fh else h
    assert pi_star(g @ h, p) == pi_star(g, p) @ pi_star(h, p)


@pytest.mark.parametrize("p", [3, 5])
def test_uniqueness_audit(p):
    rep = uniqueness_audit(p, samples=100, seed=1)
    assert rep.passed
    assert rep.survivors == ["swap"]
    assert rep.candidates["swap"] == IOTA
    assert all(rep.exclusions[k] for k in ("identity", "upper", "lower"))
    assert "survivors: swap" in rep.format()


def test_audit_failed_carries_step():
    err = AuditFailed("c", "boom")
    assert err.step == "c"


@pytest.mark.parametrize("p", [3, 5])
def test_lemma_suite(p):
    rep = lemma_suite(p, pairs=2000, samples=200, pool=100, seed=3)
    assert rep.passed
    assert rep.pairs == 2000 and all(v > 0 for v in rep.cases.values())
    assert rep.star == rep.star2 == rep.kernel == 200
