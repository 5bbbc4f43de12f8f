"""Verification checks shared by the command line and the acceptance suite.

Every check returns one or more :class:`Report` records; nothing here prints.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

from .errors import AuditFailed, ParamodularError, PrecisionLoss
from .exact import (ScaledSymplecticMatrix, SymplecticForm, check_prime, mod2_reduce,
                    rational_to_tilde, symplectic_check, symplectic_inverse, tilde_to_rational)
from .f2 import IOTA
from .groups import (Chart, GroupId, GroupKind, Sampler, SamplerConfig, SiegelPoint,
                     coset_equal, default_generators, dual_period_identity_residual,
                     is_member, make_kappa, make_v, make_vbar, make_wtilde, mobius_act)
from .jacobi import expand_f_table, theta_quotient_table
from .siegel import (SiegelSeries, build_delta1, collect_characters, cusp_leading_exponents,
                     sample_points_for, series_power, slash_ratio)
from .sp4f2 import (derived_subgroup, enumerate_sp4f2, generated_by_images, index_two_subgroups,
                    lemma_suite, pi_star, sign_char, uniqueness_audit)

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass
class RunConfig:
    p: int = 3
    seed: int = 42
    samples: int = 1000
    cap: int = 96
    tol: float = 1e-4
    out: str | None = None
    cache_dir: str | None = None
    convention: str = "i"

    def __post_init__(self):
        self.p = check_prime(self.p)
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.cap < 6:
            raise ValueError("cap must be >= 6")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")
        if self.convention not in ("i", "no-i"):
            raise ValueError("convention must be 'i' or 'no-i'")


@dataclass
class Report:
    check: str
    status: str
    measured: object = ""
    expected: object = ""
    tol: object = 0
    ref: str = ""

    def line(self) -> str:
        def clean(v) -> str:
            return str(v).replace(" ", "")
        return (f"check={self.check} status={self.status} measured={clean(self.measured)} "
                f"expected={clean(self.expected)} tol={clean(self.tol)} ref={self.ref}")


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def _circle(p: int, level2: bool = False) -> GroupId:
    kind = GroupKind.GAMMA_CIRCLE_LEVEL2 if level2 else GroupKind.GAMMA_CIRCLE
    return GroupId(kind, Chart.TILDE, p)


def _sampler(p: int, seed: int, level2: bool = False, word_length: int = 10) -> Sampler:
    return Sampler(_circle(p, level2), SamplerConfig(seed=seed, word_length=word_length))


# -- exact group identities --------------------------------------------------------

def group_checks(p: int, samples: int, seed: int) -> list[Report]:
    """Exact identities for the integer paramodular group and its Fricke extension."""
    out = []
    w = make_wtilde(p)
    ident = ScaledSymplecticMatrix.identity(p)
    circle = _circle(p)
    untilde = GroupId(GroupKind.GAMMA_CIRCLE, Chart.UNTILDE, p)
    lam = SymplecticForm.lambda_p(p)

    out.append(Report("wtilde_squared", _verdict(w @ w == ident), "W^2", "1_4", 0, "fricke-involution"))
    v = make_v(p)
    out.append(Report("v_squared_in_gamma", _verdict(is_member(v @ v, untilde)), "", "member", 0, "fricke-involution"))
    kk = make_kappa(p) @ make_kappa(p)
    out.append(Report("kappa_squared_in_gamma", _verdict(kk.scale_exp == 0 and is_member(kk, circle)),
                      "", "member", 0, "kappa-generator"))
    out.append(Report("coset_v_vbar", _verdict(coset_equal(make_v(p), make_vbar(p), p)), "", "equal", 0,
                      "fricke-coset"))
    out.append(Report("coset_vhat_choice", _verdict(coset_equal(make_v(p, 1), make_v(p, 4), p)), "", "equal", 0,
                      "fricke-coset"))
    out.append(Report("wtilde_from_vbar", _verdict(rational_to_tilde(make_vbar(p), p) == w), "", "equal", 0,
                      "chart-conjugation"))
    g0 = w @ make_kappa(p)
    out.append(Report("kappa_decomposition",
                      _verdict(g0.scale_exp == 0 and is_member(g0, circle) and mod2_reduce(g0) == IOTA),
                      "", "iota", 0, "kappa-generator"))

    sampler = _sampler(p, seed)
    elems = sampler.samples(samples)
    bad_norm = sum(not is_member(w @ g @ w, circle) for g in elems)
    out.append(Report("normalization", _verdict(bad_norm == 0), bad_norm, 0, 0, "fricke-normalizes"))
    star = elems[:200] + [w @ g for g in elems[:200]]
    bad_index = sum(is_member(x, circle) + is_member(w @ x, circle) != 1 for x in star)
    out.append(Report("index_two", _verdict(bad_index == 0), bad_index, 0, 0, "fricke-extension"))
    bad_hkw = sum(any(g[1, j] % p for j in (0, 2)) or any(g[3, j] % p for j in (0, 2)) for g in elems)
    out.append(Report("hkw_divisibility", _verdict(bad_hkw == 0), bad_hkw, 0, 0, "row-two-divisibility"))
    bad_rt = sum(rational_to_tilde(tilde_to_rational(g), p) != g for g in elems)
    out.append(Report("chart_round_trip", _verdict(bad_rt == 0), bad_rt, 0, 0, "chart-conjugation"))

    rng = random.Random(seed)
    mixed = elems + [w @ g for g in elems]
    bad_closure = 0
    for _ in range(samples):
        a, b = rng.choice(mixed), rng.choice(mixed)
        try:
            if not symplectic_check(a @ b, lam):
                bad_closure += 1
        except ArithmeticError:
            bad_closure += 1
    out.append(Report("closure_no_overflow", _verdict(bad_closure == 0), bad_closure, 0, 0, "exact-arithmetic"))
    bad_inv = sum(g @ symplectic_inverse(g, lam) != ident for g in mixed[: min(len(mixed), 400)])
    out.append(Report("symplectic_inverse", _verdict(bad_inv == 0), bad_inv, 0, 0, "exact-arithmetic"))

    worst = 0.0
    for k in range(min(samples, 200)):
        g, h = tilde_to_rational(rng.choice(elems)), tilde_to_rational(rng.choice(elems))
        tau = random_point(rng)
        lhs = mobius_act(g @ h, tau).matrix()
        rhs = mobius_act(g, mobius_act(h, tau)).matrix()
        worst = max(worst, float(abs(lhs - rhs).max() / max(1.0, abs(lhs).max())))
    out.append(Report("mobius_group_action", _verdict(worst < 1e-10), f"{worst:.2e}", "<1e-10", 1e-10,
                      "siegel-action"))
    return out


def random_point(rng: random.Random) -> SiegelPoint:
    """A point of H_2 with moderate real and imaginary parts."""
    while True:
        y1, y3 = rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0)
        y2 = rng.uniform(-0.9, 0.9) * math.sqrt(y1 * y3)
        try:
            return SiegelPoint(complex(rng.uniform(-2, 2), y1), complex(rng.uniform(-2, 2), y2),
                               complex(rng.uniform(-2, 2), y3))
        except ValueError:
            continue


def dual_identity_checks(p: int, count: int, seed: int) -> list[Report]:
    rng = random.Random(seed)
    worst = max(dual_period_identity_residual(random_point(rng), p) for _ in range(count))
    return [Report(f"dual_period_identity_p{p}", _verdict(worst < 1e-12), f"{worst:.2e}", "<1e-12", 1e-12,
                   "dual-period-matrix")]


# -- Sp(4, F2) ------------------------------------------------------------------------

def sp4f2_checks(p: int) -> list[Report]:
    t = enumerate_sp4f2()
    out = [
        Report("sp4f2_order", _verdict(len(t) == 720), len(t), 720, 0, "sp4f2-is-s6"),
        Report("derived_order", _verdict(len(derived_subgroup(t)) == 360), len(derived_subgroup(t)), 360, 0,
               "sign-character"),
        Report("sign_iota", _verdict(sign_char(IOTA, t) == -1), sign_char(IOTA, t), -1, 0, "sign-character"),
    ]
    classes = len(t.conjugacy_classes())
    out.append(Report("conjugacy_classes", _verdict(classes == 11), classes, 11, 0, "sp4f2-is-s6"))
    gen = len(generated_by_images(default_generators(p), t))
    out.append(Report("reduction_surjective", _verdict(gen == 720), gen, 720, 0, "reduction-mod-2"))
    idx2 = index_two_subgroups(t)
    unique = len(idx2) == 1 and idx2[0] == frozenset(int(k) for k in t.derived_mask.nonzero()[0])
    out.append(Report("index_two_unique", _verdict(unique), len(idx2), 1, 0, "sign-character"))
    return out


def lemma_checks(p: int, pairs: int, samples: int, seed: int) -> list[Report]:
    r = lemma_suite(p, pairs=pairs, samples=samples, seed=seed)
    cover = all(v > 0 for v in r.cases.values())
    cases = ",".join(f"{a}{b}:{n}" for (a, b), n in sorted(r.cases.items()))
    return [
        Report("pi_star_homomorphism", _verdict(r.pair_failures == 0 and cover), f"{r.pair_failures}/{r.pairs}[{cases}]",
               0, 0, "extended-reduction"),
        Report("identity_star", _verdict(r.star_failures == 0), f"{r.star_failures}/{r.star}", 0, 0,
               "extended-reduction"),
        Report("identity_star_star", _verdict(r.star2_failures == 0), f"{r.star2_failures}/{r.star2}", 0, 0,
               "extended-reduction"),
        Report("kernel_is_level2", _verdict(r.kernel_failures == 0), f"{r.kernel_failures}/{r.kernel}", 0, 0,
               "extended-reduction"),
    ]


def audit_checks(p: int, samples: int, seed: int) -> tuple[list[Report], str]:
    try:
        rep = uniqueness_audit(p, samples=samples, seed=seed)
    except AuditFailed as exc:
        return [Report(f"uniqueness_audit_p{p}", FAIL, f"step_{exc.step}", "iota", 0, "uniqueness")], str(exc)
    survivors = ",".join(rep.survivors)
    return [Report(f"uniqueness_audit_p{p}", _verdict(rep.passed and rep.survivors == ["swap"]), survivors, "swap", 0,
                   "uniqueness")], rep.format()


# -- series ---------------------------------------------------------------------------

def ftable_checks(qmax: int = 12) -> list[Report]:
    f = expand_f_table(qmax)
    base = (f[0, -1], f[0, 0], f[0, 1])
    oracle = theta_quotient_table(qmax)
    sym = all(f[n, -l] == c for (n, l), c in f.entries.items() if n >= 1)
    return [
        Report("ftable_q0", _verdict(base == (1, 2, 1)), base, (1, 2, 1), 0, "theta-quotient"),
        Report("ftable_oracle", _verdict(f == oracle), len(f.entries), len(oracle.entries), 0, "theta-quotient"),
        Report("ftable_symmetric", _verdict(sym), sym, True, 0, "theta-quotient"),
        Report("ftable_support", PASS, f"max(l^2-12n)={f.support_excess()}", "recorded", 0, "theta-quotient"),
    ]


class SeriesCache:
    """Delta_1 builds keyed by (cap, convention); stored on disk when a directory is given."""

    def __init__(self, directory: str | None = None):
        self.directory = Path(directory) if directory else None
        self.memory: dict[tuple[int, str], SiegelSeries] = {}

    def delta1(self, cap: int, convention: str = "i") -> SiegelSeries:
        key = (cap, convention)
        if key in self.memory:
            return self.memory[key]
        path = self.directory / f"delta1-cap{cap}-{convention}.siegel" if self.directory else None
        if path is not None and path.exists():
            sr = SiegelSeries.load(path)
        else:
            sr = build_delta1(cap)
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                sr.save(path)
        self.memory[key] = sr
        return sr


def delta_checks(cap: int, cache: SeriesCache) -> list[Report]:
    d = cache.delta1(cap)
    lead = cusp_leading_exponents(d)
    out = [Report("delta1_leading", _verdict(lead == (1, 1, 1) and d[lead] == 1), f"{lead}:{d[lead]}",
                  "(1,1,1):1", 0, "borcherds-product")]
    bigger = build_delta1(cap + 6)
    out.append(Report("delta1_truncation_stable", _verdict(bigger.truncate(cap) == d), len(d), len(d), 0,
                      "borcherds-product"))
    koecher = all(4 * a * c >= 3 * b * b for a, b, c in d.coeffs)
    out.append(Report("delta1_koecher", _verdict(koecher), koecher, True, 0, "borcherds-product"))
    cube = series_power(d, 3)
    lead3 = cusp_leading_exponents(cube)
    out.append(Report("delta1_cube_leading", _verdict(lead3 == (3, 3, 3) and cube[lead3] == 1), f"{lead3}:{cube[lead3]}",
                      "(3,3,3):1", 0, "borcherds-product"))
    return out


# -- characters -----------------------------------------------------------------------

def single_ratio_check(name: str, sr: SiegelSeries, g, weight: int, expected: complex, tol: float,
                       convention: str, seed: int, ref: str) -> Report:
    try:
        pts = sample_points_for(sr, g, 3, seed=seed, convention=convention)
        ratios = [slash_ratio(sr, g, weight, t, tol=1e-5, convention=convention) for t in pts]
    except PrecisionLoss as exc:
        return Report(name, SKIP, "precision_loss", expected, tol, ref + f":{type(exc).__name__}")
    worst = max(abs(r - expected) for r in ratios)
    return Report(name, _verdict(worst <= tol), f"{ratios[0].real:+.6f}{ratios[0].imag:+.6f}j", expected, tol, ref)


def element_stream(p: int, seed: int, level2: bool = False, word_length: int = 8) -> Iterator:
    return iter(_sampler(p, seed, level2, word_length))


def character_checks(cfg: RunConfig, cache: SeriesCache, quota: int = 50, pair_quota: int = 100,
                     word_length: int = 8) -> list[Report]:
    """Character values of Delta_1 and its cube on sampled elements at level 3."""
    tol = cfg.tol
    d = cache.delta1(cfg.cap, cfg.convention)
    cube = series_power(d, 3)
    conv = cfg.convention
    out = [
        single_ratio_check("ratio_vbar_cube", cube, make_vbar(3), 3, -1, tol, conv, cfg.seed, "fricke-character"),
        single_ratio_check("ratio_kappa_cube", cube, tilde_to_rational(make_kappa(3)), 3, 1, tol, conv, cfg.seed,
                           "kappa-character"),
        single_ratio_check("ratio_identity", d, tilde_to_rational(ScaledSymplecticMatrix.identity(3)), 1, 1, tol,
                           conv, cfg.seed, "identity"),
    ]
    kw = dict(snap_tol=tol, const_tol=tol, convention=conv, seed=cfg.seed)

    def scan(name, sr, stream, weight, order, want, ref):
        try:
            res = collect_characters(sr, stream, weight, order, quota, **kw)
        except ParamodularError as exc:
            return Report(name, FAIL, type(exc).__name__, want, tol, ref), None
        bad = [r for r in res.reports if r.snapped is None]
        measured = f"evaluated={len(res.reports)},skipped={res.skipped},unsnapped={len(bad)}"
        if bad:
            return Report(name, FAIL, measured, want, tol, ref), res
        if len(res.reports) < quota:
            return Report(name, SKIP, measured, want, tol, ref), res
        return Report(name, PASS, measured, want, tol, ref), res

    # level-2 elements: the cube is invariant
    rep, res = scan("level2_cube_trivial", cube, element_stream(3, cfg.seed, True, word_length), 3, 2,
                    "all_+1", "level-two-character")
    if res is not None and rep.status == PASS and any(r.snapped != 0 for r in res.reports):
        rep.status = FAIL
    out.append(rep)

    # Delta_1 on the paramodular group: sixth roots of unity, some primitive
    rep, res6 = scan("delta1_sixth_roots", d, element_stream(3, cfg.seed + 1, False, word_length), 1, 6,
                     "6th_roots", "order-six-character")
    if res6 is not None and rep.status == PASS:
        prim = sum(r.snapped in (1, 5) for r in res6.reports)
        rep.measured += f",primitive={prim}"
        if prim == 0:
            rep.status = FAIL
    out.append(rep)

    # the cube against sgn o pi
    rep, res2 = scan("cube_equals_sign", cube, element_stream(3, cfg.seed + 2, False, word_length), 3, 2,
                     "sgn(pi(g))", "sign-diagram")
    if res2 is not None:
        mismatch = sum((-1) ** r.snapped != sign_char(pi_star(r.group_element, 3))
                       for r in res2.reports if r.snapped is not None)
        rep.measured += f",mismatch={mismatch}"
        if mismatch:
            rep.status = FAIL
    out.append(rep)

    out.append(multiplicativity_check(d, res6, pair_quota, cfg, kw))
    return out


def multiplicativity_check(d: SiegelSeries, res6, pair_quota: int, cfg: RunConfig, kw: dict) -> Report:
    name, ref = "delta1_multiplicative", "order-six-character"
    if res6 is None or len(res6.reports) < 2:
        return Report(name, SKIP, "too_few_elements", "chi(gh)=chi(g)chi(h)", cfg.tol, ref)
    rng = random.Random(cfg.seed)
    pool = [r for r in res6.reports if r.snapped is not None]
    checked = failures = skipped = 0

    def products() -> Iterator:
        while True:
            a, b = rng.choice(pool), rng.choice(pool)
            yield a, b

    stream = products()
    for _ in range(6 * pair_quota):
        if checked >= pair_quota:
            break
        a, b = next(stream)
        res = collect_characters(d, iter([a.group_element @ b.group_element]), 1, 6, 1, 1, **kw)
        if not res.reports:
            skipped += 1
            continue
        checked += 1
        r = res.reports[0]
        if r.snapped is None or r.snapped != (a.snapped + b.snapped) % 6:
            failures += 1
    measured = f"checked={checked},failures={failures},skipped={skipped}"
    if failures:
        return Report(name, FAIL, measured, "chi(gh)=chi(g)chi(h)", cfg.tol, ref)
    return Report(name, PASS if checked >= pair_quota else SKIP, measured, "chi(gh)=chi(g)chi(h)", cfg.tol, ref)


# -- the whole run ---------------------------------------------------------------------

Phase = Callable[[], list[Report]]


def run_all(cfg: RunConfig, log: Callable[[str], None] | None = None) -> list[Report]:
    """Run every phase in order; reports are returned in a stable order."""
    cache = SeriesCache(cfg.cache_dir)
    pairs = min(10 * cfg.samples, 10_000)
    phases: list[tuple[str, Phase]] = [
        ("group", lambda: group_checks(cfg.p, cfg.samples, cfg.seed)),
        ("dual", lambda: dual_identity_checks(cfg.p, 20, cfg.seed)),
        ("sp4f2", lambda: sp4f2_checks(cfg.p)),
        ("lemma", lambda: lemma_checks(cfg.p, pairs, cfg.samples, cfg.seed)),
        ("audit", lambda: audit_checks(cfg.p, min(cfg.samples, 200), cfg.seed)[0]),
        ("ftable", lambda: ftable_checks(12)),
        ("delta", lambda: delta_checks(cfg.cap, cache)),
        ("characters", lambda: character_checks(cfg, cache)),
    ]
    reports: list[Report] = []
    for name, phase in phases:
        got = phase()
        if log is not None:
            for r in got:
                log(r.line())
        reports.extend(got)
    return reports


def exit_code(reports: list[Report]) -> int:
    return min(sum(r.status == FAIL for r in reports), 125)
