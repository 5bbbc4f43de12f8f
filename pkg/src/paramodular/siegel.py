"""Truncated Fourier expansions on H_2: the Borcherds product Delta_1 and its cube.

Monomials are stored as integer triples ``(a, b, c)`` standing for
``q^(a/6) r^(b/2) s^(c/2)``.  The product is written in the variables
``q = e(t1), r = e(t2), s = e(t3)`` of the *series chart*; a point ``tau`` of the
paramodular (untilde) chart of level ``p`` maps there as
``(t1, t2, t3) = (tau1, tau2/p, tau3/p^2)``.  That substitution is what makes the
matrices Vbar_p and the untilde paramodular group act compatibly with the product.

Truncation keeps monomials with ``a + c <= cap``: the q- and s-exponents enter
symmetrically, matching the Fricke symmetry of the product.
"""

from __future__ import annotations

import cmath
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence

import mpmath
import numpy as np

from .errors import (CapTooLarge, ConstancyFailure, FTableTooSmall,
                     PrecisionLoss, SingularDenominator)
from .exact import ScaledSymplecticMatrix, tilde_to_rational
from .groups import SiegelPoint, act_numeric, _numeric_matrix
from .jacobi import FTable, expand_f_table

#: width, in lattice units of ``a + c``, of one unit of q- plus s-exponent
SHELL = 6
#: resource guard for :func:`build_delta1`
MAX_CAP = 150

CONVENTIONS = ("i", "no-i")
CHARTS = ("paramodular", "series")


def weight(key) -> int:
    a, _, c = key
    return a + c


@dataclass(frozen=True, eq=False)
class SiegelSeries:
    coeffs: Mapping[tuple[int, int, int], int]
    cap: int
    p: int = 3

    def __post_init__(self):
        clean = {}
        for key, v in self.coeffs.items():
            if v and weight(key) <= self.cap:
                clean[tuple(int(x) for x in key)] = int(v)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def one(cls, cap: int, p: int = 3) -> SiegelSeries:
        return cls({(0, 0, 0): 1}, cap, p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SiegelSeries):
            return NotImplemented
        return (self.cap, self.p, self.coeffs) == (other.cap, other.p, other.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, key) -> int:
        return self.coeffs.get(tuple(key), 0)

    def __mul__(self, other: SiegelSeries) -> SiegelSeries:
        return series_mul(self, other)

    def valuation(self) -> float:
        return min((weight(k) for k in self.coeffs), default=math.inf)

    def truncate(self, cap: int) -> SiegelSeries:
        if cap > self.cap:
            raise ValueError(f"cannot raise the cap from {self.cap} to {cap}")
        return SiegelSeries(self.coeffs, cap, self.p)

    @cached_property
    def _arrays(self):
        keys = sorted(self.coeffs)
        arr = np.array(keys, dtype=float).reshape(-1, 3)
        coeff = np.array([float(self.coeffs[k]) for k in keys])
        w = arr[:, 0] + arr[:, 2]
        return keys, arr, coeff, w

    def dumps(self) -> str:
        lines = [f"siegel cap={self.cap} p={self.p}"]
        lines += [f"{a} {b} {c} {v}" for (a, b, c), v in sorted(self.coeffs.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> SiegelSeries:
        lines = text.strip().splitlines()
        head = lines[0].split()
        if not head or head[0] != "siegel":
            raise ValueError("not a siegel series file")
        opts = dict(tok.split("=", 1) for tok in head[1:])
        coeffs = {}
        for line in lines[1:]:
            a, b, c, v = map(int, line.split())
            coeffs[(a, b, c)] = v
        return cls(coeffs, int(opts["cap"]), int(opts.get("p", 3)))

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> SiegelSeries:
        return cls.loads(Path(path).read_text())


# -- arithmetic --------------------------------------------------------------

def series_mul(x: SiegelSeries, y: SiegelSeries) -> SiegelSeries:
    """Product, with the cap set to the weight through which the product is exact."""
    if x.p != y.p:
        raise ValueError("series of different levels")
    if not x.coeffs or not y.coeffs:
        return SiegelSeries({}, min(x.cap, y.cap), x.p)
    cap = min(x.cap + y.valuation(), y.cap + x.valuation())
    out = defaultdict(int)
    ys = sorted(y.coeffs.items(), key=lambda kv: weight(kv[0]))
    for (a1, b1, c1), v1 in x.coeffs.items():
        room = cap - a1 - c1
        for (a2, b2, c2), v2 in ys:
            if a2 + c2 > room:
                break
            out[(a1 + a2, b1 + b2, c1 + c2)] += v1 * v2
    return SiegelSeries(out, int(cap), x.p)


def series_power(sr: SiegelSeries, k: int) -> SiegelSeries:
    if k < 1:
        raise ValueError("k must be >= 1")
    out = sr
    for _ in range(k - 1):
        out = series_mul(out, sr)
    return out


# -- the product ---------------------------------------------------------------

def _binomial_terms(e: int, kmax: int) -> list[tuple[int, int]]:
    """Coefficients of ``(1 - x)^e`` through ``x^kmax``."""
    if e >= 0:
        return [(k, (-1) ** k * comb(e, k)) for k in range(1, min(e, kmax) + 1)]
    return [(k, comb(-e + k - 1, k)) for k in range(1, kmax + 1)]


def delta1_factors(depth: int, f: FTable) -> list[tuple[int, int, int, int]]:
    """Factors ``(n, l, m, f(nm, l))`` of the product with ``n + m <= depth``."""
    out = []
    for n in range(depth + 1):
        for m in range(depth + 1 - n):
            for l, e in sorted(f.row(n * m).items()):
                if n == m == 0 and l >= 0:
                    continue
                out.append((n, l, m, e))
    return out


def build_delta1(cap: int, f: FTable | None = None, shuffle_seed: int | None = None) -> SiegelSeries:
    """Expand ``q^1/6 r^1/2 s^1/2 prod (1 - q^n r^l s^3m)^f(nm, l)`` through ``a + c <= cap``.

    ``shuffle_seed`` permutes the order in which factors are multiplied in.
    """
    if cap > MAX_CAP:
        raise CapTooLarge(f"cap {cap} exceeds the limit {MAX_CAP}")
    depth = (cap - 2) // SHELL
    if depth < 0:
        return SiegelSeries({}, cap)
    need = (depth // 2) * ((depth + 1) // 2)
    if f is None:
        f = expand_f_table(need)
    if f.qmax < need:
        raise FTableTooSmall(f"cap {cap} needs f(n, l) for n <= {need}; table stops at {f.qmax}")
    factors = delta1_factors(depth, f)
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(factors)

    # slices: (N, M) -> {l: coeff} for the monomial q^N r^l s^3M
    series = {(0, 0): {0: 1}}
    for n, l, m, e in factors:
        if n == m == 0:
            if e < 0:
                raise ValueError("negative exponent on a factor with no q or s content")
            terms = _binomial_terms(e, e)
        else:
            terms = _binomial_terms(e, depth // (n + m))
        new = {key: dict(poly) for key, poly in series.items()}
        for (N, M), poly in series.items():
            for k, b in terms:
                tgt = (N + k * n, M + k * m)
                if tgt[0] + tgt[1] > depth:
                    break
                row = new.setdefault(tgt, {})
                shift = k * l
                for ll, v in poly.items():
                    row[ll + shift] = row.get(ll + shift, 0) + b * v
        series = {key: {ll: v for ll, v in poly.items() if v} for key, poly in new.items()}
    coeffs = {}
    for (N, M), poly in series.items():
        for ll, v in poly.items():
            coeffs[(SHELL * N + 1, 2 * ll + 1, SHELL * M + 1)] = v
    return SiegelSeries(coeffs, cap, 3)


def cusp_leading_exponents(sr: SiegelSeries) -> tuple[int, int, int]:
    """Lowest monomial: least ``a + c``, then least ``a``, then the largest r-exponent
    (the product is expanded in powers of r^-1)."""
    if not sr.coeffs:
        raise ValueError("empty series has no leading term")
    return min(sr.coeffs, key=lambda k: (weight(k), k[0], -k[1]))


# -- evaluation ----------------------------------------------------------------

class Evaluation(NamedTuple):
    value: complex
    tail: float


def series_chart(tau: SiegelPoint, p: int, chart: str = "paramodular") -> tuple[complex, complex, complex]:
    if chart == "series":
        return tau.tau1, tau.tau2, tau.tau3
    if chart == "paramodular":
        return tau.tau1, tau.tau2 / p, tau.tau3 / (p * p)
    raise ValueError(f"unknown chart {chart!r}; choose from {CHARTS}")


def evaluate(sr: SiegelSeries, tau: SiegelPoint, *, chart: str = "paramodular",
             convention: str = "i", tol: float | None = None, dps: int | None = None) -> Evaluation:
    """Sum the stored monomials at ``tau``.

    The tail estimate adds the modulus of the outermost retained shell
    (``cap - SHELL < a + c <= cap``) to the a-priori bound
    ``S exp(-2 pi quality (cap + 1) / 6)`` on the first omitted monomials, with
    ``S`` the coefficient mass of that shell.  The bound holds monomial by
    monomial because every exponent satisfies ``4ac >= 3b^2``.  With ``tol`` set,
    a tail larger than ``tol * |value|`` (or a value that underflows to zero)
    raises :class:`PrecisionLoss`.  ``dps`` switches to mpmath at that many
    decimal digits.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; choose from {CONVENTIONS}")
    if not sr.coeffs:
        return Evaluation(0j, 0.0)
    t1, t2, t3 = series_chart(tau, sr.p, chart)
    if _series_quality(t2.imag, t1.imag, t3.imag) <= 0:
        raise ValueError("point is not in the Siegel upper half space")
    if convention == "no-i":
        # exp(2 pi tau2) = e(-i tau2): the same sum at a different point, which
        # need not lie in the upper half space
        t2 = -1j * t2
    qual = _series_quality(t2.imag, t1.imag, t3.imag)
    if qual <= 0:
        raise PrecisionLoss("series does not converge at this point", tail=math.inf)
    if dps is None:
        _, arr, coeff, w = sr._arrays
        phase = 2j * math.pi * (arr[:, 0] * t1 / 6 + arr[:, 1] * t2 / 2 + arr[:, 2] * t3 / 2)
        with np.errstate(over="ignore", invalid="ignore"):
            terms = coeff * np.exp(phase)
        value = complex(terms.sum())
        top = w > sr.cap - SHELL
        tail = float(np.abs(terms[top]).sum())
        mass = float(np.abs(coeff[top]).sum())
    else:
        with mpmath.workdps(dps):
            two_pi_i = 2j * mpmath.pi
            m1, m2, m3 = (mpmath.mpc(t) for t in (t1, t2, t3))
            total = mpmath.mpc(0)
            tail_mp = mpmath.mpf(0)
            mass = 0
            for (a, b, c), v in sr.coeffs.items():
                term = v * mpmath.exp(two_pi_i * (a * m1 / 6 + b * m2 / 2 + c * m3 / 2))
                total += term
                if a + c > sr.cap - SHELL:
                    tail_mp += abs(term)
                    mass += abs(v)
            value, tail = complex(total), float(tail_mp)
    tail += mass * math.exp(-2 * math.pi * qual * (sr.cap + 1) / 6)
    if not (math.isfinite(tail) and cmath.isfinite(value)):
        raise PrecisionLoss("overflow while summing the series", tail=tail, value=value)
    if tol is not None and (tail > tol * abs(value) or value == 0):
        raise PrecisionLoss(f"tail {tail:.3e} exceeds {tol:g} x |value| = {tol * abs(value):.3e}",
                            tail=tail, value=value)
    return Evaluation(value, tail)


def _as_untilde(g):
    if isinstance(g, ScaledSymplecticMatrix):
        return tilde_to_rational(g)
    return g


def slash_ratio(sr: SiegelSeries, g, weight: int, tau: SiegelPoint, *, tol: float = 1e-7,
                chart: str = "paramodular", convention: str = "i", dps: int | None = None) -> complex:
    """``F(g tau) / (det(C tau + D)^weight F(tau))``; constant in tau for a modular form.

    In the paramodular chart ``g`` is an untilde matrix; an integer-chart
    matrix is converted by conjugation with R_p first.
    """
    if chart == "paramodular":
        g = _as_untilde(g)
    m = _numeric_matrix(g)
    image, det = act_numeric(m, tau.matrix())
    g_tau = SiegelPoint.from_matrix(image)
    top = evaluate(sr, g_tau, chart=chart, convention=convention, tol=tol, dps=dps).value
    bottom = evaluate(sr, tau, chart=chart, convention=convention, tol=tol, dps=dps).value
    if bottom == 0:
        raise SingularDenominator("series vanishes at tau")
    return top / (det ** weight * bottom)


# -- sample points ----------------------------------------------------------------

def _series_quality(y2: float, y1: float, y3: float) -> float:
    # least eigenvalue of the series-chart Im after the rescaling that turns
    # the pairing with (a/6, b/4; b/4, c/2) into one with trace (a + c) / 6
    s = math.sqrt(3)
    return float(np.linalg.eigvalsh(np.array([[y1, s * y2], [s * y2, 3 * y3]]))[0])


def point_quality(tau: SiegelPoint, p: int, chart: str = "paramodular") -> float:
    """Decay rate of the expansion at ``tau``: a monomial with exponents (a, b, c)
    has modulus at most ``|coeff| exp(-2 pi quality (a + c) / 6)``."""
    t1, t2, t3 = series_chart(tau, p, chart)
    return _series_quality(t2.imag, t1.imag, t3.imag)


def leading_decay(sr: SiegelSeries, tau: SiegelPoint, chart: str = "paramodular") -> float:
    """``-log|leading term| / 2 pi`` at ``tau``."""
    a, b, c = cusp_leading_exponents(sr)
    t1, t2, t3 = series_chart(tau, sr.p, chart)
    return a * t1.imag / 6 + b * t2.imag / 2 + c * t3.imag / 2


def _top_mass(sr: SiegelSeries) -> float:
    _, _, coeff, w = sr._arrays
    return max(float(np.abs(coeff[w > sr.cap - SHELL]).sum()), 1.0)


def precision_margin(sr: SiegelSeries, tau: SiegelPoint) -> float:
    """Expected ``-log10`` of the relative truncation error at ``tau`` (larger is better)."""
    gap = point_quality(tau, sr.p) * (sr.cap + 1) / 6 - leading_decay(sr, tau)
    return 2 * math.pi * gap / math.log(10) - math.log10(_top_mass(sr))


def standard_points(count: int, p: int = 3, seed: int = 0, low: float = 1.5, high: float = 4.0) -> list[SiegelPoint]:
    """Diagonally dominant points whose rescaled imaginary part has entries in [low, high]."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        y1, y3 = rng.uniform(low, high), rng.uniform(low, high)
        y2 = rng.uniform(-0.25, 0.25) * min(y1, y3)
        x1, x2, x3 = (rng.uniform(-0.5, 0.5) for _ in range(3))
        s = math.sqrt(p)
        out.append(SiegelPoint(complex(x1, y1), complex(x2 * s, y2 * s), complex(x3 * p, y3 * p)))
    return out


def _point_from_params(v: Sequence[float], p: int) -> SiegelPoint:
    x1, x2, x3, u1, u2, w = v
    l11, l22 = math.exp(u1), math.exp(u2)
    y11, y12, y22 = l11 * l11, l11 * w, w * w + l22 * l22
    s = math.sqrt(p)
    return SiegelPoint(complex(x1, y11), complex(x2 * s, y12 * s), complex(x3 * p, y22 * p))


class _MarginFn:
    """``min(precision_margin(tau), precision_margin(g tau))`` in closed form.

    Called thousands of times per element by the optimiser, so it works on
    plain complex scalars instead of numpy arrays.
    """

    def __init__(self, sr: SiegelSeries, m: np.ndarray, target: float):
        self.p = sr.p
        self.lead = cusp_leading_exponents(sr)
        self.reach = (sr.cap + 1) / 6
        self.target = target
        self.m = [[complex(x) for x in row] for row in m]
        self.offset = math.log10(_top_mass(sr))

    def _margin(self, t1: complex, t2: complex, t3: complex) -> float:
        p = self.p
        y1, y2, y3 = t1.imag, t2.imag / p, t3.imag / (p * p)
        a, b, c = y1, math.sqrt(3) * y2, 3 * y3
        qual = (a + c) / 2 - math.hypot((a - c) / 2, b)
        a0, b0, c0 = self.lead
        gap = qual * self.reach - (a0 * y1 / 6 + b0 * y2 / 2 + c0 * y3 / 2)
        return 2 * math.pi * gap / math.log(10) - self.offset

    def __call__(self, v) -> float:
        x1, x2, x3, u1, u2, w = (float(z) for z in v)
        if max(abs(u1), abs(u2)) > 20:
            return -1e9
        l11, l22 = math.exp(u1), math.exp(u2)
        s = math.sqrt(self.p)
        t1 = complex(x1, l11 * l11)
        t2 = complex(x2 * s, l11 * w * s)
        t3 = complex(x3 * self.p, (w * w + l22 * l22) * self.p)
        (a11, a12, b11, b12), (a21, a22, b21, b22), (c11, c12, d11, d12), (c21, c22, d21, d22) = self.m
        # g tau = (A tau + B)(C tau + D)^-1 with tau = [[t1, t2], [t2, t3]]
        n11, n12 = a11 * t1 + a12 * t2 + b11, a11 * t2 + a12 * t3 + b12
        n21, n22 = a21 * t1 + a22 * t2 + b21, a21 * t2 + a22 * t3 + b22
        e11, e12 = c11 * t1 + c12 * t2 + d11, c11 * t2 + c12 * t3 + d12
        e21, e22 = c21 * t1 + c22 * t2 + d21, c21 * t2 + c22 * t3 + d22
        det = e11 * e22 - e12 * e21
        if abs(det) < 1e-300:
            return -1e9
        i11, i12, i21, i22 = e22 / det, -e12 / det, -e21 / det, e11 / det
        g1 = n11 * i11 + n12 * i21
        g2 = n11 * i12 + n12 * i22
        g3 = n21 * i12 + n22 * i22
        try:
            return min(self._margin(t1, t2, t3), self._margin(g1, g2, g3), self.target)
        except (ValueError, OverflowError):
            return -1e9


def adapted_points(sr: SiegelSeries, g, count: int = 3, seed: int = 0, min_margin: float = 0.0,
                   starts: int = 8, min_separation: float = 0.15,
                   target: float = 14.0) -> list[tuple[float, SiegelPoint]]:
    """Points where ``sr`` is accurate both at ``tau`` and at ``g tau``.

    Maximises ``min(precision_margin(tau), precision_margin(g tau))`` (clipped at
    ``target`` digits) by Nelder-Mead from several seeded starts and returns up to
    ``count`` well-separated optima with their margins.
    """
    from scipy.optimize import minimize

    m = _numeric_matrix(_as_untilde(g))
    p = sr.p
    rng = random.Random(seed)
    score = _MarginFn(sr, m, target)

    found = []
    for _ in range(starts):
        v0 = [rng.uniform(-0.5, 0.5) for _ in range(3)]
        v0 += [0.5 * math.log(rng.uniform(0.8, 3.0)), 0.5 * math.log(rng.uniform(0.8, 3.0)), rng.uniform(-0.3, 0.3)]
        res = minimize(lambda v: -score(v), v0, method="Nelder-Mead",
                       options={"maxiter": 800, "xatol": 1e-4, "fatol": 1e-6})
        found.append((-float(res.fun), res.x))
    found.sort(key=lambda t: -t[0])

    chosen: list[tuple[float, SiegelPoint]] = []
    for margin, v in found:
        if margin < min_margin:
            continue
        tau = _point_from_params(v, p)
        if all(np.abs(tau.matrix() - other.matrix()).max() >= min_separation for _, other in chosen):
            chosen.append((margin, tau))
        if len(chosen) == count:
            break
    # top up with perturbations of the best optimum
    best_margin, best = found[0]
    tries = 0
    while chosen and len(chosen) < count and tries < 300:
        tries += 1
        v = [x + rng.uniform(-0.2, 0.2) for x in best[:3]] + [x + rng.uniform(-0.05, 0.05) for x in best[3:]]
        margin = score(v)
        tau = _point_from_params(v, p)
        if margin >= max(min_margin, best_margin - 1.0) and all(
                np.abs(tau.matrix() - other.matrix()).max() >= min_separation / 2 for _, other in chosen):
            chosen.append((margin, tau))
    return chosen


# -- characters -------------------------------------------------------------------

@dataclass
class CharacterReport:
    group_element: object
    weight: int
    ratio: complex
    snapped: int | None
    residual: float
    ratios: list = field(default_factory=list)
    taus: list = field(default_factory=list)
    status: str = "ok"

    def value(self, order: int) -> complex:
        if self.snapped is None:
            raise ValueError("ratio did not snap to a root of unity")
        return cmath.exp(2j * math.pi * self.snapped / order)


def snap_root_of_unity(z: complex, order: int) -> tuple[int, float]:
    """Nearest ``order``-th root of unity, as ``(exponent mod order, distance)``."""
    k = round(order * cmath.phase(z) / (2 * math.pi)) % order
    return k, abs(z - cmath.exp(2j * math.pi * k / order))


def character_scan(sr: SiegelSeries, elements, weight: int, order: int, taus=None, *,
                   snap_tol: float = 1e-4, const_tol: float = 1e-4, eval_tol: float = 1e-5,
                   points_per_element: int = 3, seed: int = 0, convention: str = "i",
                   skip_imprecise: bool = False) -> list[CharacterReport]:
    """Slash ratios of ``sr`` under each element, checked for constancy and snapped.

    With ``taus=None`` every element gets its own sample points (standard points
    where they stay accurate after moving by the element, adapted points
    otherwise).  Elements whose ratio cannot be evaluated within ``eval_tol`` raise
    :class:`PrecisionLoss`, or are reported with status ``"skip"`` when
    ``skip_imprecise`` is set.  Ratios that vary with tau raise
    :class:`ConstancyFailure`.
    """
    reports = []
    for k, original in enumerate(elements):
        g = _as_untilde(original)
        try:
            pts = taus if taus is not None else sample_points_for(sr, g, points_per_element, seed=seed + k,
                                                                  eval_tol=eval_tol, convention=convention)
            ratios = [slash_ratio(sr, g, weight, tau, tol=eval_tol, convention=convention) for tau in pts]
        except PrecisionLoss:
            if not skip_imprecise:
                raise
            reports.append(CharacterReport(original, weight, complex("nan"), None, math.inf, status="skip"))
            continue
        mean = sum(ratios) / len(ratios)
        spread = max(abs(r - s) for r in ratios for s in ratios)
        if spread > const_tol * max(abs(mean), 1.0):
            raise ConstancyFailure(f"element #{k}: slash ratios vary by {spread:.3e} across tau: {ratios}")
        snapped, residual = snap_root_of_unity(mean, order)
        ok = residual <= snap_tol
        reports.append(CharacterReport(original, weight, mean, snapped if ok else None, residual,
                                       ratios, list(pts), "ok" if ok else "unsnapped"))
    return reports


def sample_points_for(sr: SiegelSeries, g, count: int = 3, *, seed: int = 0, eval_tol: float = 1e-5,
                      convention: str = "i") -> list[SiegelPoint]:
    """``count`` points at which ``sr`` is accurate both at ``tau`` and at ``g tau``."""
    if sr.valuation() > sr.cap - SHELL:
        # the leading monomial lies in the top shell, so the tail is never small
        raise PrecisionLoss("series has no shell below the truncation edge")
    g = _as_untilde(g)
    m = _numeric_matrix(g)

    def accurate(tau):
        try:
            image, _ = act_numeric(m, tau.matrix())
            for t in (tau, SiegelPoint.from_matrix(image)):
                evaluate(sr, t, convention=convention, tol=eval_tol)
            return True
        except (PrecisionLoss, SingularDenominator, ValueError, np.linalg.LinAlgError):
            return False

    pts = [t for t in standard_points(4 * count, sr.p, seed=seed) if accurate(t)][:count]
    if len(pts) < count:
        for _, tau in adapted_points(sr, g, count=3 * count, seed=seed):
            if len(pts) == count:
                break
            if accurate(tau) and all(np.abs(tau.matrix() - o.matrix()).max() > 1e-3 for o in pts):
                pts.append(tau)
    if len(pts) < count:
        raise PrecisionLoss(f"found only {len(pts)} of {count} accurate sample points for this element")
    return pts


@dataclass
class ScanResult:
    reports: list
    skipped: int


def collect_characters(sr: SiegelSeries, stream, weight: int, order: int, quota: int,
                       max_attempts: int | None = None, **kwargs) -> ScanResult:
    """Scan elements drawn from ``stream`` until ``quota`` of them evaluate precisely.

    Elements whose slash ratio cannot be computed to the requested precision at
    this cap are skipped and counted; at most ``max_attempts`` (default
    ``4 * quota``) elements are drawn.
    """
    max_attempts = 4 * quota if max_attempts is None else max_attempts
    reports, skipped = [], 0
    for k, g in enumerate(stream):
        if k >= max_attempts or len(reports) >= quota:
            break
        kwargs.setdefault("seed", 0)
        rep, = character_scan(sr, [g], weight, order, skip_imprecise=True,
                              **{**kwargs, "seed": kwargs["seed"] + 7919 * k})
        if rep.status == "skip":
            skipped += 1
        else:
            reports.append(rep)
    return ScanResult(reports, skipped)
