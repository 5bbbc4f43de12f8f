"""Paramodular groups of level p, their Fricke extension, and the action on H_2."""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import (ChartMismatch, GeneratorInvalid, NotSymplectic,
                     SingularDenominator)
from .exact import (RationalMatrix, ScaledSymplecticMatrix, SymplecticForm,
                    check_prime, mat_mul, mod2_reduce, rational_to_tilde,
                    symplectic_check, symplectic_inverse, tilde_to_rational)
from .f2 import J2, F2Matrix


class GroupKind(enum.Enum):
    GAMMA_CIRCLE = "GammaCircle"
    GAMMA_CIRCLE_LEVEL2 = "GammaCircleLevel2"
    GAMMA_STAR = "GammaStar"
    GAMMA_STAR_LEVEL2 = "GammaStarLevel2"


class Chart(enum.Enum):
    TILDE = "tilde"
    UNTILDE = "untilde"


@dataclass(frozen=True)
class GroupId:
    kind: GroupKind
    chart: Chart
    p: int

    def __post_init__(self):
        object.__setattr__(self, "p", check_prime(self.p))

    @classmethod
    def parse(cls, text: str, p: int, chart: Chart = Chart.TILDE) -> GroupId:
        for kind in GroupKind:
            if kind.value.lower() == text.lower():
                return cls(kind, chart, p)
        raise ValueError(f"unknown group {text!r}; choose from {[k.value for k in GroupKind]}")


# -- distinguished elements -------------------------------------------------

def make_vhat(p: int, x: int = 1) -> ScaledSymplecticMatrix:
    """Integer matrix sqrt(p) * V_p for the solution (x, y = xp - 1)."""
    p = check_prime(p)
    y = x * p - 1
    return ScaledSymplecticMatrix.from_rows(
        [[p * x, -1, 0, 0],
         [-y * p, p, 0, 0],
         [0, 0, p, y * p],
         [0, 0, 1, p * x]], p)


def make_v(p: int, x: int = 1) -> RationalMatrix:
    """The Fricke involution V_p in the untilde chart (scaled by 1/sqrt(p))."""
    return RationalMatrix(make_vhat(p, x).entries, 1, p)


def make_vbar(p: int) -> RationalMatrix:
    p = check_prime(p)
    return RationalMatrix.from_rows(
        [[0, 1, 0, 0], [p, 0, 0, 0], [0, 0, 0, p], [0, 0, 1, 0]], scale_exp=1, p=p)


def make_wtilde(p: int) -> ScaledSymplecticMatrix:
    p = check_prime(p)
    return ScaledSymplecticMatrix.from_rows(
        [[0, 1, 0, 0], [p, 0, 0, 0], [0, 0, 0, 1], [0, 0, p, 0]], p, scale_exp=1)


def make_kappa_cofactor(p: int) -> ScaledSymplecticMatrix:
    """The element g of the integer group with kappa_p = W_p g and g = iota mod 2."""
    p = check_prime(p)
    return ScaledSymplecticMatrix.from_rows(
        [[p - 1, 2 - p, 0, 0],
         [p, 1 - p, 0, 0],
         [0, 0, p - 1, 1],
         [0, 0, p * (2 - p), 1 - p]], p)


def make_kappa(p: int) -> ScaledSymplecticMatrix:
    p = check_prime(p)
    return ScaledSymplecticMatrix.from_rows(
        [[p, 1 - p, 0, 0],
         [p * (p - 1), p * (2 - p), 0, 0],
         [0, 0, p * (2 - p), 1 - p],
         [0, 0, p * (p - 1), p]], p, scale_exp=1)


def make_rp(p: int) -> ScaledSymplecticMatrix:
    """R_p = diag(1, 1, 1, p); a change of chart, not a group element."""
    p = check_prime(p)
    return ScaledSymplecticMatrix.from_rows(np.diag([1, 1, 1, p]), p)


def make_h1(p: int) -> ScaledSymplecticMatrix:
    p = check_prime(p)
    return ScaledSymplecticMatrix.from_rows(
        [[1, 0, 0, 1], [0, 1, p, 0], [0, 0, 1, 0], [0, 0, 0, 1]], p)


def make_h2(p: int) -> ScaledSymplecticMatrix:
    p = check_prime(p)
    return ScaledSymplecticMatrix.from_rows(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 1, 1, 0], [p, 0, 0, 1]], p)


def make_exclusion_upper(p: int) -> ScaledSymplecticMatrix:
    """Element ruling out a trivial image of the Fricke element."""
    p = check_prime(p)
    return ScaledSymplecticMatrix.from_rows(
        [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, -p, 1]], p)


def make_exclusion_lower(p: int) -> ScaledSymplecticMatrix:
    """Element ruling out the unipotent 2x2 blocks as image of the Fricke element."""
    p = check_prime(p)
    return ScaledSymplecticMatrix.from_rows(
        [[1, 0, 0, 0], [p, 1, 0, 0], [0, 0, 1, -1], [0, 0, 0, 1]], p)


def make_iota_cofactor_untilde(p: int) -> RationalMatrix:
    """Untilde version of :func:`make_kappa_cofactor` (the matrix g with R_p^-1 kappa R_p = Vbar g)."""
    return tilde_to_rational(make_kappa_cofactor(p))


# -- membership -------------------------------------------------------------

def _untilde_multipliers(p: int) -> tuple:
    P, Q = Fraction(p), Fraction(1, p)
    return (1, 1, 1, P,
            P, 1, P, P,
            1, 1, 1, P,
            1, Q, 1, 1)


def _in_pattern(g: RationalMatrix, p: int, level: int) -> bool:
    ident = RationalMatrix.identity().entries
    for x, one, m in zip(g.entries, ident, _untilde_multipliers(p)):
        v = (x - one) if level == 2 else x
        if (v / (level * m)).denominator != 1:
            return False
    return True


def _check_chart(g, group: GroupId):
    if group.chart is Chart.TILDE:
        if not isinstance(g, ScaledSymplecticMatrix):
            raise ChartMismatch(f"{group.kind.value} in the tilde chart needs a ScaledSymplecticMatrix")
        if g.p != group.p:
            raise ChartMismatch(f"matrix has p={g.p}, group has p={group.p}")
    else:
        if not isinstance(g, RationalMatrix):
            raise ChartMismatch(f"{group.kind.value} in the untilde chart needs a RationalMatrix")
        if g.scale_exp and g.p != group.p:
            raise ChartMismatch(f"matrix has p={g.p}, group has p={group.p}")


def _tilde_gamma_circle(g: ScaledSymplecticMatrix) -> bool:
    return g.scale_exp == 0 and symplectic_check(g, SymplecticForm.lambda_p(g.p))


def is_member(g, group: GroupId) -> bool:
    _check_chart(g, group)
    p, kind = group.p, group.kind
    if group.chart is Chart.UNTILDE:
        if kind in (GroupKind.GAMMA_CIRCLE, GroupKind.GAMMA_CIRCLE_LEVEL2):
            if g.scale_exp or not symplectic_check(g, SymplecticForm.standard()):
                return False
            return _in_pattern(g, p, 2 if kind is GroupKind.GAMMA_CIRCLE_LEVEL2 else 1)
        try:
            g = rational_to_tilde(g, p)
        except ValueError:
            return False
        return is_member(g, GroupId(kind, Chart.TILDE, p))

    if kind is GroupKind.GAMMA_CIRCLE:
        return _tilde_gamma_circle(g)
    if kind is GroupKind.GAMMA_CIRCLE_LEVEL2:
        return _tilde_gamma_circle(g) and mod2_reduce(g).is_identity()
    in_star = _tilde_gamma_circle(g) or (g.scale_exp == 1 and _fricke_coset(g))
    if kind is GroupKind.GAMMA_STAR:
        return in_star
    # level-2 Fricke extension: kernel of the extended reduction
    from .sp4f2 import pi_star
    return in_star and pi_star(g, p).is_identity()


def _fricke_coset(g: ScaledSymplecticMatrix) -> bool:
    try:
        return _tilde_gamma_circle(mat_mul(make_wtilde(g.p), g))
    except ArithmeticError:
        return False


def coset_equal(a, b, p: int) -> bool:
    """True iff ``a^-1 b`` lies in the paramodular group of the matching chart."""
    if isinstance(a, ScaledSymplecticMatrix) and isinstance(b, ScaledSymplecticMatrix):
        form, group = SymplecticForm.lambda_p(p), GroupId(GroupKind.GAMMA_CIRCLE, Chart.TILDE, p)
    elif isinstance(a, RationalMatrix) and isinstance(b, RationalMatrix):
        form, group = SymplecticForm.standard(), GroupId(GroupKind.GAMMA_CIRCLE, Chart.UNTILDE, p)
    else:
        raise ChartMismatch("coset_equal needs two matrices from the same chart")
    try:
        q = mat_mul(symplectic_inverse(a, form), b)
    except ArithmeticError:
        return False
    return is_member(q, group)


# -- sampling ---------------------------------------------------------------

def _upper(p, s):
    a, b, c = s
    return ScaledSymplecticMatrix.from_rows(
        [[1, 0, a, b], [0, 1, p * b, c], [0, 0, 1, 0], [0, 0, 0, 1]], p)


def _lower(p, t):
    a, b, c = t
    return ScaledSymplecticMatrix.from_rows(
        [[1, 0, 0, 0], [0, 1, 0, 0], [a, b, 1, 0], [p * b, c, 0, 1]], p)


def default_generators(p: int) -> tuple[ScaledSymplecticMatrix, ...]:
    """Unipotent, rotation and block-diagonal elements of Sp(Lambda_p, Z), plus the
    four explicit elements h1, h2 and the two exclusion matrices."""
    p = check_prime(p)
    gens = []
    for s in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        gens.append(_upper(p, s))
        gens.append(_lower(p, s))
    rot13 = [[0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1]]
    rot24 = [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0]]
    flip = [[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]
    gens += [ScaledSymplecticMatrix.from_rows(m, p) for m in (rot13, rot24, flip)]
    gens += [make_h1(p), make_h2(p), make_exclusion_upper(p), make_exclusion_lower(p)]
    return tuple(gens)


def level2_generators(p: int) -> tuple[ScaledSymplecticMatrix, ...]:
    """Squares of the default generators and their conjugates by the default generators."""
    form = SymplecticForm.lambda_p(p)
    base = default_generators(p)
    squares = [g @ g for g in base]
    out = []
    seen = set()
    for sq in squares:
        for h in (None,) + base:
            x = sq if h is None else h @ sq @ symplectic_inverse(h, form)
            if x.entries not in seen and x != ScaledSymplecticMatrix.identity(p):
                seen.add(x.entries)
                out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    word_length: int = 10
    generator_set: tuple | None = None

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.word_length < 0:
            raise ValueError("word_length must be non-negative")


class Sampler:
    """Deterministic stream of random words in a generator set.

    One instance per consumer: the instance owns its random state.
    """

    def __init__(self, group: GroupId, cfg: SamplerConfig):
        if group.chart is not Chart.TILDE or group.kind not in (
                GroupKind.GAMMA_CIRCLE, GroupKind.GAMMA_CIRCLE_LEVEL2):
            raise ValueError("sampling is supported for GammaCircle / GammaCircleLevel2 in the tilde chart")
        self.group = group
        self.cfg = cfg
        p = group.p
        gens = tuple(cfg.generator_set) if cfg.generator_set is not None else default_generators(p)
        circle = GroupId(GroupKind.GAMMA_CIRCLE, Chart.TILDE, p)
        for k, g in enumerate(gens):
            if not isinstance(g, ScaledSymplecticMatrix) or g.p != p or not is_member(g, circle):
                raise GeneratorInvalid(f"generator #{k} is not in the integer paramodular group")
        form = SymplecticForm.lambda_p(p)
        self.letters = gens + tuple(symplectic_inverse(g, form) for g in gens)
        self.rng = random.Random(cfg.seed)
        self._words = None

    def _word(self, length: int) -> ScaledSymplecticMatrix:
        g = ScaledSymplecticMatrix.identity(self.group.p)
        for _ in range(length):
            g = g @ self.rng.choice(self.letters)
        return g

    def _correction_table(self):
        # breadth-first words in Sp(4, F2) over the images of the letters
        images = [mod2_reduce(x) for x in self.letters]
        ident = F2Matrix.identity()
        words = {ident: ()}
        queue = deque([ident])
        while queue:
            y = queue.popleft()
            for k, im in enumerate(images):
                z = y @ im
                if z not in words:
                    words[z] = words[y] + (k,)
                    queue.append(z)
        return words

    def sample(self) -> ScaledSymplecticMatrix:
        g = self._word(self.cfg.word_length)
        if self.group.kind is GroupKind.GAMMA_CIRCLE_LEVEL2:
            x = mod2_reduce(g)
            if not x.is_identity():
                if self._words is None:
                    self._words = self._correction_table()
                x_inv = J2 @ x.transpose() @ J2
                if x_inv not in self._words:
                    raise GeneratorInvalid("generator images do not reach this residue class mod 2")
                for k in self._words[x_inv]:
                    g = g @ self.letters[k]
        return g

    def samples(self, n: int) -> list[ScaledSymplecticMatrix]:
        return [self.sample() for _ in range(n)]

    def __iter__(self) -> Iterator[ScaledSymplecticMatrix]:
        while True:
            yield self.sample()


def sample_element(group: GroupId, cfg: SamplerConfig) -> ScaledSymplecticMatrix:
    return Sampler(group, cfg).sample()


# -- Siegel upper half space ------------------------------------------------

@dataclass(frozen=True)
class SiegelPoint:
    tau1: complex
    tau2: complex
    tau3: complex

    def __post_init__(self):
        for name in ("tau1", "tau2", "tau3"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        y1, y2, y3 = self.tau1.imag, self.tau2.imag, self.tau3.imag
        if not (y1 > 0 and y1 * y3 - y2 * y2 > 0):
            raise ValueError(f"imaginary part is not positive definite: {(y1, y2, y3)}")

    @classmethod
    def from_matrix(cls, t) -> SiegelPoint:
        t = np.asarray(t, dtype=complex)
        return cls(t[0, 0], (t[0, 1] + t[1, 0]) / 2, t[1, 1])

    def matrix(self) -> np.ndarray:
        return np.array([[self.tau1, self.tau2], [self.tau2, self.tau3]], dtype=complex)

    def imag(self) -> np.ndarray:
        return self.matrix().imag


def _numeric_matrix(g) -> np.ndarray:
    if isinstance(g, (RationalMatrix, ScaledSymplecticMatrix)):
        if not symplectic_check(g, SymplecticForm.standard()):
            raise NotSymplectic("the Moebius action needs a matrix preserving the standard form J")
        return g.as_float()
    m = np.asarray(g, dtype=float)
    if m.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    return m


def act_numeric(m: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, complex]:
    """Return ``(A t + B)(C t + D)^-1`` and ``det(C t + D)`` for a float 4x4 ``m``."""
    a, b, c, d = m[:2, :2], m[:2, 2:], m[2:, :2], m[2:, 2:]
    den = c @ t + d
    det = den[0, 0] * den[1, 1] - den[0, 1] * den[1, 0]
    scale = max(1.0, float(np.abs(den).max()) ** 2)
    if abs(det) <= 1e-13 * scale:
        raise SingularDenominator(f"det(C tau + D) = {det}")
    inv = np.array([[den[1, 1], -den[0, 1]], [-den[1, 0], den[0, 0]]]) / det
    return (a @ t + b) @ inv, complex(det)


def automorphy_factor(g, tau: SiegelPoint) -> complex:
    return act_numeric(_numeric_matrix(g), tau.matrix())[1]


def mobius_act(g, tau: SiegelPoint) -> SiegelPoint:
    """``tau -> (A tau + B)(C tau + D)^-1`` for ``g`` preserving the standard form."""
    out, _ = act_numeric(_numeric_matrix(g), tau.matrix())
    return SiegelPoint.from_matrix(out)


def dual_period_identity_residual(tau: SiegelPoint, p: int) -> float:
    """Max entrywise gap between the swapped dual period matrix and (diag(1, p), Vbar_p(tau))."""
    p = check_prime(p)
    t1, t2, t3 = tau.tau1, tau.tau2, tau.tau3
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    omega_dual = np.array([[p, 0, p * t1, t2], [0, 1, t2, t3 / p]], dtype=complex)
    swap4 = np.zeros((4, 4), dtype=complex)
    swap4[:2, :2] = swap
    swap4[2:, 2:] = swap
    lhs = swap @ omega_dual @ swap4
    rhs = np.hstack([np.diag([1.0, float(p)]), mobius_act(make_vbar(p), tau).matrix()])
    return float(np.abs(lhs - rhs).max())
