"""Sp(4, F2) by brute force, the reduction maps into it, and the uniqueness audit."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import AuditFailed, NotInGammaStar, NotInGroup
from .exact import ScaledSymplecticMatrix, mod2_reduce
from .f2 import IOTA, J2, F2Matrix
from .groups import (Chart, GroupId, GroupKind, Sampler, SamplerConfig,
                     is_member, make_exclusion_lower, make_exclusion_upper,
                     make_h1, make_h2, make_wtilde)


@dataclass(frozen=True, eq=False)
class FiniteGroupTable:
    """Sp(4, F2) with a full Cayley table; element ``k`` is ``elements[k]``."""

    elements: tuple
    index: dict
    mul: np.ndarray
    inv: np.ndarray
    identity: int
    derived_mask: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, m: F2Matrix) -> bool:
        return m in self.index

    def idx(self, m: F2Matrix) -> int:
        try:
            return self.index[m]
        except KeyError:
            raise NotInGroup(f"matrix is not in Sp(4, F2):\n{m}") from None

    def closure(self, gens) -> frozenset:
        """Subgroup generated by the given element indices."""
        gens = sorted(set(int(g) for g in gens))
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for y in self.mul[x, gens]:
                    y = int(y)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def conjugacy_classes(self) -> list[frozenset]:
        n = len(self)
        all_g = np.arange(n)
        todo = set(range(n))
        classes = []
        while todo:
            x = min(todo)
            orbit = frozenset(int(y) for y in self.mul[self.mul[all_g, x], self.inv[all_g]])
            classes.append(orbit)
            todo -= orbit
        return classes

    def normal_closure(self, x: int) -> frozenset:
        all_g = np.arange(len(self))
        conj = self.mul[self.mul[all_g, x], self.inv[all_g]]
        return self.closure(conj)


def _all_matrices() -> np.ndarray:
    codes = np.arange(1 << 16)
    shifts = np.arange(16).reshape(4, 4)
    return ((codes[:, None, None] >> shifts[None]) & 1).astype(np.uint8)


def _encode(mats: np.ndarray) -> np.ndarray:
    weights = (1 << np.arange(16)).reshape(4, 4)
    return (mats.astype(np.int64) * weights).sum(axis=(-2, -1))


@functools.lru_cache(maxsize=1)
def enumerate_sp4f2() -> FiniteGroupTable:
    """Scan all 2^16 matrices and keep those preserving the standard form mod 2."""
    mats = _all_matrices()
    j = np.array(J2.rows, dtype=np.uint8)
    keep = np.all((mats @ j @ mats.transpose(0, 2, 1)) % 2 == j, axis=(1, 2))
    codes = np.flatnonzero(keep)
    group = mats[codes]
    n = len(codes)
    lookup = np.full(1 << 16, -1, dtype=np.int64)
    lookup[codes] = np.arange(n)
    prods = (group[:, None] @ group[None, :]) % 2
    mul = lookup[_encode(prods)]
    if (mul < 0).any():
        raise AssertionError("enumerated set is not closed under multiplication")
    ident = int(lookup[F2Matrix.identity().bits])
    inv = np.argmax(mul == ident, axis=1)
    elements = tuple(F2Matrix(int(c)) for c in codes)
    index = {m: k for k, m in enumerate(elements)}
    derived = _derived(mul, inv, ident)
    mask = np.zeros(n, dtype=bool)
    mask[list(derived)] = True
    mul.setflags(write=False)
    inv.setflags(write=False)
    mask.setflags(write=False)
    return FiniteGroupTable(elements, index, mul, inv, ident, mask)


def _derived(mul: np.ndarray, inv: np.ndarray, ident: int) -> frozenset:
    comms = np.unique(mul[mul, mul[inv[:, None], inv[None, :]]])
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for y in mul[x, comms]:
                y = int(y)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def derived_subgroup(t: FiniteGroupTable | None = None) -> frozenset:
    """Elements of the commutator subgroup, as F2 matrices."""
    t = t or enumerate_sp4f2()
    return frozenset(t.elements[k] for k in np.flatnonzero(t.derived_mask))


def sign_char(m: F2Matrix, t: FiniteGroupTable | None = None) -> int:
    """+1 on the commutator subgroup (A6 inside S6), -1 off it."""
    t = t or enumerate_sp4f2()
    return 1 if t.derived_mask[t.idx(m)] else -1


def centralizer(x: F2Matrix, t: FiniteGroupTable | None = None) -> frozenset:
    t = t or enumerate_sp4f2()
    k = t.idx(x)
    hits = np.flatnonzero(t.mul[k, :] == t.mul[:, k])
    return frozenset(t.elements[i] for i in hits)


def f2_inverse(x: F2Matrix) -> F2Matrix:
    return J2 @ x.transpose() @ J2


def pi_star(g: ScaledSymplecticMatrix, p: int) -> F2Matrix:
    """Reduction mod 2, extended to the Fricke coset by ``g -> pi(g W) iota``."""
    if not isinstance(g, ScaledSymplecticMatrix) or g.p != p:
        raise NotInGammaStar("pi_star expects an integer-chart matrix with matching p")
    circle = GroupId(GroupKind.GAMMA_CIRCLE, Chart.TILDE, p)
    if g.scale_exp == 0:
        if not is_member(g, circle):
            raise NotInGammaStar("integer matrix does not preserve Lambda_p")
        return mod2_reduce(g)
    try:
        gw = g @ make_wtilde(p)
    except ArithmeticError:
        raise NotInGammaStar("scaled matrix is not in the Fricke coset") from None
    if not is_member(gw, circle):
        raise NotInGammaStar("scaled matrix is not in the Fricke coset")
    return mod2_reduce(gw) @ IOTA


# -- uniqueness audit --------------------------------------------------------

_INVOLUTION_BLOCKS = {
    "identity": ((1, 0), (0, 1)),
    "swap": ((0, 1), (1, 0)),
    "upper": ((1, 1), (0, 1)),
    "lower": ((1, 0), (1, 1)),
}


def _block_candidate(a) -> F2Matrix:
    # symplectic with B = C = 0 forces D = A^-T
    (a11, a12), (a21, a22) = a
    d = ((a22, a21), (a12, a11))
    return F2Matrix.block(a, ((0, 0), (0, 0)), ((0, 0), (0, 0)), d)


@dataclass
class AuditStep:
    name: str
    passed: bool
    detail: str


@dataclass
class AuditReport:
    p: int
    steps: list = field(default_factory=list)
    candidates: dict = field(default_factory=dict)
    exclusions: dict = field(default_factory=dict)
    survivors: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)

    def format(self) -> str:
        lines = [f"uniqueness audit p={self.p}"]
        for s in self.steps:
            lines.append(f"[{'PASS' if s.passed else 'FAIL'}] {s.name}: {s.detail}")
        lines.append(f"survivors: {', '.join(self.survivors) or '-'}")
        return "\n".join(lines)


def uniqueness_audit(p: int, samples: int = 200, seed: int = 0) -> AuditReport:
    """Replay the argument that iota is the only admissible image of W_p.

    Raises :class:`AuditFailed` at the first step whose check does not hold.
    """
    t = enumerate_sp4f2()
    report = AuditReport(p)

    def record(step, name, ok, detail):
        report.steps.append(AuditStep(name, ok, detail))
        if not ok:
            raise AuditFailed(step, f"{name}: {detail}")

    w = make_wtilde(p)
    h1, h2 = make_h1(p), make_h2(p)
    circle = GroupId(GroupKind.GAMMA_CIRCLE, Chart.TILDE, p)
    record("a", "h1, h2 in the integer paramodular group",
           is_member(h1, circle) and is_member(h2, circle), "membership checked exactly")
    for name, h in (("h1", h1), ("h2", h2)):
        diff = [x - y for x, y in zip((w @ h).entries, (h @ w).entries)]
        record("a", f"W_p {name} - {name} W_p = 0", not any(diff), f"max |entry| = {max(map(abs, diff))}")

    ph1, ph2 = mod2_reduce(h1), mod2_reduce(h2)
    involutions = [m for m in t.elements if (m @ m).is_identity()]
    c1, c2 = centralizer(ph1, t), centralizer(ph2, t)
    bad_c = [m for m in involutions if m in c1 and any(any(r) for r in m.blocks()[2])]
    record("b", "involutions centralising pi(h1) have C = 0", not bad_c, f"{len(bad_c)} exceptions")
    bad_b = [m for m in involutions if m in c2 and any(any(r) for r in m.blocks()[1])]
    record("b", "involutions centralising pi(h2) have B = 0", not bad_b, f"{len(bad_b)} exceptions")

    narrowed = {}
    for name, a in _INVOLUTION_BLOCKS.items():
        m = _block_candidate(a)
        ok = m in t and (m @ m).is_identity() and m in c1 and m in c2
        record("b", f"block candidate A={name}", ok, "in Sp(4,F2), involution, commutes with pi(h1), pi(h2)")
        narrowed[name] = m
    report.candidates = narrowed
    scan = {m for m in involutions if m in c1 and m in c2}
    record("b", "full scan of 720 elements agrees with block candidates",
           scan == set(narrowed.values()), f"full scan finds {len(scan)} candidates")
    record("b", "swap candidate is iota", narrowed["swap"] == IOTA, "A = D = swap")

    named = {"exclusion_upper": make_exclusion_upper(p), "exclusion_lower": make_exclusion_lower(p)}
    for name, h in named.items():
        record("c", f"{name} in the integer paramodular group", is_member(h, circle), "membership checked exactly")
    sampler = Sampler(circle, SamplerConfig(seed=seed, word_length=8))
    sampled = sampler.samples(samples)

    def violates(cand: F2Matrix, h: ScaledSymplecticMatrix) -> bool:
        return mod2_reduce(w @ h @ w) != cand @ mod2_reduce(h) @ cand

    survivors = []
    for name, cand in narrowed.items():
        hits = [n for n, h in named.items() if violates(cand, h)]
        if not hits:
            hits = [f"sample#{k}" for k, h in enumerate(sampled) if violates(cand, h)][:1]
        report.exclusions[name] = hits
        if not hits:
            survivors.append(name)
    record("c", "iota is consistent with every named and sampled element",
           not report.exclusions["swap"], f"violations: {report.exclusions['swap']}")
    for name in ("identity", "upper", "lower"):
        record("c", f"candidate A={name} excluded", bool(report.exclusions[name]),
               f"excluded by {report.exclusions[name]}")
    report.survivors = survivors
    record("d", "candidate set is {iota}", survivors == ["swap"], f"survivors {survivors}")
    return report


# -- the homomorphism property on samples --------------------------------------

@dataclass
class LemmaReport:
    p: int
    pairs: int = 0
    pair_failures: int = 0
    cases: dict = field(default_factory=dict)
    star: int = 0
    star_failures: int = 0
    star2: int = 0
    star2_failures: int = 0
    kernel: int = 0
    kernel_failures: int = 0

    @property
    def passed(self) -> bool:
        return not (self.pair_failures or self.star_failures or self.star2_failures or self.kernel_failures)


def lemma_suite(p: int, pairs: int = 10_000, samples: int = 1000, seed: int = 0,
                pool: int = 400, word_length: int = 10) -> LemmaReport:
    """Check that pi_star is multiplicative and the two conjugation identities hold.

    Pairs are drawn from a pool of sampled elements, half of them moved into the
    Fricke coset, so that every combination of cosets occurs.  ``cases`` counts
    pairs by (coset of g, coset of h) with 1 marking the Fricke coset.
    """
    import random

    report = LemmaReport(p)
    w = make_wtilde(p)
    circle = GroupId(GroupKind.GAMMA_CIRCLE, Chart.TILDE, p)
    sampler = Sampler(circle, SamplerConfig(seed=seed, word_length=word_length))
    rng = random.Random(seed)
    base = sampler.samples(pool)
    elems = [(g, 0) for g in base] + [(w @ g, 1) for g in base]
    images = [pi_star(g, p) for g, _ in elems]
    cases = {(a, b): 0 for a in (0, 1) for b in (0, 1)}
    for _ in range(pairs):
        i, j = rng.randrange(len(elems)), rng.randrange(len(elems))
        (g, cg), (h, ch) = elems[i], elems[j]
        cases[(cg, ch)] += 1
        if pi_star(g @ h, p) != images[i] @ images[j]:
            report.pair_failures += 1
    report.pairs = pairs
    report.cases = cases

    for g in sampler.samples(samples):
        report.star += 1
        if IOTA @ pi_star(w @ g @ w, p) @ IOTA != pi_star(g, p):
            report.star_failures += 1
        h = w @ g
        report.star2 += 1
        if IOTA @ pi_star(w @ h, p) != pi_star(h @ w, p) @ IOTA:
            report.star2_failures += 1
        report.kernel += 1
        level2 = is_member(g, GroupId(GroupKind.GAMMA_CIRCLE_LEVEL2, Chart.TILDE, p))
        if pi_star(g, p).is_identity() != level2:
            report.kernel_failures += 1
    return report


def generated_by_images(gens, t: FiniteGroupTable | None = None) -> frozenset:
    """Subgroup of Sp(4, F2) generated by the mod-2 images of integer matrices."""
    t = t or enumerate_sp4f2()
    return t.closure(t.idx(mod2_reduce(g)) for g in gens)


def index_two_subgroups(t: FiniteGroupTable | None = None) -> list[frozenset]:
    """Index-2 subgroups among normal closures of single elements (one per conjugacy class)."""
    t = t or enumerate_sp4f2()
    found = set()
    for cls in t.conjugacy_classes():
        n = t.normal_closure(min(cls))
        if 2 * len(n) == len(t):
            found.add(n)
    return sorted(found, key=sorted)
