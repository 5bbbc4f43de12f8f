"""Second implementations used only as test oracles.

They are written to share as little code as possible with the package: plain
dicts, different loop orders, wider windows.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction
from math import comb


def f_table_reversed(qmax: int, window: int | None = None) -> dict[tuple[int, int], int]:
    """f(n, l) from the four-factor product, multiplied in reverse order with a wide window."""
    window = window if window is not None else 4 * qmax + 12
    factors = []
    for n in range(1, qmax + 2):
        factors += [(n - 1, 1, 1), (n, -1, 1), (2 * n - 1, 2, -1), (2 * n - 1, -2, -1)]
    prod = {(0, 0): 1}
    for m, l, sign in reversed(factors):
        if m > qmax:
            continue
        new = dict(prod)
        for (a, b), c in prod.items():
            if a + m <= qmax:
                key = (a + m, b + l)
                new[key] = new.get(key, 0) + sign * c
        prod = {k: v for k, v in new.items() if v}
    sq = defaultdict(int)
    for (a1, b1), c1 in prod.items():
        for (a2, b2), c2 in prod.items():
            if a1 + a2 <= qmax:
                sq[(a1 + a2, b1 + b2 - 1)] += c1 * c2
    out = {k: v for k, v in sq.items() if v}
    assert all(abs(l) < window for _, l in out)
    return out


def delta1_naive(cap: int, f) -> dict[tuple[int, int, int], int]:
    """Delta_1 by direct multiplication of (a, b, c)-keyed dicts, factor by factor."""
    series = {(1, 1, 1): 1}
    depth = (cap - 2) // 6
    for m in range(depth, -1, -1):
        for n in range(depth - m, -1, -1):
            for (nm, l), e in sorted(f.items()):
                if nm != n * m or (n == m == 0 and l >= 0):
                    continue
                step = (6 * n, 2 * l, 6 * m)
                kmax = depth if n + m == 0 else depth // (n + m)
                # (1 - X)^e = sum_k binom(e, k) (-X)^k, generalized binomial for e < 0
                terms = [(k, (-1) ** k * _gbinom(e, k)) for k in range(kmax + 1)]
                new = defaultdict(int)
                for (a, b, c), v in series.items():
                    for k, t in terms:
                        if t == 0:
                            continue
                        key = (a + k * step[0], b + k * step[1], c + k * step[2])
                        if key[0] + key[2] <= cap:
                            new[key] += v * t
                series = {k: v for k, v in new.items() if v}
    return series


def _gbinom(e: int, k: int) -> int:
    if e >= 0:
        return comb(e, k)
    out = Fraction(1)
    for j in range(k):
        out *= Fraction(e - j, j + 1)
    assert out.denominator == 1
    return int(out)


def eta_theta_slice(qmax: int) -> dict[tuple[int, int], int]:
    """Coefficients of q^-1/6 eta(tau) theta(tau, z) keyed by (N, 2l + 1).

    eta from Euler's pentagonal series, theta from its defining sum; the pair
    should equal the s^(1/2) part of Delta_1.
    """
    eta = defaultdict(int)
    k = 0
    while True:
        hit = False
        for j in (k, -k) if k else (0,):
            e = j * (3 * j - 1) // 2
            if e <= qmax:
                eta[e] += (-1) ** (j % 2)
                hit = True
        if not hit and k > 0:
            break
        k += 1
    theta = defaultdict(int)
    for m in range(-2 * qmax - 4, 2 * qmax + 4):
        odd = 2 * m + 1
        e = (odd * odd - 1) // 8
        if e <= qmax:
            theta[(e, odd)] += (-1) ** (m % 2)
    out = defaultdict(int)
    for e1, c1 in eta.items():
        for (e2, b), c2 in theta.items():
            if e1 + e2 <= qmax:
                out[(e1 + e2, b)] += c1 * c2
    return {k: v for k, v in out.items() if v}


def _minus_forms():
    # Q(x) = x1 x3 + x2 x4 + a.x polarises to J; Arf invariant a1 a3 + a2 a4
    return [a for a in itertools.product((0, 1), repeat=4) if (a[0] * a[2] + a[1] * a[3]) % 2]


def _form_values(a):
    vals = []
    for x in itertools.product((0, 1), repeat=4):
        vals.append((x[0] * x[2] + x[1] * x[3] + sum(i * j for i, j in zip(a, x))) % 2)
    return tuple(vals)


def s6_sign(rows) -> int:
    """Sign of the permutation an Sp(4, F2) matrix induces on the six
    quadratic forms of Arf invariant 1 (the exceptional S6 isomorphism)."""
    forms = _minus_forms()
    table = {_form_values(a): k for k, a in enumerate(forms)}
    vecs = list(itertools.product((0, 1), repeat=4))

    def apply(x):
        return tuple(sum(rows[i][j] * x[j] for j in range(4)) % 2 for i in range(4))

    perm = []
    for a in forms:
        q = dict(zip(vecs, _form_values(a)))
        perm.append(table[tuple(q[apply(x)] for x in vecs)])
    sign, seen = 1, set()
    for s in range(6):
        if s in seen:
            continue
        n, k = 0, s
        while k not in seen:
            seen.add(k)
            k = perm[k]
            n += 1
        sign *= (-1) ** (n - 1)
    return sign
