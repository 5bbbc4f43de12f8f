"""Bivariate truncated Laurent series in (q, r) and the coefficient table f(n, l).

``f`` is defined by

    sum f(n, l) q^n r^l = r^-1 * (prod_{n>=1} (1 + q^(n-1) r)(1 + q^n r^-1)(1 - q^(2n-1) r^2)(1 - q^(2n-1) r^-2))^2
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import FTableTooSmall, WindowOverflow


@dataclass(frozen=True)
class BiSeries:
    """Exact integer series in q (truncated above ``qmax``) and r (Laurent)."""

    coeffs: Mapping[tuple[int, int], int]
    qmax: int
    lcap: int | None = None

    def __post_init__(self):
        clean = {}
        for (n, l), c in self.coeffs.items():
            if n > self.qmax or c == 0:
                continue
            if self.lcap is not None and abs(l) > self.lcap:
                raise WindowOverflow(f"r-exponent {l} exceeds the window |l| <= {self.lcap}")
            clean[(int(n), int(l))] = int(c)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def one(cls, qmax: int, lcap: int | None = None) -> BiSeries:
        return cls({(0, 0): 1}, qmax, lcap)

    @classmethod
    def binomial(cls, n: int, l: int, sign: int, qmax: int, lcap: int | None = None) -> BiSeries:
        """``1 + sign * q^n r^l``."""
        return cls({(0, 0): 1, (n, l): sign} if (n, l) != (0, 0) else {(0, 0): 1 + sign}, qmax, lcap)

    @property
    def lmin(self) -> int:
        return min((l for _, l in self.coeffs), default=0)

    @property
    def lmax(self) -> int:
        return max((l for _, l in self.coeffs), default=0)

    def shift_r(self, k: int) -> BiSeries:
        return BiSeries({(n, l + k): c for (n, l), c in self.coeffs.items()}, self.qmax, self.lcap)

    def __mul__(self, other: BiSeries) -> BiSeries:
        return bi_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self.qmax == other.qmax and self.coeffs == other.coeffs


def bi_mul(a: BiSeries, b: BiSeries) -> BiSeries:
    """Truncated product; the result keeps the smaller q-order and the tighter window."""
    qmax = min(a.qmax, b.qmax)
    caps = [c for c in (a.lcap, b.lcap) if c is not None]
    lcap = min(caps) if caps else None
    out: dict[tuple[int, int], int] = defaultdict(int)
    for (n1, l1), c1 in a.coeffs.items():
        for (n2, l2), c2 in b.coeffs.items():
            n = n1 + n2
            if n <= qmax:
                out[(n, l1 + l2)] += c1 * c2
    return BiSeries(out, qmax, lcap)


@dataclass(frozen=True)
class FTable:
    entries: Mapping[tuple[int, int], int]
    qmax: int

    def __getitem__(self, nl: tuple[int, int]) -> int:
        n, l = nl
        if n < 0:
            return 0
        if n > self.qmax:
            raise FTableTooSmall(f"f({n}, {l}) requested but the table stops at n = {self.qmax}")
        return self.entries.get((n, l), 0)

    def row(self, n: int) -> dict[int, int]:
        if n > self.qmax:
            raise FTableTooSmall(f"row {n} requested but the table stops at n = {self.qmax}")
        return {l: c for (m, l), c in self.entries.items() if m == n}

    def support_excess(self) -> int:
        """Largest value of ``l^2 - 12 n`` over the nonzero entries."""
        return max(l * l - 12 * n for n, l in self.entries)

    def dumps(self) -> str:
        lines = [f"ftable qmax={self.qmax}"]
        lines += [f"{n} {l} {c}" for (n, l), c in sorted(self.entries.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> FTable:
        lines = text.strip().splitlines()
        head = lines[0].split()
        if head[0] != "ftable" or not head[1].startswith("qmax="):
            raise ValueError("not an ftable file")
        entries = {}
        for line in lines[1:]:
            n, l, c = map(int, line.split())
            entries[(n, l)] = c
        return cls(entries, int(head[1][5:]))

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> FTable:
        return cls.loads(Path(path).read_text())


def expand_f_table(qmax: int) -> FTable:
    if qmax < 0:
        raise ValueError("qmax must be >= 0")
    # shifted by r^-1 at the end, so the product itself may reach 2*qmax + 3 before the shift
    lcap = 2 * qmax + 4
    prod = BiSeries.one(qmax, lcap)
    for n in range(1, qmax + 2):
        for m, l, sign in ((n - 1, 1, 1), (n, -1, 1), (2 * n - 1, 2, -1), (2 * n - 1, -2, -1)):
            if m <= qmax:
                prod = bi_mul(prod, BiSeries.binomial(m, l, sign, qmax, lcap))
    full = bi_mul(prod, prod).shift_r(-1)
    # audit: the window never reached its hard edge
    if full.coeffs and max(abs(full.lmin), abs(full.lmax)) >= lcap:
        raise WindowOverflow("f-table support touches the window boundary")
    return FTable(dict(full.coeffs), qmax)


def _theta_rows(qmax: int, scale: int) -> dict[int, dict[int, int]]:
    # q^-1/8 theta(tau, scale * z) in x = r^(1/2):
    #   sum_k (-1)^k q^(((2k+1)^2 - 1) / 8) x^(scale (2k+1))
    rows: dict[int, dict[int, int]] = defaultdict(dict)
    k = 0
    while (2 * k + 1) ** 2 - 1 <= 8 * qmax:
        for m in (k, -k - 1):
            odd = 2 * m + 1
            rows[(odd * odd - 1) // 8][scale * odd] = (-1) ** (m % 2)
        k += 1
    return rows


def _laurent_mul(a: Mapping[int, int], b: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = defaultdict(int)
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] += c1 * c2
    return out


def _q_square(rows, qmax: int) -> list[dict[int, int]]:
    out = [defaultdict(int) for _ in range(qmax + 1)]
    for n1, a in rows.items():
        for n2, b in rows.items():
            if n1 + n2 <= qmax:
                for e, c in _laurent_mul(a, b).items():
                    out[n1 + n2][e] += c
    return out


def theta_quotient_table(qmax: int) -> FTable:
    """f(n, l) as coefficients of ``(theta(tau, 2z) / theta(tau, z))^2``.

    An independent route to :func:`expand_f_table` (the two agree by the Jacobi
    triple product): solve ``phi * theta(z)^2 = theta(2z)^2`` one q-degree at a
    time, dividing exactly by the q^0 part ``(x - 1/x)^2`` with sympy.
    """
    import sympy

    if qmax < 0:
        raise ValueError("qmax must be >= 0")
    x = sympy.symbols("x")
    num = _q_square(_theta_rows(qmax, 2), qmax)
    den = _q_square(_theta_rows(qmax, 1), qmax)

    def to_poly(d: Mapping[int, int], shift: int):
        return sympy.Poly(sum(c * x ** (e + shift) for e, c in d.items() if c) or 0, x)

    phi: list[dict[int, int]] = []
    for n in range(qmax + 1):
        rest = defaultdict(int, num[n])
        for k in range(n):
            for e, c in _laurent_mul(phi[k], den[n - k]).items():
                rest[e] -= c
        shift = -min([e for e, c in rest.items() if c] + [0])
        quo, rem = sympy.div(to_poly(rest, shift + 2), to_poly(den[0], 2), x)
        if not rem.is_zero:
            raise ArithmeticError(f"theta quotient is not a Laurent polynomial at q^{n}")
        phi.append({deg - shift: int(c) for (deg,), c in quo.terms() if c})
    entries = {}
    for n, row in enumerate(phi):
        for e, c in row.items():
            if e % 2:
                raise ArithmeticError(f"odd power of r^(1/2) at q^{n}")
            entries[(n, e // 2)] = c
    return FTable(entries, qmax)
