"""Exact 4x4 matrices with entries in Z (or Q) times an optional 1/sqrt(p).

Two charts are used throughout:

* the *tilde* chart, integer matrices preserving ``Lambda_p`` (class
  :class:`ScaledSymplecticMatrix`);
* the *untilde* chart, rational matrices preserving the standard form ``J``
  (class :class:`RationalMatrix`).

They are related by conjugation with ``R_p = diag(1, 1, 1, p)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np
from sympy import isprime

from .errors import (ChartMismatch, InvalidPrime, NonIntegral, NotConjugatable,
                     NotSymplectic, ScaleOverflow)
from .f2 import F2Matrix

Entry = Union[int, Fraction]


def check_prime(p) -> int:
    """Return ``p`` as int, raising :class:`InvalidPrime` unless it is an odd prime."""
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise InvalidPrime(f"p must be an integer, got {p!r}")
    p = int(p)
    if p < 3 or not isprime(p):
        raise InvalidPrime(f"p must be an odd prime >= 3, got {p}")
    return p


def _flatten(entries) -> tuple:
    if isinstance(entries, np.ndarray):
        entries = entries.tolist()
    flat = []
    for row in entries:
        if isinstance(row, (list, tuple)):
            flat.extend(row)
        else:
            flat.append(row)
    if len(flat) != 16:
        raise ValueError(f"expected 16 entries, got {len(flat)}")
    return tuple(flat)


def _mul(a: Sequence, b: Sequence) -> tuple:
    return tuple(
        a[4 * i] * b[j] + a[4 * i + 1] * b[4 + j] + a[4 * i + 2] * b[8 + j] + a[4 * i + 3] * b[12 + j]
        for i in range(4)
        for j in range(4)
    )


def _transpose(a: Sequence) -> tuple:
    return tuple(a[4 * j + i] for i in range(4) for j in range(4))


def _identity() -> tuple:
    return tuple(int(i == j) for i in range(4) for j in range(4))


def _rows(a: Sequence) -> tuple:
    return tuple(tuple(a[4 * i:4 * i + 4]) for i in range(4))


class FormKind(enum.Enum):
    STANDARD_J = "J"
    LAMBDA_P = "Lambda_p"


@dataclass(frozen=True)
class SymplecticForm:
    kind: FormKind
    p: int | None = None

    def __post_init__(self):
        if self.kind is FormKind.LAMBDA_P:
            object.__setattr__(self, "p", check_prime(self.p))

    @classmethod
    def standard(cls) -> SymplecticForm:
        return cls(FormKind.STANDARD_J)

    @classmethod
    def lambda_p(cls, p: int) -> SymplecticForm:
        return cls(FormKind.LAMBDA_P, p)

    def matrix(self) -> tuple:
        e = 1 if self.kind is FormKind.STANDARD_J else self.p
        return (0, 0, 1, 0,
                0, 0, 0, e,
                -1, 0, 0, 0,
                0, -e, 0, 0)

    def inverse_matrix(self) -> tuple:
        e = 1 if self.kind is FormKind.STANDARD_J else self.p
        return (0, 0, -1, 0,
                0, 0, 0, Fraction(-1, e),
                1, 0, 0, 0,
                0, Fraction(1, e), 0, 0)


@dataclass(frozen=True)
class ScaledSymplecticMatrix:
    """Integer matrix ``M`` standing for the real matrix ``M / sqrt(p)**scale_exp``."""

    entries: tuple
    scale_exp: int
    p: int

    def __post_init__(self):
        flat = _flatten(self.entries)
        try:
            ints = tuple(_as_int(x) for x in flat)
        except NonIntegral as exc:
            raise NonIntegral(f"ScaledSymplecticMatrix needs integer entries: {exc}") from None
        object.__setattr__(self, "entries", ints)
        object.__setattr__(self, "p", check_prime(self.p))
        if self.scale_exp not in (0, 1):
            raise ValueError(f"scale_exp must be 0 or 1, got {self.scale_exp}")
        if self.scale_exp == 1 and all(x % self.p == 0 for x in ints):
            raise ValueError("non-canonical: scale_exp 1 with every entry divisible by p")

    @classmethod
    def from_rows(cls, rows, p: int, scale_exp: int = 0) -> ScaledSymplecticMatrix:
        return cls(_flatten(rows), scale_exp, p)

    @classmethod
    def identity(cls, p: int) -> ScaledSymplecticMatrix:
        return cls(_identity(), 0, p)

    @property
    def rows(self) -> tuple:
        return _rows(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[4 * i + j]

    def __matmul__(self, other):
        return mat_mul(self, other)

    def as_float(self) -> np.ndarray:
        m = np.array(self.entries, dtype=float).reshape(4, 4)
        return m / math.sqrt(self.p) ** self.scale_exp

    def __str__(self) -> str:
        return format_matrix(self)


@dataclass(frozen=True)
class RationalMatrix:
    """Rational matrix ``M`` standing for ``M / sqrt(p)**scale_exp``; ``p`` is needed only when scaled."""

    entries: tuple
    scale_exp: int = 0
    p: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(Fraction(x) for x in _flatten(self.entries)))
        if self.scale_exp not in (0, 1):
            raise ValueError(f"scale_exp must be 0 or 1, got {self.scale_exp}")
        if self.p is not None:
            object.__setattr__(self, "p", check_prime(self.p))
        elif self.scale_exp == 1:
            raise ValueError("a sqrt(p)-scaled RationalMatrix needs p")

    @classmethod
    def from_rows(cls, rows, scale_exp: int = 0, p: int | None = None) -> RationalMatrix:
        return cls(_flatten(rows), scale_exp, p)

    @classmethod
    def identity(cls) -> RationalMatrix:
        return cls(_identity())

    @property
    def rows(self) -> tuple:
        return _rows(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[4 * i + j]

    def __matmul__(self, other):
        return mat_mul(self, other)

    def as_float(self) -> np.ndarray:
        m = np.array([float(x) for x in self.entries]).reshape(4, 4)
        if self.scale_exp:
            m /= math.sqrt(self.p)
        return m

    def __str__(self) -> str:
        return format_matrix(self)


def _as_int(x) -> int:
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    f = Fraction(x)
    if f.denominator != 1:
        raise NonIntegral(f"{x} is not an integer")
    return f.numerator


def _common_p(a, b) -> int | None:
    if a.p is not None and b.p is not None and a.p != b.p:
        raise ValueError(f"prime mismatch: {a.p} != {b.p}")
    return a.p if a.p is not None else b.p


def mat_mul(a, b):
    """Exact product of two matrices from the same chart."""
    if isinstance(a, ScaledSymplecticMatrix) and isinstance(b, ScaledSymplecticMatrix):
        p = _common_p(a, b)
        prod = _mul(a.entries, b.entries)
        scale = a.scale_exp + b.scale_exp
        if scale == 2:
            if any(x % p for x in prod):
                raise ScaleOverflow("integer product of two 1/sqrt(p) matrices is not divisible by p")
            prod = tuple(x // p for x in prod)
            scale = 0
        return ScaledSymplecticMatrix(prod, scale, p)
    if isinstance(a, RationalMatrix) and isinstance(b, RationalMatrix):
        scale = a.scale_exp + b.scale_exp
        p = _common_p(a, b) if scale else (a.p or b.p)
        prod = _mul(a.entries, b.entries)
        if scale == 2:
            prod = tuple(x / p for x in prod)
            scale = 0
        return RationalMatrix(prod, scale, p)
    raise ChartMismatch(f"cannot multiply {type(a).__name__} by {type(b).__name__}")


def _form_of(g, form: SymplecticForm) -> tuple:
    if form.kind is FormKind.LAMBDA_P and g.p is not None and g.p != form.p:
        raise ValueError(f"prime mismatch between matrix ({g.p}) and form ({form.p})")
    return form.matrix()


def symplectic_check(g, form: SymplecticForm) -> bool:
    """True iff ``g Phi g^T = Phi`` for the real matrix represented by ``g``."""
    phi = _form_of(g, form)
    lhs = _mul(_mul(g.entries, phi), _transpose(g.entries))
    factor = g.p if g.scale_exp else 1
    return all(x == factor * y for x, y in zip(lhs, phi))


def symplectic_inverse(g, form: SymplecticForm):
    """Inverse via ``g^-1 = Phi g^T Phi^-1``."""
    if not symplectic_check(g, form):
        raise NotSymplectic(f"matrix does not preserve the {form.kind.value} form")
    inv = _mul(_mul(form.matrix(), _transpose(g.entries)), form.inverse_matrix())
    if isinstance(g, ScaledSymplecticMatrix):
        return ScaledSymplecticMatrix(tuple(_as_int(x) for x in inv), g.scale_exp, g.p)
    return RationalMatrix(inv, g.scale_exp, g.p)


def mod2_reduce(g: ScaledSymplecticMatrix) -> F2Matrix:
    if not isinstance(g, ScaledSymplecticMatrix):
        raise ChartMismatch("mod 2 reduction is defined on the integer (tilde) chart")
    if g.scale_exp:
        raise NonIntegral("cannot reduce a 1/sqrt(p)-scaled matrix mod 2")
    return F2Matrix.from_rows(g.rows)


def _rp_diag(p: int) -> tuple:
    return (1, 1, 1, p)


def rational_to_tilde(g: RationalMatrix, p: int) -> ScaledSymplecticMatrix:
    """Conjugate ``R_p g R_p^-1`` into the integer chart."""
    p = check_prime(p)
    if g.scale_exp and g.p != p:
        raise NotConjugatable(f"matrix is scaled by sqrt({g.p}), not sqrt({p})")
    r = _rp_diag(p)
    out = []
    for i in range(4):
        for j in range(4):
            x = g.entries[4 * i + j] * r[i] / r[j]
            if x.denominator != 1:
                raise NotConjugatable(f"entry ({i + 1},{j + 1}) becomes {x} after conjugation by R_{p}")
            out.append(x.numerator)
    try:
        return ScaledSymplecticMatrix(tuple(out), g.scale_exp, p)
    except ValueError as exc:
        raise NotConjugatable(str(exc)) from None


def tilde_to_rational(g: ScaledSymplecticMatrix) -> RationalMatrix:
    """Conjugate back: ``R_p^-1 g R_p``."""
    r = _rp_diag(g.p)
    out = tuple(Fraction(g.entries[4 * i + j] * r[j], r[i]) for i in range(4) for j in range(4))
    return RationalMatrix(out, g.scale_exp, g.p)


def format_matrix(g) -> str:
    """16 row-major entries separated by spaces, then ``/sqrt(p)`` if scaled."""
    text = " ".join(str(x) for x in g.entries)
    if g.scale_exp:
        text += f" /sqrt({g.p})"
    return text


def parse_matrix(text: str, p: int | None = None) -> ScaledSymplecticMatrix:
    tokens = text.split()
    scale_exp = 0
    if tokens and tokens[-1].startswith("/sqrt(") and tokens[-1].endswith(")"):
        q = int(tokens.pop()[len("/sqrt("):-1])
        if p is not None and p != q:
            raise ValueError(f"literal is scaled by sqrt({q}) but p={p} was requested")
        p, scale_exp = q, 1
    if p is None:
        raise ValueError("p is required for an unscaled literal")
    if len(tokens) != 16:
        raise ValueError(f"expected 16 integers, got {len(tokens)}")
    return ScaledSymplecticMatrix(tuple(int(t) for t in tokens), scale_exp, p)
