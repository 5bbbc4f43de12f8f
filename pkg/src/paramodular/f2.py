"""4x4 matrices over the field with two elements, packed into 16 bits.

Bit ``4*i + j`` holds entry ``(i, j)``; row ``i`` is the nibble ``bits >> 4*i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True, order=True)
class F2Matrix:
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < 1 << 16:
            raise ValueError(f"F2Matrix bits out of range: {self.bits}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> F2Matrix:
        bits = 0
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                if x % 2:
                    bits |= 1 << (4 * i + j)
        return cls(bits)

    @classmethod
    def identity(cls) -> F2Matrix:
        return cls(0b1000_0100_0010_0001)

    @classmethod
    def block(cls, a, b, c, d) -> F2Matrix:
        """Assemble from four 2x2 blocks given as nested sequences."""
        rows = [list(a[0]) + list(b[0]), list(a[1]) + list(b[1]),
                list(c[0]) + list(d[0]), list(c[1]) + list(d[1])]
        return cls.from_rows(rows)

    def row(self, i: int) -> int:
        return (self.bits >> (4 * i)) & 0xF

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple((self.row(i) >> j) & 1 for j in range(4)) for i in range(4))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.bits >> (4 * i + j)) & 1

    def __matmul__(self, other: F2Matrix) -> F2Matrix:
        out = 0
        for i in range(4):
            r = self.row(i)
            acc = 0
            for j in range(4):
                if (r >> j) & 1:
                    acc ^= other.row(j)
            out |= acc << (4 * i)
        return F2Matrix(out)

    def transpose(self) -> F2Matrix:
        return F2Matrix.from_rows([[self[j, i] for j in range(4)] for i in range(4)])

    def blocks(self):
        """Return the 2x2 blocks (A, B, C, D) as tuples of row tuples."""
        r = self.rows
        return (
            (r[0][:2], r[1][:2]),
            (r[0][2:], r[1][2:]),
            (r[2][:2], r[3][:2]),
            (r[2][2:], r[3][2:]),
        )

    def is_identity(self) -> bool:
        return self == F2Matrix.identity()

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.rows)


def product(ms: Iterable[F2Matrix]) -> F2Matrix:
    out = F2Matrix.identity()
    for m in ms:
        out = out @ m
    return out


#: the block double swap; image of the Fricke element under the extended reduction
IOTA = F2Matrix.from_rows([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])

#: standard alternating form; every Lambda_p with p odd reduces to it mod 2
J2 = F2Matrix.from_rows([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
