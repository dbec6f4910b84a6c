"""Exact scalar helpers: Gaussian rationals and small Fraction linear algebra.

The KMS-state formulas take values in Q[i] whenever the Perron data is rational
and the character is a quarter turn; QQi keeps those computations exact.  The
row-reduction solver backs the exact reconstruction of Perron eigenvectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class QQi:
    """A Gaussian rational re + im*i with Fraction components."""

    re: Fraction
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value):
        """Coerce an int/Fraction/QQi to QQi.  Floats are refused: mixing
        modes is a caller bug, not something to mask silently."""
        if isinstance(value, QQi):
            return value
        if isinstance(value, (int, Fraction)):
            return QQi(Fraction(value))
        raise TypeError(f"cannot coerce {type(value).__name__} to QQi")

    # i**t for t mod 4; the only roots of unity available exactly.
    @staticmethod
    def quarter_turn(t):
        t %= 4
        re = (1, 0, -1, 0)[t]
        im = (0, 1, 0, -1)[t]
        return QQi(Fraction(re), Fraction(im))

    def __add__(self, other):
        other = QQi.of(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-QQi.of(other))

    def __rsub__(self, other):
        return QQi.of(other) + (-self)

    def __mul__(self, other):
        other = QQi.of(other)
        return QQi(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conjugate(self):
        return QQi(self.re, -self.im)

    def abs2(self):
        """|z|^2, exact."""
        return self.re * self.re + self.im * self.im

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QQi(Fraction(other))
        if not isinstance(other, QQi):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        return f"({self.re}+{self.im}i)"


def format_fraction(value):
    """Canonical string for an exact rational: "p" or "p/q"."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def solve_exact(rows, rhs):
    """Solve an (overdetermined) linear system exactly over Fraction.

    rows: list of coefficient rows, rhs: list of right-hand values.  Returns
    the unique solution as a tuple of Fractions, or None if the system is
    inconsistent or underdetermined.
    """
    m = [[Fraction(c) for c in row] + [Fraction(b)]
         for row, b in zip(rows, rhs)]
    nrow = len(m)
    ncol = len(m[0]) - 1 if m else 0
    pivots = []
    r = 0
    for c in range(ncol):
        pick = next((i for i in range(r, nrow) if m[i][c] != 0), None)
        if pick is None:
            continue
        m[r], m[pick] = m[pick], m[r]
        piv = m[r][c]
        m[r] = [v / piv for v in m[r]]
        for i in range(nrow):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [v - f * w for v, w in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrow:
            break
    # Inconsistent if any zero row has nonzero rhs.
    for i in range(r, nrow):
        if m[i][ncol] != 0:
            return None
    if len(pivots) < ncol:
        return None  # underdetermined
    sol = [Fraction(0)] * ncol
    for i, c in enumerate(pivots):
        sol[c] = m[i][ncol]
    return tuple(sol)
