"""Joint Perron-Frobenius data for commuting families of nonnegative matrices.

For an irreducible family (some box sum A_F = sum_{n in F} A^n entrywise
positive) there is a unique entrywise-positive x with 1-norm 1 satisfying
A_i x = rho_i x for all i; the vector is found by power iteration on A_F and
the rho_i recovered as Rayleigh ratios.  When rho and x are rational they are
reconstructed exactly (Fraction arithmetic, verified), so downstream measure
computations can stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import degrees as dg
from .errors import (ConvergenceError, InputFormatError, NonConstantRatioError,
                     NotIrreducibleError)
from .scalars import solve_exact

POWER_TOL = 1e-12
POWER_MAX_ITER = 10 ** 6
RAYLEIGH_REL_TOL = 1e-8
RECONSTRUCT_MAX_DEN = 10 ** 4


@dataclass(frozen=True)
class MatrixFamily:
    """k commuting nonnegative square matrices over a common index set."""

    labels: tuple
    matrices: tuple  # k tuples of tuples, int or Fraction entries

    def __post_init__(self):
        n = len(self.labels)
        if not self.matrices:
            raise InputFormatError("family needs at least one matrix")
        for m in self.matrices:
            if len(m) != n or any(len(row) != n for row in m):
                raise InputFormatError(
                    f"matrix shape does not match {n} labels")
            if any(entry < 0 for row in m for entry in row):
                raise InputFormatError("matrix entries must be nonnegative")

    @classmethod
    def from_graph(cls, graph):
        return cls(tuple(graph.vertices), graph.coordinate_matrices())

    @property
    def k(self):
        return len(self.matrices)

    @property
    def size(self):
        return len(self.labels)

    def check_commuting(self, tol=0):
        """True iff all pairs commute: exactly for int/Fraction entries, or
        within tol when entries are floats."""
        for i in range(self.k):
            for j in range(i + 1, self.k):
                ab = mat_mul(self.matrices[i], self.matrices[j])
                ba = mat_mul(self.matrices[j], self.matrices[i])
                for ra, rb in zip(ab, ba):
                    for a, b in zip(ra, rb):
                        if abs(a - b) > tol:
                            return False
        return True

    def power(self, n):
        """A^n = prod A_i^{n_i} (n in N^k)."""
        if len(n) != self.k or not dg.is_nonneg(n):
            raise InputFormatError(f"bad exponent {n}")
        acc = identity(self.size)
        for i, reps in enumerate(n):
            for _ in range(reps):
                acc = mat_mul(acc, self.matrices[i])
        return acc

    def box_sum(self, bound):
        """A_F for F = {0..bound}^k, together with F as a degree list."""
        F = dg.box(dg.zero(self.k), (bound,) * self.k)
        acc = [[0] * self.size for _ in range(self.size)]
        for n in F:
            p = self.power(n)
            for r in range(self.size):
                for c in range(self.size):
                    acc[r][c] += p[r][c]
        return tuple(tuple(row) for row in acc), tuple(F)


@dataclass(frozen=True)
class PerronData:
    labels: tuple
    rho: tuple            # floats
    x: tuple              # floats, positive, 1-norm 1
    rho_exact: tuple      # Fractions, or None if reconstruction failed
    x_exact: tuple        # Fractions, or None
    F: tuple              # degrees with A_F positive
    F_bound: int
    tol: float

    @property
    def exact(self):
        return self.rho_exact is not None

    def rho_values(self):
        """Exact Fractions when available, floats otherwise."""
        return self.rho_exact if self.exact else self.rho

    def x_values(self):
        return self.x_exact if self.exact else self.x


def mat_mul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(n))
                       for j in range(n)) for i in range(n))


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n))
                 for i in range(n))


def find_positive_F(fam, bound=None):
    """Smallest N <= bound with sum_{0 <= n <= N*1} A^n entrywise positive,
    returned as (N, F, A_F); None if no N within the bound works."""
    if bound is None:
        bound = max(fam.size - 1, 0)
    for N in range(bound + 1):
        a_f, F = fam.box_sum(N)
        if all(entry > 0 for row in a_f for entry in row):
            return N, F, a_f
    return None


def power_iteration(matrix, start=None, tol=POWER_TOL,
                    max_iter=POWER_MAX_ITER):
    """1-norm-normalized power iteration on an entrywise-positive matrix.
    Deterministic: the default start is uniform."""
    a = np.asarray(matrix, dtype=float)
    n = a.shape[0]
    if start is None:
        x = np.full(n, 1.0 / n)
    else:
        x = np.asarray(start, dtype=float)
        if x.min() < 0 or x.sum() <= 0:
            raise InputFormatError("start vector must be nonnegative, nonzero")
        x = x / x.sum()
    for _ in range(max_iter):
        y = a @ x
        y = y / y.sum()
        if np.max(np.abs(y - x)) < tol:
            return tuple(float(v) for v in y)
        x = y
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations")


def _rayleigh(fam, x):
    """rho_i as (A_i x)_s / x_s, requiring the ratios constant across s."""
    rho = []
    for i in range(fam.k):
        ax = [sum(float(fam.matrices[i][r][c]) * x[c]
                  for c in range(fam.size)) for r in range(fam.size)]
        ratios = [ax[r] / x[r] for r in range(fam.size)]
        mean = sum(ratios) / len(ratios)
        spread = max(ratios) - min(ratios)
        if mean <= 0 or spread > RAYLEIGH_REL_TOL * mean:
            raise NonConstantRatioError(
                f"Rayleigh ratios for matrix {i + 1} vary by {spread:.3e}; "
                f"family is not irreducible-with-eigenvector as claimed")
        rho.append(mean)
    return tuple(rho)


def _reconstruct_exact(fam, rho, x):
    """Try to certify rational Perron data.  Candidate rho_i come from
    limit_denominator; x solves the stacked exact system (A_i - rho_i I) x= 0,
    sum x = 1.  Returns (rho_exact, x_exact) or None; a successful return is
    exactly verified, so false positives are impossible."""
    try:
        cand = [Fraction(r).limit_denominator(RECONSTRUCT_MAX_DEN)
                for r in rho]
    except (OverflowError, ValueError):
        return None
    if any(abs(float(c) - r) > 1e-6 * max(1.0, abs(r))
           for c, r in zip(cand, rho)):
        return None
    rows = []
    rhs = []
    n = fam.size
    for i in range(fam.k):
        for r in range(n):
            row = [Fraction(fam.matrices[i][r][c]) for c in range(n)]
            row[r] -= cand[i]
            rows.append(row)
            rhs.append(Fraction(0))
    rows.append([Fraction(1)] * n)
    rhs.append(Fraction(1))
    sol = solve_exact(rows, rhs)
    if sol is None or any(v <= 0 for v in sol):
        return None
    for i in range(fam.k):
        for r in range(n):
            lhs = sum(Fraction(fam.matrices[i][r][c]) * sol[c]
                      for c in range(n))
            if lhs != cand[i] * sol[r]:
                return None
    return tuple(cand), tuple(sol)


def perron_data(fam, bound=None, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """The unimodular Perron eigenvector and spectral radii of the family."""
    found = find_positive_F(fam, bound)
    if found is None:
        raise NotIrreducibleError(
            "no box sum of powers is entrywise positive within the bound; "
            "family is not irreducible")
    N, F, a_f = found
    x = power_iteration(a_f, tol=tol, max_iter=max_iter)
    rho = _rayleigh(fam, x)
    exact = _reconstruct_exact(fam, rho, x)
    rho_exact, x_exact = exact if exact else (None, None)
    return PerronData(labels=fam.labels, rho=rho, x=x,
                      rho_exact=rho_exact, x_exact=x_exact,
                      F=F, F_bound=N, tol=tol)


@dataclass(frozen=True)
class SubinvarianceReport:
    subinvariant: bool
    violations: tuple      # (matrix index, label, lhs, rhs) when not
    y_positive: bool
    lambda_dominates_rho: bool
    equals_eigenvector: bool  # None unless lambda = rho and |y|_1 = 1

    def to_dict(self):
        return {
            "subinvariant": self.subinvariant,
            "violations": [list(v) for v in self.violations],
            "y_positive": self.y_positive,
            "lambda_dominates_rho": self.lambda_dominates_rho,
            "equals_eigenvector": self.equals_eigenvector,
        }


def verify_subinvariance(fam, y, lam, pd=None, tol=1e-9):
    """Check A_i y <= lam_i y and report the structural consequences: a
    nonzero nonnegative subinvariant y must be strictly positive with every
    lam_i >= rho_i, and when lam = rho and |y|_1 = 1 it must equal the
    eigenvector."""
    if len(y) != fam.size or len(lam) != fam.k:
        raise InputFormatError("vector/lambda shapes do not match the family")
    if any(v < 0 for v in y) or not any(v > 0 for v in y):
        raise InputFormatError("y must be nonnegative and nonzero")
    if pd is None:
        pd = perron_data(fam)
    exact_in = all(isinstance(v, (int, Fraction)) for v in list(y) + list(lam))
    slack = 0 if exact_in else tol
    violations = []
    for i in range(fam.k):
        for r in range(fam.size):
            lhs = sum(fam.matrices[i][r][c] * y[c] for c in range(fam.size))
            rhs = lam[i] * y[r]
            if lhs > rhs + slack:
                violations.append((i + 1, fam.labels[r], float(lhs),
                                   float(rhs)))
    subinvariant = not violations
    y_positive = all(v > 0 for v in y)
    lam_dom = all(float(l) >= pd.rho[i] - tol for i, l in enumerate(lam))
    equals = None
    norm = sum(float(v) for v in y)
    if subinvariant and abs(norm - 1.0) <= tol and \
            all(abs(float(l) - pd.rho[i]) <= tol for i, l in enumerate(lam)):
        equals = all(abs(float(y[r]) - pd.x[r]) <= 1e-8
                     for r in range(fam.size))
    return SubinvarianceReport(subinvariant=subinvariant,
                               violations=tuple(violations),
                               y_positive=y_positive,
                               lambda_dominates_rho=lam_dom,
                               equals_eigenvector=equals)


@dataclass(frozen=True)
class SpectralCheckReport:
    n: tuple
    oracle_power: float
    predicted_power: float
    power_error: float
    oracle_box: float
    predicted_box: float
    box_error: float


def spectral_radius_power_check(fam, n, oracle, pd=None):
    """Compare an independent spectral-radius oracle against the product and
    box-sum predictions rho(A^n) = prod rho_i^{n_i} and
    rho(A_F) = sum_{m in F} prod rho_i^{m_i}."""
    if pd is None:
        pd = perron_data(fam)
    a_n = fam.power(n)
    got_power = float(oracle(a_n))
    want_power = 1.0
    for r, e in zip(pd.rho, n):
        want_power *= r ** e
    a_f, _ = fam.box_sum(pd.F_bound)
    got_box = float(oracle(a_f))
    want_box = 0.0
    for m in pd.F:
        term = 1.0
        for r, e in zip(pd.rho, m):
            term *= r ** e
        want_box += term
    return SpectralCheckReport(
        n=tuple(n),
        oracle_power=got_power, predicted_power=want_power,
        power_error=abs(got_power - want_power),
        oracle_box=got_box, predicted_box=want_box,
        box_error=abs(got_box - want_box))
