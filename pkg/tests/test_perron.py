"""Joint Perron eigendata for the commuting adjacency family."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from kgraphs import degrees as dg
from kgraphs.errors import InputFormatError
from kgraphs.perron import (MatrixFamily, find_positive_F, perron_data,
                            power_iteration, spectral_radius_power_check,
                            verify_subinvariance)

PHI = (1 + math.sqrt(5)) / 2


def srad(mat):
    """Independent spectral-radius oracle."""
    return max(abs(z) for z in np.linalg.eigvals(np.array(mat, dtype=float)))


def fam_of(graphs, name):
    return MatrixFamily.from_graph(graphs[name])


def test_commuting_family(graphs):
    for g in graphs.values():
        fam = MatrixFamily.from_graph(g)
        assert fam.check_commuting()


def test_exact_values(perron):
    assert perron["b2"].rho_exact == (Fraction(2),)
    assert perron["b2"].x_exact == (Fraction(1),)
    assert perron["pullback-b2"].rho_exact == (Fraction(2), Fraction(2))
    assert perron["pullback-b2"].x_exact == (Fraction(1),)
    assert perron["product-b2-c2"].rho_exact == (Fraction(2), Fraction(1))
    assert perron["product-b2-c2"].x_exact == (Fraction(1, 2),
                                               Fraction(1, 2))


def test_fib_floats(perron):
    pd = perron["fib"]
    assert pd.rho_exact is None
    assert pd.rho[0] == pytest.approx(PHI, abs=1e-9)
    assert pd.x[0] == pytest.approx(PHI / (1 + PHI), abs=1e-9)
    assert pd.x[1] == pytest.approx(1 / (1 + PHI), abs=1e-9)
    assert sum(pd.x) == pytest.approx(1.0, abs=1e-12)


def test_eigen_equation(graphs, perron):
    for name, g in graphs.items():
        pd = perron[name]
        fam = MatrixFamily.from_graph(g)
        for i, mat in enumerate(fam.matrices):
            for r in range(fam.size):
                lhs = sum(mat[r][c] * pd.x[c] for c in range(fam.size))
                assert lhs == pytest.approx(pd.rho[i] * pd.x[r], abs=1e-9)


def test_oracle_agreement(graphs, perron):
    for name, g in graphs.items():
        fam = MatrixFamily.from_graph(g)
        pd = perron[name]
        for i, mat in enumerate(fam.matrices):
            assert srad(mat) == pytest.approx(pd.rho[i], abs=1e-9)


def test_power_iteration_start_independent(graphs, perron):
    rng = random.Random(7)
    fam = fam_of(graphs, "fib")
    want = perron["fib"]
    mat = fam.matrices[0]
    for _ in range(10):
        start = [rng.uniform(0.1, 1.0) for _ in range(fam.size)]
        x = power_iteration(mat, start=start)
        for a, b in zip(x, want.x):
            assert a == pytest.approx(b, abs=1e-9)
        rho = sum(mat[0][c] * x[c] for c in range(fam.size)) / x[0]
        assert rho == pytest.approx(want.rho[0], abs=1e-9)


def test_positive_block(graphs, perron):
    for name, g in graphs.items():
        fam = MatrixFamily.from_graph(g)
        pd = perron[name]
        found = find_positive_F(fam, bound=pd.F_bound)
        assert found is not None
        _, F, a_f = found[0], found[1], found[2]
        assert tuple(F) == tuple(pd.F)
        assert all(entry > 0 for row in a_f for entry in row)


def test_spectral_power_checks(graphs, perron):
    for name, g in graphs.items():
        fam = MatrixFamily.from_graph(g)
        pd = perron[name]
        for n in dg.degrees_below((2,) * fam.k):
            rep = spectral_radius_power_check(fam, n, srad, pd=pd)
            assert rep.power_error <= 1e-9
            assert rep.box_error <= 1e-9


def test_subinvariance_randomized(graphs, perron):
    rng = random.Random(11)
    for name in ("fib", "product-b2-c2"):
        fam = fam_of(graphs, name)
        pd = perron[name]
        for _ in range(50):
            # random positive y with lambda picked entrywise-subinvariant
            y = [rng.uniform(0.2, 1.0) for _ in range(fam.size)]
            lam = []
            for mat in fam.matrices:
                worst = max(sum(mat[r][c] * y[c] for c in range(fam.size))
                            / y[r] for r in range(fam.size))
                lam.append(worst * (1 + rng.uniform(0, 0.5)))
            rep = verify_subinvariance(fam, y, lam, pd=pd)
            assert rep.subinvariant
            assert rep.y_positive
            assert rep.lambda_dominates_rho
        for _ in range(50):
            # shrinking lambda below the worst row ratio must be caught
            y = [rng.uniform(0.2, 1.0) for _ in range(fam.size)]
            lam = [pd.rho[i] * rng.uniform(0.01, 0.5)
                   for i in range(fam.k)]
            rep = verify_subinvariance(fam, y, lam, pd=pd)
            assert not rep.subinvariant or rep.lambda_dominates_rho


def test_subinvariant_eigenvector_detection(graphs, perron):
    pd = perron["product-b2-c2"]
    fam = fam_of(graphs, "product-b2-c2")
    rep = verify_subinvariance(fam, list(pd.x_exact), list(pd.rho_exact),
                               pd=pd)
    assert rep.subinvariant and rep.equals_eigenvector


def test_input_validation(graphs):
    fam = fam_of(graphs, "fib")
    with pytest.raises(InputFormatError):
        verify_subinvariance(fam, [1.0], [2.0])
    with pytest.raises(InputFormatError):
        verify_subinvariance(fam, [0, 0], [2.0])
