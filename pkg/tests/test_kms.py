"""Span-term algebra and the equilibrium-state family."""

import random
from fractions import Fraction

import pytest

from kgraphs import degrees as dg
from kgraphs.errors import InputFormatError, NotPeriodicError
from kgraphs.kms import (AlgebraElement, SpanTerm, StateSpec, parse_state)
from kgraphs.scalars import QQi

F = Fraction


def span(g, mu_lit, nu_lit, coeff=1):
    return AlgebraElement.span(g, g.parse_path(mu_lit),
                               g.parse_path(nu_lit), coeff)


def random_elements(g, seed, count, max_deg=None):
    """Seeded random elements with small exact coefficients."""
    rng = random.Random(seed)
    if max_deg is None:
        max_deg = (1,) * g.k
    paths = [p for n in dg.degrees_below(max_deg)
             for p in g.paths_of_degree(n)]
    out = []
    for _ in range(count):
        elem = AlgebraElement.zero(g)
        for _ in range(rng.randint(1, 3)):
            mu = rng.choice(paths)
            partners = [p for p in paths if p.source == mu.source]
            nu = rng.choice(partners)
            coeff = QQi(F(rng.randint(-2, 2)), F(rng.randint(-2, 2)))
            elem = elem + AlgebraElement.span(g, mu, nu, coeff)
        out.append(elem)
    return out


def test_span_needs_common_source(fibg):
    with pytest.raises(InputFormatError):
        AlgebraElement.span(fibg, fibg.parse_path("euu"),
                            fibg.parse_path("euv"))


def test_partial_isometry_relation(b2g):
    e1 = span(b2g, "e1", "e2")
    e2 = span(b2g, "e2", "e1")
    assert (e1 * e2).equals(span(b2g, "e1", "e1"))
    # s*_e2 s_e1 = 0: different edges never share an extension in degree 1
    assert (span(b2g, "v", "e2") * span(b2g, "e1", "v")).is_zero()


def test_vertex_resolution(graphs):
    # p_v = sum over color-i edges at v of s_e s*_e, for every color
    for g in graphs.values():
        for v in g.vertices:
            p = AlgebraElement.vertex_projection(g, v)
            for color in range(1, g.k + 1):
                total = AlgebraElement.zero(g)
                for e in g.paths_of_degree(dg.unit(g.k, color), range=v):
                    total = total + AlgebraElement.span(g, e, e)
                assert p.equals(total)


def test_identity_element(pb2g):
    one = AlgebraElement.identity(pb2g)
    for a in random_elements(pb2g, 3, 5):
        assert (one * a).equals(a)
        assert (a * one).equals(a)


def test_ring_axioms(pb2g):
    elems = random_elements(pb2g, 17, 12)
    rng = random.Random(5)
    for _ in range(40):
        a, b, c = rng.sample(elems, 3)
        assert ((a * b) * c).equals(a * (b * c))
        assert (a * (b + c)).equals(a * b + a * c)
        assert ((a + b) * c).equals(a * c + b * c)
        assert (a + b).equals(b + a)
        assert (a - a).is_zero()


def test_adjoint_laws(pb2g):
    elems = random_elements(pb2g, 23, 8)
    for a in elems:
        assert a.adjoint().adjoint().equals(a)
    rng = random.Random(9)
    for _ in range(20):
        a, b = rng.sample(elems, 2)
        assert (a * b).adjoint().equals(b.adjoint() * a.adjoint())
        assert (a + b).adjoint().equals(a.adjoint() + b.adjoint())


def test_known_product_pullback(pb2g):
    # s*_b1 s_a1 picks up both commuting squares
    prod = span(pb2g, "v", "b1") * span(pb2g, "a1", "v")
    want = span(pb2g, "a1", "b1") + span(pb2g, "a2", "b2")
    assert prod.equals(want)


def test_scale_and_exactness(b2g):
    a = span(b2g, "e1", "e2")
    assert a.scale(QQi.of(F(1, 2))).exact
    assert not a.scale(0.5 + 0j).exact
    assert (a.scale(2) - a - a).is_zero()


def test_state_specs():
    haar = StateSpec.haar()
    assert haar.is_exact
    assert haar.psi((0, 0)) == QQi.of(1)
    assert haar.psi((1, -1)) == QQi.of(0)
    chi = StateSpec.character((F(1, 4), 0))
    assert chi.is_exact
    assert chi.psi((1, 0)) == QQi.quarter_turn(1)
    assert chi.psi((1, -1)) == QQi.quarter_turn(1)
    rough = StateSpec.character((0.3,))
    assert not rough.is_exact
    assert abs(rough.psi((2,)) - complex(rough.psi((1,))) ** 2) < 1e-12


def test_state_mixture():
    mix = StateSpec.mixture([(F(1, 2), (F(1, 4), 0)),
                             (F(1, 2), (F(3, 4), 0))])
    # the two quarter turns cancel on odd multiples
    assert mix.psi((1, 0)) == QQi.of(0)
    assert mix.psi((2, 0)) == QQi.of(-1)
    with pytest.raises(InputFormatError):
        StateSpec.mixture([(F(1, 3), (0, 0))])


def test_parse_state():
    assert parse_state("haar").kind == "haar"
    chi = parse_state("z=1/4,0")
    assert chi.kind == "character"
    assert chi.turns == (F(1, 4), F(0))
    assert chi.is_exact
    loose = parse_state("z=0.3")
    assert not loose.is_exact
    with pytest.raises(InputFormatError):
        parse_state("bogus")
    with pytest.raises(InputFormatError):
        parse_state("z=a,b")


def test_phi_values(states, pb2g):
    st = states["pullback-b2"]
    haar = StateSpec.haar()
    chi = StateSpec.character((F(1, 4), 0))
    a1 = pb2g.parse_path("a1")
    b1 = pb2g.parse_path("b1")
    b2 = pb2g.parse_path("b2")
    assert st.phi_eval(haar, a1, a1) == QQi.of(F(1, 2))
    assert st.phi_eval(haar, a1, b1) == QQi.of(0)   # haar kills the phase
    assert st.phi_eval(chi, a1, b1) == QQi(F(0), F(1, 2))
    assert st.phi_eval(chi, a1, b2) == QQi.of(0)    # bijection mismatch
    with pytest.raises(InputFormatError):
        states["fib"].phi_eval(haar, states["fib"].graph.parse_path("euu"),
                               states["fib"].graph.parse_path("euv"))


def test_phi_hermitian(states, pb2g):
    st = states["pullback-b2"]
    chi = StateSpec.character((F(1, 4), F(1, 2)))
    paths = [p for n in dg.degrees_below((1, 1))
             for p in pb2g.paths_of_degree(n)]
    for mu in paths:
        for nu in paths:
            if mu.source != nu.source:
                continue
            fwd = st.phi_eval(chi, mu, nu)
            back = st.phi_eval(chi, nu, mu)
            assert fwd == back.conjugate()


def test_phi_positive_on_squares(states, pb2g):
    st = states["pullback-b2"]
    chi = StateSpec.character((F(1, 4), 0))
    for a in random_elements(pb2g, 31, 20):
        val = st.phi_apply(chi, a.adjoint() * a)
        assert val.im == 0
        assert val.re >= 0


def test_gauge_invariance_of_haar(states, prodg):
    st = states["product-b2-c2"]
    haar = StateSpec.haar()
    paths = [p for n in dg.degrees_below((1, 1))
             for p in prodg.paths_of_degree(n)]
    for mu in paths:
        for nu in paths:
            if mu.source != nu.source or mu.degree == nu.degree:
                continue
            assert st.phi_eval(haar, mu, nu) == QQi.of(0)


def test_unitaries(states, pb2g):
    st = states["pullback-b2"]
    u = st.unitary((1, -1))
    want = span(pb2g, "a1", "b1") + span(pb2g, "a2", "b2")
    assert u.equals(want)
    assert (u * u.adjoint()).equals(AlgebraElement.identity(pb2g))
    chi = StateSpec.character((F(1, 4), 0))
    assert st.phi_apply(chi, u) == QQi.quarter_turn(1)
    assert st.phi_apply(StateSpec.haar(), u) == QQi.of(0)
    with pytest.raises(NotPeriodicError):
        st.unitary((1, 1))


def test_unitary_identities_reports(states):
    for name in ("pullback-b2", "product-b2-c2"):
        rep = states[name].unitary_identities((2, 2))
        assert rep.passed
        assert all(ok for _, ok in rep.checks)
    # rank-0 fixture: only the trivial element shows up
    rep = states["b2"].unitary_identities((2,))
    assert rep.passed
    assert rep.group_elements == ((0,),)


def test_kms_check_fib_float(states):
    st = states["fib"]
    rep = st.kms_check(StateSpec.haar(), (2,))
    assert rep.passed and not rep.exact
    assert rep.max_deviation < 1e-12
    assert rep.failure_count == 0


def test_kms_check_blind_fails_everywhere(states):
    for name in ("b2", "fib"):
        rep = states[name].kms_check(StateSpec.haar(), (2,),
                                     theta_blind=True)
        assert not rep.passed
        assert rep.failure_count > 0
        assert rep.failures   # details surfaced for debugging


def test_act_character(states):
    st = states["pullback-b2"]
    chi = StateSpec.character((F(1, 4), F(1, 4)))
    moved = st.act_character(chi, StateSpec.character((F(1, 4), 0)))
    assert moved.turns == (F(1, 2), F(1, 4))
    assert st.act_character(chi, StateSpec.haar()).kind == "haar"


def test_states_equal(states):
    pb2 = states["pullback-b2"]
    a = StateSpec.character((F(1, 4), 0))
    b = StateSpec.character((0, F(3, 4)))   # same value on (1, -1)
    c = StateSpec.character((F(1, 2), 0))
    assert pb2.states_equal(a, b)
    assert not pb2.states_equal(a, c)
    assert not pb2.states_equal(a, StateSpec.haar())
    # rank 0: every gauge-invariant state collapses to the same one
    b2 = states["b2"]
    assert b2.states_equal(StateSpec.character((F(1, 4),)),
                           StateSpec.haar())


def test_toeplitz_existence(states):
    import math
    st = states["b2"]
    rep = st.toeplitz_kms_exists((1, (math.log(2),)))
    assert rep.exists and rep.factors_through_quotient
    rep = st.toeplitz_kms_exists((0.5, (math.log(2),)))
    assert not rep.exists
    prod = states["product-b2-c2"]
    rep = prod.toeplitz_kms_exists((2, (math.log(2), 0)))
    assert rep.exists and not rep.factors_through_quotient


def test_phase_diagram(states):
    pb2 = states["pullback-b2"]
    assert pb2.phase_diagram(3).extreme_points == 1
    assert pb2.phase_diagram(1).extreme_points == "infinite"
    assert pb2.phase_diagram(F(1, 2)).extreme_points == 0
    prod = states["product-b2-c2"]
    rep = prod.phase_diagram(2)
    assert not rep.applicable
    assert "color(s) 2" in rep.reason


def test_simplex_descriptor(states):
    d = states["pullback-b2"].simplex_descriptor()
    assert d["rank"] == 1 and not d["unique"]
    d0 = states["b2"].simplex_descriptor()
    assert d0["rank"] == 0 and d0["unique"]
