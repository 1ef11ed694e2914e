"""Finite differences, D_{m,k} membership, the elimination engine and the characterization checks."""

from __future__ import annotations

import cmath
import itertools
import math

import numpy as np
import pytest

from charlab.dist import (
    CharFunction,
    JointCharFunction,
    char_function,
    make_distribution,
    point_mass,
    product_char,
    symmetrize,
    uniform,
)
from charlab.errors import (
    CharLabError,
    Condition11Violated,
    Equation3Violated,
    InvalidArgument,
    PreconditionViolated,
    VanishingCharacteristicFunction,
)
from charlab.feq import (
    GroupFunction,
    MixedDifferencePlan,
    averaged_mixed_difference,
    certificate_from_json,
    character_function,
    constant,
    cramer_factor_check,
    difference,
    eliminate_lemma1,
    eliminate_lemma2,
    equation3_residual,
    interaction_residual,
    is_in_Dmk,
    log_modulus,
    marcinkiewicz_check,
    multiplicative_degree,
    phase_log,
    polynomial_degree,
    q_independence_residual,
    replay_certificate,
)
from charlab.feq.differences import complex_log
from charlab.feq.dmk import LOG_HOLONOMY, bump, constructed_member
from charlab.group import catalog, make_group
from charlab.homs import check_condition_11, classify, endomorphism, identity, make_system, scalar

BUMP_RESIDUAL = 2 * math.sin(0.15)


def _floored(rng, X, floor=0.6):
    probs = (1 - floor) * rng.dirichlet(np.ones(X.order))
    probs[0] += floor
    return make_distribution(X, probs)


def _random_function(rng, Y):
    return GroupFunction(Y, rng.standard_normal(Y.order) + 1j * rng.standard_normal(Y.order))


def _random_automorphism(rng, X):
    for _ in range(50):
        matrix = rng.integers(0, X.exponent, size=(X.rank, X.rank)).tolist()
        try:
            f = endomorphism(X, matrix)
        except CharLabError:
            continue
        if classify(f).is_auto:
            return f
    return identity(X)


def _random_system(rng, max_order=16):
    """Automorphism coefficients with pairwise trivially intersecting columns."""
    groups = [moduli for moduli in catalog(max_order) if moduli != [1]]
    while True:
        X = make_group(groups[int(rng.integers(len(groups)))])
        m, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        cs = make_system(X, [[_random_automorphism(rng, X) for _ in range(n)] for _ in range(m)])
        if check_condition_11(cs).holds:
            return cs


def _linear_psis(rng, Y, n):
    """Constants, or logarithms of characters read modulo 2*pi*i, plus a constant."""
    psis = []
    for _ in range(n):
        c = complex(rng.standard_normal(), rng.standard_normal())
        if rng.random() < 0.5:
            psis.append(constant(Y, c))
        else:
            x = Y.from_index(int(rng.integers(Y.order)))
            psis.append(phase_log(character_function(Y, x).values, Y) + constant(Y, c))
    return psis


def _lhs(adjoint_system, psis):
    return sum(psi.flat()[adjoint_system.column_form(i).index_map] for i, psi in enumerate(psis))


def _max_mixed_difference(values, Y, m):
    table = values.reshape((Y.order,) * m)
    worst = 0.0
    for h in itertools.product(range(Y.order), repeat=m):
        mixed = table
        for axis, step in enumerate(h):
            mixed = np.take(mixed, Y.add_table[:, step], axis=axis) - mixed
        worst = max(worst, float(np.max(np.abs(mixed))))
    return worst


# ---- differences and polynomial degree ----

def test_difference_examples():
    Z5 = make_group([5])
    assert np.allclose(difference(constant(Z5, 2.5), (3,)).values, 0)
    chi = character_function(Z5, (1,))
    assert np.allclose(difference(chi, (0,)).values, 0)
    expected = chi.values * (chi.values[1] - 1)
    assert np.allclose(difference(chi, (1,)).values, expected)


def test_differences_commute_and_are_linear():
    Y = make_group([2, 6])
    rng = np.random.default_rng(0)
    psi, phi = _random_function(rng, Y), _random_function(rng, Y)
    for _ in range(10):
        h = Y.from_index(int(rng.integers(Y.order)))
        g = Y.from_index(int(rng.integers(Y.order)))
        assert np.allclose(difference(difference(psi, h), g).values, difference(difference(psi, g), h).values)
        assert np.allclose(difference(psi + phi, h).values, (difference(psi, h) + difference(phi, h)).values)


def test_polynomial_degree_examples():
    Z5 = make_group([5])
    assert polynomial_degree(constant(Z5, 3 - 1j)) == 0
    assert polynomial_degree(constant(Z5, 0)) == 0
    assert polynomial_degree(character_function(Z5, (2,))) is None


@pytest.mark.parametrize("moduli", [[2], [3], [4], [2, 2], [6], [2, 4], [3, 3], [8, 8]])
def test_polynomials_on_finite_groups_are_constants(moduli):
    Y = make_group(moduli)
    rng = np.random.default_rng(len(moduli) * 31 + Y.order)
    for _ in range(5):
        assert polynomial_degree(_random_function(rng, Y)) is None
    for x in list(Y.elements())[1:8]:
        assert polynomial_degree(character_function(Y, x)) is None


def test_sparse_shift_family_agrees_with_exhaustive():
    Y = make_group([4, 4])
    rng = np.random.default_rng(3)
    for psi in (_random_function(rng, Y), constant(Y, 1.0), character_function(Y, (1, 2))):
        assert polynomial_degree(psi, exhaustive=False) == polynomial_degree(psi, exhaustive=True)


def test_multiplicative_degree_of_a_character_is_one():
    Y = make_group([7])
    degree, residual = multiplicative_degree(Y, character_function(Y, (3,)).values)
    assert degree == 1 and residual <= 1e-9
    with pytest.raises(VanishingCharacteristicFunction):
        multiplicative_degree(Y, np.zeros(7))


@pytest.mark.parametrize("moduli", [[2], [5], [2, 4], [3, 3]])
def test_phase_logs_of_characters_have_degree_one(moduli):
    Y = make_group(moduli)
    for x in list(Y.elements())[1:7]:
        psi = phase_log(character_function(Y, x).values, Y)
        assert psi.periodic
        assert polynomial_degree(psi) == 1
        assert polynomial_degree(psi, exhaustive=True) == 1
    assert polynomial_degree(phase_log(np.ones(Y.order), Y)) == 0


def test_principal_logs_are_not_polynomials_without_wrapping():
    Z5 = make_group([5])
    values = character_function(Z5, (2,)).values
    assert polynomial_degree(GroupFunction(Z5, complex_log(values))) is None
    assert polynomial_degree(phase_log(values, Z5)) == 1
    with pytest.raises(VanishingCharacteristicFunction):
        phase_log(np.zeros(5), Z5)


@pytest.mark.slow
def test_only_constants_are_polynomials_across_the_catalog():
    rng = np.random.default_rng(32)
    for moduli in catalog(32):
        Y = make_group(moduli)
        assert polynomial_degree(constant(Y, 1 - 2j), exhaustive=True) == 0
        if Y.order == 1:
            continue
        assert polynomial_degree(_random_function(rng, Y), exhaustive=True) is None
        x = Y.from_index(int(rng.integers(1, Y.order)))
        assert polynomial_degree(character_function(Y, x), exhaustive=True) is None


def test_log_modulus_rejects_zeros():
    Z2 = make_group([2])
    with pytest.raises(VanishingCharacteristicFunction):
        log_modulus(char_function(uniform(Z2)).values, Z2)


# ---- D_{m,k} membership ----

def test_independent_components_are_in_d_m1():
    Y = make_group([3])
    rng = np.random.default_rng(4)
    f = product_char([char_function(_floored(rng, Y)) for _ in range(3)])
    report = is_in_Dmk(f, 1)
    assert report.member and report.residual <= 1e-12


def test_factor_tables_reconstruct_real_joints():
    Y = make_group([4])
    rng = np.random.default_rng(5)
    f = product_char([char_function(symmetrize(_floored(rng, Y))) for _ in range(2)])
    report = is_in_Dmk(f, 1)
    assert report.member and report.factors is not None and report.reason is None
    rebuilt = report.factors[(0,)].reshape(-1, 1) * report.factors[(1,)].reshape(1, -1)
    assert np.allclose(rebuilt, f.blocked())
    payload = report.to_json()
    assert [entry["coords"] for entry in payload["factors"]] == [[1], [2]]
    assert "values" in report.to_json(include_tables=True)["factors"][0]


def test_log_holonomy_is_reported_not_raised():
    Y = make_group([3])
    chi = character_function(Y, (1,)).flat()
    # omega^(y1 + y2): separable as a product, but principal logs wrap at y1 + y2 = 2
    values = chi.reshape(-1, 1) * chi.reshape(1, -1)
    report = is_in_Dmk(JointCharFunction(Y, 2, values), 1)
    assert report.member
    assert report.reason == LOG_HOLONOMY
    assert report.factors is None


def test_bump_breaks_membership():
    Y = make_group([3])
    rng = np.random.default_rng(6)
    f = product_char([char_function(_floored(rng, Y)) for _ in range(2)])
    bumped = JointCharFunction(Y, 2, f.blocked() * bump(Y, 2, 0.3))
    report = is_in_Dmk(bumped, 1)
    assert not report.member
    assert report.residual == pytest.approx(BUMP_RESIDUAL, rel=1e-9)
    assert is_in_Dmk(bumped, 2).member


def test_dmk_argument_checks():
    Y = make_group([2])
    f = product_char([char_function(point_mass(Y)), char_function(point_mass(Y))])
    with pytest.raises(InvalidArgument):
        is_in_Dmk(f, 0)
    with pytest.raises(InvalidArgument):
        is_in_Dmk(f, 3)
    vanishing = product_char([char_function(uniform(Y)), char_function(point_mass(Y))])
    with pytest.raises(VanishingCharacteristicFunction):
        is_in_Dmk(vanishing, 1)


@pytest.mark.parametrize("moduli,m", [([2], 3), ([3], 3), ([2, 2], 3), ([5], 2), ([2], 4)])
def test_constructed_members_pass_and_membership_is_monotone(moduli, m):
    Y = make_group(moduli)
    rng = np.random.default_rng(7)
    for _ in range(10):
        f = constructed_member(Y, m, m - 1, rng)
        assert is_in_Dmk(f, m - 1).residual <= 1e-10
        assert interaction_residual(f, m - 1) <= 1e-10
    for k in range(1, m):
        f = constructed_member(Y, m, k, rng)
        for larger in range(k, m + 1):
            assert is_in_Dmk(f, larger, tol=1e-10).member


def test_split_plan_matches_cached_plan():
    Y = make_group([3])
    rng = np.random.default_rng(8)
    f = constructed_member(Y, 3, 2, rng)
    bumped = JointCharFunction(Y, 3, f.blocked() * bump(Y, 3, 0.3))
    logs = complex_log(bumped.blocked())
    cached = MixedDifferencePlan(Y, 3, 2)
    split = MixedDifferencePlan(Y, 3, 2, max_table=50)
    assert split.fixed > 0 and cached.fixed == 0
    assert split.residual(logs) == pytest.approx(cached.residual(logs), rel=1e-12)


@pytest.mark.slow
def test_membership_agrees_with_interactions_on_seeded_members():
    groups = [make_group(moduli) for moduli in catalog(9) if moduli != [1]]
    rng = np.random.default_rng(500)
    for _ in range(500):
        Y = groups[int(rng.integers(len(groups)))]
        m = int(rng.integers(2, 4))
        f = constructed_member(Y, m, m - 1, rng)
        assert is_in_Dmk(f, m - 1).residual <= 1e-10
        assert interaction_residual(f, m - 1) <= 1e-10

        bumped = JointCharFunction(Y, m, f.blocked() * bump(Y, m, 0.3))
        report = is_in_Dmk(bumped, m - 1)
        assert not report.member and report.residual >= 0.1
        assert interaction_residual(bumped, m - 1) >= 0.1


# ---- elimination ----

def test_lemma1_examples():
    Z5 = make_group([5])
    report = eliminate_lemma1([identity(Z5), scalar(Z5, 2)], constant(Z5, 1.5))
    assert report.is_polynomial and report.degree == 0 and report.degree_bound_ok
    assert report.exhaustive

    report = eliminate_lemma1([identity(Z5)], character_function(Z5, (1,)))
    assert not report.is_polynomial and report.residual > 1e-3
    assert report.degree is None


def test_lemma1_sampled_above_exhaustive_size():
    Y = make_group([131])
    report = eliminate_lemma1([identity(Y), scalar(Y, 3)], character_function(Y, (1,)))
    assert not report.exhaustive and not report.is_polynomial


def test_lemma1_requires_surjective_adjoints():
    Z4 = make_group([4])
    with pytest.raises(PreconditionViolated):
        eliminate_lemma1([scalar(Z4, 2)], constant(Z4, 0))


@pytest.mark.parametrize("moduli,grid", [
    ([5], [[1, 1], [1, 2]]),
    ([7], [[1, 1, 1], [1, 2, 3]]),
    ([3, 3], [[1, 1], [1, 2]]),
    ([5], [[1, 1], [2, 3], [1, 4]]),
])
def test_lemma2_constant_functions_certify_degree_zero(moduli, grid):
    X = make_group(moduli)
    adjoint_system = make_system(X, grid).adjoint_system()
    psis = [constant(X, 0.25 * (i + 1)) for i in range(adjoint_system.n)]
    certs = eliminate_lemma2(adjoint_system, psis)
    assert [c.target for c in certs] == list(range(adjoint_system.n))
    m, n = adjoint_system.m, adjoint_system.n
    for cert in certs:
        assert cert.degree == 0 <= m + n - 2
        assert replay_certificate(cert, adjoint_system, psis).ok
        assert len(cert.shifts) == X.order * (n - 1)
        restored = certificate_from_json(cert.to_json(), m, n)
        assert replay_certificate(restored, adjoint_system, psis).ok


def test_lemma2_on_degenerate_marginals():
    X = make_group([5])
    adjoint_system = make_system(X, [[1, 1], [1, 2]]).adjoint_system()
    tables = [char_function(point_mass(X, a)).values for a in ((2,), (4,))]
    psis = [phase_log(values, X) for values in tables]
    assert equation3_residual(adjoint_system, psis) <= 1e-12
    for cert in eliminate_lemma2(adjoint_system, psis):
        assert cert.degree == 1
        assert replay_certificate(cert, adjoint_system, psis).ok
    principal = [GroupFunction(X, complex_log(values)) for values in tables]
    with pytest.raises(Equation3Violated):
        eliminate_lemma2(adjoint_system, principal)


def test_lemma2_rejects_intersecting_columns():
    Z2 = make_group([2])
    adjoint_system = make_system(Z2, [[1, 1], [1, 1]]).adjoint_system()
    with pytest.raises(Condition11Violated):
        eliminate_lemma2(adjoint_system, [constant(Z2, 0), constant(Z2, 0)])


def test_lemma2_rejects_perturbed_equation():
    X = make_group([5])
    adjoint_system = make_system(X, [[1, 1], [1, 2]]).adjoint_system()
    psis = [constant(X, 0) + character_function(X, (1,)).scale(1e-3), constant(X, 0)]
    assert equation3_residual(adjoint_system, psis) == pytest.approx(1e-3, rel=1e-9)
    with pytest.raises(Equation3Violated) as info:
        eliminate_lemma2(adjoint_system, psis)
    assert info.value.residual == pytest.approx(1e-3, rel=0.1)


@pytest.mark.parametrize("moduli,grid", [
    ([3], [[1, 1], [1, 2]]),
    ([2, 2], [[1, 1], [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]]),
    ([5], [[1, 1, 1], [1, 2, 3]]),
])
def test_averaged_residual_shares_zeros_with_the_largest_mixed_difference(moduli, grid):
    X = make_group(moduli)
    adjoint_system = make_system(X, grid).adjoint_system()
    Y, m, n = adjoint_system.group, adjoint_system.m, adjoint_system.n
    rng = np.random.default_rng(Y.order * 10 + n)

    flat = [constant(Y, complex(rng.standard_normal(), 1.0)) for _ in range(n)]
    assert equation3_residual(adjoint_system, flat) <= 1e-12
    assert _max_mixed_difference(_lhs(adjoint_system, flat), Y, m) <= 1e-12

    for _ in range(5):
        psis = [_random_function(rng, Y) for _ in range(n)]
        averaged = equation3_residual(adjoint_system, psis)
        largest = _max_mixed_difference(_lhs(adjoint_system, psis), Y, m)
        assert 1e-6 < averaged <= largest + 1e-12


def test_averaged_mixed_difference_on_split_tables():
    Y = make_group([4])
    rng = np.random.default_rng(21)
    a, b, c = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)) for _ in range(3))
    split = a[:, :, None] + b[None, :, :] + c[:, None, :]
    assert np.max(np.abs(averaged_mixed_difference(split, Y, 3))) <= 1e-12
    assert np.max(np.abs(averaged_mixed_difference(split, Y, 3, periodic=True))) <= 1e-12
    small = 0.1 * rng.standard_normal((4, 4, 4))
    assert np.allclose(averaged_mixed_difference(small, Y, 3),
                       averaged_mixed_difference(small, Y, 3, periodic=True))
    assert np.max(np.abs(averaged_mixed_difference(small, Y, 3))) > 1e-3


@pytest.mark.slow
def test_elimination_certifies_random_valid_instances():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        adjoint_system = _random_system(rng).adjoint_system()
        Y, m, n = adjoint_system.group, adjoint_system.m, adjoint_system.n
        psis = _linear_psis(rng, Y, n)
        assert equation3_residual(adjoint_system, psis) <= 1e-9
        certs = eliminate_lemma2(adjoint_system, psis)
        assert len(certs) == n
        for cert in certs:
            assert cert.degree <= min(1, m + n - 2)
            assert replay_certificate(cert, adjoint_system, psis).ok


@pytest.mark.slow
def test_character_perturbations_move_the_residual_by_their_size():
    rng = np.random.default_rng(2025)
    for _ in range(200):
        adjoint_system = _random_system(rng).adjoint_system()
        Y, n = adjoint_system.group, adjoint_system.n
        psis = _linear_psis(rng, Y, n)
        eps = float(rng.uniform(1e-3, 1e-2))
        t = int(rng.integers(n))
        x = Y.from_index(int(rng.integers(1, Y.order)))
        psis[t] = psis[t] + character_function(Y, x).scale(eps)
        residual = equation3_residual(adjoint_system, psis)
        assert abs(residual - eps) <= 0.1 * eps
        with pytest.raises(Equation3Violated):
            eliminate_lemma2(adjoint_system, psis)


def test_tampered_certificate_fails_replay():
    X = make_group([5])
    adjoint_system = make_system(X, [[1, 1], [1, 2]]).adjoint_system()
    psis = [constant(X, 0), constant(X, 0)]
    cert = eliminate_lemma2(adjoint_system, psis)[0]
    payload = cert.to_json()
    payload["shifts"][1]["h"] = [(v + 1) % 5 for v in payload["shifts"][1]["h"]]
    assert not replay_certificate(certificate_from_json(payload, 2, 2), adjoint_system, psis).ok
    payload = cert.to_json()
    payload["degree"] = 1
    assert not replay_certificate(certificate_from_json(payload, 2, 2), adjoint_system, psis).ok


# ---- characterization checks ----

def test_marcinkiewicz_examples():
    Y = make_group([2, 3])
    report = marcinkiewicz_check(CharFunction(Y, np.ones(Y.order)))
    assert report.gaussian and report.degree == 0 and report.shift == (0, 0)

    report = marcinkiewicz_check(char_function(point_mass(Y, (1, 2))))
    assert report.gaussian and report.degree == 1 and report.shift == (1, 2)

    Z2 = make_group([2])
    report = marcinkiewicz_check(char_function(make_distribution(Z2, [0.7, 0.3])))
    assert not report.gaussian and report.degree is None


def test_marcinkiewicz_on_symmetrized_laws():
    X = make_group([5])
    rng = np.random.default_rng(10)
    for _ in range(20):
        assert not marcinkiewicz_check(char_function(symmetrize(_floored(rng, X)))).gaussian


def test_cramer_examples():
    X = make_group([2, 4])
    report = cramer_factor_check(point_mass(X, (1, 1)), point_mass(X, (1, 0)), point_mass(X, (0, 1)))
    assert report.consistent and report.gaussian and report.factors_gaussian == (True, True)

    Z2 = make_group([2])
    with pytest.raises(InvalidArgument):
        cramer_factor_check(point_mass(Z2), uniform(Z2), uniform(Z2))

    mu = make_distribution(Z2, [0.7, 0.3])
    report = cramer_factor_check(mu, mu, point_mass(Z2))
    assert report.consistent and not report.gaussian


def test_cramer_random_point_mass_factorizations():
    X = make_group([3, 3])
    rng = np.random.default_rng(11)
    for _ in range(200):
        a = X.from_index(int(rng.integers(X.order)))
        b = X.from_index(int(rng.integers(X.order)))
        report = cramer_factor_check(point_mass(X, X.add(a, b)), point_mass(X, a), point_mass(X, b))
        assert report.consistent


def test_q_independence_examples():
    Y = make_group([3])
    rng = np.random.default_rng(12)
    chars = [char_function(_floored(rng, Y)) for _ in range(2)]
    joint = product_char(chars)
    report = q_independence_residual(joint, chars)
    assert report.q_ok and report.degree == 0 and report.residual <= 1e-12

    dependent = JointCharFunction(Y, 2, joint.blocked() * bump(Y, 2, 0.3))
    report = q_independence_residual(dependent, chars)
    assert not report.q_ok
    assert report.residual == pytest.approx(abs(cmath.exp(0.3j) - 1))

    single = product_char(chars[:1])
    assert q_independence_residual(single, chars[:1]).q_ok
    with pytest.raises(InvalidArgument):
        q_independence_residual(joint, chars[:1])


def test_q_independence_rejects_character_residuals():
    Y = make_group([5])
    chars = [char_function(point_mass(Y)) for _ in range(2)]
    twisted = product_char([char_function(point_mass(Y, (2,))), chars[1]])
    report = q_independence_residual(twisted, chars)
    assert not report.q_ok and report.degree == 1


@pytest.mark.slow
def test_q_independence_classifies_seeded_inputs():
    groups = [make_group(moduli) for moduli in catalog(8) if moduli != [1]]
    rng = np.random.default_rng(1000)
    for _ in range(1000):
        Y = groups[int(rng.integers(len(groups)))]
        n = int(rng.integers(2, 4))
        chars = [char_function(_floored(rng, Y)) for _ in range(n)]
        joint = product_char(chars)
        independent = bool(rng.random() < 0.5)
        if not independent:
            joint = JointCharFunction(Y, n, joint.blocked() * bump(Y, n, float(rng.uniform(0.1, 1.0))))
        assert q_independence_residual(joint, chars).q_ok == independent
