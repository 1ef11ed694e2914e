"""Group-core checks: literals, catalog, pairing, subgroups and the lattice helpers."""

from __future__ import annotations

import cmath
import itertools

import numpy as np
import pytest

from charlab.errors import InvalidArgument
from charlab.group import (
    annihilator,
    catalog,
    full_subgroup,
    group_from_json,
    invariant_factors,
    is_isomorphic,
    make_group,
    pairing,
    parse_group,
    span,
    subgroup_from_generators,
    subgroup_intersect,
    subgroup_sum,
    trivial_subgroup,
)
from charlab.group.abelian import pairing_phases
from charlab.group.lattice import hermite_normal_form, integer_kernel, smith_normal_form, solve_integer

SMALL_GROUPS = [[2], [5], [2, 2], [2, 4], [3, 3], [2, 6], [4, 4]]


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _brute_annihilator(X, H):
    members = H.elements()
    return {
        x for x in X.elements()
        if all(abs(pairing(X, x, h) - 1) < 1e-12 for h in members)
    }


def test_parse_and_json_forms():
    X = parse_group("Z2xZ4")
    assert X.moduli == (2, 4)
    assert X.order == 8
    assert X.literal() == "Z2xZ4"
    assert parse_group("z3").moduli == (3,)
    assert group_from_json({"moduli": [2, 4]}) == X
    assert group_from_json("Z2xZ4") == X
    assert group_from_json(X.to_json()) == X


@pytest.mark.parametrize("bad", ["", "Z", "Z0", "Q5", "Z2*Z3"])
def test_parse_rejects_bad_literals(bad):
    with pytest.raises(InvalidArgument):
        parse_group(bad)


def test_element_validation():
    X = make_group([2, 4])
    assert X.element((1, 3)) == (1, 3)
    with pytest.raises(InvalidArgument):
        X.element((2, 0))
    with pytest.raises(InvalidArgument):
        X.reduce((1, 2, 3))
    assert X.reduce((3, -1)) == (1, 3)


def test_catalog_up_to_sixteen():
    groups = catalog(16)
    assert len(groups) == 25
    assert groups[0] == [1]
    order16 = [g for g in groups if np.prod(g) == 16]
    assert order16 == sorted([[16], [2, 8], [4, 4], [2, 2, 4], [2, 2, 2, 2]])
    assert [2, 2] in groups and [4] in groups
    # one entry per isomorphism class
    assert len({tuple(g) for g in groups}) == len(groups)


def test_invariant_factors_and_isomorphism():
    assert invariant_factors(make_group([2, 3])) == [6]
    assert invariant_factors(make_group([2, 4])) == [2, 4]
    assert invariant_factors(make_group([1])) == []
    assert is_isomorphic(make_group([2, 3]), make_group([6]))
    assert not is_isomorphic(make_group([2, 2]), make_group([4]))
    assert is_isomorphic(make_group([4, 6]), make_group([2, 12]))


@pytest.mark.parametrize("moduli", SMALL_GROUPS)
def test_pairing_is_bimultiplicative_and_symmetric(moduli):
    X = make_group(moduli)
    elements = list(X.elements())
    for x, y in itertools.product(elements, repeat=2):
        assert cmath.isclose(pairing(X, x, y), pairing(X, y, x), abs_tol=1e-12)
    rng = np.random.default_rng(7)
    for _ in range(50):
        x, x2, y = (elements[i] for i in rng.integers(0, len(elements), 3))
        lhs = pairing(X, X.add(x, x2), y)
        assert cmath.isclose(lhs, pairing(X, x, y) * pairing(X, x2, y), abs_tol=1e-12)


@pytest.mark.parametrize("moduli", SMALL_GROUPS)
def test_annihilator_matches_brute_force(moduli):
    X = make_group(moduli)
    for x in X.elements():
        H = span(X, [x])
        A = annihilator(X, H)
        assert set(A.elements()) == _brute_annihilator(X, H)
        assert A.order * H.order == X.order
        assert set(annihilator(X, A).elements()) == set(H.elements())


def test_pairing_requires_reduced_elements():
    X = make_group([2, 4])
    assert cmath.isclose(pairing(X, (1, 3), (1, 1)), cmath.exp(2j * cmath.pi * (1 / 2 + 3 / 4)), abs_tol=1e-12)
    for x, y in [((1,), (1, 1)), ((2, 0), (1, 1)), ((0, 0), (0, 4)), ((0, -1), (0, 0)), ((1, 1, 0), (0, 0))]:
        with pytest.raises(InvalidArgument):
            pairing(X, x, y)


def _random_moduli(rng, max_order):
    moduli, order = [], 1
    for _ in range(int(rng.integers(1, 4))):
        cap = min(max_order // order, 64)
        if cap < 2:
            break
        d = int(rng.integers(2, cap + 1))
        moduli.append(d)
        order *= d
    return moduli or [1]


def _check_annihilator_duality(X, H):
    A = annihilator(X, H)
    assert A.order * H.order == X.order
    assert np.array_equal(annihilator(X, A).element_array, H.element_array)
    phases = pairing_phases(X, H.element_array[:, None, :], A.element_array[None, :, :])
    assert not phases.any()


def test_annihilator_duality_across_the_catalog():
    rng = np.random.default_rng(64)
    for moduli in catalog(64):
        X = make_group(moduli)
        _check_annihilator_duality(X, trivial_subgroup(X))
        _check_annihilator_duality(X, full_subgroup(X))
        for _ in range(3):
            gens = [X.from_index(int(rng.integers(X.order))) for _ in range(int(rng.integers(1, 3)))]
            _check_annihilator_duality(X, subgroup_from_generators(X, gens))


@pytest.mark.slow
def test_annihilator_duality_on_seeded_groups():
    rng = np.random.default_rng(4096)
    for _ in range(1000):
        X = make_group(_random_moduli(rng, 4096))
        gens = [X.from_index(int(rng.integers(X.order))) for _ in range(int(rng.integers(1, 4)))]
        _check_annihilator_duality(X, subgroup_from_generators(X, gens))


def test_trivial_and_full_subgroups():
    X = make_group([2, 4])
    assert trivial_subgroup(X).is_trivial()
    assert full_subgroup(X).is_full()
    assert annihilator(X, trivial_subgroup(X)).is_full()
    assert annihilator(X, full_subgroup(X)).is_trivial()


def test_subgroup_elements_and_membership():
    X = make_group([2, 4])
    H = subgroup_from_generators(X, [(1, 2)])
    assert H.elements() == [(0, 0), (1, 2)]
    assert H.contains((1, 2)) and not H.contains((0, 2))
    assert H.smallest_nonzero() == (1, 2)
    assert trivial_subgroup(X).smallest_nonzero() is None
    with pytest.raises(InvalidArgument):
        subgroup_from_generators(X, [(2, 0)])


def test_sum_and_intersection_against_sets():
    rng = np.random.default_rng(11)
    for moduli in ([2, 4], [4, 4], [2, 6], [3, 9]):
        X = make_group(moduli)
        elements = list(X.elements())
        for _ in range(20):
            G = span(X, [elements[i] for i in rng.integers(0, len(elements), 2)])
            H = span(X, [elements[i] for i in rng.integers(0, len(elements), 2)])
            meet = subgroup_intersect(G, H)
            assert set(meet.elements()) == set(G.elements()) & set(H.elements())
            joined = set(subgroup_sum(G, H).elements())
            assert joined == {X.add(g, h) for g in G.elements() for h in H.elements()}


def test_random_element_stays_in_subgroup():
    X = make_group([4, 8])
    H = span(X, [(2, 2), (0, 4)])
    rng = np.random.default_rng(3)
    for _ in range(30):
        assert H.contains(H.random_element(rng))


def test_smith_normal_form_factorises():
    rng = np.random.default_rng(5)
    for _ in range(25):
        rows, cols = rng.integers(1, 4, 2)
        M = rng.integers(-6, 7, (rows, cols)).tolist()
        U, S, V = smith_normal_form(M)
        assert _matmul(_matmul(U, M), V) == S
        diag = [S[i][i] for i in range(min(rows, cols))]
        assert all(S[i][j] == 0 for i in range(rows) for j in range(cols) if i != j)
        nonzero = [d for d in diag if d]
        assert all(d > 0 for d in nonzero)
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


def test_kernel_and_solve():
    M = [[2, 4, 6], [1, 1, 1]]
    for row in integer_kernel(M, 3):
        assert _matmul(M, [[v] for v in row]) == [[0], [0]]
    x = solve_integer(M, [4, 2])
    assert _matmul(M, [[v] for v in x]) == [[4], [2]]
    assert solve_integer([[2]], [1]) is None


def test_hermite_normal_form_is_canonical():
    a = hermite_normal_form([[2, 4], [0, 6]], 2)
    b = hermite_normal_form([[2, 10], [2, -2], [0, 6]], 2)
    assert a == b
    assert all(row[i] > 0 for i, row in enumerate(a))


def _all_subgroups(X):
    found = {trivial_subgroup(X).basis: trivial_subgroup(X)}
    frontier = list(found.values())
    elements = X.elements()
    while frontier:
        grown = []
        for H in frontier:
            for x in elements:
                if H.contains(x):
                    continue
                G = subgroup_from_generators(X, H.generators + [x])
                if G.basis not in found:
                    found[G.basis] = G
                    grown.append(G)
        frontier = grown
    return list(found.values())


@pytest.mark.slow
def test_annihilator_duality_on_every_subgroup():
    groups = [moduli for moduli in catalog(256) if len(moduli) <= 2]
    groups += [moduli for moduli in catalog(32) if len(moduli) > 2]
    for moduli in groups:
        X = make_group(moduli)
        for H in _all_subgroups(X):
            _check_annihilator_duality(X, H)


@pytest.mark.slow
def test_hermite_basis_ignores_generator_order_and_redundancy():
    rng = np.random.default_rng(1000)
    for _ in range(1000):
        X = make_group(_random_moduli(rng, 4096))
        gens = [X.from_index(int(rng.integers(X.order))) for _ in range(int(rng.integers(1, 4)))]
        H = subgroup_from_generators(X, gens)
        shuffled = [gens[i] for i in rng.permutation(len(gens))]
        coeffs = rng.integers(-5, 6, len(gens))
        extra = X.reduce([int(sum(int(c) * g[j] for c, g in zip(coeffs, gens))) for j in range(X.rank)])
        assert subgroup_from_generators(X, shuffled + [extra]).basis == H.basis
        assert subgroup_from_generators(X, H.generators).basis == H.basis
