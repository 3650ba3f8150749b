import itertools
from math import sqrt

import numpy as np
import pytest

from entanglement import (antisymmetric_basis, basis_state, local_unitary_exchange_check, basis_type,
                          batch_entanglement, ces_intersection_qubit_qudit, ces_orthocomplement_basis,
                          check_symmetric_product, chi1, chi2, cut_entanglement, density_to_json,
                          entanglement_Et, exchange_entanglement_check, exchange_trace_distances,
                          gamma_entanglement_closed_form, gamma_state, ghz_entanglement_closed_form,
                          ghz_state, haar_random_state, haar_random_states, heterogeneous_ghz_state,
                          is_product, min_entanglement_estimate, multipartite_ces_basis, psi_p, purity,
                          qubit_qudit_ces_basis, qubit_qudit_intersection_family, qudit_qubit_ces_basis,
                          r_conversion_check, reduced_density, schmidt_coefficients, sigma_state,
                          solve_symmetric_products, subspace_intersection, symmetric_product_constraints,
                          trace_distance)
from errors import BudgetExceededError, DomainError
from partitions import Dims, all_partitions, omega, partitions_with_k, representative_partitions
from perm_engine import SubsystemPerm, all_perms
from spectral import RootOfUnity, build_operator, eigenbasis, eigenspace, eigenspace_projector, spectrum


def test_reduced_density_of_product_and_bell():
    d = Dims((2, 2))
    product = np.kron([1, 0], [1, 1]) / sqrt(2)
    rho = reduced_density(product, d, [1])
    np.testing.assert_allclose(rho, [[1, 0], [0, 0]], atol=1e-15)
    assert is_product(product, d, [1])
    assert entanglement_Et(product, d) < 1e-12

    bell = np.array([0, 1, 1, 0]) / sqrt(2)
    assert abs(purity(reduced_density(bell, d, [2])) - 0.5) < 1e-15
    assert abs(entanglement_Et(bell, d) - 1) < 1e-12
    np.testing.assert_allclose(schmidt_coefficients(bell, d, [1]), [0.5, 0.5], atol=1e-15)


def test_partial_traces_are_consistent():
    for d in all_partitions(24) + [Dims((2, 3)), Dims((3, 5))]:
        psi = haar_random_state(d.N, seed=d.N + d.k)
        slots = range(1, d.k + 1)
        for size in range(1, d.k):
            for keep in itertools.combinations(slots, size):
                rest = [s for s in slots if s not in keep]
                rho = reduced_density(psi, d, keep)
                assert abs(np.trace(rho) - 1) < 1e-12
                np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
                assert abs(purity(rho) - purity(reduced_density(psi, d, rest))) < 1e-12, (d, keep)


def test_invalid_cuts():
    psi = sigma_state(12)
    d = Dims((2, 2, 3))
    with pytest.raises(DomainError):
        reduced_density(psi, d, [])
    with pytest.raises(DomainError):
        reduced_density(psi, d, [1, 2, 3])
    with pytest.raises(DomainError):
        reduced_density(psi, d, [4])
    with pytest.raises(DomainError):
        reduced_density(sigma_state(6), d, [1])
    with pytest.raises(DomainError):
        entanglement_Et(psi, d, 2)


def test_product_state_is_exactly_unentangled():
    for d in all_partitions(24):
        assert entanglement_Et(sigma_state(24), d) < 1e-12


def test_gamma_four_is_maximally_entangled():
    assert abs(entanglement_Et(gamma_state(4), Dims((2, 2))) - 1) < 1e-12


def test_gamma_closed_form():
    for N in (6, 8, 12, 24):
        for d in all_partitions(N):
            assert abs(entanglement_Et(gamma_state(N), d) - gamma_entanglement_closed_form(d)) < 1e-9, d


def test_ghz_closed_form():
    for d in (Dims((2, 3)), Dims((3, 2)), Dims((2, 2, 3)), Dims((3, 4, 2)), Dims((4, 4)), Dims((3, 5, 4))):
        assert abs(entanglement_Et(heterogeneous_ghz_state(d), d) - ghz_entanglement_closed_form(d)) < 1e-9
    assert abs(entanglement_Et(ghz_state(3, 2), Dims((2, 2, 2))) - 1) < 1e-12
    np.testing.assert_allclose(ghz_state(2, 3)[[0, 4, 8]], [1 / sqrt(3)] * 3)


def test_exchange_preserves_entanglement():
    for N in range(4, 25):
        if omega(N) < 2:
            continue
        states = haar_random_states(N, 5, seed=N)
        for k in range(2, omega(N) + 1):
            for d in partitions_with_k(N, k):
                for sigma in all_perms(k):
                    for psi in states:
                        before, after = exchange_entanglement_check(psi, d, sigma)
                        assert abs(before - after) < 1e-9, (d, sigma)


def test_cut_entanglement_of_moved_state():
    psi = haar_random_state(12, seed=3)
    d = Dims((2, 2, 3))
    sigma = SubsystemPerm((2, 3, 1))
    moved = build_operator(d, sigma).apply(psi)
    # Slot 1 of d lands in slot σ(1) = 2 of σ(d)
    assert abs(cut_entanglement(psi, d, [1]) - cut_entanglement(moved, Dims((3, 2, 2)), [2])) < 1e-12


def test_psi_p_rdms_at_half():
    psi = psi_p(0.5)
    np.testing.assert_allclose(psi, [0, 0, 1 / sqrt(2), 1 / sqrt(2), 0, 0], atol=1e-15)
    np.testing.assert_allclose(reduced_density(psi, Dims((2, 3)), [2]), np.diag([0.5, 0, 0.5]), atol=1e-12)
    np.testing.assert_allclose(reduced_density(psi, Dims((3, 2)), [1]), np.diag([0, 1, 0]), atol=1e-12)
    assert entanglement_Et(psi, Dims((2, 3))) > 0.5
    assert abs(entanglement_Et(psi, Dims((2, 3))) - sqrt(0.75)) < 1e-12
    assert entanglement_Et(psi, Dims((3, 2))) <= 1e-9


def test_psi_p_components_are_eigenvectors():
    operator = build_operator(Dims((2, 3)), SubsystemPerm.swap())
    symmetric, antisymmetric = psi_p(1.0), -psi_p(0.0)
    np.testing.assert_allclose(operator.apply(symmetric), symmetric, atol=1e-15)
    np.testing.assert_allclose(operator.apply(antisymmetric), -antisymmetric, atol=1e-15)


def test_trace_distance_scan_shape():
    grid = np.linspace(0, 1, 101)
    d2, d3 = np.array([exchange_trace_distances(psi_p(p)) for p in grid]).T
    np.testing.assert_allclose(d2, d2[::-1], atol=1e-9)
    np.testing.assert_allclose(d3, d3[::-1], atol=1e-9)
    assert np.argmax(d2) == 50 and np.argmax(d3) == 50
    assert abs(d3[50] - 1) < 1e-12
    np.testing.assert_allclose(d2, np.sqrt(grid * (1 - grid)), atol=1e-12)
    np.testing.assert_allclose(d3, 2 * np.sqrt(grid * (1 - grid)), atol=1e-12)


def test_psi_p_vacuum_reference():
    psi = psi_p(0.5, reference="vacuum")
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert abs(exchange_trace_distances(psi)[1] - 1 / sqrt(2)) < 1e-12
    with pytest.raises(DomainError):
        psi_p(0.5, reference="other")
    with pytest.raises(DomainError):
        psi_p(1.2)


def test_trace_distance():
    assert trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        trace_distance(np.eye(2), np.eye(3))
    assert density_to_json(np.diag([0.5, 0.5])) == '[[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]'


def test_local_unitary_exchange_check():
    assert local_unitary_exchange_check(0, 2, 3) == (0.0, 0.0, True)
    forward, backward, fixed = local_unitary_exchange_check(1, 2, 3)
    assert forward < 1e-12 and backward < 1e-12 and not fixed
    assert local_unitary_exchange_check(7, 3, 5)[2]


def test_symmetric_eigenvector_has_equal_entanglement():
    psi = eigenspace(Dims((2, 3)), SubsystemPerm.swap(), RootOfUnity(1)).vectors.sum(axis=0) / sqrt(3)
    assert abs(entanglement_Et(psi, Dims((2, 3))) - entanglement_Et(psi, Dims((3, 2)))) < 1e-12


def test_antisymmetric_swap_states_of_223():
    space = eigenspace(Dims((2, 2, 3)), SubsystemPerm((2, 1, 3)), RootOfUnity(2, 1))
    assert space.dimension == 3
    for v in space.vectors:
        assert entanglement_Et(v, Dims((2, 2, 3))) < 1e-12
        assert cut_entanglement(v, Dims((2, 2, 3)), [1]) > 0.5


def test_antisymmetric_ten_cycle_state_is_genuinely_entangled():
    space = eigenspace(Dims((2, 2, 3)), SubsystemPerm((3, 1, 2)), RootOfUnity(2, 1))
    assert space.dimension == 1
    assert entanglement_Et(space.vectors[0], Dims((2, 2, 3))) > 0


def test_constraint_chains():
    system = symmetric_product_constraints(2, 3)
    assert system.term_sets() == {frozenset({(0, 1), (0, 2), (1, 1), (1, 0)})}
    assert system.equalities == 3
    assert system.render() == 'a0*b1 = a0*b2 = a1*b1 = a1*b0\n'

    system = symmetric_product_constraints(2, 4)
    assert system.term_sets() == {frozenset({(0, 1), (0, 2), (1, 0)}), frozenset({(0, 3), (1, 2), (1, 1)})}


def test_check_symmetric_product():
    assert check_symmetric_product([1, 0], [1, 0, 0], 2, 3)
    assert check_symmetric_product([1, 1], [1, 1, 1], 2, 3)
    assert not check_symmetric_product([1, 0], [0, 1, 0], 2, 3)
    # |7> = |1>|2> is a fixed point of π(3,5)
    assert check_symmetric_product([0, 1, 0], [0, 0, 1, 0, 0], 3, 5)
    with pytest.raises(DomainError):
        check_symmetric_product([1, 0], [1, 0], 2, 3)


@pytest.mark.parametrize('d1, d2', [(2, 3), (2, 6)])
def test_only_trivial_symmetric_products(d1, d2):
    N = d1 * d2
    found = solve_symmetric_products(d1, d2)
    assert len(found) == 3
    assert all(item.free_parameters == 0 for item in found)
    states = [item.state for item in found]
    expected = [basis_state(0, N), basis_state(N - 1, N), sigma_state(N)]
    for target in expected:
        assert any(abs(abs(np.vdot(target, psi)) - 1) < 1e-9 for psi in states)
    for psi in states:
        assert is_product(psi, Dims((d1, d2)), [1])


def test_ces_dimensions():
    for d1 in range(2, 7):
        for d2 in range(2, 7):
            basis = ces_orthocomplement_basis(d1, d2)
            assert basis.shape == ((d1 - 1) * (d2 - 1), d1 * d2)
    assert multipartite_ces_basis(Dims((2, 2, 2))).shape[0] == 4
    assert multipartite_ces_basis(Dims((2, 2, 3))).shape[0] == 12 - 5


def test_explicit_ces_bases_span_r():
    for d in range(2, 7):
        expected = eigenspace_projector(ces_orthocomplement_basis(2, d))
        np.testing.assert_allclose(eigenspace_projector(qubit_qudit_ces_basis(d)), expected, atol=1e-12)
        expected = eigenspace_projector(ces_orthocomplement_basis(d, 2))
        np.testing.assert_allclose(eigenspace_projector(qudit_qubit_ces_basis(d)), expected, atol=1e-12)


def test_r_basis_entanglement():
    for d in range(2, 9):
        for v in qubit_qudit_ces_basis(d):
            assert abs(entanglement_Et(v, Dims((2, d))) - sqrt(d / (2 * d - 2))) < 1e-9


def test_r_conversion():
    for d1, d2 in ((2, 3), (3, 4), (2, 5), (4, 4)):
        assert r_conversion_check(d1, d2)


def test_qubit_qudit_intersections():
    for d in range(2, 8):
        common = ces_intersection_qubit_qudit(d)
        assert common.shape[0] == ((d - 1) // 2 if d % 2 else 1), d
        family = qubit_qudit_intersection_family(d)
        np.testing.assert_allclose(eigenspace_projector(family), eigenspace_projector(common), atol=1e-9)
    # The d = 3 intersection is the antisymmetric state of T̂_[2,3]
    np.testing.assert_allclose(np.abs(ces_intersection_qubit_qudit(3)[0]), [0, .5, .5, .5, .5, 0], atol=1e-9)


def test_subspace_intersection_empty():
    first = np.eye(4)[:2]
    second = np.eye(4)[2:]
    assert subspace_intersection(first, second).shape == (0, 4)


def test_antisymmetric_subspace_minimum():
    for q in (2, 3, 4):
        basis = antisymmetric_basis(q)
        assert basis.shape == (q * (q - 1) // 2, q * q)
        estimate = min_entanglement_estimate(basis, Dims((q, q)), samples=2000, seed=11)
        assert estimate >= sqrt(q / (2 * (q - 1))) - 1e-6
    # Every antisymmetric state of two qutrits has the same entanglement
    estimate = min_entanglement_estimate(antisymmetric_basis(3), Dims((3, 3)), samples=500, seed=5)
    assert abs(estimate - sqrt(0.75)) < 1e-9


def test_nonsymmetric_eigenspaces_are_entangled():
    for N in range(4, 25):
        for d in partitions_with_k(N, 2):
            for eta in spectrum(d, SubsystemPerm.swap()):
                if eta == RootOfUnity(1):
                    continue
                space = eigenspace(d, SubsystemPerm.swap(), eta)
                assert min_entanglement_estimate(space.vectors, d, samples=10000, seed=1) >= 1e-3, (d, eta)


def test_min_entanglement_estimate_domain():
    with pytest.raises(DomainError):
        min_entanglement_estimate(np.zeros((0, 4)), Dims((2, 2)))


def test_haar_mean_purity():
    states = haar_random_states(4, 5000, seed=2024)
    purities = [purity(reduced_density(psi, Dims((2, 2)), [1])) for psi in states]
    assert abs(np.mean(purities) - 0.8) < 0.01


def test_haar_states_are_reproducible():
    np.testing.assert_array_equal(haar_random_state(6, seed=9), haar_random_state(6, seed=9))
    assert abs(np.linalg.norm(haar_random_state(6, seed=9)) - 1) < 1e-12


def test_batch_entanglement_matches_single():
    d = Dims((2, 2, 3))
    states = haar_random_states(12, 20, seed=4)
    expected = [entanglement_Et(psi, d) for psi in states]
    np.testing.assert_allclose(batch_entanglement(states, d), expected, atol=1e-12)


def test_chi_families():
    for d in representative_partitions(24):
        assert entanglement_Et(chi1(24, 2 / 24), d) <= 1e-9
    for p in np.linspace(0, 1, 21):
        primitive = entanglement_Et(chi1(24, p), Dims((2, 2, 2, 3)))
        assert primitive >= entanglement_Et(chi1(24, p), Dims((2, 12))) - 1e-9
    assert abs(np.linalg.norm(chi2(24, 0.3, 1.1)) - 1) < 1e-12
    with pytest.raises(DomainError):
        chi1(24, -0.1)


@pytest.mark.parametrize('d', range(2, 13))
def test_basis_type_qubit_qudit(d):
    vectors = np.vstack([space.vectors for space in eigenbasis(Dims((2, d)), SubsystemPerm.swap())])
    assert basis_type(vectors, Dims((2, d))) == (2 * d - 2, 2)


@pytest.mark.parametrize('q', [2, 3, 4, 5, 6])
def test_basis_type_homogeneous(q):
    vectors = np.vstack([space.vectors for space in eigenbasis(Dims((q, q)), SubsystemPerm.swap())])
    assert basis_type(vectors, Dims((q, q))) == (q * q - q, q)


def test_symmetric_products_of_3_5():
    found = solve_symmetric_products(3, 5)
    supports = {(item.rows, item.cols) for item in found}
    assert ((1,), (2,)) in supports
    assert ((0,), (0,)) in supports and ((2,), (4,)) in supports
    operator = build_operator(Dims((3, 5)), SubsystemPerm.swap())
    for item in found:
        np.testing.assert_allclose(operator.apply(item.state), item.state, atol=1e-15)


def test_homogeneous_symmetric_products_form_families():
    full = [item for item in solve_symmetric_products(3, 3) if len(item.rows) == 3 and len(item.cols) == 3]
    assert len(full) == 1
    assert full[0].free_parameters > 0


def test_symmetric_product_budget():
    with pytest.raises(BudgetExceededError):
        solve_symmetric_products(6, 6, budget=1000)
