"""
Entanglement of states in C^N viewed through tensor-product shapes.

States are plain complex numpy vectors over the labels 0..N-1; a shape is
supplied per call, so the same vector can be read in [2,3] and in [3,2].
Slots are numbered from 1 as in the subsystem permutations.
"""
import itertools
import json
import logging
from dataclasses import dataclass
from math import prod, sqrt

import numpy as np
import sympy
from scipy.linalg import eigvalsh, null_space, orth, svdvals

from config import get_config
from errors import BudgetExceededError, DomainError
from index_map import digits_table, labels_from_digits
from partitions import Dims, apply_perm
from perm_engine import SubsystemPerm, cycle_decomposition
from spectral import build_operator, eigenspace_projector

logger = logging.getLogger(__name__)

PRODUCT_TOLERANCE = 1e-9
CONSTRAINT_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-10


def _as_state(psi, d):
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (d.N,):
        logger.error(f"State of length {psi.shape} does not fit {d}")
        raise DomainError(f"State has {psi.size} amplitudes but {d} needs {d.N}")
    if abs(np.linalg.norm(psi) - 1) > NORM_TOLERANCE:
        raise DomainError(f"State is not normalized (norm {np.linalg.norm(psi):.6g})")
    return psi


def _check_keep(keep, d):
    keep = tuple(sorted(set(keep)))
    if not keep or len(keep) >= d.k or keep[0] < 1 or keep[-1] > d.k:
        logger.error(f"Invalid subsystem subset {keep} for {d}")
        raise DomainError(f"Kept slots must be a nonempty proper subset of 1..{d.k}, got {list(keep)}")
    return keep


def _cut_matrix(psi, d, keep):
    """Amplitudes as a (Π_A d_i) x (Π_Ā d_i) matrix."""
    rest = tuple(s for s in range(1, d.k + 1) if s not in keep)
    tensor = psi.reshape(d.entries)
    tensor = np.transpose(tensor, [s - 1 for s in keep + rest])
    return tensor.reshape(prod(d[s - 1] for s in keep), -1)


def reduced_density(psi, d, keep):
    """
    ρ_A = Tr_Ā |ψ><ψ|.

    Args:
        psi (numpy.ndarray): State vector
        d (Dims): Shape the state is read in
        keep (iterable): Slots of A (1-based)

    Returns:
        numpy.ndarray: Density matrix of dimension Π_{i∈A} d_i
    """
    psi = _as_state(psi, d)
    keep = _check_keep(keep, d)
    matrix = _cut_matrix(psi, d, keep)
    return matrix @ matrix.conj().T


def purity(rho):
    """Tr ρ² of a Hermitian matrix."""
    return float(np.sum(np.abs(rho) ** 2))


def schmidt_coefficients(psi, d, keep):
    """Squared singular values of the cut matrix, largest first."""
    psi = _as_state(psi, d)
    keep = _check_keep(keep, d)
    return svdvals(_cut_matrix(psi, d, keep)) ** 2


def is_product(psi, d, keep):
    return bool(schmidt_coefficients(psi, d, keep)[0] >= 1 - PRODUCT_TOLERANCE)


def _linear_entropy(weights):
    """
    1 − Σλ² written as 2·Σ_{i<j} λ_i λ_j over the last axis.

    Suffix sums keep the result at rounding level for product states.
    """
    weights = np.sort(weights, axis=-1)[..., ::-1]
    tails = np.cumsum(weights[..., ::-1], axis=-1)[..., ::-1]
    return 2 * np.sum(weights[..., :-1] * tails[..., 1:], axis=-1)


def _normalized_measure(entropy, dim):
    return np.minimum(1.0, np.sqrt(dim / (dim - 1) * np.maximum(entropy, 0.0)))


def cut_entanglement(psi, d, keep):
    """√(D/(D−1)·(1 − Tr ρ_A²)) for the single cut A, D = Π_{i∈A} d_i."""
    weights = schmidt_coefficients(psi, d, keep)
    dim = prod(d[s - 1] for s in _check_keep(keep, d))
    return float(_normalized_measure(_linear_entropy(weights), dim))


def _check_t(t, d):
    if not 1 <= t <= d.k // 2:
        logger.error(f"t = {t} outside 1..{d.k // 2} for {d}")
        raise DomainError(f"t must lie in 1..{d.k // 2} for {d}, got {t}")


def entanglement_Et(psi, d, t=1):
    """
    E_t: minimum over all t-slot subsets A of the normalized mixedness of ρ_A.

    Args:
        psi (numpy.ndarray): State vector
        d (Dims): Shape
        t (int): Size of the cut, 1 <= t <= k/2

    Returns:
        float: Value in [0, 1]
    """
    _check_t(t, d)
    return min(cut_entanglement(psi, d, keep) for keep in itertools.combinations(range(1, d.k + 1), t))


def batch_entanglement(states, d, t=1):
    """E_t of every row of a (samples x N) array."""
    _check_t(t, d)
    states = np.asarray(states, dtype=complex)
    count = len(states)
    tensor = states.reshape((count,) + d.entries)
    best = np.ones(count)
    for keep in itertools.combinations(range(1, d.k + 1), t):
        rest = tuple(s for s in range(1, d.k + 1) if s not in keep)
        dim = prod(d[s - 1] for s in keep)
        matrices = np.transpose(tensor, (0,) + tuple(keep + rest)).reshape(count, dim, -1)
        weights = np.linalg.svd(matrices, compute_uv=False) ** 2
        best = np.minimum(best, _normalized_measure(_linear_entropy(weights), dim))
    return best


def trace_distance(rho, sigma):
    """½·Σ|λ_i| over the eigenvalues of ρ − σ."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise DomainError(f"Cannot compare matrices of shapes {rho.shape} and {sigma.shape}")
    return float(0.5 * np.sum(np.abs(eigvalsh(rho - sigma))))


def density_to_json(rho):
    """Row-major [re, im] pairs."""
    return json.dumps([[[float(a.real), float(a.imag)] for a in row] for row in np.asarray(rho, dtype=complex)])


# Named states

def gamma_state(N):
    """|Γ_N> = Σ_{n=1}^{N−2}|n>/√(N−2)."""
    if N < 3:
        raise DomainError(f"Γ_N needs N >= 3, got {N}")
    psi = np.zeros(N, dtype=complex)
    psi[1:N - 1] = 1 / sqrt(N - 2)
    return psi


def sigma_state(N):
    """The uniform superposition |Σ_N>."""
    return np.full(N, 1 / sqrt(N), dtype=complex)


def basis_state(L, N):
    psi = np.zeros(N, dtype=complex)
    psi[L] = 1.0
    return psi


def ghz_state(k, d):
    """(1/√d)·Σ_i |ii...i> on [d]*k, i.e. labels α·i with α = (d^k−1)/(d−1)."""
    return heterogeneous_ghz_state(Dims((d,) * k))


def heterogeneous_ghz_state(d):
    """GHZ_{k,d_min} written in the shape d."""
    d_min = min(d.entries)
    diagonal = np.repeat(np.arange(d_min)[:, None], d.k, axis=1)
    psi = np.zeros(d.N, dtype=complex)
    psi[labels_from_digits(diagonal, d)] = 1 / sqrt(d_min)
    return psi


def ghz_entanglement_closed_form(d):
    """E₁ of GHZ_{k,d_min} in d: √(d_max(d_min−1)/(d_min(d_max−1)))."""
    d_min, d_max = min(d.entries), max(d.entries)
    return sqrt(d_max * (d_min - 1) / (d_min * (d_max - 1)))


def psi_p(p, reference="cycle"):
    """
    The N = 6 family interpolating between symmetric and antisymmetric states of T̂_{[2,3]}.

    Args:
        p (float): Weight of the symmetric part, 0 <= p <= 1
        reference (str): 'cycle' mixes the 4-cycle symmetric state (|1>+|2>+|3>+|4>)/2,
            'vacuum' mixes |0>

    Returns:
        numpy.ndarray: Normalized state of C^6
    """
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    antisymmetric = np.array([0, 1, -1, -1, 1, 0], dtype=complex) / 2
    if reference == "cycle":
        symmetric = np.array([0, 1, 1, 1, 1, 0], dtype=complex) / 2
        return sqrt(p) * symmetric - sqrt(1 - p) * antisymmetric
    if reference == "vacuum":
        return sqrt(p) * basis_state(0, 6) + sqrt(1 - p) * antisymmetric
    raise DomainError(f"Unknown reference state '{reference}'")


def chi1(N, p):
    """√p·(|0>+|N−1>)/√2 + √(1−p)·|Γ_N>."""
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    ends = basis_state(0, N) + basis_state(N - 1, N)
    return sqrt(p) * ends / sqrt(2) + sqrt(1 - p) * gamma_state(N)


def chi2(N, p, phi):
    """√p·|0> + e^{iφ}·√(1−p)·|Γ_N>."""
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    return sqrt(p) * basis_state(0, N) + np.exp(1j * phi) * sqrt(1 - p) * gamma_state(N)


def gamma_entanglement_closed_form(d):
    """
    E₁ of |Γ_N> in d from √(D/(D−1)·(4(D−1)(D'−1)−2)/(N−2)²), D = max(d), D' = N/D.
    """
    N = d.N
    if N <= 2:
        raise DomainError(f"Γ_N is undefined for N = {N}")
    big = max(d.entries)
    other = N // big
    return sqrt(big / (big - 1) * (4 * (big - 1) * (other - 1) - 2) / (N - 2) ** 2)


def exchange_trace_distances(psi):
    """
    (d₂, d₃) for a state of C^6: ρ₁ in [2,3] against ρ₂ in [3,2], and ρ₂ in [2,3] against ρ₁ in [3,2].
    """
    forward, backward = Dims((2, 3)), Dims((3, 2))
    d2 = trace_distance(reduced_density(psi, forward, [1]), reduced_density(psi, backward, [2]))
    d3 = trace_distance(reduced_density(psi, forward, [2]), reduced_density(psi, backward, [1]))
    return d2, d3


def exchange_entanglement_check(psi, d, sigma, t=1):
    """
    (E_t of ψ in d, E_t of T̂_{d,σ}ψ in σ(d)); the two always agree.
    """
    psi = _as_state(psi, d)
    moved = build_operator(d, sigma).apply(psi)
    return entanglement_Et(psi, d, t), entanglement_Et(moved, apply_perm(sigma, d), t)


def local_unitary_exchange_check(L, d1, d2):
    """
    Entanglement of |L> in [d₁,d₂] and in [d₂,d₁], and whether it is an eigenvector of the swap.
    """
    forward, backward = Dims((d1, d2)), Dims((d2, d1))
    psi = basis_state(L, forward.N)
    moved = build_operator(forward, SubsystemPerm.swap()).apply(psi)
    return entanglement_Et(psi, forward), entanglement_Et(psi, backward), bool(np.allclose(moved, psi))


# Symmetric product states

@dataclass(frozen=True)
class ConstraintSystem:
    """
    Chained equalities α_{⌊L/d₂⌋}β_{L mod d₂} = ... along each cycle of π(d₁,d₂).
    """
    d1: int
    d2: int
    chains: tuple

    @property
    def equalities(self):
        return sum(len(chain) - 1 for chain in self.chains)

    def term_sets(self):
        """Each chain as a frozenset of (i, j) index pairs, for order-free comparison."""
        return {frozenset(chain) for chain in self.chains}

    def is_satisfied(self, alpha, beta, tol=CONSTRAINT_TOLERANCE):
        alpha = np.asarray(alpha, dtype=complex)
        beta = np.asarray(beta, dtype=complex)
        for chain in self.chains:
            values = np.array([alpha[i] * beta[j] for i, j in chain])
            if np.max(np.abs(values - values[0])) > tol:
                return False
        return True

    def render(self):
        return ''.join(' = '.join(f"a{i}*b{j}" for i, j in chain) + '\n' for chain in self.chains)


def symmetric_product_constraints(d1, d2):
    """
    Constraints that make α⊗β invariant under T̂_{[d₁,d₂]}; 1-cycles add none.

    Args:
        d1 (int): First dimension
        d2 (int): Second dimension

    Returns:
        ConstraintSystem: One chain per cycle of length >= 2
    """
    decomp = cycle_decomposition(Dims((d1, d2)), SubsystemPerm.swap())
    chains = tuple(tuple(divmod(L, d2) for L in cycle) for cycle in decomp.cycles if len(cycle) > 1)
    return ConstraintSystem(d1, d2, chains)


def check_symmetric_product(alpha, beta, d1, d2):
    """True when (Σα_i|i>)⊗(Σβ_j|j>) satisfies every constraint of (d₁,d₂)."""
    if len(alpha) != d1 or len(beta) != d2:
        raise DomainError(f"Coefficient lengths {len(alpha)}, {len(beta)} do not match ({d1}, {d2})")
    return symmetric_product_constraints(d1, d2).is_satisfied(alpha, beta)


@dataclass(frozen=True)
class SymmetricProduct:
    """
    A symmetric product state α⊗β with support rows x cols.

    free_parameters counts the continuous deformations of α and β that keep
    the state symmetric, beyond rescaling.
    """
    state: np.ndarray
    rows: tuple
    cols: tuple
    free_parameters: int


def _free_parameters(decomp, rows, cols, d2):
    """Kernel dimension of the log-linear constraints on the support, less the two scalings."""
    row_index = {i: n for n, i in enumerate(rows)}
    col_index = {j: len(rows) + n for n, j in enumerate(cols)}
    equations = []
    for cycle in decomp.cycles:
        if len(cycle) < 2 or cycle[0] // d2 not in row_index or cycle[0] % d2 not in col_index:
            continue
        for a, b in zip(cycle, cycle[1:]):
            row = [0] * (len(rows) + len(cols))
            row[row_index[a // d2]] += 1
            row[col_index[a % d2]] += 1
            row[row_index[b // d2]] -= 1
            row[col_index[b % d2]] -= 1
            equations.append(row)
    rank = sympy.Matrix(equations).rank() if equations else 0
    return len(rows) + len(cols) - rank - 2


def solve_symmetric_products(d1, d2, budget=None):
    """
    All symmetric product states of [d₁,d₂], one per support.

    A product α⊗β has support S×T with S, T the nonzero entries of α and β,
    and a symmetric vector is constant on the cycles of π(d₁,d₂), so S×T must
    be a union of cycles. Every such rectangle carries the state that is 1 on
    it; other states on the same support exist only when free_parameters > 0.

    Args:
        d1 (int): First dimension
        d2 (int): Second dimension
        budget (int, optional): Largest 2^(d₁+d₂) searched, defaults to Config.SEARCH_BUDGET

    Returns:
        list: SymmetricProduct entries ordered by support
    """
    budget = budget if budget is not None else get_config().SEARCH_BUDGET
    if 2 ** (d1 + d2) > budget:
        logger.error(f"Support search for [{d1},{d2}] exceeds budget {budget}")
        raise BudgetExceededError(f"Searching 2^{d1 + d2} supports exceeds the budget {budget}")
    decomp = cycle_decomposition(Dims((d1, d2)), SubsystemPerm.swap())
    images = decomp.images()
    found = []
    for n_rows in range(1, d1 + 1):
        for rows in itertools.combinations(range(d1), n_rows):
            for n_cols in range(1, d2 + 1):
                for cols in itertools.combinations(range(d2), n_cols):
                    alpha = np.zeros(d1)
                    alpha[list(rows)] = 1.0
                    beta = np.zeros(d2)
                    beta[list(cols)] = 1.0
                    support = np.outer(alpha, beta).ravel()
                    if not np.array_equal(support[images], support):
                        continue
                    state = support.astype(complex) / sqrt(len(rows) * len(cols))
                    found.append(SymmetricProduct(state, rows, cols, _free_parameters(decomp, rows, cols, d2)))
    logger.debug(f"[{d1},{d2}] has {len(found)} symmetric product supports")
    return found



# Completely entangled subspaces

def multipartite_ces_basis(d):
    """
    Orthonormal basis of the complement of span{Σ_{i_1+...+i_k=n}|i_1...i_k>}.

    Args:
        d (Dims): Shape

    Returns:
        numpy.ndarray: Rows spanning the completely entangled subspace
    """
    sums = digits_table(d).sum(axis=1)
    spanning = np.array([(sums == n).astype(float) for n in range(sums.max() + 1)])
    return null_space(spanning).T.astype(complex)


def ces_orthocomplement_basis(d1, d2):
    """R_{[d₁,d₂]}, the (d₁−1)(d₂−1)-dimensional completely entangled subspace."""
    return multipartite_ces_basis(Dims((d1, d2)))


def qubit_qudit_ces_basis(d):
    """(|0,i> − |1,i−1>)/√2 in [2,d] for i = 1..d−1."""
    basis = np.zeros((d - 1, 2 * d), dtype=complex)
    for i in range(1, d):
        basis[i - 1, i] = 1 / sqrt(2)
        basis[i - 1, d + i - 1] = -1 / sqrt(2)
    return basis


def qudit_qubit_ces_basis(d):
    """(|i−1,1> − |i,0>)/√2 in [d,2] for i = 1..d−1."""
    basis = np.zeros((d - 1, 2 * d), dtype=complex)
    for i in range(1, d):
        basis[i - 1, 2 * i - 1] = 1 / sqrt(2)
        basis[i - 1, 2 * i] = -1 / sqrt(2)
    return basis


def subspace_intersection(first, second, tol=1e-9):
    """
    Orthonormal rows spanning the intersection of two spans given by orthonormal rows.
    """
    first = np.atleast_2d(first)
    second = np.atleast_2d(second)
    stacked = np.hstack([first.T, -second.T])
    coefficients = null_space(stacked, rcond=tol)
    if coefficients.shape[1] == 0:
        return np.zeros((0, first.shape[1]), dtype=complex)
    common = first.T @ coefficients[:len(first)]
    return orth(common, rcond=tol).T


def ces_intersection_qubit_qudit(d):
    """R_{[2,d]} ∩ R_{[d,2]}; (d−1)/2-dimensional for odd d and a line for even d."""
    return subspace_intersection(ces_orthocomplement_basis(2, d), ces_orthocomplement_basis(d, 2))


def qubit_qudit_intersection_family(d):
    """
    Explicit spanning vectors of R_{[2,d]} ∩ R_{[d,2]}.

    Odd d: ½(|2i−1> − |2i> − |d+2i−2> + |d+2i−1>), i = 1..(d−1)/2.
    Even d: the alternating sum over |1>..|2(d−1)> normalized.
    """
    if d % 2:
        family = np.zeros(((d - 1) // 2, 2 * d), dtype=complex)
        for i in range(1, (d - 1) // 2 + 1):
            family[i - 1, [2 * i - 1, 2 * i, d + 2 * i - 2, d + 2 * i - 1]] = np.array([1, -1, -1, 1]) / 2
        return family
    family = np.zeros((1, 2 * d), dtype=complex)
    family[0, 1:2 * d - 1] = (-1.0) ** np.arange(2 * d - 2) / sqrt(2 * (d - 1))
    return family


def antisymmetric_basis(d):
    """(|ij> − |ji>)/√2 for i > j in [d,d]."""
    vectors = []
    for i, j in itertools.combinations(range(d), 2):
        psi = np.zeros(d * d, dtype=complex)
        psi[j * d + i] = 1 / sqrt(2)
        psi[i * d + j] = -1 / sqrt(2)
        vectors.append(psi)
    return np.array(vectors)


def r_conversion_check(d1, d2, tol=1e-10):
    """True when T̂_{[d₁,d₂]} maps R_{[d₁,d₂]} onto R_{[d₂,d₁]}."""
    swap = build_operator(Dims((d1, d2)), SubsystemPerm.swap())
    moved = swap.apply(ces_orthocomplement_basis(d1, d2))
    target = ces_orthocomplement_basis(d2, d1)
    return bool(np.max(np.abs(eigenspace_projector(moved) - eigenspace_projector(target))) <= tol)


# Sampling

def haar_random_state(dim, seed=None):
    """
    Haar-random unit vector of C^dim from complex normal amplitudes.

    Args:
        dim (int): Dimension
        seed (int, optional): Seed for numpy.random.default_rng

    Returns:
        numpy.ndarray: Normalized state
    """
    return haar_random_states(dim, 1, seed)[0]


def haar_random_states(dim, count, seed=None):
    rng = np.random.default_rng(seed)
    states = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return states / np.linalg.norm(states, axis=1, keepdims=True)


def min_entanglement_estimate(basis, d, samples=None, seed=None, t=1):
    """
    Smallest E_t over Haar-random unit vectors of a subspace.

    Args:
        basis (numpy.ndarray): Orthonormal rows spanning the subspace
        d (Dims): Shape
        samples (int, optional): Number of samples, defaults to Config.DEFAULT_SAMPLES
        seed (int, optional): RNG seed, defaults to Config.DEFAULT_SEED
        t (int): Cut size

    Returns:
        float: The sampled minimum
    """
    basis = np.atleast_2d(np.asarray(basis, dtype=complex))
    if basis.size == 0 or basis.shape[0] == 0:
        logger.error(f"Empty subspace passed for {d}")
        raise DomainError("Cannot sample an empty subspace")
    settings = get_config()
    samples = samples if samples is not None else settings.DEFAULT_SAMPLES
    seed = seed if seed is not None else settings.DEFAULT_SEED
    if basis.shape[0] == 1:
        return float(batch_entanglement(basis, d, t)[0])
    # Haar measure on the span is the image of the Haar measure on C^r
    states = haar_random_states(basis.shape[0], samples, seed) @ basis
    estimate = float(batch_entanglement(states, d, t).min())
    logger.debug(f"Sampled minimum E_{t} over {samples} states in {d}: {estimate:.6g}")
    return estimate


def basis_type(vectors, d):
    """
    (p, q): counts of entangled (E₁ > 1e-9) and product basis vectors.
    """
    values = [entanglement_Et(v, d, 1) for v in np.atleast_2d(vectors)]
    entangled = sum(1 for e in values if e > PRODUCT_TOLERANCE)
    return entangled, len(values) - entangled
