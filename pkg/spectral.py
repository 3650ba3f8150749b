"""
Spectra of subsystem-permutation operators.

Every eigenvalue of T̂_{d,σ} is a root of unity fixed by the cycle lengths of
π(d,σ), so eigenvalues are kept as exact (order, exponent) pairs and floats
only appear in amplitudes.
"""
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, gcd, sqrt

import numpy as np
import sympy

from config import get_config
from errors import BudgetExceededError, DomainError
from partitions import Dims
from perm_engine import (SubsystemPerm, all_perms, cycle_decomposition, image_table,
                         matrix_formula_entry)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RootOfUnity:
    """
    The number exp(2πi·exponent/order), reduced to lowest terms.
    """
    order: int
    exponent: int = 0

    def __post_init__(self):
        if self.order < 1:
            raise DomainError(f"Order must be positive, got {self.order}")
        exponent = self.exponent % self.order
        g = gcd(exponent, self.order)
        object.__setattr__(self, 'order', self.order // g)
        object.__setattr__(self, 'exponent', exponent // g)

    @property
    def turn(self):
        """Angle as a fraction of a full turn, in [0, 1)."""
        return Fraction(self.exponent, self.order)

    def value(self):
        return complex(np.exp(2j * np.pi * self.exponent / self.order))

    def conjugate(self):
        return RootOfUnity(self.order, -self.exponent)

    def __lt__(self, other):
        return self.turn < other.turn

    def label(self):
        if self.order == 1:
            return '1'
        if self.order == 2:
            return '-1'
        if self.order == 4:
            return 'i' if self.exponent == 1 else '-i'
        return f'exp(2pi*i*{self.exponent}/{self.order})'

    def __str__(self):
        return self.label()

    def to_json(self):
        return {"order": self.order, "exponent": self.exponent}


class PermOperator:
    """
    T̂_{d,σ} held as its image table: T̂|L> = |images[L]>.
    """

    def __init__(self, images, shape=None, sigma=None):
        self.images = np.asarray(images, dtype=np.int64)
        self.N = len(self.images)
        self.shape = shape
        self.sigma = sigma

    def apply(self, vector):
        """T̂ applied to an amplitude vector (or to the rows of a stack of vectors)."""
        vector = np.asarray(vector)
        out = np.empty_like(vector)
        out[..., self.images] = vector
        return out

    def inverse(self):
        inverse = np.empty_like(self.images)
        inverse[self.images] = np.arange(self.N)
        return PermOperator(inverse, self.shape, self.sigma.inverse() if self.sigma else None)

    def compose(self, other):
        """self∘other."""
        return PermOperator(self.images[other.images])

    def is_identity(self):
        return bool(np.array_equal(self.images, np.arange(self.N)))

    def to_dense(self, limit=None):
        """
        Dense 0/1 matrix with a single 1 in each column n at row images[n].

        Args:
            limit (int, optional): Largest N materialized, defaults to Config.DENSE_LIMIT

        Returns:
            numpy.ndarray: N x N integer matrix
        """
        limit = limit if limit is not None else get_config().DENSE_LIMIT
        if self.N > limit:
            raise BudgetExceededError(f"Dense matrix of size {self.N} exceeds the limit {limit}")
        matrix = np.zeros((self.N, self.N), dtype=np.int64)
        matrix[self.images, np.arange(self.N)] = 1
        return matrix


def build_operator(d, sigma):
    """
    T̂_{d,σ} as a PermOperator.

    For bipartite shapes the image table is cross-checked against the
    floor/mod matrix formula and any disagreement is logged.
    """
    operator = PermOperator(image_table(d, sigma), d, sigma)
    if d.k == 2 and not sigma.is_identity():
        d1, d2 = d.entries
        bad = [n for n in range(d.N) if not matrix_formula_entry(operator.images[n] + 1, n + 1, d1, d2)]
        if bad:
            logger.warning(f"Matrix formula disagrees with the orbit construction for {d} at labels {bad}")
    return operator


def spectrum(d, sigma):
    """
    Eigenvalues of T̂_{d,σ} with multiplicities.

    Args:
        d (Dims): Shape
        sigma (SubsystemPerm): Subsystem permutation

    Returns:
        dict: RootOfUnity -> multiplicity, ordered by angle
    """
    counts = Counter()
    for length in cycle_decomposition(d, sigma).cycle_lengths():
        for j in range(length):
            counts[RootOfUnity(length, j)] += 1
    return dict(sorted(counts.items()))


def cycle_eigenvector(cycle, m, N):
    """
    (1/√l)·Σ_r λ^{-r}|L_r>, λ = exp(2πi·m/l), for one cycle of π.

    The cycle is rotated to start at its minimum label, whose coefficient is
    then real and positive.

    Args:
        cycle (tuple): Labels L_1..L_l in cycle order
        m (int): Exponent, 0 <= m < l
        N (int): Dimension of the ambient space

    Returns:
        numpy.ndarray: Normalized complex vector of length N
    """
    l = len(cycle)
    if not 0 <= m < l:
        raise DomainError(f"Exponent {m} outside 0..{l - 1}")
    start = cycle.index(min(cycle))
    ordered = list(cycle[start:]) + list(cycle[:start])
    vector = np.zeros(N, dtype=complex)
    vector[ordered] = np.exp(-2j * np.pi * m * np.arange(l) / l) / sqrt(l)
    return vector


@dataclass(frozen=True)
class EigenspaceBasis:
    eigenvalue: RootOfUnity
    vectors: np.ndarray = field(repr=False)
    shape: Dims = None
    sigma: SubsystemPerm = None

    @property
    def dimension(self):
        return len(self.vectors)

    def projector(self):
        return eigenspace_projector(self.vectors)

    def to_json(self):
        return json.dumps({
            "eigenvalue": self.eigenvalue.to_json(),
            "dimension": self.dimension,
            "vectors": [[[float(a.real), float(a.imag)] for a in v] for v in self.vectors]
        })


def eigenspace(d, sigma, eta):
    """
    Orthonormal basis of S^η_{d,σ}: one vector per cycle whose length is a multiple of η's order.

    Args:
        d (Dims): Shape
        sigma (SubsystemPerm): Subsystem permutation
        eta (RootOfUnity): Eigenvalue

    Returns:
        EigenspaceBasis: Possibly empty basis
    """
    decomp = cycle_decomposition(d, sigma)
    vectors = [cycle_eigenvector(cycle, eta.exponent * (len(cycle) // eta.order), d.N)
               for cycle in decomp.cycles if len(cycle) % eta.order == 0]
    vectors = np.array(vectors).reshape(len(vectors), d.N)
    logger.debug(f"S^{eta} of T{d},{sigma} is {len(vectors)}-dimensional")
    return EigenspaceBasis(eta, vectors, d, sigma)


def eigenbasis(d, sigma):
    """The full basis 𝔹^T of per-cycle eigenvectors, grouped by eigenvalue."""
    return [eigenspace(d, sigma, eta) for eta in spectrum(d, sigma)]


def eigenspace_projector(vectors):
    """Orthogonal projector onto the span of orthonormal rows."""
    vectors = np.asarray(vectors)
    return vectors.T @ vectors.conj()


def generalized_symmetric_basis(N):
    """|0>, |N−1> and |Γ_N>, symmetric under every T̂_{d,σ} of C^N."""
    if N < 3:
        raise DomainError(f"Γ_N needs N >= 3, got {N}")
    basis = np.zeros((3, N))
    basis[0, 0] = 1.0
    basis[1, N - 1] = 1.0
    basis[2, 1:N - 1] = 1.0 / sqrt(N - 2)
    return basis


def _projector_counts(d, signed):
    """Integer matrix Σ_σ (±1)·T̂_{d,σ}, exact before the 1/k! scaling."""
    max_k = get_config().PROJECTOR_MAX_K
    if d.k > max_k:
        logger.error(f"k = {d.k} exceeds the projector limit {max_k}")
        raise BudgetExceededError(f"Summing {d.k}! permutations exceeds the limit k <= {max_k}")
    limit = get_config().DENSE_LIMIT
    if d.N > limit:
        raise BudgetExceededError(f"Dense matrix of size {d.N} exceeds the limit {limit}")
    counts = np.zeros((d.N, d.N), dtype=np.int64)
    columns = np.arange(d.N)
    for sigma in all_perms(d.k):
        counts[image_table(d, sigma), columns] += sigma.sign() if signed else 1
    return counts


def symmetric_projector(d):
    """Ŝ_d = (1/k!)·Σ_σ T̂_{d,σ}; a projector only for homogeneous d."""
    return _projector_counts(d, signed=False) / factorial(d.k)


def antisymmetric_projector(d):
    """Â_d = (1/k!)·Σ_σ sgn(σ)·T̂_{d,σ}."""
    return _projector_counts(d, signed=True) / factorial(d.k)


def antisymmetric_is_zero(d):
    """Exact test for Â_d = 0 on the integer accumulation."""
    return not _projector_counts(d, signed=True).any()


def rho_family(d, p):
    """
    ρ(p) = p·Ŝ/C(d+k−1,k) + (1−p)·Â/C(d,k) on a homogeneous shape.

    Args:
        d (Dims): Homogeneous shape [q, ..., q]
        p (float): Weight of the symmetric part, 0 <= p <= 1

    Returns:
        numpy.ndarray: Unit-trace density matrix
    """
    if not d.is_homogeneous:
        raise DomainError(f"ρ(p) is defined on homogeneous shapes, got {d}")
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    q, k = d[0], d.k
    rho = p * symmetric_projector(d) / comb(q + k - 1, k)
    if p < 1:
        if k > q:
            logger.error(f"ρ_A undefined for k = {k} > d = {q}")
            raise DomainError(f"The antisymmetric state needs k <= d, got k = {k}, d = {q}")
        rho = rho + (1 - p) * antisymmetric_projector(d) / comb(q, k)
    return rho


def cyclic_sym_dim(d, k):
    """
    Dimension of the σ_c-symmetric subspace of (C^d)^{⊗k} for prime k.

    The d constant strings are fixed and every other label lies on a k-cycle,
    giving d + (d^k − d)/k; for d − 2 < k this equals
    ⌊(d^k−2)/k⌋ + mod(d^k−2, k) + 2.
    """
    if not sympy.isprime(k):
        raise DomainError(f"k must be prime, got {k}")
    return d + (d ** k - d) // k


def cyclic_shift_table(d, k):
    """(eigenvalue, dimension) rows of the cyclic shift on [d]*k."""
    return list(spectrum(Dims((d,) * k), SubsystemPerm.cyclic_shift(k)).items())


def render_spectrum(table):
    """Text rendering, one 'eigenvalue: dimension' row per line."""
    return ''.join(f"{eta.label()}: {dim}\n" for eta, dim in table)
