"""
The label permutation π(d,σ) ∈ S_N induced by permuting the subsystems of a
tensor-product shape, its cycle structure and closed-form cycle counts.
"""
import itertools
import json
import logging
from dataclasses import dataclass, field
from math import factorial, gcd, lcm

import numpy as np
import sympy
from sympy.combinatorics import Permutation
from sympy.ntheory import n_order

from config import get_config
from errors import BudgetExceededError, DomainError
from index_map import MultiIndex, digits_table, flat_to_multi, labels_from_digits, multi_to_flat
from partitions import Dims, apply_perm, primitive_partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubsystemPerm:
    """
    Permutation σ of the slots 1..k, stored as the image list (σ(1), ..., σ(k)).
    """
    images: tuple

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        object.__setattr__(self, 'images', images)
        if sorted(images) != list(range(1, len(images) + 1)):
            logger.error(f"Image list {list(images)} is not a permutation")
            raise DomainError(f"{list(images)} is not a permutation of 1..{len(images)}")

    @classmethod
    def identity(cls, k):
        return cls(tuple(range(1, k + 1)))

    @classmethod
    def swap(cls):
        return cls((2, 1))

    @classmethod
    def cyclic_shift(cls, k):
        """σ_c: slot i goes to slot i+1 and slot k to slot 1."""
        return cls(tuple(range(2, k + 1)) + (1,))

    @classmethod
    def parse(cls, text):
        """Build from an image list such as '2,3,1'."""
        try:
            return cls(tuple(int(part) for part in text.split(',') if part.strip()))
        except ValueError:
            raise DomainError(f"Cannot parse permutation '{text}'")

    @classmethod
    def from_cycles(cls, cycles, k):
        """
        Build from 1-based cycle notation.

        Args:
            cycles (list): Cycles such as [(1, 3), (2, 4)]
            k (int): Number of slots

        Returns:
            SubsystemPerm: The permutation
        """
        if any(not 1 <= c <= k for cycle in cycles for c in cycle):
            raise DomainError(f"Cycles {cycles} mention slots outside 1..{k}")
        perm = Permutation([[c - 1 for c in cycle] for cycle in cycles], size=k)
        return cls._from_sympy(perm)

    @classmethod
    def _from_sympy(cls, perm):
        return cls(tuple(i + 1 for i in perm.array_form))

    def _to_sympy(self):
        return Permutation([i - 1 for i in self.images])

    @property
    def k(self):
        return len(self.images)

    def __call__(self, slot):
        return self.images[slot - 1]

    def compose(self, other):
        """σ∘τ, applying other first."""
        if other.k != self.k:
            raise DomainError(f"Cannot compose permutations of {self.k} and {other.k} slots")
        # sympy multiplies left to right: (p*q)(i) = q(p(i))
        return SubsystemPerm._from_sympy(other._to_sympy() * self._to_sympy())

    def inverse(self):
        return SubsystemPerm._from_sympy(~self._to_sympy())

    def is_identity(self):
        return self.images == tuple(range(1, self.k + 1))

    def sign(self):
        """+1 for even and -1 for odd permutations."""
        return self._to_sympy().signature()

    def moved_slots(self):
        return tuple(i for i, image in enumerate(self.images, start=1) if i != image)

    def cycles(self):
        """1-based cycles including fixed points, each starting at its minimum."""
        return [tuple(c + 1 for c in cycle)
                for cycle in self._to_sympy().full_cyclic_form]

    def cycle_notation(self):
        """'id', '(1,2,3)' for a single full cycle, otherwise '((1),(2),(3,4))'."""
        if self.is_identity():
            return 'id'
        cycles = self.cycles()
        if len(cycles) == 1:
            return '(' + ','.join(map(str, cycles[0])) + ')'
        return '(' + ','.join('(' + ','.join(map(str, c)) + ')' for c in cycles) + ')'

    def __str__(self):
        return self.cycle_notation()


def all_perms(k):
    """S_k in lexicographic order of image lists, identity first."""
    return [SubsystemPerm(tuple(p)) for p in itertools.permutations(range(1, k + 1))]


@dataclass(frozen=True)
class CycleDecomp:
    """
    Canonical disjoint-cycle form of a label permutation on 0..N-1.

    Cycles start at their minimum label and are sorted by it; equality only
    compares the cycles, so permutations built from different shapes compare
    as elements of S_N.
    """
    cycles: tuple
    shape: Dims = field(default=None, compare=False)
    sigma: SubsystemPerm = field(default=None, compare=False)
    perm: Permutation = field(default=None, compare=False, repr=False)

    @classmethod
    def from_images(cls, images, shape=None, sigma=None):
        return cls.from_sympy(Permutation([int(i) for i in images]), shape, sigma)

    @classmethod
    def from_sympy(cls, perm, shape=None, sigma=None):
        """Canonical form from full_cyclic_form: min-first cycles sorted by their minimum."""
        cycles = tuple(tuple(int(i) for i in cycle) for cycle in perm.full_cyclic_form)
        return cls(cycles, shape, sigma, perm)

    def to_sympy(self):
        if self.perm is not None:
            return self.perm
        return Permutation([list(c) for c in self.cycles], size=self.N)

    @property
    def N(self):
        return sum(len(c) for c in self.cycles)

    def images(self):
        return np.array(self.to_sympy().array_form, dtype=np.int64)

    def cycle_lengths(self):
        return [len(c) for c in self.cycles]

    def count_length(self, length):
        return sum(1 for c in self.cycles if len(c) == length)

    def compose(self, other):
        """self∘other as a label permutation, applying other first."""
        return CycleDecomp.from_sympy(other.to_sympy() * self.to_sympy())

    def inverse(self):
        return CycleDecomp.from_sympy(~self.to_sympy())

    def render(self):
        return '(' + ','.join('(' + ','.join(map(str, c)) + ')' for c in self.cycles) + ')'

    def __str__(self):
        return self.render()

    def to_json(self):
        return json.dumps({
            "d": self.shape.to_json() if self.shape else None,
            "sigma": list(self.sigma.images) if self.sigma else None,
            "cycles": [list(c) for c in self.cycles]
        })


def _check_perm(d, sigma):
    if sigma.k != d.k:
        logger.error(f"Permutation of {sigma.k} slots used with shape {d}")
        raise DomainError(f"Permutation acts on {sigma.k} slots but {d} has {d.k}")


def step(L, d, sigma):
    """
    Image of |L> under T̂_{d,σ}, read back as a label of C^N.

    Args:
        L (int): Basis label
        d (Dims): Source shape
        sigma (SubsystemPerm): Subsystem permutation

    Returns:
        int: The label of |i_{σ⁻¹(1)} ... i_{σ⁻¹(k)}>_{σ(d)}
    """
    _check_perm(d, sigma)
    digits = flat_to_multi(L, d).indices
    inverse = sigma.inverse().images
    target = apply_perm(sigma, d)
    return multi_to_flat(MultiIndex(tuple(digits[inverse[r] - 1] for r in range(d.k)), target))


def image_table(d, sigma):
    """Vectorized step over every label of d."""
    _check_perm(d, sigma)
    inverse = np.array(sigma.inverse().images) - 1
    target = apply_perm(sigma, d)
    return labels_from_digits(digits_table(d)[:, inverse], target)


def bipartite_step(L, d1, d2):
    """L' = d₁·L − ⌊L/d₂⌋·(N−1), the swap on [d₁,d₂] as a recurrence."""
    N = d1 * d2
    if not 0 <= L < N:
        raise DomainError(f"Label {L} is outside 0..{N - 1}")
    return d1 * L - (L // d2) * (N - 1)


def cycle_decomposition(d, sigma):
    """
    Canonical cycle cover of 0..N-1 under step(·, d, σ).

    Args:
        d (Dims): Source shape
        sigma (SubsystemPerm): Subsystem permutation

    Returns:
        CycleDecomp: π(d, σ) with 1-cycles included
    """
    decomp = CycleDecomp.from_images(image_table(d, sigma), d, sigma)
    logger.debug(f"pi({d}, {sigma}) has {len(decomp.cycles)} cycles")
    return decomp


def mobius(n):
    """Möbius function μ(n)."""
    if n < 1:
        raise DomainError(f"μ(n) needs n >= 1, got {n}")
    exponents = sympy.factorint(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def l_star(d1, d2):
    """min{p >= 1 : d₂^p ≡ 1 (mod N−1)}, the longest cycle length of π(d₁,d₂)."""
    if d1 < 2 or d2 < 2:
        raise DomainError(f"Dimensions must be at least 2, got ({d1}, {d2})")
    modulus = d1 * d2 - 1
    assert gcd(d2, modulus) == 1
    return int(n_order(d2, modulus))


def cycle_count(l, d1, d2):
    """
    Number of cycles of length l in π(d₁,d₂), from the Möbius inversion of fixed-point counts.

    Args:
        l (int): Cycle length
        d1 (int): First dimension
        d2 (int): Second dimension

    Returns:
        int: Number of length-l cycles
    """
    if l < 1:
        raise DomainError(f"Cycle length must be positive, got {l}")
    modulus = d1 * d2 - 1
    if l == 1:
        # N-1 is fixed on top of the gcd(d₂−1, N−1) residues
        return gcd(d2 - 1, modulus) + 1
    if l_star(d1, d2) % l:
        return 0
    total = sum(mobius(l // e) * gcd(pow(d2, e, modulus) - 1, modulus) for e in sympy.divisors(l))
    return total // l


def operator_order(decomp):
    """Smallest m with π^m the identity: the lcm of the cycle lengths."""
    return lcm(*decomp.cycle_lengths())


def compose_check(d, sigma1, sigma2):
    """
    Both sides of π(d, σ₁∘σ₂) = π(σ₂(d), σ₁) ∘ π(d, σ₂).

    Returns:
        tuple: (lhs, rhs) CycleDecomp pair
    """
    lhs = cycle_decomposition(d, sigma1.compose(sigma2))
    rhs = cycle_decomposition(apply_perm(sigma2, d), sigma1).compose(cycle_decomposition(d, sigma2))
    return lhs, rhs


def inverse_check(d, sigma):
    """True when π(σ(d), σ⁻¹) is the inverse of π(d, σ)."""
    forward = cycle_decomposition(d, sigma)
    backward = cycle_decomposition(apply_perm(sigma, d), sigma.inverse())
    return backward == forward.inverse()


def cyclic_reduction_check(d):
    """
    Check π(d, σ_c) = π(d', d_k) and π(d, σ_c⁻¹) = π(d₁, N/d₁) with d' = N/d_k.

    Returns:
        tuple: (bool, bool) for the two identities
    """
    shift = SubsystemPerm.cyclic_shift(d.k)
    swap = SubsystemPerm.swap()
    forward = cycle_decomposition(d, shift) == cycle_decomposition(Dims((d.N // d[-1], d[-1])), swap)
    backward = cycle_decomposition(d, shift.inverse()) == cycle_decomposition(Dims((d[0], d.N // d[0])), swap)
    return forward, backward


def matrix_formula_entry(m, n, d1, d2):
    """
    Entry [T]_{m,n} of T̂_{[d₁,d₂]} from the floor/mod formula, with 1-based m and n.
    """
    return int((m - 1) // d1 == (n - 1) % d2 and (n - 1) // d2 == (m - 1) % d1)


@dataclass(frozen=True)
class CoarseMatch:
    sigma1: SubsystemPerm
    sigma2: SubsystemPerm
    refined: Dims
    verified: bool


def coarse_grain_match(d_prime, sigma_prime, budget=None):
    """
    Find σ₁, σ₂ ∈ S_Ω with π(σ₁(d_p), σ₂) = π(d', σ') by exhaustive search.

    Args:
        d_prime (Dims): Coarse shape
        sigma_prime (SubsystemPerm): Permutation of the coarse slots
        budget (int, optional): Largest (Ω!)² searched, defaults to Config.SEARCH_BUDGET

    Returns:
        CoarseMatch: The lexicographically first pair, or None when no pair exists
    """
    _check_perm(d_prime, sigma_prime)
    primitive = primitive_partition(d_prime.N)
    if primitive.k < d_prime.k:
        raise DomainError(f"{d_prime} is finer than the primitive shape {primitive}")
    budget = budget if budget is not None else get_config().SEARCH_BUDGET
    size = factorial(primitive.k) ** 2
    if size > budget:
        logger.error(f"Coarse-grain search over {size} pairs exceeds budget {budget}")
        raise BudgetExceededError(f"Search over {size} permutation pairs exceeds the budget {budget}")

    logger.info(f"Searching {size} permutation pairs for {d_prime} {sigma_prime}")
    target = image_table(d_prime, sigma_prime)
    perms = all_perms(primitive.k)
    tried = set()
    for sigma1 in perms:
        refined = apply_perm(sigma1, primitive)
        if refined in tried:
            continue
        tried.add(refined)
        digits = digits_table(refined)
        for sigma2 in perms:
            inverse = np.array(sigma2.inverse().images) - 1
            permuted = apply_perm(sigma2, refined)
            # Reject on label 1 before comparing the full table
            if labels_from_digits(digits[1, inverse], permuted) != target[1]:
                continue
            if np.array_equal(labels_from_digits(digits[:, inverse], permuted), target):
                logger.debug(f"Match sigma1={sigma1} sigma2={sigma2} on {refined}")
                verified = cycle_decomposition(refined, sigma2) == cycle_decomposition(d_prime, sigma_prime)
                return CoarseMatch(sigma1, sigma2, refined, verified)
    logger.info(f"No coarse-grained pair found for {d_prime} {sigma_prime}")
    return None
