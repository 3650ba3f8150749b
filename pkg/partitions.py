"""
Multiplicative partitions of N: tensor-product shapes, their permutation
equivalence classes and the primitive (all-prime) decomposition.
"""
import json
import logging
from dataclasses import dataclass, field
from math import prod

import sympy
from sympy.utilities.iterables import multiset_permutations

from config import get_config
from errors import BudgetExceededError, DomainError

# Set up logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Dims:
    """
    Ordered shape d = [d_1, ..., d_k] of a tensor product space C^N.

    Args:
        entries (tuple): Subsystem dimensions, each at least 2
        limit (int, optional): Largest admissible N, defaults to Config.MAX_DIMENSION
    """
    entries: tuple
    limit: int = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        object.__setattr__(self, 'entries', entries)
        if len(entries) < 2:
            logger.error(f"Shape {list(entries)} has fewer than two subsystems")
            raise DomainError(f"A tensor-product shape needs at least two subsystems, got {list(entries)}")
        if any(e < 2 for e in entries):
            logger.error(f"Shape {list(entries)} has a factor below 2")
            raise DomainError(f"Subsystem dimensions must be at least 2, got {list(entries)}")
        limit = self.limit if self.limit is not None else get_config().MAX_DIMENSION
        if prod(entries) > limit:
            raise BudgetExceededError(f"N = {prod(entries)} exceeds the dimension limit {limit}")

    @classmethod
    def parse(cls, text):
        """Build a shape from a comma or 'x' separated string such as '2,2,3'."""
        try:
            entries = [int(part) for part in text.replace('x', ',').split(',') if part.strip()]
        except ValueError:
            raise DomainError(f"Cannot parse shape '{text}'")
        return cls(tuple(entries))

    @property
    def N(self):
        return prod(self.entries)

    @property
    def k(self):
        return len(self.entries)

    @property
    def is_homogeneous(self):
        return len(set(self.entries)) == 1

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, index):
        return self.entries[index]

    def label(self):
        """Render as '2x2x3' for CSV tables."""
        return 'x'.join(str(e) for e in self.entries)

    def __str__(self):
        return '[' + ','.join(str(e) for e in self.entries) + ']'

    def to_json(self):
        return list(self.entries)


@dataclass(frozen=True)
class PartitionClass:
    """Permutation-equivalence class 𝔼(d) with its sorted representative."""
    representative: Dims
    members: tuple

    def __contains__(self, d):
        return d in self.members

    def to_json(self):
        return {
            "representative": self.representative.to_json(),
            "members": [m.to_json() for m in self.members]
        }


def prime_factor_multiset(N, limit=None):
    """
    Prime factors of N with multiplicity, in non-decreasing order.

    Args:
        N (int): Integer to factor, at least 2
        limit (int, optional): Largest N accepted, defaults to Config.MAX_DIMENSION

    Returns:
        tuple: Sorted primes whose product is N; its length is Ω(N)
    """
    if N < 2:
        logger.error(f"Cannot factor N = {N}")
        raise DomainError(f"N must be at least 2, got {N}")
    limit = limit if limit is not None else get_config().MAX_DIMENSION
    if N > limit:
        raise BudgetExceededError(f"N = {N} exceeds the dimension limit {limit}")

    factors = sympy.factorint(N)
    return tuple(p for p in sorted(factors) for _ in range(factors[p]))


def omega(N):
    """Ω(N), the number of prime factors counted with multiplicity."""
    return len(prime_factor_multiset(N))


def divisors(N):
    return [int(q) for q in sympy.divisors(N)]


def primitive_partition(N):
    """
    The primitive decomposition d_p: sorted prime factors of a composite N.

    Args:
        N (int): Composite integer

    Returns:
        Dims: The all-prime shape, e.g. [2,2,2,3] for N = 24
    """
    if N < 4:
        raise DomainError(f"No tensor-product shape exists for N = {N}")
    primes = prime_factor_multiset(N)
    if len(primes) < 2:
        logger.error(f"N = {N} is prime")
        raise DomainError(f"N = {N} is prime; no tensor-product shape exists")
    return Dims(primes)


def _ordered_factorizations(n):
    """Yield every ordered tuple of factors >= 2 with product n (including (n,))."""
    yield (n,)
    for q in divisors(n)[1:-1]:
        for rest in _ordered_factorizations(n // q):
            yield (q,) + rest


def all_partitions(N):
    """
    ℙ(N): every ordered multiplicative partition of N with at least two factors.

    Args:
        N (int): Composite integer

    Returns:
        list: Dims in lexicographic order of their entries
    """
    if N < 4 or len(prime_factor_multiset(N)) < 2:
        logger.error(f"all_partitions called with non-composite N = {N}")
        raise DomainError(f"N must be composite, got {N}")
    shapes = sorted(Dims(t) for t in _ordered_factorizations(N) if len(t) >= 2)
    logger.debug(f"|P({N})| = {len(shapes)}")
    return shapes


def partitions_with_k(N, k):
    """ℙ_k(N); empty when k is outside 2..Ω(N)."""
    if k < 2 or k > omega(N):
        return []
    return [d for d in all_partitions(N) if d.k == k]


def equivalence_class(d):
    """
    All distinct orderings of the entries of d.

    Args:
        d (Dims): Any shape

    Returns:
        PartitionClass: Class with the sorted representative
    """
    members = tuple(Dims(tuple(m)) for m in multiset_permutations(sorted(d.entries)))
    return PartitionClass(representative=Dims(tuple(sorted(d.entries))), members=members)


def representative_partitions(N):
    """Sorted representatives of every class of ℙ(N), ordered by k then entries."""
    reps = {tuple(sorted(d.entries)) for d in all_partitions(N)}
    return [Dims(r) for r in sorted(reps, key=lambda r: (len(r), r))]


def apply_perm(sigma, d):
    """
    Permute the entries of d by sigma: σ(d) = [d_{σ⁻¹(1)}, ..., d_{σ⁻¹(k)}].

    Args:
        sigma (SubsystemPerm): Permutation of the k slots
        d (Dims): Shape to permute

    Returns:
        Dims: The permuted shape
    """
    if sigma.k != d.k:
        logger.error(f"Permutation of {sigma.k} slots applied to {d}")
        raise DomainError(f"Permutation acts on {sigma.k} slots but the shape has {d.k}")
    inverse = sigma.inverse().images
    return Dims(tuple(d[inverse[r] - 1] for r in range(d.k)))


def partitions_json(N):
    """JSON text listing every equivalence class of ℙ(N)."""
    classes = [equivalence_class(rep).to_json() for rep in representative_partitions(N)]
    return json.dumps({"N": N, "classes": classes}, indent=2)
