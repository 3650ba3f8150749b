"""
Conversion between flat basis labels of C^N and multi-indices of a shape.

Digits are most significant first, so slot 1 carries the largest stride and
|i_1 i_2 ... i_k>_d is the label sum_r i_r * prod_{j>r} d_j.
"""
import logging
from dataclasses import dataclass

import numpy as np

from errors import DomainError
from partitions import Dims

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MultiIndex:
    indices: tuple
    shape: Dims

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        object.__setattr__(self, 'indices', indices)
        if len(indices) != self.shape.k:
            raise DomainError(f"{len(indices)} digits given for shape {self.shape}")
        for r, (i, radix) in enumerate(zip(indices, self.shape)):
            if not 0 <= i < radix:
                logger.error(f"Digit {i} in slot {r + 1} outside 0..{radix - 1}")
                raise DomainError(f"Digit {i} in slot {r + 1} is outside 0..{radix - 1} for shape {self.shape}")

    def __iter__(self):
        return iter(self.indices)

    def __str__(self):
        # Ket notation as in |101>_[2,2,3]
        return '|' + ''.join(str(i) for i in self.indices) + '>_' + str(self.shape)


def _check_label(L, N):
    if not 0 <= L < N:
        logger.error(f"Label {L} outside 0..{N - 1}")
        raise DomainError(f"Label {L} is outside 0..{N - 1}")


def flat_to_multi(L, d):
    """
    Mixed-radix digits of label L in the radices of d.

    Args:
        L (int): Basis label, 0 <= L < N
        d (Dims): Shape

    Returns:
        MultiIndex: Digits i_1..i_k, most significant first
    """
    _check_label(L, d.N)
    return MultiIndex(tuple(int(i) for i in np.unravel_index(L, d.entries)), d)


def multi_to_flat(m):
    """Label of a multi-index: L = Σ_r i_r · Π_{j>r} d_j."""
    return int(np.ravel_multi_index(m.indices, m.shape.entries))


def bipartite_flat_to_pair(L, d1, d2):
    """(⌊L/d₂⌋, L mod d₂), the bipartite special case of flat_to_multi."""
    _check_label(L, d1 * d2)
    return divmod(L, d2)


def digits_table(d):
    """
    All multi-indices of d as an N x k integer array, row L holding the digits of L.
    """
    return np.stack(np.unravel_index(np.arange(d.N), d.entries), axis=1)


def labels_from_digits(digits, d):
    """Inverse of digits_table for any stack of digit rows."""
    digits = np.asarray(digits)
    return np.ravel_multi_index(tuple(digits[..., r] for r in range(d.k)), d.entries)


def refine_multi(m, fine):
    """
    Split every slot of a coarse multi-index into consecutive factors of a finer shape.

    Args:
        m (MultiIndex): Index in the coarse shape
        fine (Dims): Shape whose consecutive groups multiply to the coarse entries

    Returns:
        MultiIndex: The same basis vector written in the fine shape
    """
    digits = []
    pos = 0
    for digit, radix in zip(m.indices, m.shape):
        group = []
        size = 1
        while size < radix and pos < fine.k:
            group.append(fine[pos])
            size *= fine[pos]
            pos += 1
        if size != radix:
            raise DomainError(f"{fine} does not refine {m.shape}")
        digits.extend(int(i) for i in np.unravel_index(digit, group))
    if pos != fine.k:
        raise DomainError(f"{fine} does not refine {m.shape}")
    return MultiIndex(tuple(digits), fine)
