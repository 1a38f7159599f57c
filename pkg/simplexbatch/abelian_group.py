"""Finite abelian groups Z_{n1} + ... + Z_{nd} and their elements.

Elements are plain tuples of residues. Canonical order is mixed radix with
the last coordinate varying fastest, so for Z2^k the index of an element is
the integer value of its bit string (position 1 most significant).
"""
import itertools
import logging
import re
from dataclasses import dataclass
from math import prod
from typing import Iterator, List, Sequence, Tuple

import bitstring

from .constants import ENUMERATION_CAP
from .helper import GroupSpecError

logger = logging.getLogger(__name__)

GroupElement = Tuple[int, ...]

_TERM = re.compile(r'^Z(\d+)(?:\^(\d+))?$')


@dataclass(frozen=True)
class GroupSpec:
    orders: Tuple[int, ...]

    def __post_init__(self):
        if not self.orders:
            raise GroupSpecError('A group needs at least one cyclic factor.')
        if any(n < 2 for n in self.orders):
            raise GroupSpecError(
                'Every cyclic factor must have order >= 2, got %s' %
                list(self.orders))

    @property
    def order(self):
        return prod(self.orders)

    @property
    def dimension(self):
        return len(self.orders)

    @property
    def is_binary(self):
        """True for Z2^k, where elements also have a packed bit form."""
        return all(n == 2 for n in self.orders)

    @property
    def is_cyclic(self):
        return self.dimension == 1

    def __str__(self):
        if self.is_binary and self.dimension > 1:
            return 'Z2^%d' % self.dimension
        return 'x'.join('Z%d' % n for n in self.orders)


def binary_group(k):
    return GroupSpec((2,) * k)


def parse_group_spec(text, cap=ENUMERATION_CAP):
    """Parse `Z6`, `Z2^3` or `x`-joined terms such as `Z2xZ4`."""
    orders: List[int] = []
    cleaned = text.replace(' ', '')
    if not cleaned:
        raise GroupSpecError('Empty group description.')
    for term in cleaned.split('x'):
        match = _TERM.match(term)
        if match is None:
            raise GroupSpecError('Cannot parse group term %r in %r' %
                                 (term, text))
        n = int(match.group(1))
        repeat = int(match.group(2)) if match.group(2) is not None else 1
        if repeat < 1:
            raise GroupSpecError('Exponent must be >= 1 in %r' % term)
        orders.extend([n] * repeat)
    g = GroupSpec(tuple(orders))
    if g.order > cap:
        raise GroupSpecError('Group %s has %d elements, above the cap of %d' %
                             (g, g.order, cap))
    return g


def _check(g, a):
    if len(a) != g.dimension:
        raise GroupSpecError('Element %r does not live in %s' % (a, g))


def element(g, coords):
    """Build an element of g from any integer sequence, reducing residues."""
    _check(g, coords)
    return tuple(int(c) % n for c, n in zip(coords, g.orders))


def zero(g):
    return (0,) * g.dimension


def add(g, a, b):
    _check(g, a)
    _check(g, b)
    return tuple((x + y) % n for x, y, n in zip(a, b, g.orders))


def neg(g, a):
    _check(g, a)
    return tuple((-x) % n for x, n in zip(a, g.orders))


def sub(g, a, b):
    _check(g, a)
    _check(g, b)
    return tuple((x - y) % n for x, y, n in zip(a, b, g.orders))


def is_zero(a):
    return not any(a)


def element_sum(g, elements):
    total = zero(g)
    for a in elements:
        total = add(g, total, a)
    return total


def enumerate_elements(g, cap=ENUMERATION_CAP) -> Iterator[GroupElement]:
    """All elements of g in canonical order."""
    if g.order > cap:
        raise GroupSpecError('Refusing to enumerate %d elements of %s' %
                             (g.order, g))
    return itertools.product(*(range(n) for n in g.orders))


def nonzero_elements(g, cap=ENUMERATION_CAP):
    return [a for a in enumerate_elements(g, cap) if not is_zero(a)]


def element_index(g, a):
    _check(g, a)
    index = 0
    for c, n in zip(a, g.orders):
        if not 0 <= c < n:
            raise GroupSpecError('Residue %r out of range in %s' % (c, g))
        index = index * n + c
    return index


def index_element(g, i):
    if not 0 <= i < g.order:
        raise GroupSpecError('Index %d out of range for %s' % (i, g))
    coords = []
    for n in reversed(g.orders):
        i, c = divmod(i, n)
        coords.append(c)
    return tuple(reversed(coords))


def sum_all(g):
    """Sum of every element of g, computed per coordinate."""
    total = []
    for n in g.orders:
        # each residue of Z_n occurs order/n times in that coordinate
        total.append((g.order // n) * (n * (n - 1) // 2) % n)
    return tuple(total)


# Packed path for Z2^k: an element is the integer whose bits are its
# coordinates, position 1 being the most significant bit.

def pack_bits(bits: Sequence[int]) -> int:
    return bitstring.Bits(bin=''.join(str(int(b) & 1) for b in bits)).uint


def unpack_bits(v: int, k: int) -> GroupElement:
    return tuple(int(bit) for bit in bitstring.Bits(uint=v, length=k))


def packed_add(a: int, b: int) -> int:
    return a ^ b
