"""Serving request sequences from the binary simplex code G_k.

Vectors of F2^k are packed integers with position 1 as the most significant
bit; column i of G_k is the vector whose value is i (1 <= i <= 2^k - 1).
Every request is served by one column or by two columns.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import abelian_group as ag
from .constants import DEFAULT_MAX_SUBSET_SIZE, PHI_CHECK_MAX_K
from .helper import InvariantError, PreconditionError, popcount
from .service import (VerificationReport, build_numbering_with_zero_anchor,
                      build_service)

logger = logging.getLogger(__name__)


def vector_from_bits(bits):
    return ag.pack_bits(bits)


def bits_from_vector(v, k):
    return list(ag.unpack_bits(v, k))


def unit_vector(k, i):
    """e_i with position 1 the most significant bit."""
    if not 1 <= i <= k:
        raise PreconditionError('Unit vector index %d out of 1..%d' % (i, k))
    return 1 << (k - i)


def _check_k(k):
    if k < 1:
        raise PreconditionError('The simplex code needs k >= 1, got %d' % k)


def _check_vector(k, v, name='vector'):
    if not 0 <= v < (1 << k):
        raise PreconditionError('%s %d is not in F2^%d' % (name, v, k))


@dataclass(frozen=True)
class SimplexCode:
    k: int

    def __post_init__(self):
        _check_k(self.k)

    @property
    def length(self):
        return (1 << self.k) - 1

    @property
    def columns(self):
        return list(range(1, 1 << self.k))

    def column_bits(self, i):
        if not 1 <= i <= self.length:
            raise PreconditionError('Column %d out of 1..%d' %
                                    (i, self.length))
        return bits_from_vector(i, self.k)

    def generator_matrix(self):
        """k x (2^k - 1) 0/1 matrix, column i-1 holding vector i."""
        shifts = np.arange(self.k - 1, -1, -1)
        values = np.arange(1, 1 << self.k)
        return ((values[None, :] >> shifts[:, None]) & 1).astype(np.uint8)


@dataclass(frozen=True)
class Hyperplane:
    k: int
    u: int

    def __post_init__(self):
        _check_k(self.k)
        _check_vector(self.k, self.u, 'normal')
        if self.u == 0:
            raise PreconditionError('The hyperplane normal u must be nonzero')

    def contains(self, h):
        return popcount(h & self.u) % 2 == 0

    def elements(self):
        return [h for h in range(1 << self.k) if self.contains(h)]

    def complement(self):
        return [h for h in range(1 << self.k) if not self.contains(h)]


@dataclass(frozen=True)
class PhiMap:
    """Linear map F2^k -> F2^{k-1}, one-to-one on H and on its complement.

    On H it drops coordinate `pivot`; it is extended by phi(a + h) = phi(h).
    """
    hyperplane: Hyperplane
    pivot: int
    a: int

    @property
    def k(self):
        return self.hyperplane.k

    def _drop(self, v):
        low_bits = self.k - self.pivot
        high = (v >> (low_bits + 1)) << low_bits
        return high | (v & ((1 << low_bits) - 1))

    def forward(self, v):
        if not self.hyperplane.contains(v):
            v = ag.packed_add(v, self.a)
        return self._drop(v)

    def lift_h(self, w):
        """The unique h in H with phi(h) = w."""
        low_bits = self.k - self.pivot
        v = ((w >> low_bits) << (low_bits + 1)) | (w & ((1 << low_bits) - 1))
        if not self.hyperplane.contains(v):
            v |= 1 << low_bits
        return v

    def lift_complement(self, w):
        """The unique v outside H with phi(v) = w."""
        return ag.packed_add(self.lift_h(w), self.a)


def build_phi(k, u, a=None, check_max_k=PHI_CHECK_MAX_K):
    hyperplane = Hyperplane(k, u)
    pivot = next(j for j in range(1, k + 1) if u & unit_vector(k, j))
    if a is None:
        a = unit_vector(k, pivot)
    _check_vector(k, a, 'coset representative')
    if hyperplane.contains(a):
        raise PreconditionError('Coset representative %d lies in H' % a)
    phi = PhiMap(hyperplane, pivot, a)
    if k <= check_max_k:
        size = 1 << (k - 1)
        for part in (hyperplane.elements(), hyperplane.complement()):
            if sorted(phi.forward(v) for v in part) != list(range(size)):
                raise InvariantError('phi is not one-to-one on a coset of H')
    return phi


@dataclass(frozen=True)
class ColumnAssignment:
    k: int
    sets: Tuple[Tuple[int, ...], ...]

    def __len__(self):
        return len(self.sets)

    @property
    def singletons(self):
        return sum(1 for s in self.sets if len(s) == 1)

    def to_json(self):
        return [list(s) for s in self.sets]

    @classmethod
    def from_json(cls, k, doc):
        return cls(k, tuple(tuple(int(c) for c in s) for s in doc))


def verify_assignment(k, requests, assignment,
                      max_size=DEFAULT_MAX_SUBSET_SIZE):
    """Check disjointness, sizes and column sums; `max_size=None` is unbounded.
    """
    report = VerificationReport()
    code = SimplexCode(k)
    matrix = code.generator_matrix()
    if isinstance(assignment, ColumnAssignment):
        sets = assignment.sets
    elif isinstance(assignment, (list, tuple)) and all(
            isinstance(s, (list, tuple))
            and all(isinstance(c, int) for c in s) for s in assignment):
        sets = tuple(tuple(s) for s in assignment)
    else:
        raise PreconditionError('An assignment is a list of column lists')
    requests = list(requests)
    if len(sets) != len(requests):
        report.add('length', (), '%d column sets for %d requests' %
                   (len(sets), len(requests)))
    owner = {}
    for j, columns in enumerate(sets):
        if not columns:
            report.add('empty', (j,), 'empty column set')
            continue
        if max_size is not None and len(columns) > max_size:
            report.add('size', (j,), '%d columns, limit %d' %
                       (len(columns), max_size))
        if len(set(columns)) != len(columns):
            report.add('repeated_column', (j,), 'a column is listed twice')
        if any(not 1 <= c <= code.length for c in columns):
            report.add('column_range', (j,), 'columns must lie in 1..%d' %
                       code.length)
            continue
        for c in set(columns):
            if c in owner:
                report.add('overlap', (owner[c], j), 'column %d shared' % c)
            else:
                owner[c] = j
        if j < len(requests):
            total = matrix[:, [c - 1 for c in columns]].sum(axis=1) % 2
            if vector_from_bits(total.tolist()) != requests[j]:
                report.add('sum', (j,), 'columns do not sum to the request')
    return report


def _serve_k1(requests):
    if len(requests) > 1:
        raise PreconditionError('k=1 serves at most one request')
    return ColumnAssignment(1, tuple((1,) for _ in requests))


def serve_affine_requests(k, u, requests: Sequence[int]):
    """Serve up to 2^{k-1} requests from F2^k outside H = u^perp."""
    _check_k(k)
    hyperplane = Hyperplane(k, u)
    requests = list(requests)
    half = 1 << (k - 1)
    for j, r in enumerate(requests):
        _check_vector(k, r, 'request')
        if hyperplane.contains(r):
            raise PreconditionError('Request %d (%s) lies in H' %
                                    (j, bits_from_vector(r, k)))
    if len(requests) > half:
        raise PreconditionError('At most %d requests, got %d' %
                                (half, len(requests)))
    if k == 1:
        return _serve_k1(requests)
    if not requests:
        return ColumnAssignment(k, ())

    phi = build_phi(k, u)
    g = ag.binary_group(k - 1)
    reduced = [ag.index_element(g, phi.forward(r)) for r in requests]
    if len(requests) < half:
        service = build_service(g, reduced)
    else:
        service = build_numbering_with_zero_anchor(k - 1, reduced)

    sets: List[Tuple[int, ...]] = []
    zero_y = 0
    for r, triple in zip(requests, service.triples):
        x = phi.lift_complement(ag.element_index(g, triple.x))
        y = phi.lift_h(ag.element_index(g, triple.y))
        if ag.packed_add(x, r) != y:
            raise InvariantError('Lifted triple breaks x + r = y')
        if y == 0:
            zero_y += 1
            sets.append((x,))
        else:
            sets.append(tuple(sorted((x, y))))
    assignment = ColumnAssignment(k, tuple(sets))
    if assignment.singletons > zero_y:
        raise InvariantError('More singleton sets than zero y values')
    logger.debug('Served %d requests with %d singletons', len(sets),
                 assignment.singletons)
    return assignment


def all_ones(k):
    return (1 << k) - 1


def serve_odd_requests(k, requests):
    _check_k(k)
    for j, r in enumerate(requests):
        if popcount(r) % 2 == 0:
            raise PreconditionError('Request %d has even weight' % j)
    return serve_affine_requests(k, all_ones(k), requests)


def serve_batch_requests(k, requests):
    for j, r in enumerate(requests):
        if popcount(r) != 1:
            raise PreconditionError('Request %d is not a unit vector' % j)
    return serve_odd_requests(k, requests)


def serve_pir_requests(k, i, t):
    """t copies of the unit vector e_i."""
    return serve_batch_requests(k, [unit_vector(k, i)] * t)


def request_class(k, requests) -> Optional[str]:
    """Most restrictive code property whose definition covers `requests`."""
    if any(r == 0 for r in requests):
        return None
    if all(popcount(r) == 1 for r in requests):
        if len(set(requests)) <= 1:
            return 'pir'
        return 'batch'
    if all(popcount(r) % 2 == 1 for r in requests):
        return 'odd'
    return 'functional'
