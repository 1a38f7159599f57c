"""Desk-scale checks of special-service existence and related statements.

Failures found here are data: a sweep that finds a request sequence with no
special service reports it rather than raising.
"""
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from sympy import isprime

from . import abelian_group as ag
from .constants import (BRUTE_FORCE_MAX_K, DEFAULT_SEED, DEFAULT_TRIALS,
                        ORACLE_MAX_K, SEARCH_NODE_CAP)
from .helper import (InvariantError, PreconditionError, SearchBudgetError,
                     warn_outside_precondition)
from .service import (ServiceTriple, special_service_from_xs,
                      translate_service, verify_special_service)
from .simplex import ColumnAssignment, SimplexCode

logger = logging.getLogger(__name__)


@dataclass
class SearchReport:
    group: str
    m: Optional[int]
    mode: str
    tested: int = 0
    failures: List[List] = field(default_factory=list)
    witnesses: Optional[Dict] = None
    wall_time: float = 0.0
    seed: Optional[int] = None
    precondition_met: bool = True
    proven: Optional[str] = None

    @property
    def holds(self):
        return not self.failures

    def record(self, key, witness):
        self.tested += 1
        if witness is None:
            self.failures.append(key)
        elif self.witnesses is not None:
            self.witnesses[repr(key)] = witness

    def to_json(self, timing=False):
        doc = {'group': self.group, 'm': self.m, 'mode': self.mode,
               'seed': self.seed, 'tested': self.tested,
               'failure_count': len(self.failures),
               'failures': self.failures,
               'precondition_met': self.precondition_met,
               'proven': self.proven}
        if self.witnesses is not None:
            doc['witnesses'] = self.witnesses
        if timing:
            doc['wall_time'] = round(self.wall_time, 3)
        return doc

    def to_frame(self):
        """One row per failure, plus one per stored witness."""
        rows = [{'sequence': repr(f), 'solved': False, 'witness': None}
                for f in self.failures]
        for key, witness in (self.witnesses or {}).items():
            rows.append({'sequence': key, 'solved': True,
                         'witness': repr(witness)})
        return pd.DataFrame(rows, columns=['sequence', 'solved', 'witness'])


def _as_elements(g, requests):
    return [ag.element(g, r) for r in requests]


def find_special_service_bruteforce(g, requests, fix_first=False,
                                    node_cap=None):
    """Backtracking decision procedure for special services.

    Candidates for each x_i are tried in canonical order. With `fix_first`
    x_1 is pinned to zero, which loses nothing since translates of a special
    service are special services.
    """
    requests = _as_elements(g, requests)
    if any(ag.is_zero(r) for r in requests):
        raise PreconditionError('Special services need nonzero requests')
    m = len(requests)
    if 2 * m > g.order:
        return None
    elements = list(ag.enumerate_elements(g))
    used = set()
    xs: List = []
    nodes = 0

    def backtrack(i):
        nonlocal nodes
        if i == m:
            return True
        if g.order - len(used) < 2 * (m - i):
            return False
        r = requests[i]
        candidates = [ag.zero(g)] if (fix_first and i == 0) else elements
        for x in candidates:
            nodes += 1
            if node_cap is not None and nodes > node_cap:
                raise SearchBudgetError('Backtracking exceeded %d nodes' %
                                        node_cap)
            if x in used:
                continue
            y = ag.add(g, x, r)
            if y in used:
                continue
            used.update((x, y))
            xs.append(x)
            if backtrack(i + 1):
                return True
            xs.pop()
            used.difference_update((x, y))
        return False

    if not backtrack(0):
        return None
    return special_service_from_xs(g, xs, requests)


def greedy_special_service(g, requests):
    """Greedy special service, guaranteed when 4m <= |G| + 3."""
    requests = _as_elements(g, requests)
    m = len(requests)
    if any(ag.is_zero(r) for r in requests):
        raise PreconditionError('Special services need nonzero requests')
    if 4 * m > g.order + 3:
        raise PreconditionError('Greedy needs 4m <= |G| + 3, got m=%d in %s'
                                % (m, g))
    xs: List = []
    for k, r_k in enumerate(requests):
        forbidden = set()
        for x_i, r_i in zip(xs, requests):
            y_i = ag.add(g, x_i, r_i)
            forbidden.update((x_i, y_i, ag.sub(g, x_i, r_k),
                              ag.sub(g, y_i, r_k)))
        choice = next((a for a in ag.enumerate_elements(g)
                       if a not in forbidden), None)
        if choice is None:
            raise InvariantError('Greedy found no x_%d below its bound' %
                                 (k + 1))
        xs.append(choice)
    return special_service_from_xs(g, xs, requests)


def claim_is_proven(g, m):
    """Why a strong-conjecture instance is a theorem, or None."""
    if 2 * m > g.order - 1:
        return None
    if m <= 3:
        return 'm <= 3'
    if g.is_cyclic and isprime(g.order):
        return 'G = Z_p'
    if 4 * m <= g.order + 3:
        return 'greedy range'
    return None


def check_conjecture_strong(g, m, mode='exhaustive', trials=DEFAULT_TRIALS,
                            seed=DEFAULT_SEED, quotient=True,
                            multisets=False, store_witnesses=False,
                            force=False, strict=True):
    """Look for request sequences of length m with no special service.

    `mode` is 'exhaustive' or 'random'. With `strict=False` sizes beyond
    2m <= |G| - 1 are swept too, with a warning.
    """
    precondition_met = 2 * m <= g.order - 1
    if not precondition_met:
        if strict:
            raise PreconditionError('The conjecture needs 2m <= |G| - 1, got '
                                    'm=%d in %s' % (m, g))
        warn_outside_precondition(' 2m=%d > |G|-1=%d' % (2 * m, g.order - 1))
    nonzero = ag.nonzero_elements(g)
    report = SearchReport(str(g), m, mode, seed=seed,
                          precondition_met=precondition_met,
                          proven=claim_is_proven(g, m),
                          witnesses={} if store_witnesses else None)
    if mode == 'exhaustive':
        count = len(nonzero) ** m
        if count > SEARCH_NODE_CAP and not force:
            raise SearchBudgetError('%d sequences exceed the cap of %d; use '
                                    'force' % (count, SEARCH_NODE_CAP))
        if multisets:
            sequences = itertools.combinations_with_replacement(nonzero, m)
        else:
            sequences = itertools.product(nonzero, repeat=m)
    elif mode == 'random':
        rng = np.random.default_rng(seed)
        logger.info('Random sweep of %d sequences, seed %d', trials, seed)
        sequences = ([nonzero[i] for i in rng.integers(0, len(nonzero), m)]
                     for _ in range(trials))
    else:
        raise PreconditionError('Unknown mode %r' % mode)

    start = time.time()
    for sequence in sequences:
        sequence = list(sequence)
        found = find_special_service_bruteforce(g, sequence,
                                                fix_first=quotient)
        key = [list(r) for r in sequence]
        report.record(key, None if found is None else
                      [list(x) for x in found.xs])
        if found is None:
            logger.info('No special service for %s in %s', key, g)
    report.wall_time = time.time() - start
    logger.info('%s, m=%d: %d tested, %d failures in %.2fs', g, m,
                report.tested, len(report.failures), report.wall_time)
    return report


def serve_via_special_service(k, requests: Sequence[int], node_cap=None):
    """Functional serving of 2^{k-1} nonzero requests with sets of size <= 2.

    Returns None when no special service for the first 2^{k-1} - 1 requests
    is found.
    """
    code = SimplexCode(k)
    half = 1 << (k - 1)
    requests = list(requests)
    if len(requests) != half:
        raise PreconditionError('Expected %d requests, got %d' %
                                (half, len(requests)))
    if any(not 0 < r <= code.length for r in requests):
        raise PreconditionError('Requests must be nonzero vectors of F2^%d'
                                % k)
    g = ag.binary_group(k)
    as_elements = [ag.unpack_bits(r, k) for r in requests]
    head, last = as_elements[:-1], as_elements[-1]

    special = None
    if 4 * len(head) <= g.order + 3:
        special = greedy_special_service(g, head)
    elif k <= BRUTE_FORCE_MAX_K or node_cap is not None:
        try:
            special = find_special_service_bruteforce(g, head, fix_first=True,
                                                      node_cap=node_cap)
        except SearchBudgetError:
            logger.warning('Special-service search gave up for k=%d', k)
    else:
        logger.warning('No special-service search configured for k=%d', k)
    if special is None:
        return None

    used = set(special.xs) | set(special.ys)
    # a translate by a avoids r_n iff a is not r_n + (used value)
    blocked = {ag.add(g, last, v) for v in used}
    shift = next(a for a in ag.enumerate_elements(g) if a not in blocked)
    special = translate_service(special, shift)
    triples = special.triples + (ServiceTriple(last, ag.zero(g), last),)

    sets = []
    for triple in triples:
        columns = sorted(ag.pack_bits(v) for v in (triple.x, triple.y))
        sets.append(tuple(c for c in columns if c != 0))
    assignment = ColumnAssignment(k, tuple(sets))
    report = verify_special_service(g, special.triples, head)
    if not report.valid:
        raise InvariantError('Translated special service is invalid')
    return assignment


def check_hadamard_shape(assignment):
    sets = assignment.sets if isinstance(assignment, ColumnAssignment) \
        else assignment
    if any(len(s) not in (1, 2) for s in sets):
        return False
    return sum(1 for s in sets if len(s) == 1) <= 2


def find_snevily_numbering(g, X, requests):
    """Order X as x_1..x_m so that the sums x_i + r_i are pairwise distinct."""
    X = sorted(set(ag.element(g, x) for x in X),
               key=lambda a: ag.element_index(g, a))
    requests = _as_elements(g, requests)
    m = len(requests)
    if len(X) != m:
        raise PreconditionError('|X| = %d but %d requests' % (len(X), m))
    chosen: List = []
    taken = set()
    sums = set()

    def backtrack(i):
        if i == m:
            return True
        for x in X:
            if x in taken:
                continue
            s = ag.add(g, x, requests[i])
            if s in sums:
                continue
            taken.add(x)
            sums.add(s)
            chosen.append(x)
            if backtrack(i + 1):
                return True
            chosen.pop()
            taken.discard(x)
            sums.discard(s)
        return False

    return list(chosen) if backtrack(0) else None


def check_snevily(g):
    """Every X and every request set of the same size, for one group."""
    elements = list(ag.enumerate_elements(g))
    report = SearchReport(str(g), None, 'exhaustive',
                          proven='odd order' if g.order % 2 else None)
    start = time.time()
    for m in range(1, g.order + 1):
        for X in itertools.combinations(elements, m):
            for requests in itertools.combinations(elements, m):
                numbering = find_snevily_numbering(g, X, requests)
                report.record([[list(x) for x in X],
                               [list(r) for r in requests]], numbering)
    report.wall_time = time.time() - start
    return report


def alon_counterexamples(m, s):
    """Both families of instances with no numbering.

    Z_{ms} with X = {0, s, .., (m-1)s} and r = (0, .., 0, s); Z_m with X = G
    and r = (0, .., 0, 1).
    """
    g = ag.GroupSpec((m * s,))
    yield g, [(i * s,) for i in range(m)], [(0,)] * (m - 1) + [(s,)]
    g = ag.GroupSpec((m,))
    yield g, [(i,) for i in range(m)], [(0,)] * (m - 1) + [(1,)]


def _subsets_by_sum(k, max_size):
    columns = range(1, 1 << k)
    sizes = range(1, (max_size if max_size is not None else len(columns)) + 1)
    by_sum: Dict[int, List[int]] = {}
    for size in sizes:
        for subset in itertools.combinations(columns, size):
            total = 0
            mask = 0
            for c in subset:
                total = ag.packed_add(total, c)
                mask |= 1 << c
            by_sum.setdefault(total, []).append(mask)
    return by_sum


def oracle_can_serve(k, requests, max_subset_size=2):
    """Exact search over disjoint column subsets; None when impossible."""
    if k > ORACLE_MAX_K:
        raise SearchBudgetError('The oracle only runs for k <= %d' %
                                ORACLE_MAX_K)
    SimplexCode(k)
    requests = list(requests)
    by_sum = _subsets_by_sum(k, max_subset_size)
    chosen: List[int] = []

    def backtrack(i, used):
        if i == len(requests):
            return True
        for mask in by_sum.get(requests[i], ()):
            if mask & used:
                continue
            chosen.append(mask)
            if backtrack(i + 1, used | mask):
                return True
            chosen.pop()
        return False

    if not backtrack(0, 0):
        return None
    sets = tuple(tuple(c for c in range(1, 1 << k) if mask >> c & 1)
                 for mask in chosen)
    return ColumnAssignment(k, sets)
