"""Services and special services in finite abelian groups.

A service for requests r_1..r_m is a list of triples (x_i, y_i, r_i) with
x_i + r_i = y_i, the x's pairwise distinct and the y's pairwise distinct.
A special service additionally needs every r_i nonzero and all 2m values
x_1..x_m, y_1..y_m pairwise distinct.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .abelian_group import (GroupElement, GroupSpec, add, binary_group,
                            element, element_sum, enumerate_elements,
                            is_zero, sub, sum_all, zero)
from .helper import GroupSpecError, InvariantError, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ServiceTriple:
    x: GroupElement
    y: GroupElement
    r: GroupElement

    def to_json(self):
        return {'x': list(self.x), 'y': list(self.y), 'r': list(self.r)}

    @classmethod
    def from_json(cls, g, doc):
        return cls(element(g, doc['x']), element(g, doc['y']),
                   element(g, doc['r']))


@dataclass(frozen=True)
class Service:
    group: GroupSpec
    triples: Tuple[ServiceTriple, ...] = ()

    @property
    def requests(self):
        return [t.r for t in self.triples]

    @property
    def xs(self):
        return [t.x for t in self.triples]

    @property
    def ys(self):
        return [t.y for t in self.triples]

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def to_json(self):
        return [t.to_json() for t in self.triples]


class SpecialService(Service):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: Tuple[int, ...]
    detail: str = ''

    def to_json(self):
        return {'kind': self.kind, 'indices': list(self.indices),
                'detail': self.detail}


@dataclass
class VerificationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self):
        return not self.violations

    def __bool__(self):
        return self.valid

    def add(self, kind, indices=(), detail=''):
        self.violations.append(Violation(kind, tuple(indices), detail))

    def to_json(self):
        return {'valid': self.valid,
                'violations': [v.to_json() for v in self.violations]}


@dataclass(frozen=True)
class NoSolution:
    reason: str
    witness: Dict = field(default_factory=dict)

    def to_json(self):
        return {'reason': self.reason, 'witness': self.witness}


def _in_group(g, a):
    return (len(a) == g.dimension
            and all(0 <= c < n for c, n in zip(a, g.orders)))


def _report_duplicates(report, kind, values):
    positions = defaultdict(list)
    for i, value in enumerate(values):
        positions[value].append(i)
    for value, where in positions.items():
        if len(where) > 1:
            report.add(kind, where, 'value %s repeated' % (list(value),))


def verify_service(g, triples, requests):
    """Check that `triples` form a service for `requests`, in order."""
    report = VerificationReport()
    triples = list(triples)
    requests = [tuple(r) for r in requests]
    if len(triples) != len(requests):
        report.add('length', (), '%d triples for %d requests' %
                   (len(triples), len(requests)))
    well_formed = []
    for i, t in enumerate(triples):
        if not all(_in_group(g, a) for a in (t.x, t.y, t.r)):
            report.add('malformed', (i,), 'triple is not made of %s elements'
                       % g)
            continue
        well_formed.append(t)
        if add(g, t.x, t.r) != t.y:
            report.add('sum', (i,), 'x + r != y')
        if i < len(requests) and t.r != requests[i]:
            report.add('request', (i,), 'r is %s, request is %s' %
                       (list(t.r), list(requests[i])))
    _report_duplicates(report, 'duplicate_x', [t.x for t in triples])
    _report_duplicates(report, 'duplicate_y', [t.y for t in triples])
    return report


def verify_special_service(g, triples, requests):
    """Service check plus nonzero requests and 2m distinct values."""
    triples = list(triples)
    report = verify_service(g, triples, requests)
    first_x = {}
    for i, t in enumerate(triples):
        first_x.setdefault(t.x, i)
        if is_zero(t.r):
            report.add('zero_request', (i,), 'special services need r != 0')
    for j, t in enumerate(triples):
        i = first_x.get(t.y)
        if i is not None and i != j:
            report.add('x_equals_y', (i, j), 'x_%d == y_%d' % (i, j))
    return report


def _free_elements(g, used, count):
    """The `count` canonically smallest elements of g outside `used`."""
    free = []
    for a in enumerate_elements(g):
        if a not in used:
            free.append(a)
            if len(free) == count:
                break
    if len(free) < count:
        raise InvariantError('Expected %d unused elements in %s' % (count, g))
    return free


@dataclass
class ExtensionState:
    """Configuration of the chain-rotation algorithm after t steps.

    Chain triples j = 1..t sit in work[0..t-1]; the untouched ones follow.
    Each work entry carries the position its request has in the output.
    Loop invariant: x_j + y_{j-1} = c for j = 0..t, and
    x_j + r_{j-1} = y_{j-2} for j = 1..t.
    """
    group: GroupSpec
    r0: GroupElement
    y_minus1: GroupElement
    y0: GroupElement
    x0: GroupElement
    c: GroupElement
    work: List[Tuple[int, ServiceTriple]]
    t: int = 0

    def x(self, j):
        return self.x0 if j == 0 else self.work[j - 1][1].x

    def y(self, j):
        if j == -1:
            return self.y_minus1
        return self.y0 if j == 0 else self.work[j - 1][1].y

    def r(self, j):
        return self.r0 if j == 0 else self.work[j - 1][1].r

    def position(self, j):
        return 0 if j == 0 else self.work[j - 1][0]

    @property
    def chain(self):
        return [triple for _, triple in self.work[:self.t]]

    def check_step(self, x):
        """x is the candidate x_{t+1}; it must satisfy x + y_t = c."""
        g = self.group
        if add(g, x, self.y(self.t)) != self.c:
            raise InvariantError('Loop invariant x_j + y_(j-1) = c broken '
                                 'at t=%d' % self.t)
        if add(g, x, self.r(self.t)) != self.y(self.t - 1):
            raise InvariantError('Relation x_j + r_(j-1) = y_(j-2) broken '
                                 'at t=%d' % self.t)

    def promote(self, i, pos_of_x, pos_of_y=None):
        """Swap untouched work entry i into chain position t + 1."""
        t = self.t
        a, b = self.work[i][1], self.work[t][1]
        self.work[i], self.work[t] = self.work[t], self.work[i]
        pos_of_x[a.x], pos_of_x[b.x] = t, i
        if pos_of_y is not None:
            pos_of_y[a.y], pos_of_y[b.y] = t, i
        self.t += 1

    def rotate(self, x):
        """Case 1: shift every chain request one x along and close with x."""
        m = len(self.work)
        out: List[Optional[ServiceTriple]] = [None] * (m + 1)
        for j in range(1, self.t + 1):
            out[self.position(j - 1)] = ServiceTriple(
                self.x(j), self.y(j - 2), self.r(j - 1))
        out[self.position(self.t)] = ServiceTriple(
            x, self.y(self.t - 1), self.r(self.t))
        for p, triple in self.work[self.t:]:
            out[p] = triple
        return out

    def to_json(self):
        return {'t': self.t,
                'chain': [t.to_json() for t in self.chain],
                'y_minus1': list(self.y_minus1), 'y0': list(self.y0),
                'x0': list(self.x0), 'r0': list(self.r0), 'c': list(self.c)}


def _extend(g, triples, r0):
    ys = {t.y for t in triples}
    y0, y_minus1 = _free_elements(g, ys, 2)
    x0 = sub(g, y0, r0)
    pos_of_x = {t.x: i for i, t in enumerate(triples)}
    if x0 not in pos_of_x:
        return [ServiceTriple(x0, y0, r0)] + list(triples)

    state = ExtensionState(g, r0, y_minus1, y0, x0, add(g, x0, y_minus1),
                           list(enumerate(triples, 1)))
    while True:
        x = sub(g, state.y(state.t - 1), state.r(state.t))
        state.check_step(x)
        i = pos_of_x.get(x)
        if i is None:
            logger.debug('Case 1 after a chain of length %d', state.t)
            return state.rotate(x)
        if i < state.t:
            raise InvariantError('Case 3 reached: x = x_%d lies on the chain'
                                 % (i + 1))
        state.promote(i, pos_of_x)


def extend_service(g, service, r0):
    """Extend a service for r_1..r_m to one for r_0, r_1..r_m.

    The result lists the triple serving r_0 first, then r_1..r_m.
    """
    m = len(service)
    if m > g.order - 2:
        raise PreconditionError('Can only extend services of length <= %d '
                                'in %s, got %d' % (g.order - 2, g, m))
    report = verify_service(g, service.triples, service.requests)
    if not report.valid:
        raise PreconditionError('Input is not a service: %s' %
                                report.to_json()['violations'])
    return Service(g, tuple(_extend(g, list(service.triples),
                                    element(g, r0))))


def build_service(g, requests):
    """Service for requests r_1..r_m by repeated extension."""
    requests = [element(g, r) for r in requests]
    if len(requests) > g.order - 1:
        raise PreconditionError('At most %d requests can be served in %s' %
                                (g.order - 1, g))
    triples: List[ServiceTriple] = []
    for r in reversed(requests):
        triples = _extend(g, triples, r)
    return Service(g, tuple(triples))


def build_full_service(g, requests):
    """Service whose x's and y's both run through all of g.

    Exists iff the requests sum to zero; otherwise a NoSolution citing the
    sum is returned.
    """
    requests = [element(g, r) for r in requests]
    if len(requests) != g.order:
        raise PreconditionError('A full service of %s needs exactly %d '
                                'requests, got %d' %
                                (g, g.order, len(requests)))
    total = element_sum(g, requests)
    if not is_zero(total):
        return NoSolution('request sum is nonzero', {'sum': list(total)})

    partial = build_service(g, requests[:-1])
    g_sum = sum_all(g)
    x_n = sub(g, g_sum, element_sum(g, partial.xs))
    y_n = sub(g, g_sum, element_sum(g, partial.ys))
    if add(g, x_n, requests[-1]) != y_n:
        raise InvariantError('Completing triple does not satisfy x + r = y')
    return Service(g, partial.triples + (ServiceTriple(x_n, y_n,
                                                       requests[-1]),))


def translate_service(service, a):
    g = service.group
    a = element(g, a)
    return type(service)(g, tuple(
        ServiceTriple(add(g, t.x, a), add(g, t.y, a), t.r)
        for t in service.triples))


def build_numbering_with_zero_anchor(k, requests):
    """Numbering x_1..x_{2^k} of F2^k whose nonzero sums x_i + r_i differ.

    The last triple is (r_n, 0, r_n); the zero y may repeat.
    """
    g = binary_group(k)
    requests = [element(g, r) for r in requests]
    n = g.order
    if len(requests) != n:
        raise PreconditionError('Expected %d requests for k=%d, got %d' %
                                (n, k, len(requests)))
    partial = build_service(g, requests[:-1])
    x_n = sub(g, sum_all(g), element_sum(g, partial.xs))
    r_n = requests[-1]
    shifted = translate_service(partial, add(g, x_n, r_n))
    return Service(g, shifted.triples + (ServiceTriple(r_n, zero(g), r_n),))


@dataclass(frozen=True)
class SpecialExtensionFailure:
    """The one configuration where special extension gets stuck.

    x = y_-1 and y_t = x_0 with t >= 1.
    """
    state: ExtensionState
    x: GroupElement

    @property
    def t(self):
        return self.state.t

    def to_json(self):
        doc = self.state.to_json()
        doc['x'] = list(self.x)
        return doc


def try_extend_special_service(k, special, r0):
    """Chain-rotation attempt to extend a special service in F2^k.

    Returns the extended SpecialService (listing r_0 first) or a
    SpecialExtensionFailure describing the stuck configuration.
    """
    g = binary_group(k)
    if special.group != g:
        raise PreconditionError('Special extension runs in Z2^%d, got %s' %
                                (k, special.group))
    m = len(special)
    if 2 * m > g.order - 2:
        raise PreconditionError('Need 2m <= 2^k - 2, got m=%d, k=%d' % (m, k))
    try:
        r0 = element(g, r0)
    except GroupSpecError as error:
        raise PreconditionError(str(error)) from error
    if is_zero(r0):
        raise PreconditionError('r0 must be nonzero')
    report = verify_special_service(g, special.triples, special.requests)
    if not report.valid:
        raise PreconditionError('Input is not a special service: %s' %
                                report.to_json()['violations'])

    triples = list(special.triples)
    used = {t.x for t in triples} | {t.y for t in triples}
    y0, y_minus1 = _free_elements(g, used, 2)
    x0 = add(g, y0, r0)
    if x0 not in used:
        return SpecialService(g, (ServiceTriple(x0, y0, r0),) +
                              tuple(triples))

    state = ExtensionState(g, r0, y_minus1, y0, x0, add(g, x0, y_minus1),
                           list(enumerate(triples, 1)))
    pos_of_x = {t.x: i for i, t in enumerate(triples)}
    pos_of_y = {t.y: i for i, t in enumerate(triples)}
    while True:
        x = add(g, state.y(state.t - 1), state.r(state.t))
        state.check_step(x)
        if x == y_minus1:
            if state.t >= 1 and state.y(state.t) == x0:
                logger.debug('Special extension stuck at t=%d', state.t)
                return SpecialExtensionFailure(state, x)
            raise InvariantError('x = y_-1 outside the known failure shape')
        if x == y0:
            raise InvariantError('Case 4 reached with x = y_0')
        i = pos_of_x.get(x)
        if i is not None:
            if i < state.t:
                raise InvariantError('Case 3 reached in special extension')
            state.promote(i, pos_of_x, pos_of_y)
            continue
        i = pos_of_y.get(x)
        if i is not None:
            if i < state.t:
                raise InvariantError('Case 4 reached: x = y_%d' % (i + 1))
            # x_i and y_i play symmetric roles in characteristic 2
            p, old = state.work[i]
            state.work[i] = (p, ServiceTriple(old.y, old.x, old.r))
            del pos_of_x[old.x]
            del pos_of_y[old.y]
            pos_of_x[old.y] = i
            pos_of_y[old.x] = i
            state.promote(i, pos_of_x, pos_of_y)
            continue
        extended = SpecialService(g, tuple(state.rotate(x)))
        check = verify_special_service(g, extended.triples,
                                       extended.requests)
        if not check.valid:
            raise InvariantError('Rotated special service is invalid: %s' %
                                 check.to_json()['violations'])
        return extended


def special_service_from_xs(g, xs: Sequence[GroupElement],
                            requests: Sequence[GroupElement]):
    return SpecialService(g, tuple(ServiceTriple(x, add(g, x, r), r)
                                   for x, r in zip(xs, requests)))
