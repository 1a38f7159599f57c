import itertools

import pytest
from hypothesis import given
import hypothesis.strategies as st

from simplexbatch import abelian_group as ag
from simplexbatch.helper import PreconditionError
from simplexbatch.search import find_special_service_bruteforce
from simplexbatch.service import (NoSolution, Service, ServiceTriple,
                                  SpecialExtensionFailure, SpecialService,
                                  build_full_service,
                                  build_numbering_with_zero_anchor,
                                  build_service, extend_service,
                                  translate_service,
                                  try_extend_special_service, verify_service,
                                  verify_special_service)

T = ServiceTriple


def all_services(g, m):
    """Every service of length m whose requests are read off the triples."""
    elements = list(ag.enumerate_elements(g))
    for xs in itertools.permutations(elements, m):
        for ys in itertools.permutations(elements, m):
            yield Service(g, tuple(T(x, y, ag.sub(g, y, x))
                                   for x, y in zip(xs, ys)))


def test_verify_service_examples():
    z3 = ag.GroupSpec((3,))
    assert verify_service(z3, [T((0,), (1,), (1,))], [(1,)]).valid
    assert verify_service(z3, [T((0,), (1,), (1,)), T((1,), (2,), (1,))],
                          [(1,), (1,)]).valid
    z22 = ag.binary_group(2)
    report = verify_service(z22, [T((0, 0), (0, 1), (0, 1)),
                                  T((1, 0), (0, 1), (1, 1))],
                            [(0, 1), (1, 1)])
    assert not report.valid
    assert [v.kind for v in report.violations] == ['duplicate_y']
    assert report.violations[0].indices == (0, 1)


def test_verify_service_flags_each_condition():
    z5 = ag.GroupSpec((5,))
    report = verify_service(z5, [T((0,), (2,), (1,)), T((0,), (3,), (3,))],
                            [(1,), (2,)])
    kinds = {v.kind for v in report.violations}
    assert kinds == {'sum', 'request', 'duplicate_x'}
    assert not verify_service(z5, [], [(1,)]).valid
    assert not verify_service(z5, [T((0, 1), (1,), (1,))], [(1,)]).valid


def test_verify_special_service():
    z5 = ag.GroupSpec((5,))
    assert verify_special_service(z5, [T((0,), (1,), (1,))], [(1,)]).valid
    report = verify_special_service(z5, [T((0,), (1,), (1,)),
                                         T((1,), (2,), (1,))], [(1,), (1,)])
    assert [v.kind for v in report.violations] == ['x_equals_y']
    zero = verify_special_service(z5, [T((2,), (2,), (0,))], [(0,)])
    assert 'zero_request' in {v.kind for v in zero.violations}


def test_special_service_z22_has_no_second_x():
    g = ag.binary_group(2)
    requests = [(0, 1), (1, 0)]
    first = T((0, 0), (0, 1), (0, 1))
    for x2 in ag.enumerate_elements(g):
        triples = [first, T(x2, ag.add(g, x2, (1, 0)), (1, 0))]
        assert not verify_special_service(g, triples, requests).valid


def test_special_service_z7_witness():
    g = ag.GroupSpec((7,))
    requests = [(1,), (2,), (3,)]
    witness = find_special_service_bruteforce(g, requests)
    assert witness is not None
    assert verify_special_service(g, witness.triples, requests).valid


def test_extend_empty_service():
    for text in ('Z3', 'Z2^2', 'Z2xZ4'):
        g = ag.parse_group_spec(text)
        for r in ag.enumerate_elements(g):
            result = extend_service(g, Service(g), r)
            assert result.triples == (T(ag.sub(g, ag.zero(g), r),
                                        ag.zero(g), r),)


def test_extend_z3():
    g = ag.GroupSpec((3,))
    result = extend_service(g, Service(g, (T((0,), (1,), (1,)),)), (1,))
    assert verify_service(g, result.triples, [(1,), (1,)]).valid
    assert result.requests == [(1,), (1,)]


@pytest.mark.parametrize('text,max_m', [('Z2^2', 2), ('Z3', 1), ('Z4', 2)])
def test_extend_exhaustive(text, max_m):
    g = ag.parse_group_spec(text)
    for m in range(max_m + 1):
        for service in all_services(g, m):
            for r0 in ag.enumerate_elements(g):
                result = extend_service(g, service, r0)
                expected = [r0] + service.requests
                assert result.requests == expected
                assert verify_service(g, result.triples, expected).valid


def test_extend_precondition():
    g = ag.GroupSpec((3,))
    full = build_service(g, [(1,), (1,)])
    with pytest.raises(PreconditionError):
        extend_service(g, full, (1,))
    broken = Service(g, (T((0,), (2,), (1,)),))
    with pytest.raises(PreconditionError):
        extend_service(g, broken, (1,))


def test_build_service_examples():
    g = ag.binary_group(3)
    assert len(build_service(g, [])) == 0
    z6 = ag.GroupSpec((6,))
    service = build_service(z6, [(1,)] * 5)
    assert verify_service(z6, service.triples, [(1,)] * 5).valid
    assert len(set(service.xs)) == 5 and len(set(service.ys)) == 5
    with pytest.raises(PreconditionError):
        build_service(z6, [(1,)] * 6)


@pytest.mark.parametrize('text', ['Z2', 'Z3', 'Z4', 'Z2^2', 'Z5', 'Z6'])
def test_build_service_exhaustive(text):
    g = ag.parse_group_spec(text)
    elements = list(ag.enumerate_elements(g))
    max_m = min(g.order - 1, 4)
    for m in range(max_m + 1):
        for requests in itertools.product(elements, repeat=m):
            service = build_service(g, requests)
            assert verify_service(g, service.triples, requests).valid


@st.composite
def group_and_requests(draw):
    text = draw(st.sampled_from(['Z2^3', 'Z2^4', 'Z7', 'Z8', 'Z2xZ6',
                                 'Z3xZ5', 'Z4xZ4', 'Z16']))
    g = ag.parse_group_spec(text)
    m = draw(st.integers(0, g.order - 1))
    requests = [ag.index_element(g, draw(st.integers(0, g.order - 1)))
                for _ in range(m)]
    return g, requests


@given(group_and_requests())
def test_build_service_random(sample):
    g, requests = sample
    service = build_service(g, requests)
    assert verify_service(g, service.triples, requests).valid


def test_full_service_examples():
    g = ag.binary_group(2)
    identity = build_full_service(g, [(0, 0)] * 4)
    assert all(t.x == t.y for t in identity)
    assert sorted(identity.xs) == list(ag.enumerate_elements(g))
    z3 = ag.GroupSpec((3,))
    result = build_full_service(z3, [(0,), (0,), (1,)])
    assert isinstance(result, NoSolution)
    assert result.witness == {'sum': [1]}
    requests = [(0, 1), (0, 1), (1, 0), (1, 0)]
    service = build_full_service(g, requests)
    assert verify_service(g, service.triples, requests).valid
    assert sorted(service.xs) == list(ag.enumerate_elements(g))
    with pytest.raises(PreconditionError):
        build_full_service(g, requests[:3])


@pytest.mark.parametrize('text', ['Z2', 'Z3', 'Z4', 'Z2^2'])
def test_full_service_sum_criterion(text):
    g = ag.parse_group_spec(text)
    elements = list(ag.enumerate_elements(g))
    for requests in itertools.product(elements, repeat=g.order):
        result = build_full_service(g, requests)
        if ag.is_zero(ag.element_sum(g, requests)):
            assert isinstance(result, Service)
            assert verify_service(g, result.triples, requests).valid
            assert sorted(result.xs) == elements
            assert sorted(result.ys) == elements
        else:
            assert isinstance(result, NoSolution)


def test_translate_service():
    g = ag.GroupSpec((5,))
    service = build_service(g, [(1,), (2,)])
    assert translate_service(service, (0,)) == service
    shifted = translate_service(service, (3,))
    assert verify_service(g, shifted.triples, [(1,), (2,)]).valid
    assert shifted.xs == [ag.add(g, x, (3,)) for x in service.xs]
    b = ag.binary_group(3)
    service = build_service(b, [(1, 0, 0), (0, 1, 1), (1, 1, 1)])
    a = (1, 0, 1)
    assert translate_service(translate_service(service, a), a) == service
    special = SpecialService(g, ((T((0,), (1,), (1,)),)))
    assert isinstance(translate_service(special, (2,)), SpecialService)


def test_zero_anchor_examples():
    result = build_numbering_with_zero_anchor(2, [(0, 0)] * 4)
    assert all(t.x == t.y for t in result)
    assert len(set(result.xs)) == 4
    result = build_numbering_with_zero_anchor(1, [(1,), (1,)])
    assert sorted(result.xs) == [(0,), (1,)]
    assert sorted(result.ys) == [(0,), (1,)]
    requests = [(0, 1), (0, 1), (1, 1), (1, 1)]
    result = build_numbering_with_zero_anchor(2, requests)
    assert sorted(result.xs) == list(ag.enumerate_elements(
        ag.binary_group(2)))
    assert sum(1 for y in result.ys if not any(y)) == 1
    with pytest.raises(PreconditionError):
        build_numbering_with_zero_anchor(2, requests[:3])


@pytest.mark.parametrize('k', [1, 2, 3])
def test_zero_anchor_exhaustive(k):
    g = ag.binary_group(k)
    elements = list(ag.enumerate_elements(g))
    sequences = itertools.product(elements, repeat=g.order)
    if k == 3:
        sequences = itertools.islice(sequences, 0, None, 9973)
    for requests in sequences:
        result = build_numbering_with_zero_anchor(k, requests)
        assert result.triples[-1] == T(requests[-1], ag.zero(g),
                                       requests[-1])
        assert sorted(result.xs) == elements
        nonzero_ys = [y for y in result.ys if any(y)]
        assert len(set(nonzero_ys)) == len(nonzero_ys)
        for t, r in zip(result, requests):
            assert t.r == r and ag.add(g, t.x, r) == t.y


def test_special_extension_from_empty():
    g = ag.binary_group(3)
    for r0 in ag.nonzero_elements(g):
        result = try_extend_special_service(3, SpecialService(g), r0)
        assert isinstance(result, SpecialService)
        assert verify_special_service(g, result.triples, [r0]).valid


def _special_services(g, m):
    nonzero = ag.nonzero_elements(g)
    for requests in itertools.product(nonzero, repeat=m):
        for xs in itertools.permutations(ag.enumerate_elements(g), m):
            triples = tuple(T(x, ag.add(g, x, r), r)
                            for x, r in zip(xs, requests))
            if verify_special_service(g, triples, requests).valid:
                yield SpecialService(g, triples)


@pytest.mark.parametrize('k,m', [(2, 0), (2, 1), (3, 1), (3, 2),
                                 pytest.param(3, 3, marks=pytest.mark.slow)])
def test_special_extension_outcomes(k, m):
    g = ag.binary_group(k)
    outcomes = {'success': 0, 'failure': 0}
    for special in _special_services(g, m):
        for r0 in ag.nonzero_elements(g):
            result = try_extend_special_service(k, special, r0)
            if isinstance(result, SpecialService):
                outcomes['success'] += 1
                expected = [r0] + special.requests
                assert verify_special_service(g, result.triples,
                                              expected).valid
            else:
                assert isinstance(result, SpecialExtensionFailure)
                outcomes['failure'] += 1
                state = result.state
                assert result.t >= 1
                assert result.x == state.y_minus1
                assert state.y(state.t) == state.x0
                assert result.to_json()['t'] == result.t
    assert outcomes['success'] > 0
    if (k, m) == (2, 1):
        assert outcomes == {'success': 12, 'failure': 24}
    if (k, m) == (3, 3):
        assert outcomes['failure'] > 0


def test_special_extension_fails_at_k2():
    g = ag.binary_group(2)
    special = SpecialService(g, (T((0, 0), (0, 1), (0, 1)),))
    stuck = try_extend_special_service(2, special, (1, 0))
    assert isinstance(stuck, SpecialExtensionFailure)
    assert stuck.t == 1
    assert stuck.x == (1, 1)
    assert stuck.state.y(1) == stuck.state.x0 == (0, 0)
    done = try_extend_special_service(2, special, (0, 1))
    assert done.triples[0] == T((1, 1), (1, 0), (0, 1))


def test_special_extension_preconditions():
    g = ag.binary_group(2)
    special = SpecialService(g, (T((0, 0), (0, 1), (0, 1)),
                                 T((1, 0), (1, 1), (0, 1))))
    assert verify_special_service(g, special.triples,
                                  special.requests).valid
    with pytest.raises(PreconditionError):
        try_extend_special_service(2, special, (1, 0))
    with pytest.raises(PreconditionError):
        try_extend_special_service(2, SpecialService(g), (0, 0))
    with pytest.raises(PreconditionError):
        try_extend_special_service(3, SpecialService(g), (1, 0))
