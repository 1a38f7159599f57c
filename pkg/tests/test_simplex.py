import itertools

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from simplexbatch.helper import PreconditionError, popcount
from simplexbatch.simplex import (ColumnAssignment, Hyperplane, SimplexCode,
                                  bits_from_vector, build_phi, request_class,
                                  serve_affine_requests, serve_batch_requests,
                                  serve_odd_requests, serve_pir_requests,
                                  unit_vector, verify_assignment)


def outside(k, u):
    return Hyperplane(k, u).complement()


def check_served(k, requests, assignment):
    report = verify_assignment(k, requests, assignment)
    assert report.valid, report.to_json()
    assert len(assignment) == len(requests)


def test_simplex_columns():
    code = SimplexCode(3)
    assert code.length == 7
    assert code.columns == list(range(1, 8))
    assert code.column_bits(3) == [0, 1, 1]
    with pytest.raises(PreconditionError):
        code.column_bits(8)
    with pytest.raises(PreconditionError):
        SimplexCode(0)


@pytest.mark.parametrize('k', [1, 2, 3, 6])
def test_generator_matrix(k):
    code = SimplexCode(k)
    matrix = code.generator_matrix()
    assert matrix.shape == (k, (1 << k) - 1)
    for i in code.columns:
        assert matrix[:, i - 1].tolist() == code.column_bits(i)
    assert len({tuple(col) for col in matrix.T}) == code.length
    assert not np.any(matrix.sum(axis=0) == 0)


def test_unit_vector():
    assert unit_vector(3, 1) == 0b100
    assert unit_vector(3, 3) == 0b001
    assert bits_from_vector(unit_vector(4, 2), 4) == [0, 1, 0, 0]
    with pytest.raises(PreconditionError):
        unit_vector(3, 4)


@pytest.mark.parametrize('k', [1, 2, 3, 4])
def test_hyperplane(k):
    for u in range(1, 1 << k):
        h = Hyperplane(k, u)
        elements = h.elements()
        assert len(elements) == 1 << (k - 1)
        for a, b in itertools.product(elements, repeat=2):
            assert h.contains(a ^ b)
        assert sorted(elements + h.complement()) == list(range(1 << k))


def test_phi_examples():
    phi = build_phi(2, 0b11)
    assert phi.hyperplane.elements() == [0b00, 0b11]
    assert phi.pivot == 1
    assert phi.forward(0b11) == 1
    assert phi.forward(0b00) == 0
    phi = build_phi(3, 0b111)
    assert phi.forward(0b011) == 0b11
    assert sorted(phi.forward(v) for v in outside(3, 0b111)) == [0, 1, 2, 3]


def test_phi_rejects():
    with pytest.raises(PreconditionError):
        build_phi(3, 0)
    with pytest.raises(PreconditionError):
        build_phi(3, 0b111, a=0b011)


@pytest.mark.parametrize('k', range(1, 9))
def test_phi_round_trip(k):
    for u in (1, (1 << k) - 1, (1 << k) - 1 >> 1 or 1):
        phi = build_phi(k, u)
        for w in range(1 << (k - 1)):
            h = phi.lift_h(w)
            v = phi.lift_complement(w)
            assert phi.hyperplane.contains(h)
            assert not phi.hyperplane.contains(v)
            assert phi.forward(h) == w
            assert phi.forward(v) == w


def test_phi_other_coset_representative():
    phi = build_phi(3, 0b111, a=0b111)
    assert phi.a == 0b111
    for w in range(4):
        assert phi.forward(phi.lift_complement(w)) == w


def test_verify_assignment_examples():
    assert verify_assignment(2, [], []).valid
    assert verify_assignment(2, [0b11], [[3]]).valid
    report = verify_assignment(2, [0b01, 0b11], [[1], [1, 2]])
    assert [v.kind for v in report.violations] == ['overlap']
    too_big = verify_assignment(3, [0b111], [[1, 2, 4]])
    assert [v.kind for v in too_big.violations] == ['size']
    assert verify_assignment(3, [0b111], [[1, 2, 4]], max_size=None).valid
    wrong = verify_assignment(2, [0b01], [[2]])
    assert [v.kind for v in wrong.violations] == ['sum']
    assert not verify_assignment(2, [0b01], []).valid
    assert not verify_assignment(2, [0b01], [[4]]).valid


def test_serve_affine_examples():
    assert serve_affine_requests(1, 1, [1]).sets == ((1,),)
    requests = [0b01, 0b10]
    check_served(2, requests, serve_affine_requests(2, 0b11, requests))
    assert serve_affine_requests(3, 0b111, []).sets == ()


def test_serve_affine_rejects():
    with pytest.raises(PreconditionError):
        serve_affine_requests(2, 0b11, [0b11])
    with pytest.raises(PreconditionError):
        serve_affine_requests(2, 0b11, [0b01] * 3)
    with pytest.raises(PreconditionError):
        serve_affine_requests(0, 1, [])


@pytest.mark.parametrize('k', [1, 2, 3])
def test_serve_affine_exhaustive(k):
    half = 1 << (k - 1)
    for u in range(1, 1 << k):
        candidates = outside(k, u)
        for m in range(half + 1):
            for requests in itertools.product(candidates, repeat=m):
                assignment = serve_affine_requests(k, u, list(requests))
                check_served(k, requests, assignment)


@st.composite
def affine_instance(draw):
    k = draw(st.integers(4, 7))
    u = draw(st.integers(1, (1 << k) - 1))
    candidates = outside(k, u)
    m = draw(st.sampled_from([1 << (k - 1), (1 << (k - 1)) - 1,
                              draw(st.integers(0, 1 << (k - 1)))]))
    requests = draw(st.lists(st.sampled_from(candidates), min_size=m,
                             max_size=m))
    return k, u, requests


@given(affine_instance())
def test_serve_affine_random(instance):
    k, u, requests = instance
    check_served(k, requests, serve_affine_requests(k, u, requests))


@pytest.mark.slow
@pytest.mark.parametrize('k', range(4, 11))
def test_serve_odd_random_sweep(k):
    rng = np.random.default_rng(k)
    odd = [v for v in range(1, 1 << k) if popcount(v) % 2]
    for _ in range(10 ** 4):
        requests = [odd[i] for i in rng.integers(0, len(odd), 1 << (k - 1))]
        check_served(k, requests, serve_odd_requests(k, requests))


def test_serve_odd_examples():
    check_served(2, [0b01, 0b01], serve_odd_requests(2, [0b01, 0b01]))
    four = serve_odd_requests(3, [0b111] * 4)
    check_served(3, [0b111] * 4, four)
    assert len(set(itertools.chain(*four.sets))) == \
        sum(len(s) for s in four.sets)
    assert serve_odd_requests(1, [1]).sets == ((1,),)


def test_serve_odd_rejects_even_weight():
    with pytest.raises(PreconditionError):
        serve_odd_requests(3, [0b011])
    with pytest.raises(PreconditionError):
        serve_odd_requests(3, [0])


def test_singletons_in_full_batches():
    for requests in itertools.product([1, 2, 4, 7], repeat=4):
        assignment = serve_odd_requests(3, list(requests))
        assert assignment.singletons <= 2


def test_serve_batch_and_pir():
    check_served(2, [0b10, 0b10], serve_batch_requests(2, [0b10, 0b10]))
    requests = [0b100, 0b010, 0b001, 0b100]
    check_served(3, requests, serve_batch_requests(3, requests))
    with pytest.raises(PreconditionError):
        serve_batch_requests(3, [0b111])
    pir = serve_pir_requests(4, 2, 8)
    check_served(4, [0b0100] * 8, pir)
    with pytest.raises(PreconditionError):
        serve_pir_requests(3, 1, 5)


def test_request_class():
    assert request_class(3, [0b100, 0b100]) == 'pir'
    assert request_class(3, [0b100, 0b010]) == 'batch'
    assert request_class(3, [0b111, 0b100]) == 'odd'
    assert request_class(3, [0b011]) == 'functional'
    assert request_class(3, [0b000, 0b111]) is None


def test_column_assignment_json():
    assignment = ColumnAssignment(3, ((7,), (1, 6)))
    assert assignment.to_json() == [[7], [1, 6]]
    assert ColumnAssignment.from_json(3, [[7], [1, 6]]) == assignment
    assert assignment.singletons == 1
