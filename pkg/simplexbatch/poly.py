"""Exact sparse multivariate polynomials and the algebraic claims around f.

    f(x_1..x_m) = prod_{i<j} (x_i - x_j)(x_i - x_j + r_i - r_j)
                  * prod_{i != j} (x_i - x_j - r_j)

f is nonzero at a point of F_p^m exactly when that point is a special
service for r_1..r_m in Z_p.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import factorint, isprime

from .abelian_group import GroupSpec
from .constants import (CHAR2_MAX_M, CONCRETE_F_MAX_M, DYSON_MAX_M,
                        EVALUATION_BUDGET, SYMBOLIC_F_MAX_M,
                        VANDERMONDE_MAX_M)
from .helper import InvariantError, PreconditionError, SearchBudgetError
from .service import special_service_from_xs, verify_special_service

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


class SparsePolynomial:
    """Integer polynomial stored as {exponent tuple: coefficient}."""

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        self.terms: Dict[Monomial, int] = {}
        for monomial, coefficient in (terms or {}).items():
            self._add_term(tuple(monomial), coefficient)

    def _add_term(self, monomial, coefficient):
        if len(monomial) != self.nvars:
            raise PreconditionError('Monomial %r has arity %d, expected %d' %
                                    (monomial, len(monomial), self.nvars))
        if any(e < 0 for e in monomial):
            raise PreconditionError('Negative exponent in %r' % (monomial,))
        value = self.terms.get(monomial, 0) + coefficient
        if value:
            self.terms[monomial] = value
        else:
            self.terms.pop(monomial, None)

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def linear(cls, nvars, coefficients, constant=0):
        """sum coefficients[i] * var_i + constant."""
        terms = {(0,) * nvars: constant}
        for i, c in coefficients.items():
            monomial = [0] * nvars
            monomial[i] = 1
            terms[tuple(monomial)] = terms.get(tuple(monomial), 0) + c
        return cls(nvars, terms)

    def _same_ring(self, other):
        if other.nvars != self.nvars:
            raise PreconditionError('Arity mismatch: %d vs %d' %
                                    (self.nvars, other.nvars))

    def __add__(self, other):
        self._same_ring(other)
        result = SparsePolynomial(self.nvars, self.terms)
        for monomial, coefficient in other.terms.items():
            result._add_term(monomial, coefficient)
        return result

    def __neg__(self):
        return SparsePolynomial(self.nvars,
                                {mo: -c for mo, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._same_ring(other)
        products: Dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(m1, m2))
                products[key] = products.get(key, 0) + c1 * c2
        result = SparsePolynomial(self.nvars)
        result.terms = {mo: c for mo, c in products.items() if c}
        return result

    def __pow__(self, n):
        result = SparsePolynomial.constant(self.nvars, 1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        return (isinstance(other, SparsePolynomial)
                and self.nvars == other.nvars and self.terms == other.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return 'SparsePolynomial(%d, %d terms)' % (self.nvars, len(self.terms))

    def coefficient(self, monomial):
        monomial = tuple(monomial)
        if len(monomial) != self.nvars:
            raise PreconditionError('Monomial %r has arity %d, expected %d' %
                                    (monomial, len(monomial), self.nvars))
        return self.terms.get(monomial, 0)

    def degree(self, variables=None):
        """Total degree, optionally counting only the given variables."""
        if not self.terms:
            return -1
        variables = range(self.nvars) if variables is None else variables
        return max(sum(mo[i] for i in variables) for mo in self.terms)

    def homogeneous_part(self, degree, variables=None):
        variables = range(self.nvars) if variables is None else variables
        return SparsePolynomial(self.nvars, {
            mo: c for mo, c in self.terms.items()
            if sum(mo[i] for i in variables) == degree})

    def restrict(self, nvars):
        """Drop trailing variables from terms that do not involve them."""
        return SparsePolynomial(nvars, {
            mo[:nvars]: c for mo, c in self.terms.items()
            if not any(mo[nvars:])})

    def x_section(self, x_exponents):
        """Coefficient of a monomial in the leading variables.

        The result lives in the remaining (trailing) variables.
        """
        n = len(x_exponents)
        x_exponents = tuple(x_exponents)
        return SparsePolynomial(self.nvars - n, {
            mo[n:]: c for mo, c in self.terms.items()
            if mo[:n] == x_exponents})

    def reduce_mod(self, p):
        return SparsePolynomial(self.nvars, {
            mo: c % p for mo, c in self.terms.items()})

    def evaluate(self, point, modulus=None):
        total = 0
        for monomial, coefficient in self.terms.items():
            term = coefficient
            for value, e in zip(point, monomial):
                if e:
                    term *= value ** e if modulus is None \
                        else pow(value, e, modulus)
            total += term
        return total if modulus is None else total % modulus


class LinearProduct:
    """A polynomial kept as a product of linear factors."""

    def __init__(self, nvars, factors: Iterable[SparsePolynomial]):
        self.nvars = nvars
        self.factors = list(factors)
        self._linear = [self._coefficients(f) for f in self.factors]

    def _coefficients(self, factor):
        constant = factor.coefficient((0,) * self.nvars)
        weights = [0] * self.nvars
        for monomial, c in factor.terms.items():
            if sum(monomial) == 1:
                weights[monomial.index(1)] = c
            elif sum(monomial) > 1:
                raise PreconditionError('Factor is not linear')
        return weights, constant

    def evaluate(self, point, modulus=None):
        total = 1
        for weights, constant in self._linear:
            value = sum(w * v for w, v in zip(weights, point)) + constant
            if modulus is not None:
                value %= modulus
            if value == 0:
                return 0
            total *= value
            if modulus is not None:
                total %= modulus
        return total

    def expand(self):
        result = SparsePolynomial.constant(self.nvars, 1)
        for factor in self.factors:
            result = result * factor
        return result


def build_f_factors(m, r=None):
    """Linear factors of f, in the order they appear in its definition.

    With r=None the r_i are the variables m..2m-1.
    """
    if r is None:
        nvars = 2 * m
        r_value = None
    else:
        if len(r) != m:
            raise PreconditionError('Expected %d values of r, got %d' %
                                    (m, len(r)))
        nvars = m
        r_value = [int(v) for v in r]

    def factor(coeffs, constant=0):
        merged: Dict[int, int] = {}
        for i, c in coeffs:
            merged[i] = merged.get(i, 0) + c
        return SparsePolynomial.linear(nvars, merged, constant)

    factors = []
    for i, j in itertools.combinations(range(m), 2):
        factors.append(factor([(i, 1), (j, -1)]))
        if r_value is None:
            factors.append(factor([(i, 1), (j, -1), (m + i, 1), (m + j, -1)]))
        else:
            factors.append(factor([(i, 1), (j, -1)],
                                  r_value[i] - r_value[j]))
    for i, j in itertools.permutations(range(m), 2):
        if r_value is None:
            factors.append(factor([(i, 1), (j, -1), (m + j, -1)]))
        else:
            factors.append(factor([(i, 1), (j, -1)], -r_value[j]))
    return LinearProduct(nvars, factors)


def build_f(m, r=None):
    """Expanded f; symbolic in r when r is None."""
    limit = SYMBOLIC_F_MAX_M if r is None else CONCRETE_F_MAX_M
    if m > limit:
        raise PreconditionError('Expanding f is limited to m <= %d here' %
                                limit)
    if m < 1:
        raise PreconditionError('m must be >= 1')
    f = build_f_factors(m, r).expand()
    logger.debug('f for m=%d has %d terms', m, len(f))
    return f


def f_degree(m):
    return 2 * m * (m - 1)


@lru_cache(maxsize=None)
def f_leading_form(m):
    """Top x-degree part of f, which does not depend on r."""
    if not 1 <= m <= CONCRETE_F_MAX_M:
        raise PreconditionError('Leading form of f limited to 1 <= m <= %d'
                                % CONCRETE_F_MAX_M)
    factors = []
    for i, j in itertools.combinations(range(m), 2):
        factors.extend([SparsePolynomial.linear(m, {i: 1, j: -1})] * 2)
    for i, j in itertools.permutations(range(m), 2):
        factors.append(SparsePolynomial.linear(m, {i: 1, j: -1}))
    return LinearProduct(m, factors).expand()


def coefficient(poly, monomial):
    return poly.coefficient(monomial)


def leading_form_sign(m):
    """f's leading form equals this sign times prod_{i<j} (x_i - x_j)^4."""
    return -1 if (m * (m - 1) // 2) % 2 else 1


@lru_cache(maxsize=None)
def _fourth_power_product(m):
    result = SparsePolynomial.constant(m, 1)
    for i, j in itertools.combinations(range(m), 2):
        result = result * SparsePolynomial.linear(m, {i: 1, j: -1}) ** 4
    return result


def dyson_closed_form(m):
    return factorial(2 * m) // 2 ** m


def odd_factorial_form(m):
    return prod(range(1, 2 * m, 2)) * factorial(m)


@lru_cache(maxsize=None)
def dyson_balanced_coefficient(m):
    """Coefficient of (x_1..x_m)^{2(m-1)} in prod_{i<j} (x_i - x_j)^4."""
    if not 1 <= m <= DYSON_MAX_M:
        raise PreconditionError('Expansion is limited to 1 <= m <= %d' %
                                DYSON_MAX_M)
    value = _fourth_power_product(m).coefficient((2 * (m - 1),) * m)
    if not value == dyson_closed_form(m) == odd_factorial_form(m):
        raise InvariantError('Balanced coefficient %d differs from (2m)!/2^m'
                             ' = %d' % (value, dyson_closed_form(m)))
    return value


def balanced_coefficients(m):
    """The balanced coefficient in f and in the fourth-power product."""
    balanced = (2 * (m - 1),) * m
    in_f = f_leading_form(m).coefficient(balanced)
    in_product = _fourth_power_product(m).coefficient(balanced)
    if in_f != leading_form_sign(m) * in_product:
        raise InvariantError('Sign relation between f and the product fails')
    return {'m': m, 'in_f': in_f, 'in_product': in_product,
            'sign': leading_form_sign(m)}


def coefficient_mod_p_nonzero(m, p, cross_check=True):
    """Whether (2m)!/2^m is nonzero in F_p, i.e. m = 1 or p >= 2m + 1."""
    if not isprime(p):
        raise PreconditionError('%d is not prime' % p)
    nonzero = odd_factorial_form(m) % p != 0
    if nonzero != (m == 1 or p >= 2 * m + 1):
        raise InvariantError('Criterion m = 1 or p >= 2m + 1 fails for m=%d,'
                             ' p=%d' % (m, p))
    if cross_check and m <= DYSON_MAX_M:
        if (dyson_balanced_coefficient(m) % p != 0) != nonzero:
            raise InvariantError('Expanded coefficient disagrees mod %d' % p)
    return nonzero


# (m, monomial, coefficient in f, smallest characteristic it certifies)
SMALL_M_CLAIMS = (
    (3, (6, 5, 1), 8, 3),
    (4, (8, 8, 7, 1), -72, 5),
)


def small_m_monomial_claims():
    """Recompute the coefficients of the small-m certifying monomials."""
    results = []
    for m, monomial, expected, min_char in SMALL_M_CLAIMS:
        value = f_leading_form(m).coefficient(monomial)
        results.append({'m': m, 'monomial': list(monomial),
                        'coefficient': value, 'expected': expected,
                        'min_characteristic': min_char,
                        'holds': value == expected})
    return results


def coefficient_claim_holds(q, m):
    """Does some known top-degree monomial of f certify F_q for this m?

    q is a prime power p^k. A monomial with exponents t_i qualifies when
    its coefficient is nonzero mod p and q > t_i for all i.
    """
    factors = factorint(q)
    if len(factors) != 1:
        raise PreconditionError('%d is not a prime power' % q)
    (p, _), = factors.items()
    if m == 1:
        return True
    candidates = [(2 * (m - 1),) * m]
    candidates += [mono for mm, mono, _, _ in SMALL_M_CLAIMS if mm == m]
    leading = f_leading_form(m)
    for monomial in candidates:
        if leading.coefficient(monomial) % p and q > max(monomial):
            return True
    return False


def vandermonde_expand(m):
    if not 1 <= m <= VANDERMONDE_MAX_M:
        raise PreconditionError('Vandermonde expansion limited to m <= %d' %
                                VANDERMONDE_MAX_M)
    result = SparsePolynomial.constant(m, 1)
    for i, j in itertools.combinations(range(m), 2):
        result = result * SparsePolynomial.linear(m, {i: 1, j: -1})
    return result


def permutation_sign(perm):
    inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
    return -1 if inversions % 2 else 1


def vandermonde_permutation_sum(m, power=1):
    """sum over pi of sign(pi) * prod_i x_{pi(i)}^{power * (m - i)}."""
    terms = {}
    for perm in itertools.permutations(range(m)):
        exponents = [0] * m
        for position, variable in enumerate(perm):
            exponents[variable] = power * (m - 1 - position)
        terms[tuple(exponents)] = permutation_sign(perm)
    return SparsePolynomial(m, terms)


@dataclass(frozen=True)
class Char2Report:
    m: int
    holds: bool
    support: Tuple[Monomial, ...]
    threshold: int

    def __bool__(self):
        return self.holds

    @property
    def min_k(self):
        """Smallest k with 2^k >= threshold."""
        return max(0, (self.threshold - 1).bit_length())


def char2_threshold(m):
    return 4 * (m - 1) + 1


def char2_leading_form_check(m):
    """Leading form of f mod 2 is the Frobenius fourth power of Vandermonde."""
    if not 1 <= m <= CHAR2_MAX_M:
        raise PreconditionError('Characteristic-2 check limited to m <= %d' %
                                CHAR2_MAX_M)
    reduced = f_leading_form(m).reduce_mod(2)
    expected = vandermonde_permutation_sum(m, power=4).reduce_mod(2)
    holds = reduced == expected and all(c == 1 for c in reduced.terms.values())
    return Char2Report(m, holds, tuple(sorted(reduced.terms)),
                       char2_threshold(m))


@dataclass(frozen=True)
class EvaluationResult:
    point: Optional[Tuple[int, ...]]
    scanned: int
    hypothesis_holds: Optional[bool] = None

    @property
    def found(self):
        return self.point is not None

    def to_json(self):
        return {'point': None if self.point is None else list(self.point),
                'scanned': self.scanned,
                'hypothesis_holds': self.hypothesis_holds}


def cn_hypothesis(poly_leading, monomial, sets, p):
    """Nonzero top-degree coefficient mod p and |S_i| > t_i."""
    return (poly_leading.coefficient(monomial) % p != 0
            and all(len(s) > t for s, t in zip(sets, monomial)))


def find_nonzero_evaluation(poly, sets: Sequence[Sequence[int]], p,
                            monomial=None, budget=EVALUATION_BUDGET):
    """Scan S_1 x .. x S_m for a point where poly is nonzero mod p.

    If `monomial` is given, the result also records whether the
    Combinatorial Nullstellensatz hypothesis holds for it; when it does
    and nothing is found, that is a contradiction.
    """
    size = prod(len(s) for s in sets)
    if size > budget:
        raise SearchBudgetError('%d points exceed the budget of %d' %
                                (size, budget))
    hypothesis = None
    if monomial is not None:
        expanded = poly.expand() if isinstance(poly, LinearProduct) else poly
        expanded = expanded.reduce_mod(p)
        # the criterion only speaks about monomials of top degree mod p
        hypothesis = (sum(monomial) == expanded.degree()
                      and cn_hypothesis(expanded, monomial, sets, p))
    scanned = 0
    for point in itertools.product(*sets):
        scanned += 1
        if poly.evaluate(point, p):
            return EvaluationResult(tuple(point), scanned, hypothesis)
    if hypothesis:
        raise InvariantError('Nullstellensatz hypothesis holds but every '
                             'point evaluates to zero')
    return EvaluationResult(None, scanned, hypothesis)


def evaluation_to_special_service(p, r, point):
    """Read a nonzero evaluation of f over F_p as a special service of Z_p."""
    g = GroupSpec((p,))
    requests = [(v % p,) for v in r]
    if any(not v for (v,) in requests):
        raise PreconditionError('Special services need r_i != 0 mod %d' % p)
    service = special_service_from_xs(g, [(v % p,) for v in point], requests)
    report = verify_special_service(g, service.triples, requests)
    if not report.valid:
        raise InvariantError('Nonzero evaluation %r is not a special service'
                             % (point,))
    return service


def special_service_via_nullstellensatz(p, r, budget=EVALUATION_BUDGET):
    """Bridge: scan f over F_p^m and decode the first nonzero point."""
    m = len(r)
    f = build_f_factors(m, [v % p for v in r])
    result = find_nonzero_evaluation(f, [range(p)] * m, p, budget=budget)
    if not result.found:
        return result, None
    return result, evaluation_to_special_service(p, r, result.point)


def parse_monomial(text) -> List[int]:
    try:
        return [int(e) for e in text.split(',')]
    except ValueError as error:
        raise PreconditionError('Monomial must be comma-separated exponents,'
                                ' got %r' % text) from error
