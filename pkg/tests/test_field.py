from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kleinian import errors
from kleinian.field import (NumberField, dedekind_zeta_2, embed, norm_to_Q, parse_field,
                            primes_up_to, trace_to_Q)

SEXTIC = [1, -1, -2, 3, -1, -2, 1]


@pytest.fixture(scope="module")
def q3():
    return NumberField([1, 0, 3], integral_basis=[[1, 0], ["1/2", "1/2"]], prime_splitting={2: [2]})


@pytest.fixture(scope="module")
def sextic_field():
    return NumberField(SEXTIC)


def test_quadratic_invariants(q3):
    assert q3.degree == 2 and q3.r1 == 0 and q3.r2 == 1
    assert q3.disc == -3
    assert q3.index == 2


def test_sextic_invariants(sextic_field):
    F = sextic_field
    assert F.disc == -92779
    assert (F.r1, F.r2) == (4, 1)
    s = complex(embed(F.gen, "sigma"))
    assert s.imag > 0
    assert abs(np.polyval(SEXTIC, s)) < 1e-12


def test_not_atr_and_reducible():
    with pytest.raises(errors.NotATR):
        NumberField([1, 0, -2])
    with pytest.raises(errors.NotATR):
        NumberField([1, 0, 0, 0, 1])  # two complex places
    with pytest.raises(errors.ReduciblePoly):
        NumberField([1, -1, 0])


def test_index_prime_must_be_given():
    F = NumberField([1, 0, 3], integral_basis=[[1, 0], ["1/2", "1/2"]])
    with pytest.raises(errors.IndexPrimeUnspecified):
        dedekind_zeta_2(F, 1000)


def test_parse_field_roundtrip(q3):
    F2 = parse_field(q3.to_config())
    assert F2 == q3


coeff = st.fractions(min_value=-20, max_value=20, max_denominator=6)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=6, max_size=6), st.lists(coeff, min_size=6, max_size=6),
       st.lists(coeff, min_size=6, max_size=6))
def test_field_ring_axioms(sextic_field, a, b, c):
    F = sextic_field
    x, y, z = F(a), F(b), F(c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert norm_to_Q(x * y) == norm_to_Q(x) * norm_to_Q(y)
    assert trace_to_Q(x + y) == trace_to_Q(x) + trace_to_Q(y)
    if not x.is_zero():
        assert x * x.inverse() == F.one


@settings(max_examples=30, deadline=None)
@given(st.lists(coeff, min_size=6, max_size=6), st.lists(coeff, min_size=6, max_size=6))
def test_embedding_is_ring_homomorphism(sextic_field, a, b):
    F = sextic_field
    x, y = F(a), F(b)
    for place in list(range(F.r1)) + ["sigma"]:
        assert abs(complex(embed(x * y, place)) - complex(embed(x, place)) * complex(embed(y, place))) < 1e-8 * (
            1 + abs(complex(embed(x * y, place))))


def test_zeta_q_sqrt_minus3(q3):
    # oracle: zeta_F(2) = zeta(2) L(2, chi_-3), the L-value summed independently
    with mpmath.workdps(30):
        L = mpmath.nsum(lambda k: 1 / (3 * k + 1) ** 2 - 1 / (3 * k + 2) ** 2, [0, mpmath.inf])
        oracle = float(mpmath.zeta(2) * L)
    val, err = dedekind_zeta_2(q3, 20000)
    assert abs(val - oracle) <= err
    assert abs(val - oracle) < 1e-6
    assert abs(oracle - 1.2851909554841494) < 1e-12  # frozen


def test_zeta_override():
    F = NumberField([1, 0, 3], integral_basis=[[1, 0], ["1/2", "1/2"]], prime_splitting={2: [2]}, zeta2="1.25")
    assert dedekind_zeta_2(F) == (1.25, 0.0)


def test_primes():
    assert list(primes_up_to(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
