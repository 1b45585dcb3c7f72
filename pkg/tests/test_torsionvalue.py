import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionkit.torsionvalue import TorsionValue, TorsionValueError, factorize


def test_from_rational_basic():
    tv = TorsionValue.from_rational(Fraction(12, 5))
    assert tv.factor_map() == {2: Fraction(2), 3: Fraction(1), 5: Fraction(-1)}


def test_one_and_identity_element():
    assert TorsionValue.one().is_one()
    tv = TorsionValue.from_integer(6)
    assert (tv / tv).is_one()
    assert (tv * TorsionValue.one()) == tv


def test_rejects_nonpositive():
    with pytest.raises(TorsionValueError):
        TorsionValue.from_rational(Fraction(-2))
    with pytest.raises(TorsionValueError):
        TorsionValue.from_integer(0)


def test_pow_with_fraction():
    tv = TorsionValue.from_integer(8) ** Fraction(1, 2)
    assert tv.factor_map() == {2: Fraction(3, 2)}


def test_perfect_power_bases_canonicalize():
    a = TorsionValue([(4, Fraction(1, 2))])
    b = TorsionValue([(2, Fraction(1))])
    assert a == b


def test_opaque_composite_kept_exact():
    # the factor bound stops before these primes, so the whole composite
    # survives as a single base rather than degrading to floating point
    p, q = 1000003, 1000033
    tv = TorsionValue.from_integer(p * q, bound=1000)
    assert tv.factor_map() == {p * q: Fraction(1)}
    assert tv.is_exact


def test_composite_refinement_by_gcd():
    a = TorsionValue([(6, Fraction(1))])
    b = TorsionValue([(10, Fraction(-1))])
    combined = a * b
    assert combined.factor_map() == {3: Fraction(1), 5: Fraction(-1)}


def test_as_fraction_roundtrip():
    q = Fraction(45, 28)
    assert TorsionValue.from_rational(q).as_fraction() == q


def test_as_fraction_rejects_half_exponent():
    with pytest.raises(TorsionValueError):
        (TorsionValue.from_integer(2) ** Fraction(1, 2)).as_fraction()


def test_log_value():
    tv = TorsionValue.from_rational(Fraction(3, 4))
    assert math.isclose(tv.log_value(), math.log(0.75))


def test_factorize_matches_product():
    for n in (1, 2, 360, 1009, 2**10 * 17):
        out = 1
        for p, e in factorize(n).items():
            out *= p**e
        assert out == n


@settings(max_examples=100, deadline=None)
@given(
    st.fractions(min_value=Fraction(1, 200), max_value=200),
    st.fractions(min_value=Fraction(1, 200), max_value=200),
)
def test_multiplicative_homomorphism(a, b):
    ta = TorsionValue.from_rational(a)
    tb = TorsionValue.from_rational(b)
    assert (ta * tb).as_fraction() == a * b
    assert (ta / tb).as_fraction() == a / b


def test_equality_requires_equal_factor_maps():
    assert TorsionValue.from_integer(4) != TorsionValue.from_integer(8)
    assert TorsionValue.from_integer(4) == TorsionValue.from_integer(2) ** 2


def test_json_rendering():
    data = (TorsionValue.from_integer(2) ** Fraction(-3, 2)).to_json()
    assert data["factors"] == {"2": "-3/2"}
    assert float(data["decimal"]) == pytest.approx(2 ** (-1.5))
