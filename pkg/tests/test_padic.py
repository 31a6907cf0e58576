from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btembed.errors import DivisionByZero, PrecisionExhausted
from btembed.padic import (
    INFINITE,
    PAdicScalar,
    default_precision,
    field_ops,
    frac_mod,
    from_fraction,
    is_prime,
    residue_units,
    scalar_from_rational,
    unit_group_generators,
    valuation_of,
    vp,
)

primes = st.sampled_from([2, 3, 5, 7])
nonzero = st.integers(-10**6, 10**6).filter(bool)


def rationals(p):
    return st.builds(lambda a, b, k: Fraction(a, b) * Fraction(p) ** k, nonzero, st.integers(1, 50), st.integers(-3, 3))


class TestScalarFromRational:
    def test_one(self):
        x = scalar_from_rational(3, 1, 1, 4)
        assert (x.valuation, x.unit, x.precision) == (0, 1, 4)

    def test_eighteen(self):
        x = scalar_from_rational(3, 18, 1, 4)
        assert (x.valuation, x.unit) == (2, 2)

    def test_half_mod_27(self):
        x = scalar_from_rational(3, 1, 2, 3)
        assert (x.valuation, x.unit) == (0, 14)
        assert 2 * 14 % 27 == 1

    def test_zero_numerator(self):
        assert scalar_from_rational(5, 0, 7, 3).valuation == INFINITE

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError):
            scalar_from_rational(5, 1, 0, 3)


class TestFieldOps:
    def test_add_examples(self):
        p = 5
        x = field_ops(from_fraction(p, 1 + p, 4), from_fraction(p, p, 4), "add")
        assert (x.valuation, x.unit) == (0, 1 + 2 * p)

    def test_self_subtraction_is_exact_zero(self):
        x = PAdicScalar(3, 1, 1, 5)
        assert field_ops(x, x, "sub").is_zero()

    def test_div(self):
        x = field_ops(from_fraction(3, 1, 3), from_fraction(3, 2, 3), "div")
        assert (x.valuation, x.unit) == (0, 14)

    def test_div_by_zero(self):
        with pytest.raises(DivisionByZero):
            field_ops(from_fraction(3, 1, 3), from_fraction(3, 0, 3), "div")

    def test_cancellation_loses_digits(self):
        a = from_fraction(3, 1, 4)
        b = from_fraction(3, 1 + 27, 4)
        d = b - a
        assert d.valuation == 3 and d.precision == 1

    def test_residue_needs_digits(self):
        d = from_fraction(3, 28, 4) - from_fraction(3, 1, 4)
        with pytest.raises(PrecisionExhausted):
            d.residue(5)

    def test_mixed_primes(self):
        with pytest.raises(ValueError):
            field_ops(from_fraction(3, 1, 3), from_fraction(5, 1, 3), "add")


class TestValuation:
    def test_examples(self):
        assert valuation_of(from_fraction(2, 0, 4)) == INFINITE
        assert valuation_of(from_fraction(2, 12, 4)) == 2
        assert valuation_of(from_fraction(3, Fraction(1, 3), 4)) == -1

    def test_vp(self):
        assert vp(Fraction(18, 5), 3) == 2
        assert vp(0, 3) == INFINITE


class TestResidueUnits:
    def test_mod_9(self):
        assert sorted(residue_units(3, 2)) == [1, 2, 4, 5, 7, 8]

    def test_mod_8(self):
        assert sorted(residue_units(2, 3)) == [1, 3, 5, 7]

    def test_trivial_ring(self):
        us = residue_units(5, 0)
        assert len(us) == 1 and len(list(us)) == 1

    @pytest.mark.parametrize("p,m", [(2, 1), (2, 4), (3, 3), (5, 2)])
    def test_cardinality(self, p, m):
        assert len(list(residue_units(p, m))) == len(residue_units(p, m)) == (p - 1) * p ** (m - 1)


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (2, 5), (3, 1), (3, 4), (5, 3)])
def test_unit_group_generators_generate(p, m):
    mod = p**m
    seen, frontier = {1}, [1]
    while frontier:
        x = frontier.pop()
        for g in unit_group_generators(p, m):
            y = x * g % mod
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    assert seen == set(residue_units(p, m))


def test_frac_mod_negative_exponent():
    assert frac_mod(Fraction(1, 3), 3, -1) == 0
    assert frac_mod(Fraction(5, 9), 3, -1) == Fraction(2, 9)


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_default_precision(monkeypatch):
    monkeypatch.delenv("BTE_PRECISION", raising=False)
    assert default_precision(2, 1) == 10
    monkeypatch.setenv("BTE_PRECISION", "40")
    assert default_precision(2, 1) == 40


# --- properties ---------------------------------------------------------------


@settings(max_examples=200)
@given(st.data(), primes, st.integers(3, 12))
def test_field_axioms(data, p, N):
    x, y, z = (from_fraction(p, data.draw(rationals(p)), N) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * x.inverse() == 1
    assert x - x == 0


@settings(max_examples=200)
@given(st.data(), primes)
def test_valuation_rules(data, p):
    a, b = data.draw(rationals(p)), data.draw(rationals(p))
    x, y = from_fraction(p, a, 10), from_fraction(p, b, 10)
    assert (x * y).valuation == x.valuation + y.valuation
    if a + b != 0:
        s = x + y
        assert s.valuation >= min(x.valuation, y.valuation)
        if x.valuation != y.valuation:
            assert s.valuation == min(x.valuation, y.valuation)


@given(st.data(), primes, st.integers(1, 10))
def test_precision_roundtrip(data, p, N):
    a = data.draw(rationals(p))
    assert from_fraction(p, a, N + 1).truncate(N) == from_fraction(p, a, N)
    assert from_fraction(p, a, N + 1).truncate(N).unit == from_fraction(p, a, N).unit


@given(st.data(), primes, st.integers(1, 10))
def test_lift_is_congruent(data, p, N):
    a = data.draw(rationals(p))
    x = from_fraction(p, a, N)
    assert vp(x.lift() - a, p) >= x.abs_precision
