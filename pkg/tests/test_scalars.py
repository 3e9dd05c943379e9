import random
from fractions import Fraction

import pytest

from latticetile.scalars import (
    QuadScalar,
    ScalarError,
    is_square_free,
    parse_scalar,
    rational,
    sqrt_d,
)


def q2(a, b=0):
    return QuadScalar(Fraction(a), Fraction(b), 2)


def test_norm_identity():
    x = q2(1, 1)
    y = q2(1, -1)
    assert x * y == q2(-1)


def test_additive_identity():
    x = q2(Fraction(3, 7), Fraction(-2, 5))
    assert x + 0 == x
    assert x + q2(0) == x


def test_inverse_by_conjugate():
    x = q2(1, 1)
    inv = QuadScalar(1, 0, 2) / x
    assert inv == q2(-1, 1)
    assert inv * x == q2(1)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        q2(1) / q2(0)


def test_mixed_radicands_rejected():
    with pytest.raises(ScalarError):
        q2(0, 1) + QuadScalar(0, 1, 3)
    # Rational values promote across instances.
    assert QuadScalar(2, 0, 3) + q2(0, 1) == QuadScalar(2, 1, 2)


def test_sign_examples():
    assert q2(0).sign() == 0
    assert QuadScalar(1, Fraction(-2, 3), 2).sign() == 1  # 1 > d*b^2 = 8/9
    assert q2(1, -1).sign() == -1  # 1 - sqrt2 < 0
    assert q2(-3, 2).sign() == -1  # 2*sqrt2 = 2.83 < 3
    assert q2(-2, 2).sign() == 1  # 2*sqrt2 > 2
    assert q2(3, -2).sign() == 1
    assert q2(2, -2).sign() == -1
    assert q2(2, -1).sign() == 1


def test_to_float_examples():
    assert rational(Fraction(1, 2)).to_float() == 0.5
    assert rational(-3).to_float() == -3.0
    s = sqrt_d(2).to_float(60)
    assert abs(s - 2 ** 0.5) < 1e-15


def test_approximate_bound():
    x = q2(Fraction(22, 7), Fraction(-3, 11))
    for precision in (53, 80, 128):
        approx = x.approximate(precision)
        err = approx - Fraction(22, 7)  # exact check via rearrangement:
        # |approx - x| <= 2^(-precision+2) * (1 + |x|); verify by squaring
        # the sqrt part: approx - a = b*sqrt(2) + delta.
        resid = (err * 11 / -3) ** 2  # ((approx-a)/b)^2 should be near 2
        assert abs(resid - 2) < Fraction(1, 2 ** (precision - 20))


def test_field_axioms_random():
    rng = random.Random(12345)

    def rand_scalar():
        return q2(
            Fraction(rng.randint(-40, 40), rng.randint(1, 12)),
            Fraction(rng.randint(-40, 40), rng.randint(1, 12)),
        )

    one = q2(1)
    for _ in range(300):
        x, y, z = rand_scalar(), rand_scalar(), rand_scalar()
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        if x:
            assert x * (one / x) == one


def test_order_matches_high_precision_floats():
    rng = random.Random(999)
    for _ in range(10_000):
        x = q2(
            Fraction(rng.randint(-30, 30), rng.randint(1, 9)),
            Fraction(rng.randint(-30, 30), rng.randint(1, 9)),
        )
        y = q2(
            Fraction(rng.randint(-30, 30), rng.randint(1, 9)),
            Fraction(rng.randint(-30, 30), rng.randint(1, 9)),
        )
        ax, ay = x.approximate(128), y.approximate(128)
        s = (x - y).sign()
        if s == 0:
            assert x == y
        elif s > 0:
            assert ax > ay - Fraction(1, 2 ** 100)
        else:
            assert ax < ay + Fraction(1, 2 ** 100)


def test_canonicalization_idempotent():
    x = QuadScalar(Fraction(4, 8), Fraction(-6, 4), 2)
    assert x.a == Fraction(1, 2) and x.b == Fraction(-3, 2)
    y = QuadScalar(x.a, x.b, x.d)
    assert y == x and y.a == x.a and y.b == x.b


def test_floor():
    assert q2(0, 1).floor() == 1  # sqrt2 = 1.414...
    assert q2(0, -1).floor() == -2
    assert rational(Fraction(-7, 2)).floor() == -4
    assert q2(3).floor() == 3
    assert q2(0, Fraction(5, 1)).floor() == 7  # 5*sqrt2 = 7.07...


def test_radicand_validation():
    with pytest.raises(ScalarError):
        QuadScalar(1, 1, 1)
    with pytest.raises(ScalarError):
        QuadScalar(1, 1, 12)
    with pytest.raises(ScalarError):
        QuadScalar(1, 1, -2)
    with pytest.raises(ScalarError):
        QuadScalar(1, 1, 0)  # D=0 forbids sqrt component
    assert not is_square_free(18)
    assert is_square_free(30)


def test_parse_and_serialize_round_trip():
    x = parse_scalar("3/4", 2)
    assert x == rational(Fraction(3, 4), 2)
    assert x.to_json() == "3/4"
    y = parse_scalar({"a": "1/2", "b": "-2/3"}, 2)
    assert y == q2(Fraction(1, 2), Fraction(-2, 3))
    assert y.to_json() == {"a": "1/2", "b": "-2/3"}
    with pytest.raises(ScalarError):
        parse_scalar({"a": "1", "b": "1"}, 0)
    with pytest.raises(ScalarError):
        parse_scalar("nonsense", 2)
    with pytest.raises(ScalarError):
        parse_scalar({"a": "1", "c": "2"}, 2)
