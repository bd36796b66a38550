from fractions import Fraction

import numpy as np
import pytest

from hkt import exact as ex
from hkt.exact import I, ONE, ZERO, Exact


def test_sqrt_normalizes():
    assert Exact.sqrt(12) == Exact(0, 2, d=3)
    assert Exact.sqrt(Fraction(1, 3)) == Exact(0, Fraction(1, 3), d=3)
    assert Exact.sqrt(9) == Exact(3)
    assert Exact.sqrt(-4) == Exact(0, 0, 2)


def test_field_axioms_on_samples():
    s3 = Exact.sqrt(3)
    vals = [Exact(Fraction(1, 2)), s3 + 1, I * s3 - Fraction(2, 7), Exact(3, -1, 2, 5, d=3)]
    for a in vals:
        assert a * a.inverse() == ONE
        assert a - a == ZERO
        for b in vals:
            assert a * b == b * a
            assert (a + b) * a == a * a + b * a
    assert s3 * s3 == 3
    assert I * I == -1


def test_mixing_radicals_is_refused():
    with pytest.raises(ValueError):
        Exact.sqrt(2) + Exact.sqrt(3)


def test_sign_is_exact():
    s2 = Exact.sqrt(2)
    assert (s2 - Fraction(141421356, 100000000)).sign() == 1
    assert (s2 - Fraction(141421357, 100000000)).sign() == -1
    assert (Exact(0) * s2).sign() == 0
    with pytest.raises(TypeError):
        I.sign()


@pytest.mark.parametrize("text", ["0", "-3/7", "2*sqrt(3)", "1/2-1/3*sqrt(5)"])
def test_text_round_trip(text):
    v = Exact.parse(text)
    assert str(v) == text
    assert Exact.parse(str(v)) == v


def test_float_and_complex():
    v = Exact(1, 1, d=2)
    assert float(v) == pytest.approx(1 + 2**0.5)
    assert complex(I * 3) == 3j
    with pytest.raises(TypeError):
        float(I)


def test_solve_inverse_nullspace():
    A = ex.array([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    Ainv = ex.inv(A)
    assert ex.is_zero(A.dot(Ainv) - ex.eye(3))
    with pytest.raises(np.linalg.LinAlgError):
        ex.inv(ex.array([[1, 2], [2, 4]]))
    M = ex.array([[1, 2, 3], [2, 4, 6]])
    ns = ex.nullspace(M)
    assert len(ns) == 2 and ex.rank(M) == 1
    for v in ns:
        assert ex.is_zero(M.dot(v))


def test_max_abs_reports_modulus_representative():
    assert ex.max_abs(ex.array([1, -3, 2])) == 3
    assert ex.max_abs(ex.zeros(4)) == 0


def test_hash_consistent_with_rationals():
    assert hash(Exact(Fraction(3, 4))) == hash(Fraction(3, 4))
    assert len({Exact(1), Exact(Fraction(2, 2)), ONE}) == 1
