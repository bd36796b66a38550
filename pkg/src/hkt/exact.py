"""Exact numbers in Q(sqrt(d), i) and small exact linear algebra.

An :class:`Exact` is ``a + b sqrt(d) + i (c + e sqrt(d))`` with rational
coefficients. Numbers with different square-free ``d`` may only mix when
one of them is rational. Arrays of these live in numpy ``object`` arrays,
so ``np.dot``/``np.einsum`` work unchanged.
"""

from __future__ import annotations

import re
from fractions import Fraction

import numpy as np


def _squarefree(d: int) -> tuple[int, int]:
    """Split ``d = s^2 * r`` with r square-free; returns (s, r)."""
    s, r, p = 1, d, 2
    while p * p <= r:
        while r % (p * p) == 0:
            r //= p * p
            s *= p
        p += 1
    return s, r


class Exact:
    __slots__ = ("a", "b", "c", "e", "d")

    def __init__(self, a=0, b=0, c=0, e=0, d=1):
        self.a, self.b, self.c, self.e = Fraction(a), Fraction(b), Fraction(c), Fraction(e)
        if not (self.b or self.e):
            d = 1
        self.d = d

    # -- construction ----------------------------------------------------
    @classmethod
    def sqrt(cls, q) -> "Exact":
        """Square root of a nonnegative rational."""
        q = Fraction(q)
        if q < 0:
            r = cls.sqrt(-q)
            return cls(0, 0, r.a, r.b, r.d)
        num, den = q.numerator * q.denominator, q.denominator
        s, r = _squarefree(num)
        if r == 1:
            return cls(Fraction(s, den))
        return cls(0, Fraction(s, den), d=r)

    @staticmethod
    def of(v) -> "Exact":
        if isinstance(v, Exact):
            return v
        if isinstance(v, np.ndarray):
            raise TypeError("array operand")
        if isinstance(v, complex):
            return Exact(Fraction(v.real).limit_denominator(), 0, Fraction(v.imag).limit_denominator())
        return Exact(v)

    # -- field operations --------------------------------------------------
    def _common(self, other: "Exact") -> int:
        if self.d == 1:
            return other.d
        if other.d in (1, self.d):
            return self.d
        raise ValueError(f"cannot mix sqrt({self.d}) with sqrt({other.d})")

    def __add__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        o = Exact.of(other)
        return Exact(self.a + o.a, self.b + o.b, self.c + o.c, self.e + o.e, self._common(o))

    __radd__ = __add__

    def __neg__(self):
        return Exact(-self.a, -self.b, -self.c, -self.e, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        return self + (-Exact.of(other))

    def __rsub__(self, other):
        return Exact.of(other) - self

    def __mul__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        o = Exact.of(other)
        d = self._common(o)
        # (x + i y)(u + i v) with x = a + b r, y = c + e r
        def m(p, q, s, t):  # (p + q r)(s + t r)
            return p * s + q * t * d, p * t + q * s
        xu = m(self.a, self.b, o.a, o.b)
        yv = m(self.c, self.e, o.c, o.e)
        xv = m(self.a, self.b, o.c, o.e)
        yu = m(self.c, self.e, o.a, o.b)
        return Exact(xu[0] - yv[0], xu[1] - yv[1], xv[0] + yu[0], xv[1] + yu[1], d)

    __rmul__ = __mul__

    def conjugate(self) -> "Exact":
        return Exact(self.a, self.b, -self.c, -self.e, self.d)

    conj = conjugate

    def _galois(self) -> "Exact":
        return Exact(self.a, -self.b, self.c, -self.e, self.d)

    def inverse(self) -> "Exact":
        if not self:
            raise ZeroDivisionError("exact division by zero")
        # multiply by complex conjugate, then by the sqrt-conjugate
        n1 = self * self.conjugate()  # real, in Q(sqrt d)
        n2 = n1 * n1._galois()  # rational
        return self.conjugate() * n1._galois() * Exact(1 / n2.a)

    def __truediv__(self, other):
        return self * Exact.of(other).inverse()

    def __rtruediv__(self, other):
        return Exact.of(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Exact(1)
        for _ in range(k):
            out = out * self
        return out

    # -- comparison --------------------------------------------------------
    def __bool__(self):
        return bool(self.a or self.b or self.c or self.e)

    def __eq__(self, other):
        try:
            o = Exact.of(other)
        except (TypeError, ValueError):
            return NotImplemented
        return not (self - o)

    def __hash__(self):
        if not (self.b or self.c or self.e):
            return hash(self.a)
        return hash((self.a, self.b, self.c, self.e, self.d))

    @property
    def real(self) -> "Exact":
        return Exact(self.a, self.b, 0, 0, self.d)

    @property
    def imag(self) -> "Exact":
        return Exact(self.c, self.e, 0, 0, self.d)

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.e)

    def __float__(self):
        if self.c or self.e:
            raise TypeError("complex exact number has no float value")
        return float(self.a) + float(self.b) * self.d ** 0.5

    def __complex__(self):
        r = self.d ** 0.5
        return complex(float(self.a) + float(self.b) * r, float(self.c) + float(self.e) * r)

    def sign(self) -> int:
        """Sign of a real element, decided exactly."""
        if self.c or self.e:
            raise TypeError("sign of a complex number")
        a, b = self.a, self.b
        if not b:
            return (a > 0) - (a < 0)
        if not a:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with d b^2
        big = a * a > self.d * b * b
        return (1 if a > 0 else -1) if big else (1 if b > 0 else -1)

    # -- text ----------------------------------------------------------------
    def _real_str(self, p: Fraction, q: Fraction) -> str:
        if not q:
            return str(p)
        s = f"{q}*sqrt({self.d})"
        return s if not p else f"{p}+{s}".replace("+-", "-")

    def __str__(self):
        re_part = self._real_str(self.a, self.b)
        if not (self.c or self.e):
            return re_part
        im_part = self._real_str(self.c, self.e)
        return f"{re_part}+({im_part})*i".replace("+-", "-") if (self.a or self.b) else f"({im_part})*i"

    __repr__ = __str__

    _TERM = re.compile(r"^([+-]?[0-9/]+)(?:\*sqrt\((\d+)\))?$")

    @classmethod
    def parse(cls, text: str) -> "Exact":
        """Inverse of ``str`` for real numbers: ``p``, ``q*sqrt(d)`` or ``p+q*sqrt(d)``."""
        text = text.strip().replace(" ", "")
        terms = re.findall(r"[+-]?[^+-]+", text)
        out = Exact(0)
        for t in terms:
            m = cls._TERM.match(t)
            if not m:
                raise ValueError(f"cannot parse exact number {text!r}")
            coeff = Fraction(m.group(1))
            out = out + (Exact(0, coeff, d=int(m.group(2))) if m.group(2) else Exact(coeff))
        return out


ZERO = Exact(0)
ONE = Exact(1)
I = Exact(0, 0, 1)


# -- arrays ----------------------------------------------------------------
def array(values) -> np.ndarray:
    """Object array of :class:`Exact` from nested numbers."""
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = Exact.of(v)
    return out


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def eye(n: int) -> np.ndarray:
    out = zeros((n, n))
    for i in range(n):
        out[i, i] = ONE
    return out


def is_zero(arr) -> bool:
    return not any(bool(v) for v in np.asarray(arr, dtype=object).ravel())


def max_abs(arr) -> Exact:
    """Entry of largest modulus, made nonnegative when real (exact residual reporting)."""
    best, size = ZERO, 0.0
    for v in np.asarray(arr, dtype=object).ravel():
        v = Exact.of(v)
        m = abs(complex(v))
        if m > size:
            best, size = v, m
    if best.is_rational() or not (best.c or best.e):
        return best if best.sign() >= 0 else -best
    return best


def conj(arr) -> np.ndarray:
    return np.vectorize(lambda v: Exact.of(v).conjugate(), otypes=[object])(arr)


def solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact Gaussian elimination for ``A X = B`` with square invertible A."""
    A = np.array(A, dtype=object)
    B = np.array(B, dtype=object)
    vec = B.ndim == 1
    if vec:
        B = B[:, None]
    n = A.shape[0]
    M = np.concatenate([A, B], axis=1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r, col]), None)
        if piv is None:
            raise np.linalg.LinAlgError("singular exact matrix")
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
        M[col] = M[col] * Exact.of(M[col, col]).inverse()
        for r in range(n):
            if r != col and M[r, col]:
                M[r] = M[r] - M[r, col] * M[col]
    X = M[:, n:]
    return X[:, 0] if vec else X


def inv(A: np.ndarray) -> np.ndarray:
    return solve(A, eye(A.shape[0]))


def nullspace(A: np.ndarray) -> list[np.ndarray]:
    """Basis of ``{x : A x = 0}`` by exact row reduction."""
    M = np.array(A, dtype=object)
    rows, cols = M.shape
    pivots, r = [], 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if M[i, col]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] = M[r] * Exact.of(M[r, col]).inverse()
        for i in range(rows):
            if i != r and M[i, col]:
                M[i] = M[i] - M[i, col] * M[r]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = zeros(cols)
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -M[i, f]
        basis.append(v)
    return basis


def rank(A: np.ndarray) -> int:
    return A.shape[1] - len(nullspace(A))


def to_float(arr) -> np.ndarray:
    return np.vectorize(lambda v: complex(Exact.of(v)), otypes=[complex])(arr)
