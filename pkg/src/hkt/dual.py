"""Tagged forward-mode dual numbers over numpy arrays.

A :class:`Dual` carries a primal array ``re`` and a tangent array ``eps``
for one infinitesimal direction. Nesting (``re``/``eps`` themselves being
duals) gives higher derivatives. Every dual carries an integer tag; a
larger tag always sits outside a smaller one, so mixing independent
perturbations never confuses them.

Field evaluators written against this module (``x[..., i]`` indexing,
arithmetic, :func:`exp`, :func:`log`, ...) can be differentiated to any
order with :func:`partials`.
"""

from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

_tags = itertools.count(1)


def new_tag() -> int:
    return next(_tags)


class Dual:
    __slots__ = ("tag", "re", "eps")
    __array_ufunc__ = None  # make numpy defer to our reflected operators

    def __init__(self, tag, re, eps):
        self.tag = tag
        shp = shape(re)
        if shape(eps) != shp:
            eps = broadcast_to(eps, shp)
        self.re = re
        self.eps = eps

    # -- structure -----------------------------------------------------
    @property
    def shape(self):
        return shape(self.re)

    @property
    def ndim(self):
        return len(self.shape)

    def __getitem__(self, idx):
        return Dual(self.tag, self.re[idx], self.eps[idx])

    def __len__(self):
        return self.shape[0]

    def __repr__(self):
        return f"Dual(tag={self.tag}, re={self.re!r}, eps={self.eps!r})"

    # -- arithmetic ----------------------------------------------------
    def __neg__(self):
        return Dual(self.tag, -self.re, -self.eps)

    def __pos__(self):
        return self

    def __add__(self, other):
        t = _outer(self, other)
        a, da = split(self, t)
        b, db = split(other, t)
        return Dual(t, a + b, _add(da, db))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        t = _outer(self, other)
        a, da = split(self, t)
        b, db = split(other, t)
        return Dual(t, a * b, _add(_mul(da, b), _mul(a, db)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        t = _outer(self, other)
        a, da = split(self, t)
        b, db = split(other, t)
        q = a / b
        if db is None:
            return Dual(t, q, da / b)
        num = -q * db if da is None else da - q * db
        return Dual(t, q, num / b)

    def __rtruediv__(self, other):
        return _reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, Dual):
            return exp(p * log(self))
        if isinstance(p, (int, np.integer)) and p >= 0:
            if p == 0:
                return self * 0 + 1
            out = self
            for _ in range(p - 1):
                out = out * self
            return out
        return _lift(self, lambda v: v ** p, lambda v: p * v ** (p - 1))

    def conj(self):
        return Dual(self.tag, conj(self.re), conj(self.eps))

    conjugate = conj

    @property
    def real(self):
        return Dual(self.tag, real(self.re), real(self.eps))

    @property
    def imag(self):
        return Dual(self.tag, imag(self.re), imag(self.eps))


def _reciprocal(d: Dual):
    r = 1.0 / d.re
    return Dual(d.tag, r, -(r * r) * d.eps)


def _add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _mul(a, b):
    if a is None or b is None:
        return None
    return a * b


def _outer(*vals) -> int:
    return max((v.tag for v in vals if isinstance(v, Dual)), default=0)


def split(v, tag):
    """Primal/tangent pair of ``v`` with respect to ``tag`` (tangent None if constant)."""
    if isinstance(v, Dual) and v.tag == tag:
        return v.re, v.eps
    return v, None


def shape(v):
    if isinstance(v, Dual):
        return v.shape
    return np.shape(v)


def value(v):
    """Strip every dual layer and return the plain primal array."""
    while isinstance(v, Dual):
        v = v.re
    return v


def broadcast_to(v, shp):
    if isinstance(v, Dual):
        return Dual(v.tag, broadcast_to(v.re, shp), broadcast_to(v.eps, shp))
    return np.broadcast_to(v, shp)


def zeros_like(v):
    return np.zeros(shape(v), dtype=np.result_type(value(v)))


def tangent(v, tag):
    """Derivative part of ``v`` for the perturbation ``tag``."""
    if isinstance(v, Dual) and v.tag == tag:
        return v.eps
    return zeros_like(v)


def _lift(x, f, df):
    if not isinstance(x, Dual):
        return f(x)
    return Dual(x.tag, f(x.re), df(x.re) * x.eps)


def _unary(npfunc, deriv):
    def fn(x):
        if isinstance(x, Dual):
            return Dual(x.tag, fn(x.re), deriv(x.re) * x.eps)
        return npfunc(x)

    return fn


exp = _unary(np.exp, lambda v: exp(v))
log = _unary(np.log, lambda v: 1.0 / v)
sin = _unary(np.sin, lambda v: cos(v))
cos = _unary(np.cos, lambda v: -sin(v))
sqrt = _unary(np.sqrt, lambda v: 0.5 / sqrt(v))


def conj(v):
    return v.conj() if isinstance(v, Dual) else np.conj(v)


def real(v):
    return v.real if isinstance(v, Dual) else np.real(v)


def imag(v):
    return v.imag if isinstance(v, Dual) else np.imag(v)


# -- array manipulation ------------------------------------------------
def _structural(npfunc):
    def fn(v, *args, **kwargs):
        if isinstance(v, Dual):
            return Dual(v.tag, fn(v.re, *args, **kwargs), fn(v.eps, *args, **kwargs))
        return npfunc(v, *args, **kwargs)

    return fn


moveaxis = _structural(np.moveaxis)
swapaxes = _structural(np.swapaxes)
reshape = _structural(np.reshape)
expand_dims = _structural(np.expand_dims)
diagonal = _structural(np.diagonal)


def sum(v, axis=None):  # noqa: A001 - mirrors numpy
    if isinstance(v, Dual):
        return Dual(v.tag, sum(v.re, axis), sum(v.eps, axis))
    return np.sum(v, axis=axis)


def stack(values, axis=0):
    values = list(values)
    t = _outer(*values)
    if t == 0:
        return np.stack([np.asarray(v) for v in values], axis=axis)
    res, eps = [], []
    for v in values:
        a, da = split(v, t)
        res.append(a)
        eps.append(zeros_like(a) if da is None else da)
    return Dual(t, stack(res, axis), stack(eps, axis))


def einsum(subscripts: str, *operands):
    """``np.einsum`` with the product rule across dual operands."""
    t = _outer(*operands)
    if t == 0:
        return np.einsum(subscripts, *operands, optimize=True)
    parts = [split(op, t) for op in operands]
    base = [p[0] for p in parts]
    primal = einsum(subscripts, *base)
    deriv = None
    for k, (_, dk) in enumerate(parts):
        if dk is None:
            continue
        args = list(base)
        args[k] = dk
        deriv = _add(deriv, einsum(subscripts, *args))
    return Dual(t, primal, deriv)


def inv(m):
    """Matrix inverse over the last two axes, differentiated as -A^-1 dA A^-1."""
    if not isinstance(m, Dual):
        return np.linalg.inv(m)
    a_inv = inv(m.re)
    d = -einsum("...ij,...jk,...kl->...il", a_inv, m.eps, a_inv)
    return Dual(m.tag, a_inv, d)


# -- differentiation -----------------------------------------------------
def seed(x, direction):
    """Perturb ``x`` along ``direction`` with a fresh tag; returns (dual, tag)."""
    t = new_tag()
    return Dual(t, x, broadcast_to(np.asarray(direction, dtype=float), shape(x))), t


def partials(fn: Callable, x):
    """All first partials of ``fn`` at ``x`` (shape ``(..., n)``).

    The derivative index is inserted right after the batch axes, so for
    ``fn`` returning ``(..., c1, ..., ck)`` the result has shape
    ``(..., n, c1, ..., ck)``.
    """
    n = shape(x)[-1]
    batch_nd = len(shape(x)) - 1
    out = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        xd, t = seed(x, e)
        out.append(tangent(fn(xd), t))
    return stack(out, axis=batch_nd)


def derivative(fn: Callable, x, direction):
    """Directional derivative of ``fn`` at ``x``."""
    xd, t = seed(x, direction)
    return tangent(fn(xd), t)
