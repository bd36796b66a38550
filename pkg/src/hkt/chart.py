"""Coordinate charts and the tensor fields living on them.

Fields are pure callables of a point array ``x`` of shape ``(..., dim)``
(leading axes are a batch of points). Evaluators must be written with
``x[..., i]`` indexing and the functions of :mod:`hkt.dual` so that
nested dual numbers can flow through them.

A k-form stores its full antisymmetric component tensor
``w[..., i1, ..., ik] = w(e_i1, ..., e_ik)``; :meth:`DifferentialForm.components`
exposes the increasing multi-index view.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import dual as dn
from .errors import DegreeError, DomainError

MAX_DEGREE = 4


@dataclass(frozen=True)
class Box:
    lower: tuple
    upper: tuple

    def contains(self, pts: np.ndarray) -> np.ndarray:
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return np.all((pts >= lo) & (pts <= hi), axis=-1)

    def sample(self, rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(count, dim))


@dataclass(frozen=True)
class Annulus:
    """Shell ``r_min <= |x| <= r_max``; the origin is the excluded singular locus."""

    r_min: float
    r_max: float

    def contains(self, pts: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(pts, axis=-1)
        return (r >= self.r_min) & (r <= self.r_max)

    def sample(self, rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
        direction = rng.standard_normal((count, dim))
        direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
        radius = rng.uniform(self.r_min, self.r_max, size=(count, 1))
        return radius * direction


@dataclass(frozen=True)
class CoordinateChart:
    dim: int
    domain: Box | Annulus
    labels: tuple = field(default=())

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("chart dimension must be positive")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"x{i + 1}" for i in range(self.dim)))
        if len(self.labels) != self.dim:
            raise ValueError("one label per coordinate required")
        if isinstance(self.domain, Box):
            if len(self.domain.lower) != self.dim or np.any(
                np.asarray(self.domain.upper) <= np.asarray(self.domain.lower)
            ):
                raise ValueError("box must have nonempty interior")
        elif not 0 <= self.domain.r_min < self.domain.r_max:
            raise ValueError("annulus must have nonempty interior")

    @classmethod
    def box(cls, dim: int, half_width: float = 1.0, labels=()) -> "CoordinateChart":
        return cls(dim, Box((-half_width,) * dim, (half_width,) * dim), tuple(labels))

    @classmethod
    def annulus(cls, dim: int, r_min: float, r_max: float, labels=()) -> "CoordinateChart":
        return cls(dim, Annulus(r_min, r_max), tuple(labels))

    @property
    def quaternionic_dim(self) -> int:
        if self.dim % 4:
            raise ValueError(f"dimension {self.dim} is not a multiple of 4")
        return self.dim // 4

    def sample(self, count: int, seed: int) -> np.ndarray:
        return self.domain.sample(np.random.default_rng(seed), count, self.dim)

    def check(self, points) -> np.ndarray:
        pts = np.asarray(dn.value(points), dtype=float)
        if pts.shape[-1] != self.dim:
            raise DomainError(f"expected points of dimension {self.dim}, got {pts.shape[-1]}")
        inside = self.domain.contains(pts)
        if not np.all(inside):
            bad = pts.reshape(-1, self.dim)[~inside.reshape(-1)][0]
            raise DomainError(f"point {bad.tolist()} lies outside the chart domain")
        return pts


def _alternate(arr, nd_batch: int, k: int):
    """Average of sign-weighted permutations of the last ``k`` axes."""
    if k < 2:
        return arr
    total = None
    for perm in itertools.permutations(range(k)):
        sign = _perm_sign(perm)
        axes = list(range(nd_batch)) + [nd_batch + p for p in perm]
        term = _transpose(arr, axes) * sign
        total = term if total is None else total + term
    return total * (1.0 / math.factorial(k))


def _transpose(arr, axes):
    if isinstance(arr, dn.Dual):
        return dn.Dual(arr.tag, _transpose(arr.re, axes), _transpose(arr.eps, axes))
    return np.transpose(arr, axes)


def _perm_sign(perm) -> int:
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


class DifferentialForm:
    """Degree-k form on a chart; ``fn(x)`` returns the full component tensor."""

    def __init__(self, chart: CoordinateChart, degree: int, fn: Callable):
        if not 0 <= degree <= MAX_DEGREE:
            raise DegreeError(f"degree {degree} outside 0..{MAX_DEGREE}")
        self.chart = chart
        self.degree = degree
        self.fn = fn

    def __call__(self, x):
        return self.fn(x)

    def at(self, points) -> np.ndarray:
        """Checked evaluation at plain points."""
        pts = self.chart.check(points)
        return np.asarray(self.fn(pts))

    def components(self, points) -> dict:
        vals = self.at(points)
        nd = vals.ndim - self.degree
        return {
            idx: vals[(Ellipsis,) + idx]
            for idx in itertools.combinations(range(self.chart.dim), self.degree)
        } if nd >= 0 else {}

    def evaluate(self, points, *vectors) -> np.ndarray:
        """``w(v_1, ..., v_k)`` per point; vectors are ``(dim,)`` or batched like ``points``."""
        if len(vectors) != self.degree:
            raise DegreeError(f"{self.degree}-form needs {self.degree} vectors")
        out = self.at(points)
        for v in reversed(vectors):
            out = np.sum(out * _align(v, out), axis=-1)
        return out

    # -- algebra -------------------------------------------------------
    def _same(self, other):
        if other.chart != self.chart or other.degree != self.degree:
            raise DegreeError("forms must share chart and degree")

    def __add__(self, other):
        if isinstance(other, DifferentialForm):
            self._same(other)
            return self._wrap(self, lambda x: self.fn(x) + other.fn(x))
        if self.degree == 0:
            return ScalarField(self.chart, lambda x: self.fn(x) + other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self.__class__._wrap(self, lambda x: -self.fn(x))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ScalarField) and not isinstance(self, ScalarField):
            return DifferentialForm(self.chart, self.degree, lambda x: _scale(other.fn(x), self.fn(x), self.degree))
        if isinstance(other, DifferentialForm):
            if other.degree == 0 and self.degree == 0:
                return ScalarField(self.chart, lambda x: self.fn(x) * other.fn(x))
            if self.degree == 0:
                return other * self
            return NotImplemented
        return self.__class__._wrap(self, lambda x: self.fn(x) * other)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if isinstance(other, DifferentialForm):
            return NotImplemented
        return self * (1.0 / other)

    @staticmethod
    def _wrap(form, fn):
        if form.degree == 0:
            return ScalarField(form.chart, fn)
        return DifferentialForm(form.chart, form.degree, fn)

    @property
    def real(self):
        return self._wrap(self, lambda x: dn.real(self.fn(x)))

    @property
    def imag(self):
        return self._wrap(self, lambda x: dn.imag(self.fn(x)))

    def conj(self):
        return self._wrap(self, lambda x: dn.conj(self.fn(x)))

    def __repr__(self):
        return f"<{self.degree}-form on R^{self.chart.dim}>"

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, chart: CoordinateChart, degree: int):
        comp = np.zeros((chart.dim,) * degree)
        return cls._wrap_new(chart, degree, lambda x: _broadcast_batch(comp, dn.shape(x)[:-1]))

    @classmethod
    def _wrap_new(cls, chart, degree, fn):
        return ScalarField(chart, fn) if degree == 0 else DifferentialForm(chart, degree, fn)

    @classmethod
    def constant(cls, chart: CoordinateChart, components: np.ndarray):
        comp = np.asarray(components)
        degree = comp.ndim
        return cls._wrap_new(
            chart, degree, lambda x: _broadcast_batch(comp, dn.shape(x)[:-1])
        )

    @classmethod
    def from_components(cls, chart: CoordinateChart, degree: int, comps: dict):
        """Build from ``{increasing multi-index: ScalarField or number}``."""
        terms = []
        for idx, c in comps.items():
            if list(idx) != sorted(set(idx)) or len(idx) != degree:
                raise DegreeError(f"{idx} is not an increasing {degree}-index")
            basis = np.zeros((chart.dim,) * degree)
            for perm in itertools.permutations(range(degree)):
                basis[tuple(idx[p] for p in perm)] = _perm_sign(perm)
            terms.append((c, basis))

        def fn(x):
            out = None
            for c, basis in terms:
                val = c.fn(x) if isinstance(c, DifferentialForm) else c * dn.zeros_like(x[..., 0]) + c
                term = _scale(val, basis, degree)
                out = term if out is None else out + term
            if out is None:
                return _broadcast_batch(np.zeros((chart.dim,) * degree), dn.shape(x)[:-1])
            return out

        return cls._wrap_new(chart, degree, fn)


def _broadcast_batch(comp, batch_shape):
    return np.broadcast_to(comp, tuple(batch_shape) + comp.shape)


def _scale(scalar, comps, degree):
    """Multiply per-point scalars into a component tensor."""
    s = scalar
    if degree:
        s = scalar[(Ellipsis,) + (None,) * degree]
    return s * comps


def _align(v, arr):
    """Broadcast a vector (or batch of vectors) against the trailing axes of ``arr``."""
    v = np.asarray(v)
    if v.ndim == 1:
        return v
    extra = arr.ndim - v.ndim
    return v.reshape(v.shape[:-1] + (1,) * extra + v.shape[-1:])


class ScalarField(DifferentialForm):
    def __init__(self, chart: CoordinateChart, fn: Callable):
        super().__init__(chart, 0, fn)

    @classmethod
    def coordinate(cls, chart: CoordinateChart, i: int) -> "ScalarField":
        return cls(chart, lambda x: x[..., i])

    @classmethod
    def const(cls, chart: CoordinateChart, c) -> "ScalarField":
        return cls(chart, lambda x: dn.zeros_like(x[..., 0]) + c)


def coordinate_differential(chart: CoordinateChart, i: int) -> DifferentialForm:
    comp = np.zeros(chart.dim)
    comp[i] = 1.0
    return DifferentialForm.constant(chart, comp)


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """Alternation of ``a (x) b``; ``(dx^i ^ dx^j)(e_i, e_j) = 1/2``."""
    if a.chart != b.chart:
        raise DegreeError("forms live on different charts")
    p, q = a.degree, b.degree
    if p + q > MAX_DEGREE:
        raise DegreeError("degree cap exceeded")
    if p == 0 or q == 0:
        return a * b if p else b * a
    ia = "abcd"[:p]
    ib = "efgh"[:q]

    def fn(x):
        prod = dn.einsum(f"...{ia},...{ib}->...{ia}{ib}", a.fn(x), b.fn(x))
        return _alternate(prod, len(dn.shape(x)) - 1, p + q)

    return DifferentialForm(a.chart, p + q, fn)


class EndomorphismField:
    """Matrix field acting on vectors as ``(JX)^i = J[i, j] X^j``."""

    def __init__(self, chart: CoordinateChart, fn: Callable):
        self.chart = chart
        self.fn = fn

    def __call__(self, x):
        return self.fn(x)

    def at(self, points) -> np.ndarray:
        return np.asarray(self.fn(self.chart.check(points)))

    @classmethod
    def constant(cls, chart: CoordinateChart, matrix) -> "EndomorphismField":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (chart.dim, chart.dim):
            raise ValueError("matrix shape does not match chart")
        field_ = cls(chart, lambda x: _broadcast_batch(m, dn.shape(x)[:-1]))
        field_.matrix = m
        return field_

    def __matmul__(self, other: "EndomorphismField") -> "EndomorphismField":
        return EndomorphismField(self.chart, lambda x: dn.einsum("...ij,...jk->...ik", self.fn(x), other.fn(x)))

    def __add__(self, other):
        return EndomorphismField(self.chart, lambda x: self.fn(x) + other.fn(x))

    def __sub__(self, other):
        return EndomorphismField(self.chart, lambda x: self.fn(x) - other.fn(x))

    def __neg__(self):
        return EndomorphismField(self.chart, lambda x: -self.fn(x))

    def __mul__(self, c):
        if isinstance(c, ScalarField):
            return EndomorphismField(self.chart, lambda x: c.fn(x)[..., None, None] * self.fn(x))
        return EndomorphismField(self.chart, lambda x: self.fn(x) * c)

    __rmul__ = __mul__

    def square_residual(self, points) -> float:
        """max ||J^2 + Id|| (Frobenius) over ``points``."""
        j = self.at(points)
        r = j @ j + np.eye(self.chart.dim)
        return float(np.max(np.linalg.norm(r, axis=(-2, -1))))


class MetricField:
    """Symmetric (0,2)-tensor field; symmetry is imposed on every evaluation."""

    def __init__(self, chart: CoordinateChart, fn: Callable):
        self.chart = chart
        self._raw = fn

    def fn(self, x):
        g = self._raw(x)
        return (g + dn.swapaxes(g, -1, -2)) * 0.5

    def __call__(self, x):
        return self.fn(x)

    def at(self, points) -> np.ndarray:
        return np.asarray(self.fn(self.chart.check(points)))

    @classmethod
    def euclidean(cls, chart: CoordinateChart) -> "MetricField":
        eye = np.eye(chart.dim)
        return cls(chart, lambda x: _broadcast_batch(eye, dn.shape(x)[:-1]))

    @classmethod
    def constant(cls, chart: CoordinateChart, matrix) -> "MetricField":
        m = np.asarray(matrix, dtype=float)
        return cls(chart, lambda x: _broadcast_batch(m, dn.shape(x)[:-1]))

    def scaled(self, factor: ScalarField) -> "MetricField":
        return MetricField(self.chart, lambda x: factor.fn(x)[..., None, None] * self.fn(x))

    def __add__(self, other: "MetricField") -> "MetricField":
        return MetricField(self.chart, lambda x: self.fn(x) + other.fn(x))

    def __sub__(self, other: "MetricField") -> "MetricField":
        return MetricField(self.chart, lambda x: self.fn(x) - other.fn(x))

    def min_eigenvalue(self, points) -> tuple[float, np.ndarray]:
        """Smallest eigenvalue over ``points`` with the witness point."""
        pts = self.chart.check(points)
        eig = np.linalg.eigvalsh(self.at(pts))[..., 0]
        k = int(np.argmin(eig))
        return float(eig.reshape(-1)[k]), pts.reshape(-1, self.chart.dim)[k]

    def is_positive_definite(self, points) -> bool:
        try:
            np.linalg.cholesky(self.at(points))
        except np.linalg.LinAlgError:
            return False
        return True


def sup_norm(form: DifferentialForm, points) -> tuple[float, np.ndarray]:
    """Max component magnitude over ``points`` and the point where it occurs."""
    pts = form.chart.check(points)
    vals = np.abs(np.asarray(form.fn(pts)))
    per_point = vals.reshape(pts.shape[0], -1).max(axis=1) if vals.ndim > 1 else vals.reshape(-1)
    k = int(np.argmax(per_point))
    return float(per_point[k]), pts[k]


def as_points(points: Sequence) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return pts[None, :] if pts.ndim == 1 else pts
