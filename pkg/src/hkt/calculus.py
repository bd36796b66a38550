"""Exterior calculus on a chart: d, the J-twisted operators and metric pairings.

Normalizations: ``d`` and the wedge product both alternate with weight
``1/(p+q)!`` times the shuffle count, so ``d(x1 dx2) = dx1 ^ dx2`` and
``(dx1 ^ dx2)(e1, e2) = 1/2``.
"""

from __future__ import annotations

import string

import numpy as np

from . import dual as dn
from .chart import (
    MAX_DEGREE,
    CoordinateChart,
    DifferentialForm,
    EndomorphismField,
    MetricField,
    ScalarField,
)
from .errors import DegreeError, IntegrityError, SingularMetricError

_IDX = string.ascii_lowercase[:8]
_UPPER = string.ascii_uppercase[:8]


def _batch_nd(x) -> int:
    return len(dn.shape(x)) - 1


def exterior_derivative(form: DifferentialForm) -> DifferentialForm:
    k = form.degree
    if k + 1 > MAX_DEGREE:
        raise DegreeError("degree cap exceeded")

    def fn(x):
        nb = _batch_nd(x)
        D = dn.partials(form.fn, x)
        out = None
        for m in range(k + 1):
            term = dn.moveaxis(D, nb, nb + m)
            if m % 2:
                term = -term
            out = term if out is None else out + term
        return out * (1.0 / (k + 1))

    return DifferentialForm._wrap_new(form.chart, k + 1, fn)


d = exterior_derivative


def _apply_J_components(Jx, w, k):
    """``(-1)^k w_{j1..jk} J_{j1 i1} ... J_{jk ik}``."""
    if k == 0:
        return w
    src = _IDX[:k]
    dst = _UPPER[:k]
    subs = "..." + src + "," + ",".join(f"...{s}{t}" for s, t in zip(src, dst)) + "->..." + dst
    out = dn.einsum(subs, w, *([Jx] * k))
    return -out if k % 2 else out


def apply_J(J: EndomorphismField, form: DifferentialForm) -> DifferentialForm:
    """``(J w)(X_1..X_k) = (-1)^k w(J X_1, .., J X_k)``; identity on functions."""
    if J.chart != form.chart:
        raise ValueError("J and form live on different charts")
    k = form.degree
    if k == 0:
        return form
    return DifferentialForm._wrap_new(
        form.chart, k, lambda x: _apply_J_components(J.fn(x), form.fn(x), k)
    )


def assert_almost_complex(J: EndomorphismField, x, tol: float = 1e-10) -> None:
    pts = np.asarray(dn.value(x), dtype=float)
    m = np.asarray(dn.value(J.fn(pts)))
    r = np.linalg.norm(m @ m + np.eye(m.shape[-1]), axis=(-2, -1))
    if np.any(r > tol):
        k = int(np.argmax(r.reshape(-1)))
        raise IntegrityError(
            f"J^2 != -Id (residual {r.reshape(-1)[k]:.3e}) at {pts.reshape(-1, pts.shape[-1])[k].tolist()}"
        )


def d_c(J: EndomorphismField, form: DifferentialForm) -> DifferentialForm:
    """``(-1)^k J d J w``; each J carries the sign of its own operand degree."""
    k = form.degree
    inner = exterior_derivative(apply_J(J, form))
    outer = apply_J(J, inner)

    def fn(x):
        assert_almost_complex(J, x)
        out = outer.fn(x)
        return -out if k % 2 else out

    return DifferentialForm(form.chart, k + 1, fn)


def d_a(structure, a: int, form: DifferentialForm) -> DifferentialForm:
    """Twisted derivative for the a-th complex structure (``a`` in 1..3)."""
    return d_c(structure[a], form)


def delta(J: EndomorphismField, form: DifferentialForm) -> DifferentialForm:
    """``del = 1/2 (d + i d^c)``."""
    return (exterior_derivative(form) + 1j * d_c(J, form)) * 0.5


def delta_bar(J: EndomorphismField, form: DifferentialForm) -> DifferentialForm:
    """``delbar = 1/2 (d - i d^c)``."""
    return (exterior_derivative(form) - 1j * d_c(J, form)) * 0.5


def nijenhuis(J: EndomorphismField):
    """``N[..., m, i, j]``: m-th component of N(e_i, e_j).

    N(X,Y) = 1/4([X,Y] + J[JX,Y] + J[X,JY] - [JX,JY]) on coordinate fields.
    """

    def fn(x):
        Jx = J.fn(x)
        DJ = dn.partials(J.fn, x)  # [..., p, a, b] = d_p J_ab
        t1 = dn.einsum("...mk,...jki->...mij", Jx, DJ)
        t2 = dn.einsum("...mk,...ikj->...mij", Jx, DJ)
        t3 = dn.einsum("...ki,...kmj->...mij", Jx, DJ)
        t4 = dn.einsum("...kj,...kmi->...mij", Jx, DJ)
        return (-t1 + t2 - t3 + t4) * 0.25

    return fn


def nijenhuis_residual(J: EndomorphismField, points) -> tuple[float, np.ndarray]:
    pts = J.chart.check(points)
    vals = np.abs(np.asarray(nijenhuis(J)(pts))).reshape(len(pts), -1).max(axis=1)
    k = int(np.argmax(vals))
    return float(vals[k]), pts[k]


def hermitian_residual(g: MetricField, J: EndomorphismField, x) -> np.ndarray:
    """Per-point Frobenius norm of ``J^T g J - g``."""
    pts = np.asarray(dn.value(x), dtype=float)
    gm = np.asarray(dn.value(g.fn(pts)))
    jm = np.asarray(dn.value(J.fn(pts)))
    r = np.swapaxes(jm, -1, -2) @ gm @ jm - gm
    return np.linalg.norm(r, axis=(-2, -1))


def kahler_form(g: MetricField, J: EndomorphismField, tol: float = 1e-9) -> DifferentialForm:
    """``F(X, Y) = g(JX, Y)``, i.e. ``F_ij = J_ki g_kj``."""

    def fn(x):
        r = hermitian_residual(g, J, x)
        if np.any(r > tol * (1 + np.abs(np.asarray(dn.value(g.fn(dn.value(x))))).max())):
            raise IntegrityError(f"metric is not Hermitian for J (residual {r.max():.3e})")
        return dn.einsum("...ki,...kj->...ij", J.fn(x), g.fn(x))

    return DifferentialForm(g.chart, 2, fn)


def _checked_inverse(gx, x):
    gv = np.asarray(dn.value(gx), dtype=float)
    cond = np.linalg.cond(gv)
    if np.any(~np.isfinite(cond)) or np.any(cond > 1e12):
        k = int(np.argmax(np.where(np.isfinite(cond), cond, np.inf).reshape(-1)))
        pts = np.asarray(dn.value(x)).reshape(-1, gv.shape[-1])
        raise SingularMetricError(
            f"metric singular (condition number {cond.reshape(-1)[k]:.3e}) at {pts[k].tolist()}"
        )
    return dn.inv(gx)


def gradient_norm_sq(g: MetricField, mu: ScalarField) -> ScalarField:
    """``|grad mu|^2 = g^ij d_i mu d_j mu``."""
    dmu = exterior_derivative(mu)

    def fn(x):
        ginv = _checked_inverse(g.fn(x), x)
        v = dmu.fn(x)
        return dn.einsum("...ij,...i,...j->...", ginv, v, v)

    return ScalarField(g.chart, fn)


def form_inner_product_2(g: MetricField, alpha: DifferentialForm, beta: DifferentialForm) -> ScalarField:
    """``1/4 g^ik g^jl alpha_ij beta_kl`` (so the flat Kahler form has norm dim/4)."""
    if alpha.degree != 2 or beta.degree != 2:
        raise DegreeError("inner product defined for 2-forms only")

    def fn(x):
        ginv = _checked_inverse(g.fn(x), x)
        return dn.einsum("...ik,...jl,...ij,...kl->...", ginv, ginv, alpha.fn(x), beta.fn(x)) * 0.25

    return ScalarField(g.chart, fn)


# -- linear maps ---------------------------------------------------------
def _invertible(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2 or phi.shape[0] != phi.shape[1] or np.linalg.matrix_rank(phi) < phi.shape[0]:
        raise ValueError("linear map is not invertible")
    return phi


def pushforward(phi, vector) -> np.ndarray:
    return np.asarray(vector) @ _invertible(phi).T


def _move(phi, x):
    return dn.einsum("ij,...j->...i", phi, x)


def pullback(phi, form: DifferentialForm) -> DifferentialForm:
    """``(phi^* w)_p(X_1..) = w_{phi p}(phi X_1, ..)`` for a linear map ``phi``."""
    phi = _invertible(phi)
    k = form.degree
    if k == 0:
        return ScalarField(form.chart, lambda x: form.fn(_move(phi, x)))
    src = _IDX[:k]
    dst = _UPPER[:k]
    subs = "..." + src + "," + ",".join(f"{s}{t}" for s, t in zip(src, dst)) + "->..." + dst
    return DifferentialForm(form.chart, k, lambda x: dn.einsum(subs, form.fn(_move(phi, x)), *([phi] * k)))


def pullback_metric(phi, g: MetricField) -> MetricField:
    phi = _invertible(phi)
    return MetricField(g.chart, lambda x: dn.einsum("ki,...kl,lj->...ij", phi, g.fn(_move(phi, x)), phi))


def pullback_endomorphism(phi, J: EndomorphismField) -> EndomorphismField:
    """``phi^-1 J(phi p) phi``."""
    phi = _invertible(phi)
    inv = np.linalg.inv(phi)
    return EndomorphismField(J.chart, lambda x: dn.einsum("ik,...kl,lj->...ij", inv, J.fn(_move(phi, x)), phi))


def max_abs(fn, points) -> tuple[float, np.ndarray]:
    """Largest absolute entry of ``fn(points)`` and the point where it occurs."""
    pts = np.asarray(points, dtype=float)
    vals = np.abs(np.asarray(dn.value(fn(pts))))
    per = vals.reshape(len(pts), -1).max(axis=1) if vals.ndim > 1 else vals.reshape(-1)
    k = int(np.argmax(per))
    return float(per[k]), pts[k]
