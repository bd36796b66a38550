"""Hypercomplex and hyper-Hermitian structures and the two HKT criteria.

The first criterion compares the three torsion forms ``d_a F_a``; the
second asks for ``del_1 (F_2 + i F_3) = 0``. Both are evaluated as
sup-norms over sample points and reported with the witness point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import dual as dn
from .calculus import (
    d,
    d_c,
    delta,
    delta_bar,
    hermitian_residual,
    kahler_form,
    max_abs,
    nijenhuis_residual,
)
from .chart import CoordinateChart, DifferentialForm, EndomorphismField, MetricField, ScalarField
from .errors import IntegrityError

# One quaternionic block in coordinates (x, y, u, v) with z = x + iy, w = u + iv.
I1_BLOCK = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
I2_BLOCK = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
I3_BLOCK = I1_BLOCK @ I2_BLOCK


def flat_matrices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    eye = np.eye(n)
    return tuple(np.kron(eye, b) for b in (I1_BLOCK, I2_BLOCK, I3_BLOCK))


class HypercomplexStructure:
    """Triple ``(I_1, I_2, I_3)``; ``H[a]`` returns ``I_a`` for a in 1..3."""

    def __init__(self, I1: EndomorphismField, I2: EndomorphismField, I3: EndomorphismField):
        if not (I1.chart == I2.chart == I3.chart):
            raise ValueError("structures must share a chart")
        self.I = (I1, I2, I3)
        self.chart = I1.chart

    def __getitem__(self, a: int) -> EndomorphismField:
        return self.I[a - 1]

    @classmethod
    def constant(cls, chart: CoordinateChart, m1, m2, m3) -> "HypercomplexStructure":
        return cls(*(EndomorphismField.constant(chart, m) for m in (m1, m2, m3)))

    @classmethod
    def flat(cls, chart: CoordinateChart) -> "HypercomplexStructure":
        return cls.constant(chart, *flat_matrices(chart.quaternionic_dim))


def flat_chart(n: int, r_min: float = 0.2, r_max: float = 5.0) -> CoordinateChart:
    labels = tuple(f"{c}{a + 1}" for a in range(n) for c in "xyuv")
    return CoordinateChart.annulus(4 * n, r_min, r_max, labels)


@dataclass
class HyperHermitianStructure:
    structure: HypercomplexStructure
    g: MetricField

    @property
    def chart(self) -> CoordinateChart:
        return self.structure.chart

    @cached_property
    def forms(self) -> tuple[DifferentialForm, DifferentialForm, DifferentialForm]:
        return tuple(kahler_form(self.g, self.structure[a]) for a in (1, 2, 3))

    def F(self, a: int) -> DifferentialForm:
        return self.forms[a - 1]

    def torsion_forms(self) -> list[DifferentialForm]:
        """``d_a F_a`` for a = 1, 2, 3."""
        return [d_c(self.structure[a], self.F(a)) for a in (1, 2, 3)]

    def hermitian_defect(self, points) -> float:
        return max(float(hermitian_residual(self.g, self.structure[a], points).max()) for a in (1, 2, 3))


def flat_hyperkahler(n: int, chart: CoordinateChart | None = None) -> HyperHermitianStructure:
    chart = chart or flat_chart(n)
    return HyperHermitianStructure(HypercomplexStructure.flat(chart), MetricField.euclidean(chart))


def verify_quaternion_relations(H: HypercomplexStructure, points) -> float:
    pts = H.chart.check(points)
    I1, I2, I3 = (np.asarray(H[a].at(pts)) for a in (1, 2, 3))
    eye = np.eye(H.chart.dim)
    terms = [I1 @ I1 + eye, I2 @ I2 + eye, I3 @ I3 + eye, I1 @ I2 - I3, I1 @ I2 + I2 @ I1]
    return float(max(np.linalg.norm(t, axis=(-2, -1)).max() for t in terms))


def integrability_residual(H: HypercomplexStructure, points) -> float:
    return max(nijenhuis_residual(H[a], points)[0] for a in (1, 2, 3))


def complex_structure_at(H: HypercomplexStructure, a_vec) -> EndomorphismField:
    """``a_1 I_1 + a_2 I_2 + a_3 I_3`` for a unit vector ``a``."""
    a = np.asarray(a_vec, dtype=float)
    if a.shape != (3,) or abs(np.linalg.norm(a) - 1.0) > 1e-12:
        raise ValueError(f"{a_vec} is not a unit 3-vector")
    return H[1] * a[0] + H[2] * a[1] + H[3] * a[2]


def bismut_torsion(g: MetricField, J: EndomorphismField) -> DifferentialForm:
    """``c = -1/2 d^c F``."""
    return d_c(J, kahler_form(g, J)) * -0.5


@dataclass
class HKTReport:
    hkt_residual: float
    holomorphic_residual: float
    difj_residuals: np.ndarray | None
    samples: int
    tolerance: float
    witness: np.ndarray = field(repr=False, default=None)

    @property
    def verdict(self) -> bool:
        vals = [self.hkt_residual, self.holomorphic_residual]
        if self.difj_residuals is not None:
            vals.append(float(np.max(self.difj_residuals)))
        return all(v < self.tolerance for v in vals)


def hkt_residual(HH: HyperHermitianStructure, points) -> tuple[float, np.ndarray]:
    """``max |d_1F_1 - d_2F_2|, |d_2F_2 - d_3F_3|`` with the witness point."""
    pts = HH.chart.check(points)
    t1, t2, t3 = HH.torsion_forms()
    r12 = max_abs(lambda x: t1.fn(x) - t2.fn(x), pts)
    r23 = max_abs(lambda x: t2.fn(x) - t3.fn(x), pts)
    return max(r12, r23, key=lambda r: r[0])


def holomorphic_form(HH: HyperHermitianStructure) -> DifferentialForm:
    """``del_1 (F_2 + i F_3)``."""
    return delta(HH.structure[1], HH.F(2) + 1j * HH.F(3))


def holomorphic_residual(HH: HyperHermitianStructure, points, symmetry_tol: float = 1e-8) -> tuple[float, np.ndarray]:
    """Sup-norm of ``del_1 (F_2 + i F_3)``; its conjugate ``delbar_1 (F_2 - i F_3)`` is cross-checked."""
    pts = HH.chart.check(points)
    hol = holomorphic_form(HH)
    anti = delta_bar(HH.structure[1], HH.F(2) - 1j * HH.F(3))
    val = np.asarray(hol.fn(pts))
    mirror = np.asarray(anti.fn(pts))
    gap = np.abs(np.conj(val) - mirror).max()
    if gap > symmetry_tol * (1 + np.abs(val).max()):
        raise IntegrityError(f"conjugate symmetry of del_1/delbar_1 images broken ({gap:.3e})")
    per = np.abs(val).reshape(len(pts), -1).max(axis=1)
    k = int(np.argmax(per))
    return float(per[k]), pts[k]


_EPS = np.zeros((3, 3, 3))
for (_i, _j, _k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    _EPS[_i, _j, _k], _EPS[_j, _i, _k] = 1, -1


def difj_check(HH: HyperHermitianStructure, points) -> np.ndarray:
    """3x3 matrix of ``sup |d_i F_j + 2 delta_ij c + eps_ijk dF_k|``."""
    pts = HH.chart.check(points)
    H = HH.structure
    c = bismut_torsion(HH.g, H[1])
    c_val = np.asarray(c.fn(pts))
    dF = [np.asarray(d(HH.F(k)).fn(pts)) for k in (1, 2, 3)]
    out = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            val = np.asarray(d_c(H[i + 1], HH.F(j + 1)).fn(pts))
            if i == j:
                val = val + 2 * c_val
            for k in range(3):
                if _EPS[i, j, k]:
                    val = val + _EPS[i, j, k] * dF[k]
            out[i, j] = np.abs(val).max()
    return out


@dataclass
class MetricVerdict:
    symmetry_residual: float
    min_eigenvalue: float
    witness: np.ndarray
    hermitian_residual: float

    @property
    def ok(self) -> bool:
        return self.min_eigenvalue > 0


def type_02_residual(J: EndomorphismField, form: DifferentialForm, points) -> float:
    """Sup of ``w(X - iJX, Y)`` over coordinate vectors."""
    pts = form.chart.check(points)
    w = np.asarray(form.fn(pts))
    jm = np.asarray(J.fn(pts))
    contracted = w - 1j * np.einsum("...ki,...kj->...ij", jm, w)
    return float(np.abs(contracted).max())


def metric_from_form(H: HypercomplexStructure, form: DifferentialForm, points, tol: float = 1e-9):
    """Recover ``g(X, Y) = -F_2(I_2 X, Y)`` from ``F_2 - i F_3`` of type (0,2)."""
    pts = H.chart.check(points)
    res = type_02_residual(H[1], form, pts)
    scale = 1 + float(np.abs(np.asarray(form.fn(pts))).max())
    if res > tol * scale:
        raise IntegrityError(f"form is not (0,2) for I_1 (residual {res:.3e})")
    raw = lambda x: -dn.einsum("...ki,...kj->...ij", H[2].fn(x), dn.real(form.fn(x)))  # noqa: E731
    g = MetricField(H.chart, raw)
    m = np.asarray(raw(pts))
    sym = float(np.abs(m - np.swapaxes(m, -1, -2)).max())
    lam, wit = g.min_eigenvalue(pts)
    herm = max(float(hermitian_residual(g, H[a], pts).max()) for a in (1, 2, 3))
    return g, MetricVerdict(sym, lam, wit, herm)


def conformal_change(HH: HyperHermitianStructure, phi: ScalarField) -> HyperHermitianStructure:
    """Same structure, metric ``e^phi g``."""
    factor = ScalarField(phi.chart, lambda x: dn.exp(phi.fn(x)))
    return HyperHermitianStructure(HH.structure, HH.g.scaled(factor))
