"""HKT potentials: forms from a potential, the modified metric and the Hopf family."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dual as dn
from .calculus import apply_J, d, d_c, delta, delta_bar, form_inner_product_2, gradient_norm_sq, kahler_form, max_abs
from .chart import CoordinateChart, DifferentialForm, MetricField, ScalarField
from .errors import DomainError
from .quaternionic import HyperHermitianStructure, HypercomplexStructure, flat_chart

CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


# -- generator functions -------------------------------------------------
@dataclass(frozen=True)
class GeneratorFunction:
    name: str
    f: Callable
    df: Callable
    d2f: Callable

    @classmethod
    def power(cls, m: int) -> "GeneratorFunction":
        if m == 1:
            return cls("power-1", lambda t: t, lambda t: 1.0 + 0 * t, lambda t: 0.0 * t)
        return cls(
            f"power-{m}",
            lambda t: t**m,
            lambda t: m * t ** (m - 1),
            lambda t: m * (m - 1) * t ** (m - 2),
        )

    @classmethod
    def log(cls) -> "GeneratorFunction":
        return cls("log", dn.log, lambda t: 1.0 / t, lambda t: -1.0 / (t * t))

    @classmethod
    def exp(cls) -> "GeneratorFunction":
        return cls("exp", dn.exp, dn.exp, dn.exp)

    @classmethod
    def custom(cls, name: str, f, df, d2f, check_at=None) -> "GeneratorFunction":
        gen = cls(name, f, df, d2f)
        if check_at is not None:
            err = gen.derivative_error(check_at)
            if err > 1e-10:
                raise ValueError(f"supplied derivatives of {name} disagree with f (rel. error {err:.2e})")
        return gen

    @classmethod
    def named(cls, name: str) -> "GeneratorFunction":
        if name == "log":
            return cls.log()
        if name == "exp":
            return cls.exp()
        if name.startswith("power-"):
            return cls.power(int(name.split("-", 1)[1]))
        raise KeyError(f"unknown generator {name!r}")

    def derivative_error(self, ts) -> float:
        """Relative disagreement between the supplied f', f'' and AD of f."""
        ts = np.asarray(ts, dtype=float)
        ad1 = dn.derivative(self.f, ts, np.ones_like(ts))
        ad2 = dn.derivative(lambda t: dn.derivative(self.f, t, np.ones_like(ts)), ts, np.ones_like(ts))
        e1 = np.abs(ad1 - self.df(ts)) / (1 + np.abs(ad1))
        e2 = np.abs(ad2 - self.d2f(ts)) / (1 + np.abs(ad2))
        return float(max(e1.max(), e2.max()))


# -- potentials ----------------------------------------------------------
def flat_potential(chart: CoordinateChart) -> ScalarField:
    """``mu = 1/2 (|z|^2 + |w|^2)``."""
    return ScalarField(chart, lambda x: dn.sum(x * x, axis=-1) * 0.5)


@dataclass
class PotentialStructure:
    structure: HypercomplexStructure
    g: MetricField
    mu: ScalarField

    @property
    def chart(self) -> CoordinateChart:
        return self.structure.chart

    @classmethod
    def flat(cls, n: int, chart: CoordinateChart | None = None) -> "PotentialStructure":
        chart = chart or flat_chart(n)
        return cls(HypercomplexStructure.flat(chart), MetricField.euclidean(chart), flat_potential(chart))


def compose(gen: GeneratorFunction, mu: ScalarField) -> ScalarField:
    return ScalarField(mu.chart, lambda x: gen.f(mu.fn(x)))


def kahler_forms_from_potential(H: HypercomplexStructure, mu: DifferentialForm):
    """``F_a = 1/2 (d d_a + d_b d_c) mu`` for (a, b, c) cyclic."""
    return tuple(
        (d(d_c(H[a], mu)) + d_c(H[b], d_c(H[c], mu))) * 0.5 for a, b, c in CYCLIC
    )


def kahler_form_along(J_a, J_b, J_c, mu: DifferentialForm) -> DifferentialForm:
    """``1/2 (d d_a + d_b d_c) mu`` for arbitrary structures (rotated axes)."""
    return (d(d_c(J_a, mu)) + d_c(J_b, d_c(J_c, mu))) * 0.5


def holomorphic_potential_form(H: HypercomplexStructure, mu: DifferentialForm) -> DifferentialForm:
    """``2 del_1 I_2 delbar_1 mu``."""
    return delta(H[1], apply_J(H[2], delta_bar(H[1], mu))) * 2.0


def potential_residual(H: HypercomplexStructure, mu: ScalarField, g: MetricField, points):
    """Sup of ``F_2 + i F_3 - 2 del_1 I_2 delbar_1 mu`` for the Kahler forms of g."""
    pts = H.chart.check(points)
    F2, F3 = kahler_form(g, H[2]), kahler_form(g, H[3])
    rhs = holomorphic_potential_form(H, mu)
    return max_abs(lambda x: F2.fn(x) + 1j * F3.fn(x) - rhs.fn(x), pts)


def torsion_from_potential(H: HypercomplexStructure, mu: ScalarField) -> DifferentialForm:
    """``1/2 d_1 d_2 d_3 mu``, the common value of the ``d_a F_a``."""
    return d_c(H[1], d_c(H[2], d_c(H[3], mu))) * 0.5


def hyperkahler_residual(H: HypercomplexStructure, mu: ScalarField, points):
    """Sup of ``d d_a mu - d_b d_c mu`` over the cyclic triples."""
    pts = H.chart.check(points)
    best = (0.0, pts[0])
    for a, b, c in CYCLIC:
        lhs, rhs = d(d_c(H[a], mu)), d_c(H[b], d_c(H[c], mu))
        best = max(best, max_abs(lambda x: lhs.fn(x) - rhs.fn(x), pts), key=lambda r: r[0])
    return best


# -- the modification ----------------------------------------------------
def quaternionic_square(H: HypercomplexStructure, mu: ScalarField):
    """``dmu (x) dmu + sum_a I_a dmu (x) I_a dmu`` as a matrix field."""
    dmu = d(mu)
    twisted = [apply_J(H[a], dmu) for a in (1, 2, 3)]

    def fn(x):
        v = dmu.fn(x)
        out = dn.einsum("...i,...j->...ij", v, v)
        for t in twisted:
            tv = t.fn(x)
            out = out + dn.einsum("...i,...j->...ij", tv, tv)
        return out

    return fn


def positivity_margin(PS: PotentialStructure, gen: GeneratorFunction) -> ScalarField:
    """``f'(mu) + 1/4 f''(mu) |grad mu|^2``."""
    grad = gradient_norm_sq(PS.g, PS.mu)
    return ScalarField(
        PS.chart, lambda x: gen.df(PS.mu.fn(x)) + gen.d2f(PS.mu.fn(x)) * grad.fn(x) * 0.25
    )


@dataclass
class ModifiedMetric:
    g: MetricField
    admissible: np.ndarray
    excluded: int
    min_eigenvalue: float


def modified_metric_field(PS: PotentialStructure, gen: GeneratorFunction) -> MetricField:
    """``f'(mu) g + 1/4 f''(mu) (dmu dmu + sum_a I_a dmu I_a dmu)``."""
    square = quaternionic_square(PS.structure, PS.mu)

    def fn(x):
        m = PS.mu.fn(x)
        return gen.df(m)[..., None, None] * PS.g.fn(x) + (gen.d2f(m) * 0.25)[..., None, None] * square(x)

    return MetricField(PS.chart, fn)


def modified_metric(PS: PotentialStructure, gen: GeneratorFunction, points) -> ModifiedMetric:
    """Build the modified metric and keep the points where it is admissible."""
    pts = PS.chart.check(points)
    margin = np.asarray(positivity_margin(PS, gen).at(pts))
    keep = margin > 0
    if not np.any(keep):
        raise DomainError(f"positivity margin of {gen.name} fails at every sampled point")
    g = modified_metric_field(PS, gen)
    lam, _ = g.min_eigenvalue(pts[keep])
    return ModifiedMetric(g, pts[keep], int((~keep).sum()), lam)


def modified_structure(PS: PotentialStructure, gen: GeneratorFunction) -> HyperHermitianStructure:
    return HyperHermitianStructure(PS.structure, modified_metric_field(PS, gen))


def power_metric_closed_form(PS: PotentialStructure, m: int) -> MetricField:
    """``m mu^(m-2) (mu g + (m-1)/4 (dmu dmu + sum I_a dmu I_a dmu))``."""
    square = quaternionic_square(PS.structure, PS.mu)

    def fn(x):
        mu = PS.mu.fn(x)
        inner = mu[..., None, None] * PS.g.fn(x) + square(x) * ((m - 1) / 4)
        return (mu ** (m - 2) * m)[..., None, None] * inner

    return MetricField(PS.chart, fn)


def exp_metric_closed_form(PS: PotentialStructure) -> MetricField:
    """``e^mu (g + 1/4 (dmu dmu + sum I_a dmu I_a dmu))``."""
    square = quaternionic_square(PS.structure, PS.mu)
    return MetricField(
        PS.chart, lambda x: dn.exp(PS.mu.fn(x))[..., None, None] * (PS.g.fn(x) + square(x) * 0.25)
    )


# -- Laplacian and the quaternionic operator ------------------------------
def complex_laplacian(g: MetricField, I1, f: ScalarField) -> ScalarField:
    """``g(d d_1 f, F_1)``."""
    return form_inner_product_2(g, d(d_c(I1, f)), kahler_form(g, I1))


def laplacian_identity_residual(g: MetricField, H: HypercomplexStructure, f: ScalarField, points):
    """Sup of ``g(d_2 d_3 f, F_1) - g(d d_1 f, F_1)``."""
    F1 = kahler_form(g, H[1])
    lhs = form_inner_product_2(g, d_c(H[2], d_c(H[3], f)), F1)
    rhs = complex_laplacian(g, H[1], f)
    return max_abs(lambda x: lhs.fn(x) - rhs.fn(x), H.chart.check(points))


_QMUL = {  # e_p e_q = sign * e_r, units ordered (1, i, j, k)
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}


def quaternionic_dd(H: HypercomplexStructure, mu: ScalarField) -> list[DifferentialForm]:
    """Real, i, j, k parts of ``(d + i d_1 + j d_2 + k d_3)(d mu - i d_1 mu - j d_2 mu - k d_3 mu)``.

    Quaternion units multiply from the left and commute with the real operators.
    """
    ops = [d] + [lambda w, a=a: d_c(H[a], w) for a in (1, 2, 3)]
    theta = [d(mu)] + [-d_c(H[a], mu) for a in (1, 2, 3)]
    parts: list = [None] * 4
    for p in range(4):
        for q in range(4):
            sign, r = _QMUL[p, q]
            term = ops[p](theta[q]) * sign
            parts[r] = term if parts[r] is None else parts[r] + term
    return parts


# -- the Hopf family -----------------------------------------------------
def hopf_action_matrix(r: float, thetas) -> np.ndarray:
    """Linear map ``(z, w) -> (r e^{i theta} z, r e^{-i theta} w)`` blockwise."""
    blocks = []
    for th in thetas:
        c, s = np.cos(th), np.sin(th)
        rot = np.array([[c, -s], [s, c]])
        blocks.append(r * np.block([[rot, np.zeros((2, 2))], [np.zeros((2, 2)), rot.T]]))
    n = len(blocks)
    out = np.zeros((4 * n, 4 * n))
    for a, b in enumerate(blocks):
        out[4 * a: 4 * a + 4, 4 * a: 4 * a + 4] = b
    return out


def hopf_structure(n: int, gen: GeneratorFunction | None = None, chart: CoordinateChart | None = None):
    """Flat potential structure on an annulus and the modified HKT structure for ``gen`` (default log)."""
    PS = PotentialStructure.flat(n, chart)
    gen = gen or GeneratorFunction.log()
    return PS, modified_structure(PS, gen), compose(gen, PS.mu)
