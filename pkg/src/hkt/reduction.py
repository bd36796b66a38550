"""Moment-map reduction by a circle, checked point by point.

The model is C^3 + C^3 = R^12 with real coordinates ordered
``chi1_re, chi1_im, .., chi3_im, rho1_re, .., rho3_im`` and the metric
obtained from the flat potential through ``f = ln``. A moment map, its
Killing field and the horizontal space at a level-set point are all
evaluated numerically; nothing is built on the quotient itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dual as dn
from .calculus import apply_J, d, max_abs, pullback_endomorphism, pullback_metric
from .chart import CoordinateChart, DifferentialForm, MetricField, ScalarField
from .errors import DecompositionError, DomainError
from .potential import GeneratorFunction, PotentialStructure, flat_potential, modified_structure
from .quaternionic import HypercomplexStructure, HyperHermitianStructure

DIM = 12
_J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
_J6 = np.kron(np.eye(3), _J2)
_Z6 = np.zeros((6, 6))

# I_1 (chi, rho) = (i chi, -i rho), I_2 = (i rho, i chi), I_3 = (-rho, chi)
REDUCTION_I1 = np.block([[_J6, _Z6], [_Z6, -_J6]])
REDUCTION_I2 = np.block([[_Z6, _J6], [_J6, _Z6]])
REDUCTION_I3 = REDUCTION_I1 @ REDUCTION_I2


def reduction_chart(r_min: float = 0.2, r_max: float = 5.0) -> CoordinateChart:
    labels = tuple(f"{s}{k}{p}" for s in ("chi", "rho") for k in (1, 2, 3) for p in ("r", "i"))
    return CoordinateChart.annulus(DIM, r_min, r_max, labels)


def _split(x):
    """Real and imaginary parts of chi and rho."""
    return x[..., 0:6:2], x[..., 1:6:2], x[..., 6::2], x[..., 7::2]


def to_complex(points) -> tuple[np.ndarray, np.ndarray]:
    a, b, c, e = _split(np.asarray(points, dtype=float))
    return a + 1j * b, c + 1j * e


def from_complex(chi, rho) -> np.ndarray:
    chi, rho = np.asarray(chi, dtype=complex), np.asarray(rho, dtype=complex)
    out = np.empty(chi.shape[:-1] + (DIM,))
    out[..., 0:6:2], out[..., 1:6:2] = chi.real, chi.imag
    out[..., 6::2], out[..., 7::2] = rho.real, rho.imag
    return out


def flat6_potential_structure(chart: CoordinateChart | None = None) -> PotentialStructure:
    chart = chart or reduction_chart()
    H = HypercomplexStructure.constant(chart, REDUCTION_I1, REDUCTION_I2, REDUCTION_I3)
    return PotentialStructure(H, MetricField.euclidean(chart), flat_potential(chart))


def flat6_structure(chart: CoordinateChart | None = None) -> HyperHermitianStructure:
    """The ``ln``-modified metric with the structure above."""
    return modified_structure(flat6_potential_structure(chart), GeneratorFunction.log())


# -- moment map ------------------------------------------------------------
CONVENTIONS = ("second", "first")


@dataclass
class MomentMap:
    """Three real components and the level ``zeta`` (the group is a circle)."""

    nu: tuple[ScalarField, ScalarField, ScalarField]
    zeta: tuple[float, float, float] = (0.0, 0.0, 0.0)
    convention: str = "second"

    @property
    def chart(self) -> CoordinateChart:
        return self.nu[0].chart

    def values(self, points) -> np.ndarray:
        pts = self.chart.check(points)
        return np.stack([np.asarray(n.fn(pts)) for n in self.nu], axis=-1)

    def level_residual(self, points) -> float:
        return float(np.abs(self.values(points) - np.asarray(self.zeta)).max())

    def scaled(self, a: int, factor: float) -> "MomentMap":
        """Copy with component ``a`` multiplied by ``factor``."""
        nu = list(self.nu)
        nu[a - 1] = nu[a - 1] * factor
        return MomentMap(tuple(nu), self.zeta, self.convention)

    def equivariance_residual(self, action: "KillingAction", ts, points) -> float:
        """Sup of ``nu(Phi_t p) - nu(p)`` over paired ``(t, p)``."""
        pts = self.chart.check(points)
        moved = np.stack([action.matrix(t) @ p for t, p in zip(np.asarray(ts, dtype=float), pts)])
        return float(np.abs(self.values(moved) - self.values(pts)).max())


def _hermitian_pair(x, convention: str):
    """Real and imaginary part of sum chi_k conj(rho_k) ("second") or conj(chi_k) rho_k ("first")."""
    a, b, c, e = _split(x)
    re = dn.sum(a * c + b * e, axis=-1)
    im = dn.sum(b * c - a * e, axis=-1)
    return re, (im if convention == "second" else -im)


def su3_moment_map(chart: CoordinateChart | None = None, convention: str = "second") -> MomentMap:
    """``nu_1 = |chi|^2 - |rho|^2``, ``nu_2 + i nu_3 = 2 <chi, rho>``.

    ``convention`` names the slot in which the Hermitian product is
    conjugate-linear.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    chart = chart or reduction_chart()

    def nu1(x):
        a, b, c, e = _split(x)
        return dn.sum(a * a + b * b - c * c - e * e, axis=-1)

    nu2 = ScalarField(chart, lambda x: _hermitian_pair(x, convention)[0] * 2.0)
    nu3 = ScalarField(chart, lambda x: _hermitian_pair(x, convention)[1] * 2.0)
    return MomentMap((ScalarField(chart, nu1), nu2, nu3), convention=convention)


# -- the circle action -------------------------------------------------------
@dataclass
class KillingAction:
    """``Phi_t (chi, rho) = (e^{it} chi, e^{it} rho)`` and its generator."""

    generator: np.ndarray = field(default_factory=lambda: np.kron(np.eye(DIM // 2), _J2))

    def matrix(self, t: float) -> np.ndarray:
        c, s = np.cos(t), np.sin(t)
        return np.kron(np.eye(DIM // 2), np.array([[c, -s], [s, c]]))

    def vector_field(self, points) -> np.ndarray:
        """``X = (i chi, i rho)`` as real vectors."""
        return np.asarray(points, dtype=float) @ self.generator.T

    def generator_error(self, points, step: float = 1e-6) -> float:
        """Relative gap between ``X`` and the central difference of ``Phi_t`` at 0."""
        pts = np.asarray(points, dtype=float)
        fd = (pts @ self.matrix(step).T - pts @ self.matrix(-step).T) / (2 * step)
        X = self.vector_field(pts)
        return float(np.abs(fd - X).max() / max(np.abs(X).max(), 1e-300))

    def isometry_residual(self, g: MetricField, ts, points) -> float:
        pts = np.asarray(points, dtype=float)
        worst = 0.0
        for t in ts:
            pulled = pullback_metric(self.matrix(t), g)
            worst = max(worst, float(np.abs(np.asarray(pulled.fn(pts)) - np.asarray(g.fn(pts))).max()))
        return worst

    def commutation_residual(self, H: HypercomplexStructure, ts, points) -> float:
        pts = np.asarray(points, dtype=float)
        worst = 0.0
        for t in ts:
            for a in (1, 2, 3):
                pulled = pullback_endomorphism(self.matrix(t), H[a])
                gap = np.asarray(pulled.fn(pts)) - np.asarray(H[a].fn(pts))
                worst = max(worst, float(np.abs(gap).max()))
        return worst


def zero_field(points) -> np.ndarray:
    return np.zeros_like(np.asarray(points, dtype=float))


# -- the two moment-map conditions ---------------------------------------------
def twisted_differentials(H: HypercomplexStructure, nu: MomentMap) -> list[DifferentialForm]:
    """``I_a d nu_a`` for a = 1, 2, 3."""
    return [apply_J(H[a], d(nu.nu[a - 1])) for a in (1, 2, 3)]


def cauchy_riemann_residual(H: HypercomplexStructure, nu: MomentMap, points) -> tuple[float, np.ndarray]:
    pts = H.chart.check(points)
    t1, t2, t3 = twisted_differentials(H, nu)
    r12 = max_abs(lambda x: t1.fn(x) - t2.fn(x), pts)
    r23 = max_abs(lambda x: t2.fn(x) - t3.fn(x), pts)
    return max(r12, r23, key=lambda r: r[0])


@dataclass
class TransversalityVerdict:
    min_value: float
    witness: np.ndarray
    threshold: float
    values: np.ndarray = field(repr=False)

    @property
    def ok(self) -> bool:
        return self.min_value > self.threshold


def transversality_check(H: HypercomplexStructure, nu: MomentMap, X, points, threshold: float = 1e-6):
    """Smallest ``|I_a d nu_a (X)|`` over a and the points; ``X`` maps points to vectors."""
    pts = H.chart.check(points)
    vecs = np.asarray(X(pts), dtype=float)
    vals = np.stack([np.abs(w.evaluate(pts, vecs)) for w in twisted_differentials(H, nu)], axis=-1)
    per = vals.min(axis=-1)
    k = int(np.argmin(per))
    return TransversalityVerdict(float(per[k]), pts[k], threshold, per)


# -- level set -----------------------------------------------------------
def sample_level_set(
    count: int,
    seed: int,
    r_min: float = 0.5,
    r_max: float = 3.0,
    max_retries: int = 100,
) -> np.ndarray:
    """Points with ``|chi| = |rho|`` and ``<chi, rho> = 0``; total norm log-uniform in ``[r_min, r_max]``."""
    rng = np.random.default_rng(seed)
    out = []
    retries = 0
    while len(out) < count:
        chi = rng.normal(size=3) + 1j * rng.normal(size=3)
        rho = rng.normal(size=3) + 1j * rng.normal(size=3)
        chi /= np.linalg.norm(chi)
        rho = rho - np.vdot(chi, rho) * chi
        if np.linalg.norm(rho) < 1e-3:
            retries += 1
            if retries > max_retries:
                raise DomainError("level-set sampling kept drawing near-parallel pairs")
            continue
        rho /= np.linalg.norm(rho)
        r = np.exp(rng.uniform(np.log(r_min), np.log(r_max)))
        out.append(from_complex(chi, rho) * (r / np.sqrt(2.0)))
    return np.array(out)


# -- proportionality dnu_a = f iota_X F_a ---------------------------------------
@dataclass
class ProportionalityReport:
    residual: float
    witness: np.ndarray
    factor_gap: float  # largest |fitted f - (-2 mu)|
    factors: np.ndarray = field(repr=False)


def contract_first(form: DifferentialForm, vecs, points) -> np.ndarray:
    """``iota_X F`` as a covector per point: ``X^i F_ij``."""
    return np.einsum("...i,...ij->...j", vecs, np.asarray(form.fn(points)))


def proportionality_check(HH: HyperHermitianStructure, nu: MomentMap, X, points, mu=None):
    """Sup over a of ``d nu_a + 2 mu iota_X F_a``, with the least-squares factor per point."""
    pts = HH.chart.check(points)
    mu = mu or flat_potential(HH.chart)
    vecs = np.asarray(X(pts), dtype=float)
    m = np.asarray(mu.fn(pts))
    worst, wit, gap = 0.0, pts[0], 0.0
    factors = np.zeros((len(pts), 3))
    for a in (1, 2, 3):
        dnu = np.asarray(d(nu.nu[a - 1]).fn(pts))
        ixf = contract_first(HH.F(a), vecs, pts)
        diff = np.abs(dnu + 2 * m[:, None] * ixf).max(axis=-1)
        k = int(np.argmax(diff))
        if diff[k] > worst:
            worst, wit = float(diff[k]), pts[k]
        norm = np.sum(ixf * ixf, axis=-1)
        f = np.divide(np.sum(dnu * ixf, axis=-1), norm, out=np.full(len(pts), np.nan), where=norm > 0)
        factors[:, a - 1] = f
        gaps = np.abs(f + 2 * m)  # no factor fits where iota_X F_a vanishes
        gap = max(gap, float(np.inf if np.isnan(gaps).any() else gaps.max()))
    return ProportionalityReport(worst, wit, gap, factors)


# -- horizontal space -----------------------------------------------------
def _quaternion_defect(mats) -> float:
    I1, I2, I3 = mats
    eye = np.eye(I1.shape[0])
    terms = [I1 @ I1 + eye, I2 @ I2 + eye, I3 @ I3 + eye, I1 @ I2 - I3, I1 @ I2 + I2 @ I1]
    return float(max(np.abs(t).max() for t in terms))


@dataclass
class HorizontalFrame:
    point: np.ndarray
    basis: np.ndarray  # (12, k), columns span U_m
    h: np.ndarray
    I_hat: tuple[np.ndarray, np.ndarray, np.ndarray]
    singular_values: np.ndarray
    stability: float  # I_a U within U
    orthogonality: float  # g(U, X)
    constraint_rank: int

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def quaternion_residual(self) -> float:
        return _quaternion_defect(self.I_hat)

    def hermitian_residual(self) -> float:
        return float(max(np.abs(J.T @ self.h @ J - self.h).max() for J in self.I_hat))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.h).min())

    def invariants(self) -> tuple[np.ndarray, np.ndarray]:
        """Spectrum of ``h`` and the Gram matrix ``tr(I_a I_b)``; basis-independent for orthonormal re-framing."""
        traces = np.array([[np.trace(A @ B) for B in self.I_hat] for A in self.I_hat])
        return np.linalg.eigvalsh(self.h), traces


def constraint_covectors(H: HypercomplexStructure, nu: MomentMap, point) -> np.ndarray:
    """Rows ``d nu_1, d nu_2, d nu_3, I_1 d nu_1`` at one point."""
    p = np.asarray(point, dtype=float)[None]
    rows = [np.asarray(d(n).fn(p))[0] for n in nu.nu]
    rows.append(np.asarray(twisted_differentials(H, nu)[0].fn(p))[0])
    return np.array(rows)


def horizontal_frame(
    HH: HyperHermitianStructure,
    nu: MomentMap,
    X,
    point,
    rel_tol: float = 1e-8,
    basis_change: np.ndarray | None = None,
) -> HorizontalFrame:
    """Kernel of the constraint covectors at ``point`` with the induced ``h`` and ``I_a``.

    ``basis_change`` (an invertible k x k matrix) re-frames the kernel.
    """
    H = HH.structure
    p = HH.chart.check(np.asarray(point, dtype=float)[None])
    C = constraint_covectors(H, nu, p[0])
    _, s, vt = np.linalg.svd(C)
    rank = int(np.sum(s > rel_tol * s[0]))
    K = vt[rank:].T
    expected = HH.chart.dim - 4  # one circle
    if K.shape[1] != expected:
        raise DecompositionError(f"horizontal space has dimension {K.shape[1]}, expected {expected}; singular values {s.tolist()}")
    if basis_change is not None:
        K = K @ np.asarray(basis_change, dtype=float)
    proj = K @ np.linalg.pinv(K)
    Is = [np.asarray(H[a].fn(p))[0] for a in (1, 2, 3)]
    g = np.asarray(HH.g.fn(p))[0]
    stability = float(max(np.abs(J @ K - proj @ (J @ K)).max() for J in Is))
    x = np.asarray(X(p), dtype=float)[0]
    orth = float(np.abs(K.T @ g @ x).max())
    I_hat = tuple(np.linalg.lstsq(K, J @ K, rcond=None)[0] for J in Is)
    return HorizontalFrame(p[0], K, K.T @ g @ K, I_hat, s, stability, orth, rank)


def full_constraint_rank(H: HypercomplexStructure, nu: MomentMap, point, rel_tol: float = 1e-8) -> int:
    """Rank of all six covectors ``d nu_a`` and ``I_a d nu_a``."""
    p = np.asarray(point, dtype=float)[None]
    rows = [np.asarray(d(n).fn(p))[0] for n in nu.nu]
    rows += [np.asarray(w.fn(p))[0] for w in twisted_differentials(H, nu)]
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    return int(np.sum(s > rel_tol * s[0]))
