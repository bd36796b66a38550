"""Named examples and the checks each one runs.

Every builder takes a :class:`SuiteConfig` and returns a list of
:class:`~hkt.report.CheckResult`. Negative controls mark the checks they
are meant to fail with ``expect="fail"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import dual as dn
from .calculus import nijenhuis_residual, pullback_endomorphism, pullback_metric
from .chart import ScalarField
from .errors import HKTError
from .homogeneous import (
    group_example,
    heisenberg_hkt,
    joyce_decompose,
    su_root_data,
    verify_decomposition,
    verify_nilpotent_hkt,
)
from .invariant import (
    dd_vanishes,
    group_torsion_check,
    integrability_check_invariant,
    is_negative_definite,
    killing_form,
)
from .potential import (
    GeneratorFunction,
    PotentialStructure,
    hopf_action_matrix,
    modified_metric_field,
    modified_structure,
    power_metric_closed_form,
)
from .quaternionic import (
    conformal_change,
    flat_chart,
    flat_hyperkahler,
    hkt_residual,
    holomorphic_residual,
    verify_quaternion_relations,
)
from .reduction import (
    KillingAction,
    cauchy_riemann_residual,
    flat6_structure,
    full_constraint_rank,
    horizontal_frame,
    proportionality_check,
    sample_level_set,
    su3_moment_map,
    transversality_check,
)
from .report import CheckResult, exact_check, flag, lower_bound, numeric


class UsageError(HKTError):
    """Bad configuration: unknown example, missing seed, malformed value."""


@dataclass
class SuiteConfig:
    example: str
    tolerance: float | None = None
    samples: int = 20
    seed: int | None = None
    format: str = "text"
    out: str | None = None
    r: float = 0.5
    thetas: tuple | None = None
    generator: str | None = None

    def tol(self, default: float) -> float:
        return default if self.tolerance is None else self.tolerance

    def params(self) -> dict:
        out = {"r": repr(self.r)}
        if self.thetas is not None:
            out["thetas"] = [repr(float(t)) for t in self.thetas]
        if self.generator is not None:
            out["generator"] = self.generator
        return out


@dataclass
class Example:
    id: str
    description: str
    build: Callable[[SuiteConfig], list[CheckResult]]
    randomized: bool = True
    negative_control: bool = False
    defaults: dict = field(default_factory=dict)


# -- chart-level helpers -------------------------------------------------------
def _structure_checks(HH, pts, cfg: SuiteConfig) -> list[CheckResult]:
    H = HH.structure
    nij, wit = max((nijenhuis_residual(H[a], pts) for a in (1, 2, 3)), key=lambda r: r[0])
    lam, lwit = HH.g.min_eigenvalue(pts)
    return [
        numeric("quaternion_relations", verify_quaternion_relations(H, pts), cfg.tol(1e-10)),
        numeric("integrability", nij, cfg.tol(1e-8), wit),
        numeric("hermitian", HH.hermitian_defect(pts), cfg.tol(1e-8)),
        lower_bound("metric_min_eigenvalue", lam, 0.0, lwit),
    ]


def _hkt_checks(HH, pts, cfg: SuiteConfig, expect="pass", tol=1e-8) -> list[CheckResult]:
    r1, w1 = hkt_residual(HH, pts)
    r2, w2 = holomorphic_residual(HH, pts)
    return [
        numeric("hkt_torsion_equality", r1, cfg.tol(tol), w1, expect),
        numeric("hkt_holomorphic_form", r2, cfg.tol(tol), w2, expect),
    ]


def _points(chart, cfg: SuiteConfig) -> np.ndarray:
    return chart.sample(cfg.samples, cfg.seed)


def _flat(n: int):
    def build(cfg: SuiteConfig):
        HH = flat_hyperkahler(n)
        pts = _points(HH.chart, cfg)
        return _structure_checks(HH, pts, cfg) + _hkt_checks(HH, pts, cfg)

    return build


def _generator(cfg: SuiteConfig, default: str) -> GeneratorFunction:
    try:
        return GeneratorFunction.named(cfg.generator or default)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _invariance_checks(PS, HH, pts, cfg: SuiteConfig, n: int) -> list[CheckResult]:
    thetas = cfg.thetas if cfg.thetas is not None else tuple(0.3 * (k + 1) for k in range(n))
    if len(thetas) != n:
        raise UsageError(f"expected {n} angles, got {len(thetas)}")
    phi = hopf_action_matrix(cfg.r, thetas)
    g_pull = pullback_metric(phi, HH.g)
    metric_gap = float(np.abs(np.asarray(g_pull.fn(pts)) - np.asarray(HH.g.fn(pts))).max())
    comm = 0.0
    for a in (1, 2, 3):
        moved = pullback_endomorphism(phi, PS.structure[a])
        comm = max(comm, float(np.abs(np.asarray(moved.fn(pts)) - np.asarray(PS.structure[a].fn(pts))).max()))
    return [
        numeric("action_isometry", metric_gap, cfg.tol(1e-10)),
        numeric("action_hypercomplex", comm, cfg.tol(1e-10)),
    ]


def _hopf_log(n: int):
    def build(cfg: SuiteConfig):
        PS = PotentialStructure.flat(n)
        HH = modified_structure(PS, _generator(cfg, "log"))
        pts = _points(PS.chart, cfg)
        return _structure_checks(HH, pts, cfg) + _hkt_checks(HH, pts, cfg) + _invariance_checks(PS, HH, pts, cfg, n)

    return build


def _hopf_power(m: int):
    def build(cfg: SuiteConfig):
        PS = PotentialStructure.flat(2)
        gen = GeneratorFunction.power(m)
        HH = modified_structure(PS, gen)
        pts = _points(PS.chart, cfg)
        closed = power_metric_closed_form(PS, m)
        gap = np.abs(np.asarray(modified_metric_field(PS, gen).fn(pts)) - np.asarray(closed.fn(pts))).max()
        scale = 1 + np.abs(np.asarray(closed.fn(pts))).max()
        return (
            _structure_checks(HH, pts, cfg)
            + _hkt_checks(HH, pts, cfg)
            + [numeric("closed_form_metric", gap / scale, cfg.tol(1e-10))]
        )

    return build


def smooth_factor(chart, coeffs=(0.3, 0.2, -0.1)) -> ScalarField:
    """``a sin(x1) + b x2 x3 + c x4^2``, a bounded-derivative conformal exponent."""
    a, b, c = coeffs
    return ScalarField(chart, lambda x: dn.sin(x[..., 0]) * a + x[..., 1] * x[..., 2] * b + x[..., 3] * x[..., 3] * c)


def _conformal(n: int):
    expect = "pass" if n == 1 else "fail"

    def build(cfg: SuiteConfig):
        chart = flat_chart(n, 0.2, 2.0)
        HH = conformal_change(flat_hyperkahler(n, chart), smooth_factor(chart))
        pts = _points(chart, cfg)
        return _structure_checks(HH, pts, cfg) + _hkt_checks(HH, pts, cfg, expect)

    return build


# -- exact examples --------------------------------------------------------------
def _group(N: int):
    def build(cfg: SuiteConfig):
        R = su_root_data(N)
        L = R.algebra
        D = joyce_decompose(R)
        split = verify_decomposition(D)
        G = group_example(N)
        S = G.structure
        out = [
            exact_check("jacobi", L.jacobi_defect()),
            flag("killing_negative_definite", is_negative_definite(killing_form(L))),
            flag("roots_consistent", R.verify_roots()),
            flag("decomposition_killing_orthogonal", split.orthogonal),
            flag("quaternion_relations", S.quaternionic()),
            flag("hermitian", S.hermitian()),
            flag("dd_zero", dd_vanishes(S.algebra, 2)),
            exact_check("hkt_torsion_equality", S.hkt_identity()[1]),
        ]
        out += [flag(f"decomposition_{k}", v, witness=repr(D.dims())) for k, v in split.clauses.items()]
        for a, J in enumerate(S.I, start=1):
            out.append(exact_check(f"integrability_I{a}", integrability_check_invariant(S.algebra, J).worst))
        tv = group_torsion_check(S, G.Bhat)
        out.append(flag("torsion_antisymmetric", tv.antisymmetric))
        out.append(flag("torsion_proportional", tv.constant, witness=f"kappa={tv.kappa}"))
        return out

    return build


def _heisenberg(n: int):
    def build(cfg: SuiteConfig):
        S = heisenberg_hkt(n)
        v = verify_nilpotent_hkt(S)
        out = [flag(k, val) for k, val in vars(v).items() if k != "hkt_identity"]
        out.append(exact_check("hkt_torsion_equality", S.hkt_identity()[1]))
        out.append(exact_check("jacobi", S.algebra.jacobi_defect()))
        out.append(flag("dd_zero", dd_vanishes(S.algebra, 2)))
        return out

    return build


# -- reduction -------------------------------------------------------------------
def _reduction(cfg: SuiteConfig):
    HH = flat6_structure()
    H = HH.structure
    nu = su3_moment_map()
    act = KillingAction()
    pts = sample_level_set(cfg.samples, cfg.seed)
    ts = np.random.default_rng(cfg.seed).uniform(0, 2 * np.pi, len(pts))
    cr, cw = cauchy_riemann_residual(H, nu, pts)
    tv = transversality_check(H, nu, act.vector_field, pts)
    pr = proportionality_check(HH, nu, act.vector_field, pts)
    worst = {"stability": 0.0, "orthogonality": 0.0, "quaternion": 0.0, "hermitian": 0.0}
    min_eig, dims, ranks = np.inf, set(), set()
    for p in pts:
        fr = horizontal_frame(HH, nu, act.vector_field, p)
        dims.add(fr.dim)
        ranks.add(full_constraint_rank(H, nu, p))
        worst["stability"] = max(worst["stability"], fr.stability)
        worst["orthogonality"] = max(worst["orthogonality"], fr.orthogonality)
        worst["quaternion"] = max(worst["quaternion"], fr.quaternion_residual())
        worst["hermitian"] = max(worst["hermitian"], fr.hermitian_residual())
        min_eig = min(min_eig, fr.min_eigenvalue())
    return [
        numeric("level_set", nu.level_residual(pts), cfg.tol(1e-12)),
        numeric("cauchy_riemann", cr, cfg.tol(1e-9), cw),
        numeric("equivariance", nu.equivariance_residual(act, ts, pts), cfg.tol(1e-10)),
        numeric("action_isometry", act.isometry_residual(HH.g, ts[:5], pts), cfg.tol(1e-10)),
        numeric("action_hypercomplex", act.commutation_residual(H, ts[:5], pts), cfg.tol(1e-10)),
        lower_bound("transversality", tv.min_value, tv.threshold, tv.witness),
        numeric("proportionality", pr.residual, cfg.tol(1e-8), pr.witness),
        flag("horizontal_dimension_8", dims == {8}, exact=True, witness=repr(sorted(dims))),
        flag("constraint_rank_4", ranks == {4}, exact=True, witness=repr(sorted(ranks))),
        numeric("frame_stability", worst["stability"], cfg.tol(1e-8)),
        numeric("frame_orthogonality", worst["orthogonality"], cfg.tol(1e-8)),
        numeric("frame_quaternion", worst["quaternion"], cfg.tol(1e-8)),
        numeric("frame_hermitian", worst["hermitian"], cfg.tol(1e-8)),
        lower_bound("frame_min_eigenvalue", min_eig, 0.0),
    ]


CATALOG: dict[str, Example] = {}


def _register(ex: Example) -> None:
    CATALOG[ex.id] = ex


for _n in (1, 2, 3):
    _register(Example(f"flat-hk-n{_n}", f"flat hyperkahler H^{_n}", _flat(_n)))
for _n in (2, 3):
    _register(Example(f"hopf-log-n{_n}", f"ln-modified metric on H^{_n} minus 0 (Hopf family chart)", _hopf_log(_n), defaults={"angles": _n}))
for _m in (2, 3):
    _register(Example(f"hopf-power-m{_m}", f"t^{_m}-modified metric on H^2 minus 0", _hopf_power(_m)))
_register(Example("conformal-4d", "conformal change of flat H^1 (HKT in dimension 4)", _conformal(1)))
_register(Example("conformal-8d", "conformal change of flat H^2 (negative control: not HKT)", _conformal(2), negative_control=True))
for _n in (1, 2):
    _register(Example(f"heisenberg-n{_n}", f"h_{2 * _n} + R^3 nilpotent algebra", _heisenberg(_n), randomized=False))
_register(Example("su2-group", "su(2) + u(1) with the sp(1)-splitting hypercomplex structure", _group(2), randomized=False))
_register(Example("su3-group", "su(3) with the sp(1)-splitting hypercomplex structure", _group(3), randomized=False))
_register(Example("su3-reduction", "circle reduction of C^3 + C^3 to S^1 x SU(3)/U(1)", _reduction))


def list_examples() -> list[str]:
    return list(CATALOG)


def lookup(example_id: str) -> Example:
    try:
        return CATALOG[example_id]
    except KeyError:
        raise UsageError(f"unknown example {example_id!r}; try `list`") from None


def run_checks(cfg: SuiteConfig) -> list[CheckResult]:
    ex = lookup(cfg.example)
    if ex.randomized and cfg.seed is None:
        raise UsageError(f"{cfg.example} samples random points; a seed is required")
    if cfg.samples < 1:
        raise UsageError("samples must be positive")
    return ex.build(cfg)


__all__ = ["CATALOG", "Example", "SuiteConfig", "UsageError", "list_examples", "lookup", "run_checks"]
