import numpy as np
import pytest

from hkt.calculus import d
from hkt.errors import DecompositionError, DomainError
from hkt.chart import MetricField
from hkt.quaternionic import HyperHermitianStructure, integrability_residual, verify_quaternion_relations
from hkt.reduction import (
    REDUCTION_I1,
    REDUCTION_I2,
    REDUCTION_I3,
    KillingAction,
    cauchy_riemann_residual,
    constraint_covectors,
    flat6_structure,
    from_complex,
    full_constraint_rank,
    horizontal_frame,
    proportionality_check,
    sample_level_set,
    su3_moment_map,
    to_complex,
    transversality_check,
    zero_field,
)


@pytest.fixture(scope="module")
def setup():
    HH = flat6_structure()
    return HH, su3_moment_map(), KillingAction(), sample_level_set(50, 2024)


def test_constant_structures_are_quaternionic():
    eye = np.eye(12)
    for J in (REDUCTION_I1, REDUCTION_I2, REDUCTION_I3):
        assert np.array_equal(J @ J, -eye)
        assert np.array_equal(J.T, -J)
    assert np.array_equal(REDUCTION_I1 @ REDUCTION_I2, -REDUCTION_I2 @ REDUCTION_I1)


def test_modified_structure_is_hypercomplex(setup):
    HH, _, _, pts = setup
    assert verify_quaternion_relations(HH.structure, pts) < 1e-12
    assert integrability_residual(HH.structure, pts[:10]) < 1e-10


def test_complex_packing_round_trip():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(4, 12))
    chi, rho = to_complex(x)
    assert chi.shape == (4, 3)
    assert np.array_equal(from_complex(chi, rho), x)


def test_level_set_sampler(setup):
    _, nu, _, pts = setup
    assert pts.shape == (50, 12)
    assert nu.level_residual(pts) < 1e-12
    chi, rho = to_complex(pts)
    assert np.allclose(np.linalg.norm(chi, axis=1), np.linalg.norm(rho, axis=1))
    r = np.linalg.norm(pts, axis=1)
    assert r.min() >= 0.5 - 1e-12 and r.max() <= 3.0 + 1e-12
    assert np.array_equal(sample_level_set(5, 7), sample_level_set(5, 7))


def test_sampler_gives_up_on_degenerate_draws(monkeypatch):
    from hkt import reduction

    class Parallel:
        """Always draws chi = rho, so the orthogonalized rho vanishes."""

        def __init__(self, seed):
            pass

        def normal(self, size):
            return np.ones(size)

    monkeypatch.setattr(reduction.np.random, "default_rng", Parallel)
    with pytest.raises(DomainError, match="near-parallel"):
        reduction.sample_level_set(1, 0, max_retries=3)


def test_moment_map_values():
    nu = su3_moment_map()
    chi = np.array([1 + 1j, 0, 0])
    rho = np.array([1j, 0, 0])
    x = from_complex(chi, rho)[None]
    v = nu.values(x)[0]
    # |chi|^2 - |rho|^2 = 1; 2 chi conj(rho) = 2 (1 + i)(-i) = 2 - 2i
    assert np.allclose(v, [1.0, 2.0, -2.0])


def test_unknown_convention():
    with pytest.raises(ValueError):
        su3_moment_map(convention="third")


def test_cauchy_riemann(setup):
    HH, nu, _, pts = setup
    assert cauchy_riemann_residual(HH.structure, nu, pts)[0] < 1e-9
    # off the level set as well: the identity is pointwise
    off = HH.chart.sample(20, 3)
    assert cauchy_riemann_residual(HH.structure, nu, off)[0] < 1e-9


def test_other_hermitian_slot_breaks_cauchy_riemann(setup):
    HH, _, _, pts = setup
    assert cauchy_riemann_residual(HH.structure, su3_moment_map(convention="first"), pts)[0] > 1.0


def test_rescaled_component_breaks_cauchy_riemann(setup):
    HH, nu, _, pts = setup
    assert cauchy_riemann_residual(HH.structure, nu.scaled(1, 2.0), pts)[0] > 1e-2


def test_killing_generator_matches_finite_difference(setup):
    _, _, act, pts = setup
    assert act.generator_error(pts) < 1e-6
    assert np.allclose(act.matrix(2 * np.pi), np.eye(12))


def test_action_symmetries(setup):
    HH, nu, act, pts = setup
    ts = np.linspace(0.1, 6.0, 5)
    assert act.isometry_residual(HH.g, ts, pts) < 1e-10
    assert act.commutation_residual(HH.structure, ts, pts) < 1e-10
    ts50 = np.random.default_rng(0).uniform(0, 2 * np.pi, len(pts))
    assert nu.equivariance_residual(act, ts50, pts) < 1e-10


def test_transversality(setup):
    HH, nu, act, pts = setup
    tv = transversality_check(HH.structure, nu, act.vector_field, pts)
    assert tv.ok and tv.min_value > 0.1
    # |I_a d nu_a (X)| is quadratic in the point
    half = transversality_check(HH.structure, nu, act.vector_field, 0.5 * pts)
    assert np.allclose(half.values, 0.25 * tv.values)


def test_zero_field_is_not_transversal(setup):
    HH, nu, _, pts = setup
    tv = transversality_check(HH.structure, nu, zero_field, pts)
    assert not tv.ok and tv.min_value == 0


def test_moment_map_proportionality(setup):
    HH, nu, act, pts = setup
    pr = proportionality_check(HH, nu, act.vector_field, pts)
    assert pr.residual < 1e-8 and pr.factor_gap < 1e-8
    bad = proportionality_check(HH, nu, zero_field, pts)
    assert bad.residual > 1e-2 and bad.factor_gap == np.inf


def test_proportionality_fails_for_the_flat_metric(setup):
    HH, nu, act, pts = setup
    flat = HyperHermitianStructure(HH.structure, MetricField.euclidean(HH.chart))
    assert proportionality_check(flat, nu, act.vector_field, pts).residual > 1.0


def test_horizontal_frames(setup):
    HH, nu, act, pts = setup
    for p in pts[:20]:
        fr = horizontal_frame(HH, nu, act.vector_field, p)
        assert fr.dim == 8 and fr.constraint_rank == 4
        assert full_constraint_rank(HH.structure, nu, p) == 4
        assert fr.stability < 1e-8 and fr.orthogonality < 1e-8
        assert fr.quaternion_residual() < 1e-8 and fr.hermitian_residual() < 1e-8
        assert fr.min_eigenvalue() > 0


def test_frame_choice_does_not_matter(setup):
    HH, nu, act, pts = setup
    Q, _ = np.linalg.qr(np.random.default_rng(9).normal(size=(8, 8)))
    for p in pts[:5]:
        a = horizontal_frame(HH, nu, act.vector_field, p)
        b = horizontal_frame(HH, nu, act.vector_field, p, basis_change=Q)
        for u, v in zip(a.invariants(), b.invariants()):
            assert np.allclose(u, v, atol=1e-10)
        assert b.quaternion_residual() < 1e-8 and b.hermitian_residual() < 1e-8


def test_constraint_rows_are_differentials(setup):
    HH, nu, _, pts = setup
    C = constraint_covectors(HH.structure, nu, pts[0])
    assert C.shape == (4, 12)
    assert np.allclose(C[0], np.asarray(d(nu.nu[0]).fn(pts[:1]))[0])


def test_degenerate_constraints_are_reported(setup):
    HH, nu, act, pts = setup
    with pytest.raises(DecompositionError, match="singular values"):
        horizontal_frame(HH, nu.scaled(2, 0.0), act.vector_field, pts[0])
