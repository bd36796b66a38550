import numpy as np
import pytest

from hkt import dual as dn
from hkt.calculus import d, d_c, nijenhuis_residual
from hkt.chart import EndomorphismField, MetricField, ScalarField
from hkt.errors import IntegrityError
from hkt.potential import hopf_structure
from hkt.quaternionic import (
    HKTReport,
    HyperHermitianStructure,
    HypercomplexStructure,
    bismut_torsion,
    complex_structure_at,
    conformal_change,
    difj_check,
    flat_chart,
    flat_hyperkahler,
    hkt_residual,
    holomorphic_residual,
    integrability_residual,
    metric_from_form,
    verify_quaternion_relations,
)
from hkt.reduction import flat6_potential_structure


@pytest.fixture(scope="module")
def hopf8():
    PS, HH, _ = hopf_structure(2)
    return PS, HH, PS.chart.sample(100, 21)


def test_flat_relations_exact(flat8, pts8):
    assert verify_quaternion_relations(flat8, pts8) == 0
    assert integrability_residual(flat8, pts8) == 0


def test_reduction_structure_relations_exact():
    PS = flat6_potential_structure()
    assert verify_quaternion_relations(PS.structure, PS.chart.sample(10, 0)) == 0


def test_sign_flip_breaks_relations(flat8, pts8):
    bad = HypercomplexStructure(flat8[1], flat8[2], -flat8[3])
    assert verify_quaternion_relations(bad, pts8) >= 2


def test_structures_must_share_chart(flat8):
    other = EndomorphismField.constant(flat_chart(2, 0.1, 1.0), flat8[1].matrix)
    with pytest.raises(ValueError):
        HypercomplexStructure(flat8[1], other, flat8[3])


def test_complex_structure_at_axes(flat8, pts8):
    assert np.array_equal(complex_structure_at(flat8, (1, 0, 0)).at(pts8), flat8[1].at(pts8))
    assert np.array_equal(complex_structure_at(flat8, (0, 0, 1)).at(pts8), flat8[3].at(pts8))
    assert complex_structure_at(flat8, (0.6, 0.8, 0)).square_residual(pts8) < 1e-12
    with pytest.raises(ValueError):
        complex_structure_at(flat8, (1, 1, 0))


def test_sphere_of_structures(flat8, pts8):
    rng = np.random.default_rng(4)
    for _ in range(20):
        a = rng.normal(size=3)
        J = complex_structure_at(flat8, a / np.linalg.norm(a))
        assert J.square_residual(pts8) < 1e-12
        assert nijenhuis_residual(J, pts8)[0] < 1e-8


def test_bismut_torsion_flat_vanishes(chart8, flat8, pts8):
    c = bismut_torsion(MetricField.euclidean(chart8), flat8[1])
    assert np.abs(c.at(pts8)).max() == 0


def test_bismut_torsion_hopf(hopf8):
    PS, HH, pts = hopf8
    pts = pts[:20]
    c = np.asarray(bismut_torsion(HH.g, PS.structure[1]).at(pts))
    assert np.abs(c).max() > 1e-3
    for perm in [(0, 2, 1, 3), (0, 1, 3, 2), (0, 3, 2, 1)]:
        assert np.abs(c + np.transpose(c, perm)).max() < 1e-10
    ts = [np.asarray(d_c(PS.structure[a], HH.F(a)).at(pts)) * -0.5 for a in (1, 2, 3)]
    assert max(np.abs(ts[0] - ts[1]).max(), np.abs(ts[1] - ts[2]).max()) < 1e-8


def test_hkt_residual_flat_and_hopf(hopf8, pts8):
    assert hkt_residual(flat_hyperkahler(2), pts8)[0] == 0
    _, HH, pts = hopf8
    r, wit = hkt_residual(HH, pts)
    assert r < 1e-8 and wit.shape == (8,)


def test_hkt_residual_conformal_exponential(chart8, pts8):
    HH = conformal_change(flat_hyperkahler(2), ScalarField(chart8, lambda x: x[..., 0]))
    assert hkt_residual(HH, pts8)[0] > 1e-3


def test_holomorphic_residual_flat(pts8):
    assert holomorphic_residual(flat_hyperkahler(2), pts8)[0] == 0


def random_factor(chart, seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.normal(size=3) * 0.3
    k = rng.integers(0, chart.dim, size=3)
    return ScalarField(chart, lambda x: dn.sin(x[..., k[0]]) * a + x[..., k[1]] * x[..., k[2]] * b + dn.cos(x[..., k[2]]) * c)


def test_every_dim4_conformal_structure_is_hkt():
    chart = flat_chart(1, 0.2, 2.0)
    pts = chart.sample(40, 0)
    for seed in range(5):
        HH = conformal_change(flat_hyperkahler(1, chart), random_factor(chart, seed))
        assert holomorphic_residual(HH, pts)[0] < 1e-8
        assert hkt_residual(HH, pts)[0] < 1e-8


def test_criteria_agree_on_dim8_conformal(chart8, pts8):
    HH = conformal_change(flat_hyperkahler(2), ScalarField(chart8, lambda x: x[..., 0]))
    hol = holomorphic_residual(HH, pts8)[0]
    assert hol > 1e-3
    assert (hol < 1e-6) == (hkt_residual(HH, pts8)[0] < 1e-6)


def test_conformal_sin_in_dim4():
    chart = flat_chart(1)
    HH = conformal_change(flat_hyperkahler(1, chart), ScalarField(chart, lambda x: dn.sin(x[..., 0])))
    assert holomorphic_residual(HH, chart.sample(50, 1))[0] < 1e-8


def test_conformal_zero_is_identity(chart8, pts8):
    HH = flat_hyperkahler(2)
    same = conformal_change(HH, ScalarField.const(chart8, 0.0))
    assert np.array_equal(np.asarray(same.g.fn(pts8)), np.asarray(HH.g.fn(pts8)))


def test_difj_flat_and_hopf(hopf8, pts8):
    assert difj_check(flat_hyperkahler(2), pts8).max() == 0
    PS, HH, pts = hopf8
    M = difj_check(HH, pts[:15])
    assert M[0, 0] < 1e-8 and M[0, 1] < 1e-8
    assert M.max() < 1e-8
    # independent: d_1 F_2 = -d F_3
    lhs = d_c(PS.structure[1], HH.F(2)).at(pts[:15])
    rhs = -np.asarray(d(HH.F(3)).at(pts[:15]))
    assert np.abs(lhs - rhs).max() < 1e-8


def test_metric_from_form_round_trips(chart8, pts8, hopf8):
    HH = flat_hyperkahler(2)
    g, verdict = metric_from_form(HH.structure, HH.F(2) - 1j * HH.F(3), pts8)
    assert np.abs(np.asarray(g.fn(pts8)) - np.eye(8)).max() == 0 and verdict.ok
    PS, HHh, pts = hopf8
    g2, v2 = metric_from_form(PS.structure, HHh.F(2) - 1j * HHh.F(3), pts[:20])
    assert np.abs(np.asarray(g2.fn(pts[:20])) - np.asarray(HHh.g.fn(pts[:20]))).max() < 1e-10
    assert v2.ok and v2.symmetry_residual < 1e-10 and v2.hermitian_residual < 1e-10
    g3, _ = metric_from_form(HH.structure, (HH.F(2) - 1j * HH.F(3)) * 2.0, pts8)
    assert np.allclose(np.asarray(g3.fn(pts8)), 2 * np.eye(8))


def test_metric_from_form_rejects_wrong_type(pts8):
    HH = flat_hyperkahler(2)
    with pytest.raises(IntegrityError, match=r"not \(0,2\)"):
        metric_from_form(HH.structure, HH.F(2) + 1j * HH.F(3), pts8)


def test_metric_from_form_reports_indefinite(pts8):
    HH = flat_hyperkahler(2)
    _, verdict = metric_from_form(HH.structure, (HH.F(2) - 1j * HH.F(3)) * -1.0, pts8)
    assert not verdict.ok and verdict.min_eigenvalue < 0 and verdict.witness.shape == (8,)


def test_hermiticity_of_hopf_metric(hopf8):
    _, HH, pts = hopf8
    assert HH.hermitian_defect(pts) < 1e-12


def test_kahler_form_requires_hermitian_metric(chart8, flat8, pts8):
    g = MetricField.constant(chart8, np.diag([1, 1, 2, 2, 1, 1, 1, 1.0]))
    HH = HyperHermitianStructure(flat8, g)
    with pytest.raises(IntegrityError):
        HH.F(2).at(pts8)


def test_hkt_report_verdict():
    ok = HKTReport(1e-12, 1e-12, np.zeros((3, 3)), 10, 1e-8)
    bad = HKTReport(1e-12, 1e-3, None, 10, 1e-8)
    assert ok.verdict and not bad.verdict
