import pytest

from hkt import exact as ex
from hkt.errors import DecompositionError
from hkt.exact import Exact
from hkt.homogeneous import (
    Root,
    RootSystemData,
    build_hypercomplex,
    heisenberg_algebra,
    heisenberg_hkt,
    joyce_decompose,
    su_root_data,
    verify_decomposition,
    verify_nilpotent_hkt,
)
from hkt.invariant import dd_vanishes, group_torsion_check, integrability_check_invariant, killing_form


@pytest.fixture(scope="module")
def decompositions():
    return {N: joyce_decompose(su_root_data(N)) for N in (2, 3)}


@pytest.fixture(scope="module")
def groups(decompositions):
    return {N: build_hypercomplex(D) for N, D in decompositions.items()}


@pytest.mark.parametrize("N", [2, 3])
def test_root_data_is_consistent(N):
    R = su_root_data(N)
    assert R.verify_roots()
    assert R.rank == N - 1 and len(R.roots) == N * (N - 1) // 2
    assert R.algebra.dim == N * N - 1


def test_root_pairings_su3():
    R = su_root_data(3)
    norm = R.pairing(R.roots[0], R.roots[0])
    assert norm.sign() == 1
    for x in R.roots:
        assert R.pairing(x, x) == norm
        for y in R.roots:
            if x is not y:
                p = R.pairing(x, y)
                assert p == norm / 2 or p == -norm / 2


def test_flipped_root_is_rejected():
    R = su_root_data(3)
    r = R.roots[0]
    R.roots[0] = Root(tuple(-c for c in r.coords), r.plane)
    with pytest.raises(DecompositionError, match="inconsistent"):
        joyce_decompose(R)


def test_root_text_round_trip():
    R = su_root_data(3)
    again = RootSystemData.from_text(R.to_text())
    assert again.algebra == R.algebra and again.cartan == R.cartan
    assert [r.coords for r in again.roots] == [r.coords for r in R.roots]
    assert again.to_text() == R.to_text()


def test_decomposition_dimensions(decompositions):
    assert decompositions[2].dims() == (0, 3, 0)
    assert decompositions[3].dims() == (1, 3, 4)


@pytest.mark.parametrize("N", [2, 3])
def test_decomposition_clauses(decompositions, N):
    v = verify_decomposition(decompositions[N])
    assert v.ok, v.clauses
    assert len(v.clauses) == 5 and v.orthogonal


@pytest.mark.parametrize("N,dim,extra", [(2, 4, 1), (3, 8, 0)])
def test_group_hkt_is_exact(groups, N, dim, extra):
    G = groups[N]
    S = G.structure
    assert S.algebra.dim == dim and G.extra_u1 == extra
    assert S.quaternionic() and S.hermitian()
    ok, r = S.hkt_identity()
    assert ok and r == 0 and isinstance(r, Exact)
    assert all(integrability_check_invariant(S.algebra, J).nijenhuis_zero for J in S.I)
    assert dd_vanishes(S.algebra)


@pytest.mark.parametrize("N", [2, 3])
def test_group_torsion(groups, N):
    G = groups[N]
    t = group_torsion_check(G.structure, G.Bhat)
    assert t.antisymmetric and t.constant and t.kappa == Exact(-1) / 2


@pytest.mark.parametrize("N", [2, 3])
def test_extended_metric_is_positive(groups, N):
    from hkt.invariant import is_negative_definite

    assert is_negative_definite(groups[N].Bhat)
    assert all(v.sign() == 1 for v in groups[N].lambdas_sq)


def test_metric_restricts_to_killing_form(groups):
    G = groups[3]
    P = G.index["g"]
    B = killing_form(su_root_data(3).algebra)
    assert ex.is_zero(P.T.dot(B).dot(P) - G.Bhat)


def test_opposite_action_on_f_breaks_su3(decompositions):
    # the sp(1) action on f must enter with the sign that makes it a left module
    S = build_hypercomplex(decompositions[3], f_sign=-1).structure
    assert not S.quaternionic()
    assert not S.hkt_identity()[0]


def test_su2_is_insensitive_to_f_sign(decompositions):
    S = build_hypercomplex(decompositions[2], f_sign=-1).structure
    assert S.hkt_identity()[0]


@pytest.mark.parametrize("n", [1, 2])
def test_heisenberg_verdict(n):
    v = verify_nilpotent_hkt(heisenberg_hkt(n))
    assert v.ok, v
    L = heisenberg_algebra(n)
    assert L.dim == 4 * n + 4 and dd_vanishes(L)


def test_corrupted_heisenberg_fails():
    v = verify_nilpotent_hkt(heisenberg_hkt(1, corrupt=True))
    assert not v.integrable and not v.hkt_identity
    assert v.quaternionic and v.hermitian
