"""Homogeneous hypercomplex examples: root-by-root sp(1) splittings of compact groups
and the abelian structures on Heisenberg-type nilpotent algebras."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact as ex
from .errors import DecompositionError
from .exact import ONE, ZERO, Exact
from .invariant import (
    InvariantForm,
    InvariantHKT,
    LieAlgebraData,
    ce_differential,
    del_operator,
    holomorphic_basis,
    integrability_check_invariant,
    killing_form,
    parse_algebra_text,
    type_11_defect,
    unit,
    wedge,
)


# -- root data -------------------------------------------------------------------
@dataclass
class Root:
    """Real root plane ``(X, Y)`` with ``[h, X] = alpha(h) Y`` and ``[h, Y] = -alpha(h) X``.

    ``coords`` lists ``alpha`` on the Cartan basis; the complex root vector
    ``X - iY`` has eigenvalue ``i alpha(h)``.
    """

    coords: tuple
    plane: tuple

    def positive(self) -> bool:
        first = next((c for c in self.coords if c), ZERO)
        return first.sign() > 0


@dataclass
class RootSystemData:
    algebra: LieAlgebraData
    cartan: list
    roots: list

    @property
    def rank(self) -> int:
        return len(self.cartan)

    def cartan_element(self, coeffs) -> np.ndarray:
        v = ex.zeros(self.algebra.dim)
        for c, i in zip(coeffs, self.cartan):
            v[i] = v[i] + c
        return v

    def killing_on_cartan(self) -> np.ndarray:
        B = killing_form(self.algebra)
        return B[np.ix_(self.cartan, self.cartan)]

    def pairing(self, a: Root, b: Root) -> Exact:
        """``<a, b>`` through the inverse of ``-B`` on the Cartan subalgebra."""
        G = ex.inv(-self.killing_on_cartan())
        return ex.array(a.coords).dot(G).dot(ex.array(b.coords))

    def verify_roots(self) -> bool:
        """``[h, X - iY] = i alpha(h) (X - iY)`` exactly for every Cartan basis element."""
        L = self.algebra
        for r in self.roots:
            z = unit(L.dim, r.plane[0]) - unit(L.dim, r.plane[1]) * ex.I
            for m, h in enumerate(self.cartan):
                lhs = L.bracket(unit(L.dim, h), z)
                if not ex.is_zero(lhs - z * (ex.I * r.coords[m])):
                    return False
        return True

    def to_text(self) -> str:
        lines = [self.algebra.to_text().rstrip(), "cartan " + " ".join(map(str, self.cartan))]
        for r in self.roots:
            lines.append("root " + " ".join(map(str, r.coords)) + " : " + " ".join(map(str, r.plane)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RootSystemData":
        L, cartan, roots = parse_algebra_text(text)
        return cls(L, cartan, [Root(tuple(c), tuple(p)) for c, p in roots])


def _matrix_unit(N, k, l, val=ONE):
    M = ex.zeros((N, N))
    M[k, l] = val
    return M


def su_root_data(N: int) -> RootSystemData:
    """Compact real form su(N) with basis ``h_m = i(E_mm - E_NN)``, ``X_kl``, ``Y_kl``."""
    mats, names = [], []
    for m in range(N - 1):
        mats.append(_matrix_unit(N, m, m, ex.I) - _matrix_unit(N, N - 1, N - 1, ex.I))
        names.append(f"h{m + 1}")
    planes = []
    for k, l in itertools.combinations(range(N), 2):
        mats.append(_matrix_unit(N, k, l) - _matrix_unit(N, l, k))
        mats.append(_matrix_unit(N, k, l, ex.I) + _matrix_unit(N, l, k, ex.I))
        names += [f"X{k + 1}{l + 1}", f"Y{k + 1}{l + 1}"]
        planes.append((k, l, len(mats) - 2, len(mats) - 1))
    index = {(k, l): (ix, iy) for k, l, ix, iy in planes}

    def coords(M):
        v = ex.zeros(len(mats))
        for m in range(N - 1):
            v[m] = M[m, m].imag
        for (k, l), (ix, iy) in index.items():
            v[ix], v[iy] = M[k, l].real, M[k, l].imag
        return v

    br = {}
    for i, j in itertools.combinations(range(len(mats)), 2):
        c = coords(mats[i].dot(mats[j]) - mats[j].dot(mats[i]))
        terms = {k: x for k, x in enumerate(c) if x}
        if terms:
            br[(i, j)] = terms
    L = LieAlgebraData(names, br)
    diag = [[ONE if t == m else (-ONE if t == N - 1 else ZERO) for t in range(N)] for m in range(N - 1)]
    roots = []
    for k, l, ix, iy in planes:
        roots.append(Root(tuple(diag[m][k] - diag[m][l] for m in range(N - 1)), (ix, iy)))
    return RootSystemData(L, list(range(N - 1)), roots)


# -- the decomposition -------------------------------------------------------------
@dataclass
class SplittingStep:
    root: Root
    H: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    f_planes: list  # list of (X_alpha, Y_alpha) vectors


@dataclass
class JoyceDecomposition:
    roots: RootSystemData
    b: list
    steps: list

    @property
    def n(self) -> int:
        return len(self.steps)

    def sp1(self, j: int) -> list:
        s = self.steps[j]
        return [s.H, s.X, s.Y]

    def f(self, j: int) -> list:
        return [v for pair in self.steps[j].f_planes for v in pair]

    def b_k(self, k: int) -> list:
        """``b + sum_{j > k} (sp1_j + f_j)`` (0-based k counts completed steps)."""
        vecs = list(self.b)
        for j in range(k, self.n):
            vecs += self.sp1(j) + self.f(j)
        return vecs

    def dims(self) -> tuple:
        return (len(self.b), *[3 for _ in self.steps], *[len(self.f(j)) for j in range(self.n)])


def _flip(r: Root) -> Root:
    return Root(tuple(-c for c in r.coords), r.plane + ("neg",))


def _plane_vectors(r: Root, dim: int):
    X = unit(dim, r.plane[0])
    Y = unit(dim, r.plane[1])
    return (X, -Y) if len(r.plane) > 2 else (X, Y)


def joyce_decompose(R: RootSystemData) -> JoyceDecomposition:
    L = R.algebra
    if not R.verify_roots():
        raise DecompositionError("root data inconsistent with the structure constants")
    remaining = [r if r.positive() else _flip(r) for r in R.roots]
    if len({r.coords for r in remaining}) != len(remaining):
        raise DecompositionError("repeated root: refine the ordering")
    Bh = R.killing_on_cartan()
    G = ex.inv(-Bh)
    steps = []
    while remaining:
        top = max(remaining, key=lambda r: tuple(float(c) for c in r.coords))
        h_alpha = G.dot(ex.array(top.coords))  # Cartan coordinates of the dual of alpha
        val = ex.array(top.coords).dot(h_alpha)
        H = R.cartan_element(h_alpha * (Exact(2) / val))
        X, Y = _plane_vectors(top, L.dim)
        if not ex.is_zero(L.bracket(H, X) - Y * 2):
            raise DecompositionError("root plane orientation inconsistent with [H, X] = 2Y")
        XY = L.bracket(X, Y)
        k = next(i for i in range(L.dim) if H[i])
        c = XY[k] / H[k]
        if not ex.is_zero(XY - H * c) or c.sign() <= 0:
            raise DecompositionError("[X, Y] is not a positive multiple of H")
        s = Exact.sqrt(Fraction(2) / c.a) if c.is_rational() else None
        if s is None:
            raise DecompositionError("cannot renormalize the sp(1) triple")
        X, Y = X * s, Y * s
        if not (ex.is_zero(L.bracket(H, X) - Y * 2) and ex.is_zero(L.bracket(H, Y) + X * 2)
                and ex.is_zero(L.bracket(X, Y) - H * 2)):
            raise DecompositionError("sp(1) normalization failed after rescaling")
        f_planes, rest = [], []
        for r in remaining:
            if r is top:
                continue
            if R.pairing(r, top):
                f_planes.append(_plane_vectors(r, L.dim))
            else:
                rest.append(r)
        steps.append(SplittingStep(top, H, X, Y, f_planes))
        remaining = rest
    if not steps:
        raise DecompositionError("no positive roots: nothing to decompose")
    # b: Cartan elements killed by every chosen root
    A = ex.array([list(s.root.coords) for s in steps])
    b = [R.cartan_element(v) for v in ex.nullspace(A)]
    return JoyceDecomposition(R, b, steps)


def _span_rank(vectors) -> int:
    if not vectors:
        return 0
    return ex.rank(ex.array([list(v) for v in vectors]).T)


def _in_span(v, vectors) -> bool:
    return _span_rank(vectors + [v]) == _span_rank(vectors)


@dataclass
class DecompositionVerdict:
    clauses: dict
    orthogonal: bool

    @property
    def ok(self) -> bool:
        return all(self.clauses.values()) and self.orthogonal


def verify_decomposition(D: JoyceDecomposition) -> DecompositionVerdict:
    L = D.roots.algebra
    br = L.bracket
    c1 = all(ex.is_zero(br(u, v)) for u, v in itertools.combinations(D.b, 2))
    for s in D.steps:
        c1 &= ex.is_zero(br(s.H, s.X) - s.Y * 2) and ex.is_zero(br(s.H, s.Y) + s.X * 2)
        c1 &= ex.is_zero(br(s.X, s.Y) - s.H * 2)
    toral = list(D.b) + [v for j in range(D.n) for v in D.sp1(j)]
    c2 = all(_in_span(unit(L.dim, h), toral) for h in D.roots.cartan)
    c3 = all(
        ex.is_zero(br(u, v))
        for j in range(D.n)
        for k in range(j + 1, D.n + 1)
        for u in D.b_k(k)
        for v in D.sp1(j)
    )
    c4 = all(_in_span(br(u, v), D.f(j)) for j in range(D.n) for u in D.sp1(j) for v in D.f(j))
    c5 = all(_irreducible_blocks(D, j) for j in range(D.n))
    B = killing_form(L)
    parts = [D.b] + [D.sp1(j) for j in range(D.n)] + [D.f(j) for j in range(D.n)]
    orth = all(
        not u.dot(B).dot(v)
        for p, q in itertools.combinations(parts, 2)
        for u in p
        for v in q
    )
    total = sum(len(p) for p in parts)
    return DecompositionVerdict(
        {"abelian_b_and_sp1": c1, "contains_torus": c2, "b_k_commutes": c3, "f_stable": c4, "quaternionic_blocks": c5 and total == L.dim},
        orth,
    )


def _irreducible_blocks(D: JoyceDecomposition, j: int) -> bool:
    """f_j is a sum of 4-dimensional blocks stable under ad of the sp(1) triple."""
    L = D.roots.algebra
    s = D.steps[j]
    ads = [L.ad(v) for v in (s.H, s.X, s.Y)]
    n = L.dim
    # on f_j each generator must square to -1 (weights +-1)
    for A in ads:
        for v in D.f(j):
            if not ex.is_zero(A.dot(A.dot(v)) + v):
                return False
    covered: list = []
    for X_a, _ in s.f_planes:
        if _in_span(X_a, covered):
            continue
        block = [X_a, ads[0].dot(X_a), ads[1].dot(X_a), ads[2].dot(X_a)]
        if _span_rank(block) != 4:
            return False
        for A in ads:
            if not all(_in_span(A.dot(v), block) for v in block):
                return False
        covered += block
    return _span_rank(covered) == len(D.f(j)) and n > 0


# -- the extended algebra and its hypercomplex structure ---------------------------
@dataclass
class HomogeneousHKT:
    structure: InvariantHKT
    Bhat: np.ndarray
    lambdas_sq: list
    extra_u1: int
    index: dict = field(default_factory=dict)


_LEFT = {  # left multiplication by i, j, k on (1, i, j, k): image index and sign
    1: {0: (1, 1), 1: (0, -1), 2: (3, 1), 3: (2, -1)},
    2: {0: (2, 1), 1: (3, -1), 2: (0, -1), 3: (1, 1)},
    3: {0: (3, 1), 1: (2, 1), 2: (1, -1), 3: (0, -1)},
}


def build_hypercomplex(D: JoyceDecomposition, f_sign: int = 1) -> HomogeneousHKT:
    """Extended algebra ``(2n-r) u(1) + g`` with ``I_a`` and the extended Killing form.

    Basis order: E_1..E_n, then (H_j, X_j, Y_j) per step, then the f_j planes.
    On f_j, ``I_a v = f_sign * [phi_j(iota_a), v]`` with ``phi_j = (H_j, X_j, Y_j)``.
    """
    R = D.roots
    L = R.algebra
    n, r = D.n, R.rank
    m = 2 * n - r
    if m < 0:
        raise DecompositionError("abelian part larger than the number of sp(1) factors")
    B = killing_form(L)
    lam_sq = [-(s.H.dot(B).dot(s.H)) for s in D.steps]
    # orthogonal basis of b (Gram-Schmidt for -B), then central u(1) generators
    ortho = []
    for v in D.b:
        w = v
        for u in ortho:
            w = w - u * (u.dot(B).dot(v) / u.dot(B).dot(u))
        ortho.append(w)
    total = L.dim + m
    ext = L.direct_sum(LieAlgebraData.abelian(m, [f"u{i + 1}" for i in range(m)]))

    def widen(v):
        out = ex.zeros(total)
        out[: L.dim] = v
        return out

    Bext = ex.zeros((total, total))
    Bext[: L.dim, : L.dim] = B
    E = []
    for j in range(n):
        if j < len(ortho):
            w = ortho[j]
            norm = -(w.dot(B).dot(w))
            if not (norm.is_rational() and lam_sq[j].is_rational()):
                raise DecompositionError("extended Killing normalization needs a rational ratio")
            E.append(widen(w) * Exact.sqrt(lam_sq[j].a / norm.a))
        else:
            k = L.dim + (j - len(ortho))
            E.append(unit(total, k))
            Bext[k, k] = -lam_sq[j]
    cols = list(E)
    names = [f"E{j + 1}" for j in range(n)]
    for j, s in enumerate(D.steps):
        cols += [widen(s.H), widen(s.X), widen(s.Y)]
        names += [f"H{j + 1}", f"X{j + 1}", f"Y{j + 1}"]
    f_index = []
    for j in range(n):
        for p, (Xa, Ya) in enumerate(D.steps[j].f_planes):
            cols += [widen(Xa), widen(Ya)]
            f_index.append(j)
            f_index.append(j)
            names += [f"F{j + 1}_{p + 1}x", f"F{j + 1}_{p + 1}y"]
    P = ex.array([list(c) for c in cols]).T
    new = ext.change_basis(P, names)
    Bhat = P.T.dot(Bext).dot(P)
    N = new.dim
    Is = [ex.zeros((N, N)) for _ in range(3)]
    for j in range(n):
        quat = [j, n + 3 * j, n + 3 * j + 1, n + 3 * j + 2]  # E, H, X, Y
        for a in (1, 2, 3):
            for src, (dst, sign) in _LEFT[a].items():
                Is[a - 1][quat[dst], quat[src]] = Exact(sign)
    f_start = 4 * n
    for a in (1, 2, 3):
        for t, j in enumerate(f_index):
            gen = unit(N, n + 3 * j + a - 1)
            col = new.bracket(gen, unit(N, f_start + t)) * f_sign
            for row in range(f_start, N):
                Is[a - 1][row, f_start + t] = col[row]
            if not ex.is_zero(col[:f_start]):
                raise DecompositionError("sp(1) action leaves f")
    g = -Bhat
    hkt = InvariantHKT(new, tuple(Is), g)
    index = {"E": list(range(n)), "sp1": list(range(n, 4 * n)), "f": list(range(4 * n, N)), "g": P}
    return HomogeneousHKT(hkt, Bhat, lam_sq, m, index)


def group_example(N: int, f_sign: int = 1) -> HomogeneousHKT:
    return build_hypercomplex(joyce_decompose(su_root_data(N)), f_sign)


# -- Heisenberg-type nilpotent algebras ------------------------------------------
def heisenberg_algebra(n: int, corrupt: bool = False) -> LieAlgebraData:
    """``h_{2n} + R^3`` with basis X_1..X_2n, Y_1..Y_2n, Z, E_1, E_2, E_3 and [X_i, Y_i] = Z."""
    m = 2 * n
    names = [f"X{i + 1}" for i in range(m)] + [f"Y{i + 1}" for i in range(m)] + ["Z", "E1", "E2", "E3"]
    z = 2 * m
    br = {(i, m + i): {z: ONE} for i in range(m)}
    if corrupt:
        br[(0, m)] = {z: Exact(2)}
    return LieAlgebraData(names, br)


def heisenberg_structures(n: int) -> tuple:
    """I_1, I_2, I_3 = I_1 I_2 on ``h_{2n} + R^3``.

    I_1: X_{2i-1} -> Y_{2i-1}, X_{2i} -> -Y_{2i}, Z -> E_1, E_2 -> -E_3.
    I_2: X_{2i-1} -> X_{2i}, Y_{2i-1} -> Y_{2i}, Z -> E_2, E_1 -> E_3.
    """
    m = 2 * n
    N = 2 * m + 4
    X = lambda i: i  # noqa: E731
    Y = lambda i: m + i  # noqa: E731
    Z, E1, E2, E3 = 2 * m, 2 * m + 1, 2 * m + 2, 2 * m + 3

    def cx(pairs):
        J = ex.zeros((N, N))
        for src, dst, sign in pairs:
            J[dst, src] = Exact(sign)
            J[src, dst] = Exact(-sign)
        return J

    one, two = [], []
    for i in range(0, m, 2):
        one += [(X(i), Y(i), 1), (X(i + 1), Y(i + 1), -1)]
        two += [(X(i), X(i + 1), 1), (Y(i), Y(i + 1), 1)]
    one += [(Z, E1, 1), (E2, E3, -1)]
    two += [(Z, E2, 1), (E1, E3, 1)]
    I1, I2 = cx(one), cx(two)
    return I1, I2, I1.dot(I2)


def heisenberg_hkt(n: int, corrupt: bool = False) -> InvariantHKT:
    L = heisenberg_algebra(n, corrupt)
    return InvariantHKT(L, heisenberg_structures(n), ex.eye(L.dim))


@dataclass
class HeisenbergVerdict:
    quaternionic: bool
    integrable: bool
    abelian: bool
    d_of_10_is_11: bool
    forms_20_closed: bool
    hkt_identity: bool
    hermitian: bool

    @property
    def ok(self) -> bool:
        return all(vars(self).values())


def forms_20(J: np.ndarray) -> list[InvariantForm]:
    basis = holomorphic_basis(J)
    return [wedge(a, b) for a, b in itertools.combinations(basis, 2)]


def verify_nilpotent_hkt(S: InvariantHKT) -> HeisenbergVerdict:
    L = S.algebra
    integ = [integrability_check_invariant(L, J) for J in S.I]
    d10 = all(
        type_11_defect(J, ce_differential(L, th)).is_zero() for J in S.I for th in holomorphic_basis(J)
    )
    closed = all(del_operator(L, S.I[0], w).is_zero() for w in forms_20(S.I[0]))
    return HeisenbergVerdict(
        S.quaternionic(),
        all(v.nijenhuis_zero for v in integ),
        all(v.abelian for v in integ),
        d10,
        closed,
        S.hkt_identity()[0],
        S.hermitian(),
    )


__all__ = [
    "Root",
    "RootSystemData",
    "su_root_data",
    "joyce_decompose",
    "verify_decomposition",
    "build_hypercomplex",
    "group_example",
    "heisenberg_algebra",
    "heisenberg_structures",
    "heisenberg_hkt",
    "verify_nilpotent_hkt",
]
