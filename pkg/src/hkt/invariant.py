"""Left-invariant geometry on Lie algebras in exact arithmetic.

Forms are sparse maps from increasing index tuples to :class:`Exact`
values, evaluated on basis vectors. The Chevalley-Eilenberg differential
uses the unnormalized convention

    d w(X_0, .., X_k) = sum_{i<j} (-1)^{i+j} w([X_i, X_j], X_0, .., ^i, .., ^j, ..)

with the matching determinant wedge, so ``d(Z*) = -X1* ^ Y1*`` when
``[X1, Y1] = Z``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact as ex
from .exact import ONE, ZERO, Exact


def _sort_sign(idx) -> tuple[int, tuple]:
    """Sign of the permutation sorting ``idx`` (0 if an index repeats)."""
    idx = list(idx)
    if len(set(idx)) < len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


# -- algebras --------------------------------------------------------------
class LieAlgebraData:
    """Basis names and structure constants ``[e_i, e_j] = sum_k C[i,j,k] e_k``."""

    def __init__(self, names, brackets: dict):
        """``brackets`` maps ``(i, j)`` with ``i < j`` to ``{k: coefficient}``."""
        self.names = list(names)
        self.dim = len(self.names)
        self._br: dict[tuple[int, int], dict[int, Exact]] = {}
        for (i, j), terms in brackets.items():
            if i == j:
                raise ValueError("bracket of a basis vector with itself must vanish")
            sign = 1 if i < j else -1
            key = (min(i, j), max(i, j))
            slot = self._br.setdefault(key, {})
            for k, c in terms.items():
                slot[k] = slot.get(k, ZERO) + Exact.of(c) * sign
        for key in list(self._br):
            self._br[key] = {k: v for k, v in self._br[key].items() if v}
            if not self._br[key]:
                del self._br[key]

    # -- brackets ----------------------------------------------------------
    def basis_bracket(self, i: int, j: int) -> dict:
        if i == j:
            return {}
        if i < j:
            return self._br.get((i, j), {})
        return {k: -v for k, v in self._br.get((j, i), {}).items()}

    def structure_constants(self) -> np.ndarray:
        C = ex.zeros((self.dim,) * 3)
        for (i, j), terms in self._br.items():
            for k, v in terms.items():
                C[i, j, k] = v
                C[j, i, k] = -v
        return C

    def bracket(self, u, v) -> np.ndarray:
        out = ex.zeros(self.dim)
        for i in np.nonzero([bool(x) for x in u])[0]:
            for j in np.nonzero([bool(x) for x in v])[0]:
                for k, c in self.basis_bracket(i, j).items():
                    out[k] = out[k] + u[i] * v[j] * c
        return out

    def ad(self, u) -> np.ndarray:
        """Matrix of ``ad u``: column j holds ``[u, e_j]``."""
        M = ex.zeros((self.dim, self.dim))
        for j in range(self.dim):
            M[:, j] = self.bracket(u, unit(self.dim, j))
        return M

    def basis_ad(self, i: int) -> np.ndarray:
        return self.ad(unit(self.dim, i))

    def jacobi_defect(self) -> Exact:
        """Largest entry of the Jacobiator over all basis triples."""
        worst = ZERO
        for i, j, k in itertools.combinations(range(self.dim), 3):
            ei, ej, ek = (unit(self.dim, t) for t in (i, j, k))
            jac = (
                self.bracket(ei, self.bracket(ej, ek))
                + self.bracket(ej, self.bracket(ek, ei))
                + self.bracket(ek, self.bracket(ei, ej))
            )
            m = ex.max_abs(jac)
            if abs(complex(m)) > abs(complex(worst)):
                worst = m
        return worst

    def is_abelian(self) -> bool:
        return not self._br

    # -- constructions -----------------------------------------------------
    @classmethod
    def abelian(cls, dim: int, names=None) -> "LieAlgebraData":
        return cls(names or [f"e{i + 1}" for i in range(dim)], {})

    def direct_sum(self, other: "LieAlgebraData") -> "LieAlgebraData":
        shift = self.dim
        br = {key: dict(t) for key, t in self._br.items()}
        for (i, j), t in other._br.items():
            br[(i + shift, j + shift)] = {k + shift: v for k, v in t.items()}
        return LieAlgebraData(self.names + other.names, br)

    def change_basis(self, P: np.ndarray, names) -> "LieAlgebraData":
        """Algebra in the basis given by the columns of ``P``."""
        Pinv = ex.inv(P)
        br = {}
        for i, j in itertools.combinations(range(self.dim), 2):
            vec = Pinv.dot(self.bracket(P[:, i], P[:, j]))
            terms = {k: v for k, v in enumerate(vec) if v}
            if terms:
                br[(i, j)] = terms
        return LieAlgebraData(names, br)

    def mutated(self, i: int, j: int, terms: dict) -> "LieAlgebraData":
        br = {key: dict(t) for key, t in self._br.items()}
        br[(min(i, j), max(i, j))] = {k: (v if i < j else -v) for k, v in terms.items()}
        return LieAlgebraData(self.names, br)

    # -- text format ---------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"dim {self.dim}", "basis " + " ".join(self.names)]
        for (i, j) in sorted(self._br):
            for k in sorted(self._br[(i, j)]):
                lines.append(f"bracket {i} {j} {k} {self._br[(i, j)][k]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LieAlgebraData":
        return parse_algebra_text(text)[0]

    def __eq__(self, other):
        return isinstance(other, LieAlgebraData) and self.names == other.names and self._br == other._br


def unit(n: int, i: int) -> np.ndarray:
    v = ex.zeros(n)
    v[i] = ONE
    return v


def parse_algebra_text(text: str):
    """Parse ``dim``/``basis``/``bracket i j k c``/``cartan``/``root`` lines.

    Returns ``(algebra, cartan_indices, roots)`` where each root is
    ``(coordinates, (ix, iy))``.
    """
    dim, names, br, cartan, roots = None, None, {}, [], []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "dim":
            dim = int(rest[0])
        elif key == "basis":
            names = rest
        elif key == "bracket":
            i, j, k = (int(t) for t in rest[:3])
            c = Exact.parse(" ".join(rest[3:]))
            slot = br.setdefault((i, j), {})
            slot[k] = slot.get(k, ZERO) + c
        elif key == "cartan":
            cartan = [int(t) for t in rest]
        elif key == "root":
            coords, planes = " ".join(rest).split(":")
            roots.append(
                (tuple(Exact.parse(t) for t in coords.split()), tuple(int(t) for t in planes.split()))
            )
        else:
            raise ValueError(f"unknown directive {key!r}")
    if names is None:
        names = [f"e{i + 1}" for i in range(dim or 0)]
    if dim is not None and dim != len(names):
        raise ValueError("dim does not match basis length")
    return LieAlgebraData(names, br), cartan, roots


def killing_form(L: LieAlgebraData) -> np.ndarray:
    """``B(X, Y) = tr(ad X ad Y)``."""
    ads = [L.basis_ad(i) for i in range(L.dim)]
    B = ex.zeros((L.dim, L.dim))
    for i in range(L.dim):
        for j in range(i, L.dim):
            t = sum((ads[i][a, b] * ads[j][b, a] for a in range(L.dim) for b in range(L.dim) if ads[i][a, b] and ads[j][b, a]), ZERO)
            B[i, j] = B[j, i] = t
    return B


def leading_minors(B: np.ndarray) -> list[Exact]:
    return [det(B[:k, :k]) for k in range(1, B.shape[0] + 1)]


def det(A: np.ndarray) -> Exact:
    M = np.array(A, dtype=object)
    n = M.shape[0]
    out = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r, col]), None)
        if piv is None:
            return ZERO
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
            out = -out
        out = out * M[col, col]
        inv_p = Exact.of(M[col, col]).inverse()
        for r in range(col + 1, n):
            if M[r, col]:
                M[r] = M[r] - M[col] * (M[r, col] * inv_p)
    return out


def is_negative_definite(B: np.ndarray) -> bool:
    """Leading principal minors alternate in sign starting negative."""
    return all(m.sign() == (-1) ** (k + 1) for k, m in enumerate(leading_minors(B)))


# -- invariant forms -----------------------------------------------------------
class InvariantForm:
    def __init__(self, dim: int, degree: int, comps: dict | None = None):
        self.dim = dim
        self.degree = degree
        self.comps: dict[tuple, Exact] = {}
        for idx, v in (comps or {}).items():
            sign, key = _sort_sign(idx)
            v = Exact.of(v)
            if sign and v:
                self.comps[key] = self.comps.get(key, ZERO) + v * sign
        self.comps = {k: v for k, v in self.comps.items() if v}

    def __call__(self, *idx) -> Exact:
        sign, key = _sort_sign(idx)
        if not sign:
            return ZERO
        v = self.comps.get(key)
        return ZERO if v is None else (v if sign > 0 else -v)

    @classmethod
    def covector(cls, dim: int, i: int) -> "InvariantForm":
        return cls(dim, 1, {(i,): ONE})

    @classmethod
    def from_tensor(cls, T: np.ndarray) -> "InvariantForm":
        k, n = T.ndim, T.shape[0]
        return cls(n, k, {idx: T[idx] for idx in itertools.combinations(range(n), k)})

    def tensor(self) -> np.ndarray:
        T = ex.zeros((self.dim,) * self.degree)
        for key, v in self.comps.items():
            for perm in itertools.permutations(range(self.degree)):
                sign, _ = _sort_sign(perm)
                T[tuple(key[p] for p in perm)] = v * sign
        return T

    def _same(self, other):
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise ValueError("forms differ in dimension or degree")

    def __add__(self, other: "InvariantForm") -> "InvariantForm":
        self._same(other)
        comps = dict(self.comps)
        for k, v in other.comps.items():
            comps[k] = comps.get(k, ZERO) + v
        return InvariantForm(self.dim, self.degree, comps)

    def __neg__(self):
        return InvariantForm(self.dim, self.degree, {k: -v for k, v in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = Exact.of(c)
        return InvariantForm(self.dim, self.degree, {k: v * c for k, v in self.comps.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other):
        return isinstance(other, InvariantForm) and (self - other).is_zero()

    def max_entry(self) -> Exact:
        return ex.max_abs(list(self.comps.values()) or [ZERO])

    def conj(self) -> "InvariantForm":
        return InvariantForm(self.dim, self.degree, {k: v.conjugate() for k, v in self.comps.items()})

    def __repr__(self):
        return f"InvariantForm(degree={self.degree}, {len(self.comps)} nonzero)"


def wedge(a: InvariantForm, b: InvariantForm) -> InvariantForm:
    """Determinant-convention wedge: ``(e^1 ^ e^2)(e_1, e_2) = 1``."""
    p, q = a.degree, b.degree
    out: dict = {}
    for ka, va in a.comps.items():
        for kb, vb in b.comps.items():
            sign, key = _sort_sign(ka + kb)
            if sign:
                out[key] = out.get(key, ZERO) + va * vb * sign
    return InvariantForm(a.dim, p + q, out)


def ce_differential(L: LieAlgebraData, w: InvariantForm) -> InvariantForm:
    k = w.degree
    out = {}
    for idx in itertools.combinations(range(L.dim), k + 1):
        total = ZERO
        for a, b in itertools.combinations(range(k + 1), 2):
            rest = idx[:a] + idx[a + 1: b] + idx[b + 1:]
            for m, c in L.basis_bracket(idx[a], idx[b]).items():
                val = w(m, *rest)
                if val:
                    total = total + c * val * (-1) ** (a + b)
        if total:
            out[idx] = total
    return InvariantForm(L.dim, k + 1, out)


def apply_J(J: np.ndarray, w: InvariantForm) -> InvariantForm:
    """``(J w)(X_1..X_k) = (-1)^k w(J X_1, .., J X_k)``; column i of J is ``J e_i``."""
    k = w.degree
    if k == 0:
        return w
    cols = [[(j, J[j, i]) for j in range(w.dim) if J[j, i]] for i in range(w.dim)]
    out = {}
    for idx in itertools.combinations(range(w.dim), k):
        total = ZERO
        for choice in itertools.product(*(cols[i] for i in idx)):
            val = w(*(j for j, _ in choice))
            if val:
                coeff = ONE
                for _, c in choice:
                    coeff = coeff * c
                total = total + val * coeff
        if total:
            out[idx] = total if k % 2 == 0 else -total
    return InvariantForm(w.dim, k, out)


def d_c(L: LieAlgebraData, J: np.ndarray, w: InvariantForm) -> InvariantForm:
    """``(-1)^k J d J w``."""
    out = apply_J(J, ce_differential(L, apply_J(J, w)))
    return -out if w.degree % 2 else out


def kahler_form(g: np.ndarray, J: np.ndarray) -> InvariantForm:
    """``F(X, Y) = g(JX, Y)``."""
    return InvariantForm.from_tensor(J.T.dot(g))


def check_complex_structure(J: np.ndarray) -> bool:
    n = J.shape[0]
    return ex.is_zero(J.dot(J) + ex.eye(n))


def quaternion_defect(I1, I2, I3) -> bool:
    n = I1.shape[0]
    e = ex.eye(n)
    return not all(
        ex.is_zero(t)
        for t in (I1.dot(I1) + e, I2.dot(I2) + e, I3.dot(I3) + e, I1.dot(I2) - I3, I1.dot(I2) + I2.dot(I1))
    )


@dataclass
class IntegrabilityVerdict:
    nijenhuis_zero: bool
    abelian: bool
    worst: Exact


def integrability_check_invariant(L: LieAlgebraData, J: np.ndarray) -> IntegrabilityVerdict:
    """N(X,Y) = 1/4([X,Y] + J[JX,Y] + J[X,JY] - [JX,JY]) on all basis pairs."""
    if not check_complex_structure(J):
        raise ValueError("J does not square to -1")
    worst, abelian = ZERO, True
    for i, j in itertools.combinations(range(L.dim), 2):
        X, Y = unit(L.dim, i), unit(L.dim, j)
        JX, JY = J[:, i], J[:, j]
        n_vec = (
            L.bracket(X, Y) + J.dot(L.bracket(JX, Y)) + J.dot(L.bracket(X, JY)) - L.bracket(JX, JY)
        ) * Exact(Fraction(1, 4))
        m = ex.max_abs(n_vec)
        if abs(complex(m)) > abs(complex(worst)):
            worst = m
        if not ex.is_zero(L.bracket(JX, JY) - L.bracket(X, Y)):
            abelian = False
    return IntegrabilityVerdict(not worst, abelian, worst)


# -- hyper-Hermitian data on an algebra ------------------------------------------
@dataclass
class InvariantHKT:
    """Algebra, three complex structures and a metric (as exact matrices)."""

    algebra: LieAlgebraData
    I: tuple
    g: np.ndarray
    labels: dict = field(default_factory=dict)

    def F(self, a: int) -> InvariantForm:
        return kahler_form(self.g, self.I[a - 1])

    def torsion_forms(self) -> list[InvariantForm]:
        return [d_c(self.algebra, self.I[a - 1], self.F(a)) for a in (1, 2, 3)]

    def hkt_identity(self) -> tuple[bool, Exact]:
        t1, t2, t3 = self.torsion_forms()
        r = max((t1 - t2).max_entry(), (t2 - t3).max_entry(), key=lambda v: abs(complex(v)))
        return not r, r

    def hermitian(self) -> bool:
        return all(ex.is_zero(J.T.dot(self.g).dot(J) - self.g) for J in self.I)

    def quaternionic(self) -> bool:
        return not quaternion_defect(*self.I)


def holomorphic_basis(J: np.ndarray) -> list[InvariantForm]:
    """``e^k + i J e^k`` spans the (1,0)-forms (``J theta = -i theta``)."""
    n = J.shape[0]
    forms = []
    for k in range(n):
        e = InvariantForm.covector(n, k)
        forms.append(e + apply_J(J, e) * ex.I)
    # keep an independent subset
    basis, rows = [], []
    for f in forms:
        vec = [f(i) for i in range(n)]
        trial = ex.array(rows + [vec])
        if ex.rank(trial.T) > len(rows):
            rows.append(vec)
            basis.append(f)
    return basis


def type_11_defect(J: np.ndarray, w: InvariantForm) -> InvariantForm:
    """Zero iff the 2-form is of type (1,1): ``J w - w``."""
    return apply_J(J, w) - w


def del_operator(L: LieAlgebraData, J: np.ndarray, w: InvariantForm) -> InvariantForm:
    """``1/2 (d + i d^c)``."""
    return (ce_differential(L, w) + d_c(L, J, w) * ex.I) * Exact(Fraction(1, 2))


def torsion_from_bracket(L: LieAlgebraData, Bhat: np.ndarray) -> np.ndarray:
    """``c_ijk = -Bhat([e_i, e_j], e_k)`` as a full tensor."""
    C = L.structure_constants()
    n = L.dim
    c = ex.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                c[i, j, k] = -sum((C[i, j, m] * Bhat[m, k] for m in range(n) if C[i, j, m]), ZERO)
    return c


def totally_antisymmetric(T: np.ndarray) -> bool:
    return ex.is_zero(T + np.transpose(T, (1, 0, 2))) and ex.is_zero(T + np.transpose(T, (0, 2, 1)))


@dataclass
class TorsionVerdict:
    antisymmetric: bool
    kappa: Exact | None
    constant: bool


def group_torsion_check(S: InvariantHKT, Bhat: np.ndarray) -> TorsionVerdict:
    """Antisymmetry of ``-Bhat([X,Y],Z)`` and the constant ``kappa`` with ``-1/2 d_a F_a = kappa c``."""
    c_t = torsion_from_bracket(S.algebra, Bhat)
    anti = totally_antisymmetric(c_t)
    c = InvariantForm.from_tensor(c_t)
    t = S.torsion_forms()[0] * Exact(Fraction(-1, 2))
    keys = set(c.comps) | set(t.comps)
    if not keys:
        return TorsionVerdict(anti, None, True)
    ratios = set()
    for key in keys:
        cv, tv = c.comps.get(key, ZERO), t.comps.get(key, ZERO)
        if not cv:
            return TorsionVerdict(anti, None, False)
        ratios.add(tv / cv)
    kappa = next(iter(ratios))
    return TorsionVerdict(anti, kappa, len(ratios) == 1)


def dd_vanishes(L: LieAlgebraData, max_degree: int = 2) -> bool:
    """True when d(d w) vanishes on every basis form up to ``max_degree``."""
    for k in range(1, max_degree + 1):
        for idx in itertools.combinations(range(L.dim), k):
            w = InvariantForm(L.dim, k, {idx: ONE})
            if not ce_differential(L, ce_differential(L, w)).is_zero():
                return False
    return True
