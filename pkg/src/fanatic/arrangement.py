"""Representation spaces, the subspace L(alpha), and its invariant arrangement.

The ambient space is the (m-1) x n matrix space with coordinates flattened
row-major; the test space W is the subspace where every row sums to zero.
The dihedral group acts by permuting columns (cyclic shift and reversal).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exactlin import RMatrix, Subspace, forms_of, intersect, kernel
from .qgroup import (
    DElement,
    GroupSpec,
    QElement,
    d_elements,
    d_inverse,
    d_mul,
    theta_fiber,
)


@dataclass(frozen=True)
class RepSpec:
    """n columns (fan resolution), m measures; ambient dim is (m-1)*n."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 2:
            raise ValueError("need n >= 1 and m >= 2")

    @property
    def rows(self) -> int:
        return self.m - 1

    @property
    def mat_dim(self) -> int:
        return self.rows * self.n

    def coord(self, r: int, c: int) -> int:
        return r * self.n + c % self.n

    @property
    def group(self) -> GroupSpec:
        return GroupSpec(self.n)


@dataclass(frozen=True)
class AlphaVector:
    """alpha = (a_1/n, ..., a_k/n) with positive integer numerators."""

    numerators: tuple[int, ...]
    n: int

    def __post_init__(self):
        if any(a < 1 for a in self.numerators):
            raise ValueError("all alpha numerators must be >= 1")
        if sum(self.numerators) != self.n:
            raise ValueError("alpha numerators must sum to n")

    @property
    def k(self) -> int:
        return len(self.numerators)

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.n) for a in self.numerators)


@lru_cache(maxsize=None)
def action_matrix(g: DElement, spec: RepSpec) -> RMatrix:
    """Permutation matrix realizing g = E^a J^b on the flattened matrix space.

    E shifts columns cyclically ((Ex)_c = x_{c+1}), J reverses them; the
    (m-1)-dimensional fiber over each column is carried along untouched.
    """
    n, rows = spec.n, spec.rows
    a, b = g.e_exp, g.j_flag
    mat = [[0] * spec.mat_dim for _ in range(spec.mat_dim)]
    for c in range(n):
        src = (n - 1 - (c + a)) % n if b else (c + a) % n
        for r in range(rows):
            mat[spec.coord(r, c)][spec.coord(r, src)] = 1
    return RMatrix(mat)


def transform_subspace(s: Subspace, g: DElement, spec: RepSpec) -> Subspace:
    m = action_matrix(g, spec)
    rows = [m.apply(row) for row in s.basis.data]
    return Subspace.from_rows(spec.mat_dim, rows)


def transform_form(form: tuple, g: DElement, spec: RepSpec) -> tuple:
    """Pull a linear functional back along g^{-1}: form -> form o g^{-1}."""
    m = action_matrix(d_inverse(g, spec.group), spec)
    # row vector times matrix
    return tuple(
        sum(form[i] * m.entry(i, j) for i in range(spec.mat_dim))
        for j in range(spec.mat_dim)
    )


@lru_cache(maxsize=None)
def w_subspace(spec: RepSpec) -> Subspace:
    """W = matrices whose rows each sum to zero; dim (m-1)(n-1)."""
    forms = []
    for r in range(spec.rows):
        row = [0] * spec.mat_dim
        for c in range(spec.n):
            row[spec.coord(r, c)] = 1
        forms.append(row)
    return kernel(RMatrix(forms))


def z_forms(alpha: AlphaVector, spec: RepSpec) -> list[tuple]:
    """Scalar block-sum functionals: for each block of alpha and each row."""
    if alpha.n != spec.n:
        raise ValueError("alpha denominator does not match spec.n")
    out = []
    start = 0
    for a in alpha.numerators:
        for r in range(spec.rows):
            row = [0] * spec.mat_dim
            for c in range(start, start + a):
                row[spec.coord(r, c)] = 1
            out.append(tuple(row))
        start += a
    return out


def build_L_alpha(alpha: AlphaVector, spec: RepSpec) -> Subspace:
    """Kernel of the block-sum forms inside W; codim (k-1)(m-1) in W."""
    w = w_subspace(spec)
    stacked = RMatrix.vstack(forms_of(w), RMatrix(z_forms(alpha, spec)))
    return kernel(stacked)


def oriented_form_pair(alpha: AlphaVector, spec: RepSpec) -> tuple[tuple, tuple]:
    """Ordered pair of scalar forms cutting L(alpha) out of W (codim-2 case)."""
    w = w_subspace(spec)
    all_forms = z_forms(alpha, spec)
    chosen: list[tuple] = []
    current = w
    for f in all_forms:
        cut = intersect(current, kernel(RMatrix([f])))
        if cut.dim < current.dim:
            chosen.append(f)
            current = cut
        if len(chosen) == 2:
            break
    if len(chosen) != 2 or current.dim != w.dim - 2:
        raise ValueError("L(alpha) does not have codimension 2 in W")
    return chosen[0], chosen[1]


@dataclass(frozen=True, eq=False)
class InvArrangement:
    spec: RepSpec
    alpha: AlphaVector
    subspaces: tuple[Subspace, ...]
    maximal: tuple[int, ...]  # indices into subspaces
    poset: tuple[tuple[int, int], ...]  # (i, j) meaning subspaces[i] < subspaces[j]
    stabilizers_d: tuple[tuple[DElement, ...], ...]  # per maximal subspace
    stabilizers_q: tuple[tuple[QElement, ...], ...]
    oriented_forms: tuple[tuple[tuple, tuple], ...]  # per maximal subspace
    coset_reps: tuple[DElement, ...]  # g with g L(alpha) = maximal subspace
    closure_depth: int

    def max_subspaces(self) -> tuple[Subspace, ...]:
        return tuple(self.subspaces[i] for i in self.maximal)

    def maximal_index_of(self, s: Subspace) -> int:
        for k, i in enumerate(self.maximal):
            if self.subspaces[i] == s:
                return k
        raise KeyError("not a maximal subspace of this arrangement")

    @lru_cache(maxsize=None)
    def maximal_permutation(self, g: DElement) -> tuple[int, ...]:
        """How g permutes the maximal subspaces (by maximal-list position)."""
        out = []
        for i in self.maximal:
            img = transform_subspace(self.subspaces[i], g, self.spec)
            out.append(self.maximal_index_of(img))
        return tuple(out)


def build_arrangement(
    alpha: AlphaVector, spec: RepSpec, depth: int | None = 2
) -> InvArrangement:
    """Orbit of L(alpha) under D_2n, closed under pairwise intersections.

    depth bounds the closure: depth=1 is the orbit alone, depth=2 adds
    pairwise intersections of orbit members, depth=None runs to a fixpoint
    (exponential in n for the 2-fan arrangement; only sensible for tiny n).
    """
    gspec = spec.group
    L = build_L_alpha(alpha, spec)
    base_forms = oriented_form_pair(alpha, spec) if L.dim == w_subspace(spec).dim - 2 else None

    orbit: list[Subspace] = []
    reps: list[DElement] = []
    for g in d_elements(gspec):
        img = transform_subspace(L, g, spec)
        if img not in orbit:
            orbit.append(img)
            reps.append(g)

    subspaces = list(orbit)
    frontier = list(orbit)
    level = 1
    while (depth is None or level < depth) and frontier:
        new: list[Subspace] = []
        for s in frontier:
            for t in subspaces:
                if s == t:
                    continue
                cut = intersect(s, t)
                if cut.dim > 0 and cut not in subspaces and cut not in new:
                    new.append(cut)
        subspaces.extend(new)
        frontier = new
        level += 1

    max_dim = max(s.dim for s in orbit)
    maximal = tuple(i for i, s in enumerate(subspaces) if s.dim == max_dim)

    poset = tuple(
        (i, j)
        for i in range(len(subspaces))
        for j in range(len(subspaces))
        if i != j and subspaces[j].contains_subspace(subspaces[i])
    )

    stabs_d, stabs_q, forms, coset_reps = [], [], [], []
    for i in maximal:
        s = subspaces[i]
        stab = tuple(
            g for g in d_elements(gspec) if transform_subspace(s, g, spec) == s
        )
        stabs_d.append(stab)
        pulled = []
        for g in stab:
            pulled.extend(theta_fiber(g, gspec))
        stabs_q.append(tuple(pulled))
        rep = reps[orbit.index(s)] if s in orbit else None
        coset_reps.append(rep)
        if base_forms is not None and rep is not None:
            forms.append(
                (
                    transform_form(base_forms[0], rep, spec),
                    transform_form(base_forms[1], rep, spec),
                )
            )
        else:
            forms.append(None)

    return InvArrangement(
        spec=spec,
        alpha=alpha,
        subspaces=tuple(subspaces),
        maximal=maximal,
        poset=poset,
        stabilizers_d=tuple(stabs_d),
        stabilizers_q=tuple(stabs_q),
        oriented_forms=tuple(forms),
        coset_reps=tuple(coset_reps),
        closure_depth=depth,
    )


@dataclass(frozen=True)
class ConditionReport:
    a1: bool
    a2: bool
    a3: bool
    witnesses: tuple[str, ...] = ()

    @property
    def all_pass(self) -> bool:
        return self.a1 and self.a2 and self.a3


def _restriction_det(g: DElement, s: Subspace, spec: RepSpec) -> Fraction:
    """det of g restricted to an invariant subspace s, in its rref basis."""
    imgs = [action_matrix(g, spec).apply(row) for row in s.basis.data]
    coords = [s.coords(v) for v in imgs]
    return RMatrix(coords).det()


def check_conditions(arr: InvArrangement) -> ConditionReport:
    """Check A1 (codim structure), A2 (orientation on W), A3 (stabilizers)."""
    spec = arr.spec
    w = w_subspace(spec)
    witnesses: list[str] = []

    maxs = arr.max_subspaces()
    a1 = all(s.dim == w.dim - 2 for s in maxs)
    if not a1:
        witnesses.append("a1: a maximal subspace is not codim 2 in W")
    for i in range(len(maxs)):
        for j in range(i + 1, len(maxs)):
            cut = intersect(maxs[i], maxs[j])
            if cut.dim > w.dim - 4:
                a1 = False
                witnesses.append(f"a1: dim(P{i} ^ P{j}) = {cut.dim} > dim W - 4")

    a2 = True
    for g in d_elements(spec.group):
        d = _restriction_det(g, w, spec)
        if d != 1:
            a2 = False
            witnesses.append(f"a2: det({g}|W) = {d}")

    a3 = True
    for k, i in enumerate(arr.maximal):
        s = arr.subspaces[i]
        for g in arr.stabilizers_d[k]:
            d = _restriction_det(g, s, spec)
            if d <= 0:
                a3 = False
                witnesses.append(f"a3: det({g}|P{k}) = {d}")

    return ConditionReport(a1, a2, a3, tuple(witnesses))


@dataclass(frozen=True)
class PropTwoReport:
    n: int
    p: int
    ec_equals_ce: bool
    cj_equals_jec: bool
    det_c: Fraction

    @property
    def nonsingular(self) -> bool:
        return self.det_c != 0

    @property
    def identities_hold(self) -> bool:
        return self.ec_equals_ce and self.cj_equals_jec


def verify_prop_two(n: int, p: int) -> PropTwoReport:
    """Exact check of the window-sum intertwiner between 2-fan arrangements.

    C sends v to the matrix whose column i is v_{i+1} + ... + v_{i+p}; it must
    commute with the cyclic shift and conjugate the reversal to J E^{-p-1}.
    """
    if not (1 <= p <= n - 1):
        raise ValueError("require 1 <= p <= n-1")
    spec = RepSpec(n, 3)  # 2 rows, matching the 2-by-n matrix space
    gspec = spec.group
    dim = spec.mat_dim
    c_mat = [[0] * dim for _ in range(dim)]
    for col in range(n):
        for s in range(1, p + 1):
            for r in range(spec.rows):
                c_mat[spec.coord(r, col)][spec.coord(r, col + s)] += 1
    C = RMatrix(c_mat)
    E = action_matrix(DElement(1, 0), spec)
    J = action_matrix(DElement(0, 1), spec)
    JEpow = action_matrix(d_mul(DElement(0, 1), DElement((-p - 1) % n, 0), gspec), spec)
    return PropTwoReport(
        n=n,
        p=p,
        ec_equals_ce=E * C == C * E,
        cj_equals_jec=C * J == JEpow * C,
        det_c=C.det(),
    )
