"""Equivariant simplicial test maps, their singular sets, and invariants.

Two constructions are supported:

  FAN2: vertex images are 2 x n matrices whose columns are vertices of a
        regular n-gon.  Columns are stored as n-gon *indices* (mod n), which
        keeps every topological decision in integer arithmetic: the test
        "0 strictly inside conv{v_a, v_b, v_c}" for n-gon vertices is pure
        arc combinatorics (all three cyclic gaps < n/2; for odd n no
        boundary case exists).  Numeric coordinates enter only as certified
        approximations attached to crossings.

  FAN3: vertex images are exact rational vectors in the row-sum-zero space,
        built from the regular simplex; every crossing is solved exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arrangement import InvArrangement, RepSpec, w_subspace
from .exactlin import RMatrix
from .joinsphere import CONTRA, COROT, JoinComplex, TetraLabel, Triangle, Vertex
from .qgroup import (
    DElement,
    GroupSpec,
    QElement,
    q_elements,
    q_identity,
    q_inverse,
    q_mul,
    quotient_theta,
)

FAN2 = "FAN2"
FAN3 = "FAN3"


class TransversalityError(RuntimeError):
    """A crossing is degenerate, on a boundary, or hits two subspaces."""


class EquivarianceError(RuntimeError):
    """The group action does not behave as the construction requires."""


class VertexMap:
    """Simplicial map on the vertices of the join complex.

    For FAN2 the image of a vertex is a tuple of n column indices into the
    regular n-gon {v_0, ..., v_{n-1}}; for FAN3 it is an exact rational
    n-vector.
    """

    def __init__(self, case, n, convention, images, v0=None):
        self.case = case
        self.n = n
        self.convention = convention
        self.images = images  # Vertex -> tuple
        self.v0 = v0

    def image(self, v: Vertex):
        return self.images[v]

    def d_act_image(self, d: DElement, img: tuple) -> tuple:
        """Column permutation action of D_2n on an image tuple."""
        n = self.n
        a, b = d.e_exp, d.j_flag
        out = []
        for c in range(n):
            src = (n - 1 - (c + a)) % n if b else (c + a) % n
            out.append(img[src])
        return tuple(out)

    # FAN2 numeric helpers ------------------------------------------------

    def ngon_point(self, idx: int) -> tuple[float, float]:
        x0, y0 = float(self.v0[0]), float(self.v0[1])
        ang = 2.0 * math.pi * (idx % self.n) / self.n
        ca, sa = math.cos(ang), math.sin(ang)
        return (ca * x0 - sa * y0, sa * x0 + ca * y0)

    def flat_image(self, v: Vertex):
        """Image as a flattened row-major (m-1) x n vector.

        Exact Fractions for FAN3; floats for FAN2.
        """
        img = self.images[v]
        if self.case == FAN3:
            return img
        flat = [0.0] * (2 * self.n)
        for c, idx in enumerate(img):
            x, y = self.ngon_point(idx)
            flat[c] = x
            flat[self.n + c] = y
        return tuple(flat)


def build_map_fan2(n: int, v0=(1, 0)) -> VertexMap:
    """The 2-fan test map: f(a_p) has column i = v_{p+i}, f(b_q) reversed."""
    if n % 2 == 0:
        raise ValueError("the 2-fan construction requires odd n")
    v0 = (Fraction(v0[0]), Fraction(v0[1]))
    if v0 == (0, 0):
        raise ValueError("v0 must be nonzero")
    images = {}
    for p in range(2 * n):
        images[Vertex("A", p)] = tuple((p + c) % n for c in range(n))
        images[Vertex("B", p)] = tuple((p + n - 1 - c) % n for c in range(n))
    return VertexMap(FAN2, n, CONTRA, images, v0=v0)


def build_map_fan3(n: int) -> VertexMap:
    """The 3-fan test map: a_p and b_q both go to a simplex vertex.

    Images are indexed so that the shift generator lowers simplex indices,
    matching the convention where the cyclic action rotates coordinates
    forward; the reflection identity J v_p = v_{-p-1} then holds exactly.
    """
    if n % 2 == 0:
        raise ValueError("the 3-fan construction requires odd n")
    vs = []
    for i in range(n):
        vs.append(tuple(Fraction(1) - Fraction(1, n) if c == i else -Fraction(1, n)
                        for c in range(n)))
    images = {}
    for p in range(2 * n):
        images[Vertex("A", p)] = vs[-p % n]
        images[Vertex("B", p)] = vs[-p % n]
    return VertexMap(FAN3, n, COROT, images)


def check_equivariance(vmap: VertexMap, complex: JoinComplex) -> bool:
    """image(g v) == theta(g) . image(v) for the generators, all vertices."""
    if complex.n != vmap.n or complex.convention != vmap.convention:
        raise ValueError("map and complex conventions do not match")
    gspec = complex.group
    for g in (QElement(1, 0), QElement(0, 1)):
        d = quotient_theta(g, gspec)
        for v in complex.vertices():
            if vmap.images[complex.act_vertex(g, v)] != vmap.d_act_image(
                d, vmap.images[v]
            ):
                return False
    return True


@dataclass(frozen=True)
class Crossing:
    triangle: Triangle
    subspace_id: int  # position in the arrangement's maximal list
    barycentric: tuple[Fraction, Fraction, Fraction]

    @property
    def key(self):
        return (self.triangle, self.subspace_id)


# ---------------------------------------------------------------------------
# goodness / crossing extraction


def _arc_interior(indices, n: int) -> bool:
    """0 strictly inside the hull of the n-gon vertices with these indices."""
    s = sorted(i % n for i in indices)
    if len(set(s)) != 3:
        return False
    gaps = (s[1] - s[0], s[2] - s[1], n - (s[2] - s[0]))
    return all(2 * g < n for g in gaps)


def _column_of_subspace(sub, spec: RepSpec):
    """Which column block a 2-fan maximal subspace kills, or None."""
    for c in range(spec.n):
        coords = [spec.coord(r, c) for r in range(spec.rows)]
        if all(row[i] == 0 for row in sub.basis.data for i in coords):
            if sub.dim == w_subspace(spec).dim - 2:
                return c
    return None


def _fan2_triangle_column_indices(tri: Triangle, c: int, n: int):
    """n-gon indices of the three vertex images in column c (0-based)."""
    kind, p, q = tri
    if kind == "A":
        return ((p + c) % n, (p + 1 + c) % n, (q + n - 1 - c) % n)
    return ((p + c) % n, (q + n - 1 - c) % n, (q + n - c) % n)


def _solve_affine_exact(vals):
    """Solve sum l_i (g1_i, g2_i) = 0, sum l_i = 1 for rational form values.

    Returns ('unique', (l1,l2,l3)) or ('degenerate', None); the degenerate
    branch means the 3x3 system is singular and the caller must decide
    whether the closed image hull contains 0.
    """
    (g11, g12, g13), (g21, g22, g23) = vals
    det = (
        g11 * (g22 - g23)
        - g12 * (g21 - g23)
        + g13 * (g21 - g22)
    )
    if det == 0:
        return "degenerate", None
    l1 = (g12 * g23 - g13 * g22) / det
    l2 = (g13 * g21 - g11 * g23) / det
    l3 = (g11 * g22 - g12 * g21) / det
    return "unique", (l1, l2, l3)


def _hull_contains_origin_2d(pts) -> bool:
    """Exact test: 0 in the closed convex hull of three rational 2D points."""

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    o = (Fraction(0), Fraction(0))
    p1, p2, p3 = pts
    d1 = cross(o, p1, p2)
    d2 = cross(o, p2, p3)
    d3 = cross(o, p3, p1)
    area = cross(p1, p2, p3)
    if area != 0:
        return (d1 >= 0 and d2 >= 0 and d3 >= 0) or (d1 <= 0 and d2 <= 0 and d3 <= 0)
    # collinear: 0 on one of the segments?
    for a, b in ((p1, p2), (p2, p3), (p1, p3)):
        if cross(o, a, b) == 0:
            if min(a[0], b[0]) <= 0 <= max(a[0], b[0]) and min(a[1], b[1]) <= 0 <= max(a[1], b[1]):
                return True
    return False


def _fan2_barycentric(vmap: VertexMap, indices) -> tuple[Fraction, ...]:
    """Certified rational approximation of the interior crossing point."""
    pts = [vmap.ngon_point(i) for i in indices]
    det = (
        pts[0][0] * (pts[1][1] - pts[2][1])
        - pts[1][0] * (pts[0][1] - pts[2][1])
        + pts[2][0] * (pts[0][1] - pts[1][1])
    )
    if abs(det) < 1e-9:
        raise TransversalityError("numerically degenerate n-gon triangle")
    l1 = (pts[1][0] * pts[2][1] - pts[2][0] * pts[1][1]) / det
    l2 = (pts[2][0] * pts[0][1] - pts[0][0] * pts[2][1]) / det
    l3 = (pts[0][0] * pts[1][1] - pts[1][0] * pts[0][1]) / det
    if min(l1, l2, l3) < 1e-9:
        raise TransversalityError("crossing not certifiably interior")
    fr = [Fraction(x).limit_denominator(10**12) for x in (l1, l2, l3)]
    total = sum(fr)
    fr = [x / total for x in fr]
    if min(fr) <= 0:
        raise TransversalityError("rational certification failed")
    return tuple(fr)


def form_values(vmap: VertexMap, arr: InvArrangement):
    """Per maximal subspace, the two oriented form values at every vertex.

    Exact Fractions for FAN3, floats for FAN2.
    """
    n = vmap.n
    verts = [Vertex(f, i) for f in ("A", "B") for i in range(2 * n)]
    flat = {v: vmap.flat_image(v) for v in verts}
    table = {}
    for k, forms in enumerate(arr.oriented_forms):
        g1, g2 = forms
        if vmap.case == FAN2:
            g1 = tuple(float(x) for x in g1)
            g2 = tuple(float(x) for x in g2)
        for v in verts:
            fv = flat[v]
            table[(k, v)] = (
                sum(a * b for a, b in zip(g1, fv)),
                sum(a * b for a, b in zip(g2, fv)),
            )
    return table


def find_good_triangles(
    vmap: VertexMap, complex: JoinComplex, arr: InvArrangement
) -> list[Crossing]:
    """All interior crossings of mixed triangles with maximal subspaces.

    Goodness is decided exactly: by arc combinatorics in the FAN2 case and
    by exact rational affine solves in the FAN3 case.  Boundary or
    non-unique solutions raise TransversalityError.
    """
    if complex.n != vmap.n:
        raise ValueError("map and complex disagree on n")
    n = vmap.n
    crossings: list[Crossing] = []

    if vmap.case == FAN2:
        col_to_k = {}
        for k, i in enumerate(arr.maximal):
            c = _column_of_subspace(arr.subspaces[i], arr.spec)
            if c is None:
                raise ValueError("2-fan arrangement subspace is not a column kernel")
            col_to_k[c] = k
        for tri in complex.mixed_triangles():
            hits = []
            for c in range(n):
                if _arc_interior(_fan2_triangle_column_indices(tri, c, n), n):
                    hits.append(c)
            if len(hits) > 1:
                raise TransversalityError(
                    f"triangle {tri} crosses {len(hits)} maximal subspaces"
                )
            for c in hits:
                bary = _fan2_barycentric(
                    vmap, _fan2_triangle_column_indices(tri, c, n)
                )
                crossings.append(Crossing(tri, col_to_k[c], bary))
        return crossings

    # FAN3: exact affine solves against every maximal subspace
    table = form_values(vmap, arr)
    nmax = len(arr.maximal)
    for tri in complex.mixed_triangles():
        vs = complex.triangle_vertices(tri)
        tri_hits = []
        for k in range(nmax):
            g1 = tuple(table[(k, v)][0] for v in vs)
            g2 = tuple(table[(k, v)][1] for v in vs)
            status, lam = _solve_affine_exact((g1, g2))
            if status == "degenerate":
                pts = [(g1[i], g2[i]) for i in range(3)]
                if _hull_contains_origin_2d(pts):
                    raise TransversalityError(
                        f"degenerate crossing of {tri} with subspace {k}"
                    )
                continue
            if min(lam) > 0:
                tri_hits.append(Crossing(tri, k, lam))
            elif min(lam) == 0 and all(x >= 0 for x in lam):
                raise TransversalityError(
                    f"boundary crossing of {tri} with subspace {k}"
                )
        # no image point may lie on two maximal subspaces
        for cr in tri_hits:
            for k in range(nmax):
                if k == cr.subspace_id:
                    continue
                vals = [table[(k, v)] for v in vs]
                p1 = sum(l * v[0] for l, v in zip(cr.barycentric, vals))
                p2 = sum(l * v[1] for l, v in zip(cr.barycentric, vals))
                if p1 == 0 and p2 == 0:
                    raise TransversalityError(
                        f"crossing of {tri} lies on two maximal subspaces"
                    )
        crossings.extend(tri_hits)
    return crossings


# ---------------------------------------------------------------------------
# tracing


@dataclass
class SingularSet:
    """Oriented components of the singular set with their group data.

    orientation_equivariant records whether the group action carries the
    chosen component directions onto each other; when it is False the
    bordism class is not defined (the equivariant orientation needed by
    the bordism argument does not exist for this arrangement).
    """

    case: str
    group: GroupSpec
    components: tuple[tuple[Crossing, ...], ...]
    stabilizers: tuple[tuple[QElement, ...], ...]
    monodromies: tuple[QElement, ...]
    orbits: tuple[tuple[int, ...], ...]
    orientation_equivariant: bool = True

    @property
    def crossings(self):
        return [c for comp in self.components for c in comp]

    def component_subspace(self, i: int) -> int:
        return self.components[i][0].subspace_id

    def components_of_subspace(self, k: int) -> list[int]:
        return [i for i in range(len(self.components)) if self.component_subspace(i) == k]


def _validate_crossings(crossings, vmap, arr, complex):
    table = form_values(vmap, arr)
    tol = 1e-7
    for cr in crossings:
        lam = cr.barycentric
        if len(lam) != 3 or any(x <= 0 for x in lam) or sum(lam) != 1:
            raise TransversalityError(f"invalid barycentric data on {cr.triangle}")
        vs = complex.triangle_vertices(cr.triangle)
        vals = [table[(cr.subspace_id, v)] for v in vs]
        p1 = sum(Fraction(l) * Fraction(v[0]) if vmap.case == FAN3 else float(l) * v[0]
                 for l, v in zip(lam, vals))
        p2 = sum(Fraction(l) * Fraction(v[1]) if vmap.case == FAN3 else float(l) * v[1]
                 for l, v in zip(lam, vals))
        if vmap.case == FAN3:
            if p1 != 0 or p2 != 0:
                raise TransversalityError(
                    f"crossing on {cr.triangle} does not lie on its subspace"
                )
        elif abs(p1) > tol or abs(p2) > tol:
            raise TransversalityError(
                f"crossing on {cr.triangle} fails the residual check"
            )


def _det3(rows):
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def trace_components(
    crossings, complex: JoinComplex, vmap: VertexMap, arr: InvArrangement
) -> SingularSet:
    """Assemble crossings into oriented circles and compute group data.

    Within each positively oriented tetrahedron the segment through its two
    crossings of a subspace S is directed so that det[dg1, dg2, t] > 0 for
    the transported ordered defining forms (g1, g2) of S.
    """
    gspec = complex.group
    _validate_crossings(crossings, vmap, arr, complex)
    table = form_values(vmap, arr)
    by_key = {cr.key: cr for cr in crossings}
    if len(by_key) != len(crossings):
        raise TransversalityError("duplicate crossings")

    buckets: dict[tuple, list[Crossing]] = {}
    for cr in crossings:
        for tet in complex.triangle_tetra_neighbors(cr.triangle):
            buckets.setdefault((tet, cr.subspace_id), []).append(cr)

    nxt: dict[tuple, tuple] = {}
    prv: dict[tuple, tuple] = {}
    for (tet, k), pair in buckets.items():
        if len(pair) != 2:
            raise TransversalityError(
                f"tetrahedron {tet} meets subspace {k} in {len(pair)} crossings"
            )
        c1, c2 = pair
        tet_vs = complex.tetra_vertices(tet)

        def mu(cr):
            vs = complex.triangle_vertices(cr.triangle)
            out = [Fraction(0)] * 4
            for l, v in zip(cr.barycentric, vs):
                out[tet_vs.index(v)] = l
            return out

        m1, m2 = mu(c1), mu(c2)
        g1 = [table[(k, v)][0] for v in tet_vs]
        g2 = [table[(k, v)][1] for v in tet_vs]
        if vmap.case == FAN2:
            m1 = [float(x) for x in m1]
            m2 = [float(x) for x in m2]
        rows = [
            [g1[i] - g1[0] for i in (1, 2, 3)],
            [g2[i] - g2[0] for i in (1, 2, 3)],
            [m2[i] - m1[i] for i in (1, 2, 3)],
        ]
        det = _det3(rows) * complex.orientation_sign(tet)
        if vmap.case == FAN2 and abs(det) < 1e-9:
            raise TransversalityError("orientation determinant not certifiable")
        if det == 0:
            raise TransversalityError("degenerate tangent in tetrahedron")
        src, dst = (c1, c2) if det > 0 else (c2, c1)
        if src.key in nxt or dst.key in prv:
            raise TransversalityError("inconsistent curve orientation")
        nxt[src.key] = dst.key
        prv[dst.key] = src.key

    for key in by_key:
        if key not in nxt or key not in prv:
            raise TransversalityError(f"open curve at crossing {key}")

    # extract directed cycles
    components: list[tuple[Crossing, ...]] = []
    position: dict[tuple, tuple[int, int]] = {}
    seen: set = set()
    for key in by_key:
        if key in seen:
            continue
        cycle = [key]
        seen.add(key)
        cur = nxt[key]
        while cur != key:
            cycle.append(cur)
            seen.add(cur)
            cur = nxt[cur]
        idx = len(components)
        components.append(tuple(by_key[k] for k in cycle))
        for pos, k in enumerate(cycle):
            position[k] = (idx, pos)

    # group action on crossings, components, and orientations
    def act_key(g: QElement, key):
        tri, k = key
        d = quotient_theta(g, gspec)
        return (complex.act_triangle(g, tri), arr.maximal_permutation(d)[k])

    ncomp = len(components)
    stabs: list[list[QElement]] = [[] for _ in range(ncomp)]
    shifts: list[dict] = [dict() for _ in range(ncomp)]
    perms: dict[QElement, tuple[int, ...]] = {}
    orientation_equivariant = True
    for g in q_elements(gspec):
        perm = [None] * ncomp
        for i, comp in enumerate(components):
            length = len(comp)
            img0 = act_key(g, comp[0].key)
            if img0 not in position:
                raise EquivarianceError("group action does not preserve crossings")
            j, pos0 = position[img0]
            if len(components[j]) != length:
                raise EquivarianceError("group action does not preserve components")
            j1, pos1 = position[act_key(g, comp[1 % length].key)]
            if j1 != j:
                raise EquivarianceError("group action does not preserve components")
            direction = (pos1 - pos0) % length
            if direction not in (1, length - 1):
                raise EquivarianceError("group action scrambles a component cycle")
            step = 1 if direction == 1 else -1
            for off in (length // 2, length - 1):
                jo, poso = position[act_key(g, comp[off].key)]
                if jo != j or (poso - pos0) % length != (step * off) % length:
                    raise EquivarianceError("group action scrambles a component cycle")
            if step == -1:
                orientation_equivariant = False
            perm[i] = j
            if j == i:
                if g != q_identity(gspec):
                    if step == -1:
                        raise EquivarianceError(
                            "a stabilizer element reverses its component, "
                            "contradicting freeness of the action"
                        )
                    if pos0 == 0:
                        raise EquivarianceError("stabilizer element has a fixed point")
                    stabs[i].append(g)
                    shifts[i][g] = pos0
        perms[g] = tuple(perm)

    monos: list[QElement] = []
    for i in range(ncomp):
        if not stabs[i]:
            monos.append(q_identity(gspec))
        else:
            g = min(stabs[i], key=lambda h: shifts[i][h])
            monos.append(g)

    # orbits of components
    orbit_of: dict[int, int] = {}
    orbits: list[list[int]] = []
    for i in range(ncomp):
        if i in orbit_of:
            continue
        orb = sorted({perms[g][i] for g in q_elements(gspec)})
        for j in orb:
            orbit_of[j] = len(orbits)
        orbits.append(orb)

    return SingularSet(
        case=vmap.case,
        group=gspec,
        components=tuple(components),
        stabilizers=tuple((q_identity(gspec),) + tuple(s) for s in stabs),
        monodromies=tuple(monos),
        orbits=tuple(tuple(o) for o in orbits),
        orientation_equivariant=orientation_equivariant,
    )


def reverse_orientation(s: SingularSet) -> SingularSet:
    """The same singular set with every component's direction flipped."""
    spec = s.group
    return SingularSet(
        case=s.case,
        group=spec,
        components=tuple(tuple(reversed(c)) for c in s.components),
        stabilizers=s.stabilizers,
        monodromies=tuple(q_inverse(m, spec) for m in s.monodromies),
        orbits=s.orbits,
    )


# ---------------------------------------------------------------------------
# label combinatorics (FAN2)


@dataclass(frozen=True)
class LabelReport:
    constants: tuple[tuple[int, int], ...]  # (subspace_id, c) with labels {c, c+n}
    structure_ok: bool
    counts_ok: bool
    gamma_separates: bool
    label_counts: tuple[tuple[int, int], ...]


def label_invariants(singular: SingularSet, n: int) -> LabelReport:
    """Structure of good tetra labels per subspace class in the 2-fan case.

    A label (p, q) is good for class k when the adjacent triangle pair
    a_p a_{p+1} b_q and a_{p+1} b_q b_{q+1} both carry crossings of class k.
    """
    m = 2 * n
    keys = {c.key for comp in singular.components for c in comp}
    classes = sorted({k for (_, k) in keys})
    constants = []
    counts = []
    structure_ok = True
    counts_ok = True
    residues_mod_n = []
    for k in classes:
        labels = []
        for p in range(m):
            for q in range(m):
                if (("A", p, q), k) in keys and (("B", (p + 1) % m, q), k) in keys:
                    labels.append((p, q))
        thetas = sorted({(q - p) % m for (p, q) in labels})
        counts.append((k, len(labels)))
        if len(labels) != 4 * n:
            counts_ok = False
        if len(thetas) == 2 and (thetas[1] - thetas[0]) % m == n:
            constants.append((k, thetas[0]))
            residues_mod_n.append(thetas[0] % n)
        else:
            structure_ok = False
            constants.append((k, -1))
    gamma_separates = (
        structure_ok
        and len(set(residues_mod_n)) == len(classes)
    )
    return LabelReport(
        constants=tuple(constants),
        structure_ok=structure_ok,
        counts_ok=counts_ok,
        gamma_separates=gamma_separates,
        label_counts=tuple(counts),
    )
