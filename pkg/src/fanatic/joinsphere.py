"""The simplicial 3-sphere built as the join of two 2n-gons.

Vertices are a_p and b_q (indices mod 2n); tetrahedra are
a_p a_{p+1} b_q b_{q+1}, labeled by (p, q).  Two vertex-action conventions
are supported:

  CONTRA:  j a_p = b_p            (so eps b_q = b_{q-1}, j b_q = a_{q+n})
  COROT:  j a_p = b_{n-p+1}      (so eps b_q = b_{q+1}, j b_q = a_{1-q})
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .qgroup import GroupSpec, QElement, q_elements

CONTRA = "CONTRA"
COROT = "COROT"


@dataclass(frozen=True)
class Vertex:
    family: str  # 'A' or 'B'
    index: int

    def __post_init__(self):
        if self.family not in ("A", "B"):
            raise ValueError("family must be 'A' or 'B'")


@dataclass(frozen=True)
class TetraLabel:
    p: int
    q: int


Triangle = tuple  # ('A', p, q) = a_p a_{p+1} b_q ; ('B', p, q) = a_p b_q b_{q+1}


class JoinComplex:
    """Immutable join triangulation with a coherent tetra orientation.

    The constant orientation sign +1 on the vertex order
    (a_p, a_{p+1}, b_q, b_{q+1}) is coherent: the two tetrahedra sharing a
    mixed triangle induce opposite orientations on it (verified in tests).
    """

    def __init__(self, n: int, convention: str = CONTRA):
        if n < 1:
            raise ValueError("n must be >= 1")
        if convention not in (CONTRA, COROT):
            raise ValueError("convention must be CONTRA or COROT")
        self.n = n
        self.convention = convention
        self.group = GroupSpec(n)

    # ---- basic combinatorics -------------------------------------------

    def _norm(self, i: int) -> int:
        return i % (2 * self.n)

    def vertices(self) -> list[Vertex]:
        m = 2 * self.n
        return [Vertex("A", i) for i in range(m)] + [Vertex("B", i) for i in range(m)]

    def tetra_labels(self) -> list[TetraLabel]:
        m = 2 * self.n
        return [TetraLabel(p, q) for p in range(m) for q in range(m)]

    def tetra_vertices(self, t: TetraLabel) -> tuple[Vertex, Vertex, Vertex, Vertex]:
        return (
            Vertex("A", self._norm(t.p)),
            Vertex("A", self._norm(t.p + 1)),
            Vertex("B", self._norm(t.q)),
            Vertex("B", self._norm(t.q + 1)),
        )

    def orientation_sign(self, t: TetraLabel) -> int:
        return 1

    def mixed_triangles(self) -> list[Triangle]:
        m = 2 * self.n
        out: list[Triangle] = []
        for p in range(m):
            for q in range(m):
                out.append(("A", p, q))
                out.append(("B", p, q))
        return out

    def triangle_vertices(self, tri: Triangle) -> tuple[Vertex, Vertex, Vertex]:
        kind, p, q = tri
        if kind == "A":
            return (
                Vertex("A", self._norm(p)),
                Vertex("A", self._norm(p + 1)),
                Vertex("B", self._norm(q)),
            )
        return (
            Vertex("A", self._norm(p)),
            Vertex("B", self._norm(q)),
            Vertex("B", self._norm(q + 1)),
        )

    def triangle_tetra_neighbors(self, tri: Triangle) -> tuple[TetraLabel, TetraLabel]:
        kind, p, q = tri
        p, q = self._norm(p), self._norm(q)
        if kind == "A":
            return (TetraLabel(p, self._norm(q - 1)), TetraLabel(p, q))
        return (TetraLabel(self._norm(p - 1), q), TetraLabel(p, q))

    def tetra_mixed_triangles(self, t: TetraLabel) -> list[Triangle]:
        p, q = self._norm(t.p), self._norm(t.q)
        return [
            ("A", p, q),
            ("A", p, self._norm(q + 1)),
            ("B", p, q),
            ("B", self._norm(p + 1), q),
        ]

    def edges(self) -> set[frozenset]:
        m = 2 * self.n
        out: set[frozenset] = set()
        for i in range(m):
            out.add(frozenset({Vertex("A", i), Vertex("A", self._norm(i + 1))}))
            out.add(frozenset({Vertex("B", i), Vertex("B", self._norm(i + 1))}))
            for j in range(m):
                out.add(frozenset({Vertex("A", i), Vertex("B", j)}))
        return out

    def euler_characteristic(self) -> int:
        v = len(self.vertices())
        e = len(self.edges())
        f = len(self.mixed_triangles())
        t = len(self.tetra_labels())
        return v - e + f - t

    # ---- group action ---------------------------------------------------

    def act_vertex(self, g: QElement, v: Vertex) -> Vertex:
        n = self.n
        out = v
        if g.j_flag:
            if self.convention == CONTRA:
                out = Vertex("B", out.index) if out.family == "A" else Vertex(
                    "A", self._norm(out.index + n)
                )
            else:
                out = (
                    Vertex("B", self._norm(n - out.index + 1))
                    if out.family == "A"
                    else Vertex("A", self._norm(1 - out.index))
                )
        a = g.eps_exp
        if a:
            if out.family == "A":
                out = Vertex("A", self._norm(out.index + a))
            elif self.convention == CONTRA:
                out = Vertex("B", self._norm(out.index - a))
            else:
                out = Vertex("B", self._norm(out.index + a))
        return out

    def act_on_label(self, g: QElement, t: TetraLabel) -> TetraLabel:
        imgs = [self.act_vertex(g, v) for v in self.tetra_vertices(t)]
        return self._label_from_vertices(imgs)

    def _label_from_vertices(self, vs) -> TetraLabel:
        m = 2 * self.n
        a_idx = sorted(v.index for v in vs if v.family == "A")
        b_idx = sorted(v.index for v in vs if v.family == "B")
        if len(a_idx) != 2 or len(b_idx) != 2:
            raise ValueError("not the image of a tetrahedron")

        def base(pair):
            x, y = pair
            if (x + 1) % m == y:
                return x
            if (y + 1) % m == x:
                return y
            raise ValueError("vertices not consecutive")

        return TetraLabel(base(a_idx), base(b_idx))

    def act_triangle(self, g: QElement, tri: Triangle) -> Triangle:
        imgs = [self.act_vertex(g, v) for v in self.triangle_vertices(tri)]
        m = 2 * self.n
        a_idx = sorted(v.index for v in imgs if v.family == "A")
        b_idx = sorted(v.index for v in imgs if v.family == "B")
        if len(a_idx) == 2:
            x, y = a_idx
            p = x if (x + 1) % m == y else y
            return ("A", p, b_idx[0])
        x, y = b_idx
        q = x if (x + 1) % m == y else y
        return ("B", a_idx[0], q)

    def act_vertex_permutation_sign(self, g: QElement, t: TetraLabel) -> int:
        """Sign of the vertex permutation g induces from t onto its image."""
        src = self.tetra_vertices(t)
        dst = self.tetra_vertices(self.act_on_label(g, t))
        perm = [dst.index(self.act_vertex(g, v)) for v in src]
        sign = 1
        for i, j in combinations(range(4), 2):
            if perm[i] > perm[j]:
                sign = -sign
        return sign

    # ---- structural checks ----------------------------------------------

    def check_free_action(self) -> bool:
        """True iff no nontrivial element fixes any simplex setwise.

        A setwise-fixed simplex has a fixed barycenter, so this is exactly
        freeness of the action on the sphere.
        """
        simplices: list[frozenset] = []
        for v in self.vertices():
            simplices.append(frozenset({v}))
        simplices.extend(self.edges())
        for tri in self.mixed_triangles():
            simplices.append(frozenset(self.triangle_vertices(tri)))
        for t in self.tetra_labels():
            simplices.append(frozenset(self.tetra_vertices(t)))
        simplex_set = set(simplices)
        for g in q_elements(self.group):
            if g == QElement(0, 0):
                continue
            for s in simplex_set:
                if frozenset(self.act_vertex(g, v) for v in s) == s:
                    return False
        return True


def build_complex(n: int, convention: str = CONTRA) -> JoinComplex:
    return JoinComplex(n, convention)
