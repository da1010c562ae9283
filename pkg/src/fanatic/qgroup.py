"""Generalized quaternion group Q_4n and dihedral group D_2n, exactly.

Elements are kept in the canonical words eps^a j^b (a mod 2n, b in {0,1})
and E^a J^b (a mod n), which makes equality, enumeration and hashing trivial.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .exactlin import smith_normal_form


@dataclass(frozen=True)
class GroupSpec:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")

    @property
    def q_order(self) -> int:
        return 4 * self.n

    @property
    def d_order(self) -> int:
        return 2 * self.n


@dataclass(frozen=True)
class QElement:
    """eps^eps_exp j^j_flag with eps_exp reduced mod 2n."""

    eps_exp: int
    j_flag: int

    def __str__(self):
        parts = []
        if self.eps_exp:
            parts.append(f"eps^{self.eps_exp}")
        if self.j_flag:
            parts.append("j")
        return "*".join(parts) or "1"


@dataclass(frozen=True)
class DElement:
    """E^e_exp J^j_flag with e_exp reduced mod n."""

    e_exp: int
    j_flag: int

    def __str__(self):
        parts = []
        if self.e_exp:
            parts.append(f"E^{self.e_exp}")
        if self.j_flag:
            parts.append("J")
        return "*".join(parts) or "1"


def q_make(a: int, b: int, spec: GroupSpec) -> QElement:
    return QElement(a % (2 * spec.n), b % 2)


def d_make(a: int, b: int, spec: GroupSpec) -> DElement:
    return DElement(a % spec.n, b % 2)


Q_IDENTITY = QElement(0, 0)
D_IDENTITY = DElement(0, 0)


def q_identity(spec: GroupSpec) -> QElement:
    return Q_IDENTITY


def q_neg_one(spec: GroupSpec) -> QElement:
    """The central element -1 = eps^n."""
    return QElement(spec.n, 0)


def q_elements(spec: GroupSpec) -> list[QElement]:
    return [QElement(a, b) for b in (0, 1) for a in range(2 * spec.n)]


def d_elements(spec: GroupSpec) -> list[DElement]:
    return [DElement(a, b) for b in (0, 1) for a in range(spec.n)]


def q_mul(x: QElement, y: QElement, spec: GroupSpec) -> QElement:
    """Product under j eps^b = eps^{-b} j and j^2 = eps^n."""
    if x.j_flag == 0:
        a = x.eps_exp + y.eps_exp
        b = y.j_flag
    else:
        a = x.eps_exp - y.eps_exp
        if y.j_flag:
            a += spec.n
            b = 0
        else:
            b = 1
    return q_make(a, b, spec)


def q_inverse(x: QElement, spec: GroupSpec) -> QElement:
    if x.j_flag == 0:
        return q_make(-x.eps_exp, 0, spec)
    return q_make(x.eps_exp + spec.n, 1, spec)


def q_power(x: QElement, k: int, spec: GroupSpec) -> QElement:
    out = Q_IDENTITY
    base = x if k >= 0 else q_inverse(x, spec)
    for _ in range(abs(k)):
        out = q_mul(out, base, spec)
    return out


def d_mul(x: DElement, y: DElement, spec: GroupSpec) -> DElement:
    if x.j_flag == 0:
        return d_make(x.e_exp + y.e_exp, y.j_flag, spec)
    return d_make(x.e_exp - y.e_exp, 1 + y.j_flag, spec)


def d_inverse(x: DElement, spec: GroupSpec) -> DElement:
    if x.j_flag == 0:
        return d_make(-x.e_exp, 0, spec)
    return x  # (E^a J)^2 = 1 in D_2n


def quotient_theta(g: QElement, spec: GroupSpec) -> DElement:
    """The quotient homomorphism Q_4n -> D_2n with kernel {1, eps^n}."""
    return d_make(g.eps_exp, g.j_flag, spec)


def theta_fiber(d: DElement, spec: GroupSpec) -> tuple[QElement, QElement]:
    return (QElement(d.e_exp, d.j_flag), q_make(d.e_exp + spec.n, d.j_flag, spec))


@dataclass(frozen=True)
class AbelianStructure:
    """G/[G,G] presented by invariant factors plus the projection map.

    project(g) reduces the exponent word of g through the unimodular change
    of basis coming from the Smith normal form of the relation matrix.
    """

    invariant_factors: tuple[int, ...]
    _basis_change: tuple[tuple[int, ...], ...]  # 2x2, applied to (a, b)
    _keep: tuple[int, ...]  # which SNF coordinates carry factors >= 2

    def project(self, g) -> tuple[int, ...]:
        if isinstance(g, QElement):
            word = (g.eps_exp, g.j_flag)
        elif isinstance(g, DElement):
            word = (g.e_exp, g.j_flag)
        else:
            word = tuple(g)
        V = self._basis_change
        full = tuple(
            word[0] * V[0][c] + word[1] * V[1][c] for c in range(len(V[0]))
        )
        return tuple(
            full[c] % f for c, f in zip(self._keep, self.invariant_factors)
        )

    def add(self, x: tuple[int, ...], y: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((a + b) % f for a, b, f in zip(x, y, self.invariant_factors))

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.invariant_factors)


@lru_cache(maxsize=None)
def abelianize(spec: GroupSpec, which: str = "Q") -> AbelianStructure:
    """Invariant factors and projection for Ab(Q_4n) or Ab(D_2n).

    Relations on the abelianized generators (e, j):
      Q_4n: n e - 2 j = 0 (from eps^n = j^2) and 2 e = 0 (from eps j eps = j);
      D_2n: n e = 0, 2 j = 0, and (2 - n) e + 2 j = 0 (from J E J = E^{n-1}).
    """
    n = spec.n
    if which == "Q":
        relations = [[n, -2], [2, 0]]
    elif which == "D":
        relations = [[n, 0], [0, 2], [2 - n, 2]]
    else:
        raise ValueError("which must be 'Q' or 'D'")
    diag, _, V = smith_normal_form(relations)
    # pad the diagonal with zeros for coordinates not constrained by relations
    full = list(diag) + [0] * (2 - len(diag))
    if any(d == 0 for d in full):
        raise AssertionError("abelianization unexpectedly infinite")
    keep = tuple(c for c, d in enumerate(full) if d >= 2)
    factors = tuple(full[c] for c in keep)
    struct = AbelianStructure(factors, tuple(tuple(r) for r in V), keep)
    if which == "Q" and factors == (4,):
        # fix the generator convention: the class of j is the residue 1
        pj = struct.project(QElement(0, 1))[0]
        if pj == 3:
            V2 = tuple(tuple(-x for x in row) for row in struct._basis_change)
            struct = AbelianStructure(factors, V2, keep)
        elif pj != 1:
            raise AssertionError("j does not generate Ab(Q_4n)")
    return struct
