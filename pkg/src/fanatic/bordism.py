"""One-dimensional equivariant bordism invariants for free circle actions.

A disjoint union of oriented circles with a free G-action is classified,
up to equivariant bordism, by a sum over component orbits of the image in
G^ab of the orbit's monodromy element: the deck transformation advancing a
component one step along its orientation within its stabilizer.
"""
from __future__ import annotations

from dataclasses import dataclass

from .qgroup import AbelianStructure, GroupSpec, abelianize


@dataclass(frozen=True)
class BordismClass:
    value: tuple[int, ...]
    structure: AbelianStructure

    def __add__(self, other: "BordismClass") -> "BordismClass":
        if self.structure.invariant_factors != other.structure.invariant_factors:
            raise ValueError("classes live in different groups")
        return BordismClass(self.structure.add(self.value, other.value), self.structure)

    def is_trivial(self) -> bool:
        return all(v == 0 for v in self.value)

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.value) + ")"


def omega1(spec: GroupSpec) -> AbelianStructure:
    """The bordism group of free oriented G-circles: the abelianization."""
    return abelianize(spec, "Q")


def zero_class(spec: GroupSpec) -> BordismClass:
    st = omega1(spec)
    return BordismClass(st.zero(), st)


def classify(singular, spec: GroupSpec = None) -> BordismClass:
    """Bordism class of a traced singular set.

    Sums the abelianized monodromy over one representative per orbit of
    components.  Free orbits (trivial stabilizer) contribute zero.
    """
    if spec is None:
        spec = singular.group
    if not singular.orientation_equivariant:
        raise ValueError(
            "the singular set admits no equivariant orientation; "
            "its bordism class is not defined"
        )
    st = omega1(spec)
    total = st.zero()
    for orbit in singular.orbits:
        rep = orbit[0]
        total = st.add(total, st.project(singular.monodromies[rep]))
    return BordismClass(total, st)


def is_nontrivial(singular, spec: GroupSpec = None) -> bool:
    return not classify(singular, spec).is_trivial()
