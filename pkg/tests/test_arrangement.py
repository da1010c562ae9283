"""Invariant subspace arrangements for the fan representations."""
from fractions import Fraction

import pytest

from fanatic.arrangement import (
    AlphaVector,
    RepSpec,
    action_matrix,
    build_arrangement,
    build_L_alpha,
    check_conditions,
    transform_subspace,
    verify_prop_two,
    w_subspace,
)
from fanatic.exactlin import RMatrix, intersect
from fanatic.qgroup import DElement, d_elements, d_mul


@pytest.mark.parametrize("n", [3, 5, 7])
def test_action_is_representation(n):
    spec = RepSpec(n, 3)
    gspec = spec.group
    for x in d_elements(gspec):
        for y in d_elements(gspec):
            assert (
                action_matrix(d_mul(x, y, gspec), spec)
                == action_matrix(x, spec) * action_matrix(y, spec)
            )


@pytest.mark.parametrize("n,m", [(3, 3), (5, 3), (5, 2)])
def test_action_permutes_columns(n, m):
    """E shifts the column blocks cyclically; J reverses them."""
    spec = RepSpec(n, m)
    vec = [Fraction(r * n + c + 1) for r in range(m - 1) for c in range(n)]
    shifted = action_matrix(DElement(1, 0), spec).apply(vec)
    for r in range(m - 1):
        for c in range(n):
            assert shifted[spec.coord(r, c)] == vec[spec.coord(r, c + 1)]
    reflected = action_matrix(DElement(0, 1), spec).apply(vec)
    for r in range(m - 1):
        for c in range(n):
            assert reflected[spec.coord(r, c)] == vec[spec.coord(r, n - 1 - c)]


@pytest.mark.parametrize("n", [3, 5])
def test_w_subspace_invariant_rows_sum_zero(n):
    spec = RepSpec(n, 3)
    w = w_subspace(spec)
    assert w.dim == (spec.m - 1) * (n - 1)
    for row in w.basis.data:
        for r in range(spec.rows):
            assert sum(row[spec.coord(r, c)] for c in range(n)) == 0
    for g in d_elements(spec.group):
        assert transform_subspace(w, g, spec) == w


@pytest.mark.parametrize("n", [3, 5, 7])
def test_fan2_arrangement_orbit_stabilizer(n):
    spec = RepSpec(n, 3)
    arr = build_arrangement(AlphaVector((1, n - 1), n), spec)
    group_order = 2 * n
    assert len(arr.maximal) == n
    for k in range(len(arr.maximal)):
        stab = arr.stabilizers_d[k]
        orbit = {
            transform_subspace(arr.subspaces[arr.maximal[k]], g, spec)
            for g in d_elements(spec.group)
        }
        assert len(orbit) * len(stab) == group_order


@pytest.mark.parametrize("n", [3, 5, 7])
def test_fan2_maximal_are_column_kernels(n):
    """Independent description: R_i = W cut by vanishing of column i."""
    spec = RepSpec(n, 3)
    arr = build_arrangement(AlphaVector((1, n - 1), n), spec)
    w = w_subspace(spec)
    expected = set()
    for i in range(n):
        forms = RMatrix(
            [
                [1 if spec.coord(r, i) == c else 0 for c in range(spec.mat_dim)]
                for r in range(spec.rows)
            ]
        )
        from fanatic.exactlin import kernel

        expected.add(intersect(w, kernel(forms)))
    assert set(arr.max_subspaces()) == expected


@pytest.mark.parametrize("n", [3, 5, 7])
def test_fan2_conditions_hold(n):
    spec = RepSpec(n, 3)
    arr = build_arrangement(AlphaVector((1, n - 1), n), spec)
    rep_cond = check_conditions(arr)
    assert rep_cond.all_pass, rep_cond.witnesses


@pytest.mark.parametrize("n,a", [(7, (1, 2, 4)), (5, (1, 1, 3)), (3, (1, 1, 1))])
def test_fan3_l_alpha_and_stabilizer_order(n, a):
    spec = RepSpec(n, 2)
    alpha = AlphaVector(a, n)
    arr = build_arrangement(alpha, spec)
    base = build_L_alpha(alpha, spec)
    assert base.dim == w_subspace(spec).dim - 2
    distinct = len(set(a))
    want_d = {3: 1, 2: 2, 1: 6}[distinct]
    assert len(arr.stabilizers_d[0]) == want_d
    for g in arr.stabilizers_d[0]:
        assert transform_subspace(arr.subspaces[arr.maximal[0]], g, spec) == (
            arr.subspaces[arr.maximal[0]]
        )


@pytest.mark.parametrize("n", [3, 5, 7])
def test_prop_two_identities_all_p(n):
    for p in range(1, n):
        rep = verify_prop_two(n, p)
        assert rep.identities_hold
        assert rep.nonsingular
        assert rep.det_c != 0


def test_alpha_vector_validation():
    with pytest.raises(ValueError):
        AlphaVector((1, 1), 3)
    with pytest.raises(ValueError):
        AlphaVector((0, 3), 3)
