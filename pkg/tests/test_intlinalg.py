import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psifw import intlinalg as la

small_entries = st.integers(min_value=-9, max_value=9)


def random_matrix(rng, rows, cols, lo=-9, hi=9):
    return tuple(tuple(rng.randint(lo, hi) for _ in range(cols)) for _ in range(rows))


# -- hnf --------------------------------------------------------------------


def test_hnf_identity():
    eye = la.identity(3)
    h, u = la.hnf(eye)
    assert h == eye and u == eye


def test_hnf_example_det():
    h, u = la.hnf([[2, 4], [6, 8]])
    assert abs(la.det(h)) == 8
    assert abs(la.det(u)) == 1
    assert la.mat_mul(u, la.as_matrix([[2, 4], [6, 8]])) == h


def test_hnf_single_row():
    h, _ = la.hnf([[0, 3, 0]])
    assert h == ((0, 3, 0),)


def _is_hnf(h):
    # pivots positive and strictly right of the previous row's pivot,
    # entries above a pivot reduced into [0, pivot), zero rows at the bottom
    prev = -1
    seen_zero = False
    for row in h:
        nz = next((j for j, x in enumerate(row) if x), None)
        if nz is None:
            seen_zero = True
            continue
        if seen_zero or nz <= prev or row[nz] <= 0:
            return False
        prev = nz
    for i, row in enumerate(h):
        nz = next((j for j, x in enumerate(row) if x), None)
        if nz is None:
            continue
        for k in range(i):
            if not 0 <= h[k][nz] < row[nz]:
                return False
    return True


@given(
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=300, deadline=None)
def test_hnf_properties_random(rows, cols, seed):
    rng = random.Random(seed)
    m = random_matrix(rng, rows, cols)
    h, u = la.hnf(m)
    assert la.mat_mul(u, m) == h
    assert abs(la.det(u)) == 1
    assert _is_hnf(h)


# -- snf --------------------------------------------------------------------


def test_snf_examples():
    assert la.snf_diagonal([[2, 0], [0, 3]]) == (1, 6)
    assert la.snf_diagonal(la.identity(4)) == (1, 1, 1, 1)
    assert la.snf_diagonal([[2, 4], [6, 8]]) == (2, 4)


@given(
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=300, deadline=None)
def test_snf_divisibility_and_det(size, seed):
    rng = random.Random(seed)
    m = random_matrix(rng, size, size)
    divisors = la.snf_diagonal(m)
    for a, b in zip(divisors, divisors[1:]):
        if b:
            assert b % a == 0
        else:
            assert True  # zero follows anything
    nonzero = [d for d in divisors if d]
    product = 1
    for d in nonzero:
        product *= d
    d = la.det(m)
    if d != 0:
        assert len(nonzero) == size and product == abs(d)
    else:
        assert len(nonzero) < size


# -- lattice index -----------------------------------------------------------


def test_lattice_index_simple():
    amb = la.Lattice.build(2, [[1, 0], [0, 1]])
    sub = la.Lattice.build(2, [[1, 0], [0, 2]])
    assert la.lattice_index(amb, sub) == 2


def test_lattice_index_plane_in_threespace():
    amb = la.Lattice.build(3, [[1, 0, 0], [0, 1, 0]])
    sub = la.Lattice.build(3, [[-1, 2, 0], [1, 0, 0]])
    assert la.lattice_index(amb, sub) == 2


def test_lattice_index_rank_deficient():
    amb = la.Lattice.build(2, [[1, 0], [0, 1]])
    assert la.lattice_index(amb, la.Lattice.build(2, [[1, 1]])) == la.INFINITE


def test_lattice_index_outside_span():
    amb = la.Lattice.build(3, [[1, 0, 0], [0, 1, 0]])
    with pytest.raises(la.LatticeError):
        la.lattice_index(amb, la.Lattice.build(3, [[0, 0, 1]]))


def test_lattice_index_not_subgroup():
    amb = la.Lattice.build(2, [[2, 0], [0, 2]])
    with pytest.raises(la.LatticeError):
        la.lattice_index(amb, la.Lattice.build(2, [[1, 0], [0, 1]]))


def test_lattice_index_equals_det_500_cases():
    """Against standard Z^k: index of a full-rank square lattice is |det|."""
    rng = random.Random(0xACCE55)
    done = 0
    while done < 500:
        k = 2 if done % 2 == 0 else 3
        m = random_matrix(rng, k, k)
        d = la.det(m)
        if d == 0:
            continue
        amb = la.Lattice.build(k, la.identity(k))
        sub = la.Lattice.build(k, m)
        assert la.lattice_index(amb, sub) == abs(d)
        done += 1
    assert done == 500


# -- solve / invert unit upper triangular ------------------------------------


def test_solve_uut_worked():
    a = [[1, 1, 1], [0, 1, 1], [0, 0, 1]]
    assert la.solve_unit_upper_triangular(a, (200, 20, 1)) == (180, 19, 1)


def test_solve_uut_identity():
    assert la.solve_unit_upper_triangular(la.identity(3), (4, 5, 6)) == (4, 5, 6)


def test_solve_uut_two_by_two():
    assert la.solve_unit_upper_triangular([[1, 1], [0, 1]], (400, 20)) == (380, 20)


def test_solve_uut_shape_errors():
    with pytest.raises(la.LatticeError):
        la.solve_unit_upper_triangular([[1, 2], [0, 1]], (1, 1))
    with pytest.raises(la.LatticeError):
        la.solve_unit_upper_triangular([[1, 0], [1, 1]], (1, 1))
    with pytest.raises(la.LatticeError):
        la.solve_unit_upper_triangular([[0, 1], [0, 1]], (1, 1))


def test_invert_uut():
    a = ((1, 1, 1), (0, 1, 1), (0, 0, 1))
    inv = la.invert_unit_upper_triangular(a)
    assert la.mat_mul(a, inv) == la.identity(3)


# -- kernels and saturation ---------------------------------------------------


@given(
    st.lists(st.lists(small_entries, min_size=3, max_size=3), min_size=1, max_size=3)
)
@settings(max_examples=200, deadline=None)
def test_kernel_is_kernel(rows):
    m = la.as_matrix(rows)
    ker = la.kernel_basis(m)
    for v in ker:
        assert all(sum(r[i] * v[i] for i in range(3)) == 0 for r in m)
    assert len(ker) == 3 - la.rank(m)


def test_saturation_divides_out():
    sat = la.saturation([[2, 0, 0], [0, 2, 2]])
    assert sat == ((1, 0, 0), (0, 1, 1))


def test_saturation_full_rank():
    assert la.saturation([[1, 1], [0, 5]]) == la.identity(2)


def test_primitive():
    assert la.primitive((-2, -2)) == (-1, -1)
    assert la.primitive((0, 3, 0)) == (0, 1, 0)
    with pytest.raises(la.LatticeError):
        la.primitive((0, 0))


def test_det_bareiss_matches_fraction_elimination():
    rng = random.Random(7)
    for _ in range(100):
        k = rng.randint(1, 4)
        m = random_matrix(rng, k, k)
        # naive fraction Gaussian elimination as an independent oracle
        rows = [[Fraction(x) for x in r] for r in m]
        d = Fraction(1)
        for c in range(k):
            piv = next((i for i in range(c, k) if rows[i][c]), None)
            if piv is None:
                d = Fraction(0)
                break
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                d = -d
            d *= rows[c][c]
            for i in range(c + 1, k):
                f = rows[i][c] / rows[c][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
        assert la.det(m) == d
