import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rigidlax.algebra import (
    commutator,
    hat3,
    inner,
    join4,
    skew_to_upper,
    split4,
    upper_to_skew,
    vee3,
)
from rigidlax.errors import InvalidArgument

from .conftest import random_skew

E = np.eye(3)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vec6 = arrays(np.float64, 6, elements=finite)


class TestHatVee:
    def test_basis_vector(self):
        expected = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
        assert np.array_equal(hat3([1, 0, 0]), expected)
        assert np.array_equal(vee3(expected), [1, 0, 0])

    def test_zero(self):
        assert np.array_equal(hat3(np.zeros(3)), np.zeros((3, 3)))
        assert np.array_equal(vee3(np.zeros((3, 3))), np.zeros(3))

    def test_cross_product_is_commutator(self):
        assert np.array_equal(commutator(hat3(E[0]), hat3(E[1])), hat3(E[2]))

    def test_round_trip(self, rng):
        v = rng.normal(size=(100, 3))
        assert np.array_equal(vee3(hat3(v)), v)
        A = random_skew(rng, 3, 100)
        assert np.array_equal(hat3(vee3(A)), A)

    def test_hat_acts_as_cross(self, rng):
        a, b = rng.normal(size=(2, 3))
        assert np.allclose(hat3(a) @ b, np.cross(a, b), atol=1e-15)

    def test_rejects_non_skew(self):
        with pytest.raises(InvalidArgument):
            vee3(np.eye(3))


class TestSplit4:
    def test_printed_example(self):
        A = join4(*_from_pm([1, 2, 3], [4, 5, 6]))
        first, second = split4(A)
        assert np.allclose(first, [2.5, 3.5, 4.5])
        assert np.allclose(second, [-1.5, -1.5, -1.5])

    def test_placement(self):
        # A_+ from the 3x3 block read as a hat matrix, A_- from the last row
        A = np.zeros((4, 4))
        A[:3, :3] = hat3([1, 2, 3])
        A[3, :3] = [4, 5, 6]
        A[:3, 3] = -A[3, :3]
        first, second = split4(A)
        assert np.allclose(first, [2.5, 3.5, 4.5])
        assert np.allclose(second, [-1.5, -1.5, -1.5])

    def test_zero(self):
        first, second = split4(np.zeros((4, 4)))
        assert not first.any() and not second.any()

    def test_inverse(self, rng):
        # halving and re-adding costs at most a couple of ulps
        A = random_skew(rng, 4, 50)
        assert np.max(np.abs(join4(*split4(A)) - A)) <= 1e-14
        p, q = rng.normal(size=(2, 50, 3))
        p2, q2 = split4(join4(p, q))
        assert max(np.max(np.abs(p2 - p)), np.max(np.abs(q2 - q))) <= 1e-14

    def test_inverse_exact_on_dyadic(self):
        A = join4([0.5, -1.25, 2.0], [1.0, 0.75, -0.5])
        assert np.array_equal(join4(*split4(A)), A)

    def test_homomorphism(self, rng):
        A = random_skew(rng, 4, 1000)
        B = random_skew(rng, 4, 1000)
        A1, A2 = split4(A)
        B1, B2 = split4(B)
        C1, C2 = split4(commutator(A, B))
        assert np.max(np.abs(C1 - 2 * np.cross(A1, B1))) <= 1e-12
        assert np.max(np.abs(C2 - 2 * np.cross(A2, B2))) <= 1e-12

    def test_needs_four_by_four(self):
        with pytest.raises(InvalidArgument):
            split4(np.zeros((3, 3)))


def _from_pm(plus, minus):
    plus, minus = np.asarray(plus, float), np.asarray(minus, float)
    return (plus + minus) / 2, (plus - minus) / 2


class TestCommutatorInner:
    def test_self_commutator(self, rng):
        A = random_skew(rng, 5)
        assert not commutator(A, A).any()

    def test_jacobi(self, rng):
        A, B, C = random_skew(rng, 4, 3)
        J = (commutator(A, commutator(B, C)) + commutator(B, commutator(C, A))
             + commutator(C, commutator(A, B)))
        assert np.max(np.abs(J)) <= 1e-12

    def test_result_is_skew(self, rng):
        A, B = random_skew(rng, 6, 2)
        C = commutator(A, B)
        assert np.max(np.abs(C + C.T)) <= 1e-13

    def test_dimension_mismatch(self, rng):
        with pytest.raises(InvalidArgument):
            commutator(random_skew(rng, 3), random_skew(rng, 4))
        with pytest.raises(InvalidArgument):
            inner(random_skew(rng, 3), random_skew(rng, 4))

    def test_inner_values(self, rng):
        assert inner(hat3(E[0]), hat3(E[0])) == pytest.approx(1.0)
        assert inner(random_skew(rng, 4), np.zeros((4, 4))) == 0.0
        a, b = rng.normal(size=(2, 3))
        assert inner(hat3(a), hat3(b)) == pytest.approx(a @ b, abs=1e-14)

    def test_inner_is_upper_dot(self, rng):
        A, B = random_skew(rng, 5, 2)
        assert inner(A, B) == pytest.approx(skew_to_upper(A) @ skew_to_upper(B), abs=1e-13)

    def test_ad_invariance(self, rng):
        A, B, C = random_skew(rng, 4, 3)
        assert abs(inner(commutator(C, A), B) + inner(A, commutator(C, B))) <= 1e-12


class TestUpperTriangle:
    def test_round_trip_batched(self, rng):
        v = rng.normal(size=(10, 7))
        A = upper_to_skew(v)
        assert A.shape == (7, 5, 5)
        assert np.array_equal(skew_to_upper(A), v)

    def test_not_triangular(self):
        with pytest.raises(InvalidArgument):
            upper_to_skew(np.zeros(4))


class TestSplit4Properties:
    @settings(max_examples=200, deadline=None)
    @given(vec6, vec6)
    def test_commutator_maps_to_cross_products(self, a, b):
        A, B = upper_to_skew(a, 4), upper_to_skew(b, 4)
        (A1, A2), (B1, B2) = split4(A), split4(B)
        C1, C2 = split4(commutator(A, B))
        scale = max(1.0, np.abs(a).max() * np.abs(b).max())
        assert np.max(np.abs(C1 - 2 * np.cross(A1, B1))) <= 1e-12 * scale
        assert np.max(np.abs(C2 - 2 * np.cross(A2, B2))) <= 1e-12 * scale

    @settings(max_examples=200, deadline=None)
    @given(vec6)
    def test_join_inverts_split(self, a):
        A = upper_to_skew(a, 4)
        assert np.max(np.abs(join4(*split4(A)) - A)) <= 1e-14 * max(1.0, np.abs(a).max())
