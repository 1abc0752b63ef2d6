import itertools

import numpy as np
import pytest

from rigidlax.errors import KindMismatch
from rigidlax.poisson import (
    E3,
    E4,
    S4,
    SmoothFn,
    bracket,
    bracket_e3,
    bracket_e4,
    bracket_s4,
    casimirs,
    check_kind,
    coordinate,
    divergence,
    ham_field,
    quadratic,
)
from rigidlax.systems import Family, HeavyTop, Kirchhoff, bitop


def coords(space):
    return [coordinate(space, i) for i in range(space.dim)]


def product(f, g):
    return SmoothFn(lambda x: f(x) * g(x), lambda x: f(x) * g.gradient(x) + g(x) * f.gradient(x), f"{f.name}*{g.name}")


def jacobi(space, f, g, h, x):
    """Jacobi sum with inner brackets as functions (complex-safe via FD)."""
    def br(a, b):
        return SmoothFn(lambda y: _vec_bracket(space, a, b, y))

    return (bracket(space, f, br(g, h), x) + bracket(space, g, br(h, f), x) + bracket(space, h, br(f, g), x))


def _vec_bracket(space, a, b, y):
    if y.ndim == 1:
        return bracket(space, a, b, y)
    return np.array([bracket(space, a, b, y[:, k]) for k in range(y.shape[1])])


class TestBracketE3:
    def test_structure_constant(self):
        M1, M2 = coordinate(E3, 0), coordinate(E3, 1)
        assert bracket_e3(M1, M2, np.array([0, 0, 5.0, 0.3, -0.2, 0.9])) == pytest.approx(-5.0)

    def test_mixed_structure(self):
        M1, G2 = coordinate(E3, 0), coordinate(E3, 4)
        x = np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
        assert bracket_e3(M1, G2, x) == pytest.approx(-0.6)

    def test_self_bracket_zero(self, rng):
        f = quadratic(rng.normal(size=(6, 6)))
        assert bracket_e3(f, f, rng.normal(size=6)) == 0.0


@pytest.mark.parametrize("space", [E3, S4, E4], ids=str)
class TestBracketAxioms:
    def test_antisymmetry(self, space, rng):
        x = rng.normal(size=space.dim)
        C = coords(space)
        worst = max(abs(bracket(space, f, g, x) + bracket(space, g, f, x)) for f in C for g in C)
        assert worst <= 1e-9

    def test_leibniz(self, space, rng):
        x = rng.normal(size=space.dim)
        C = coords(space)
        worst = 0.0
        for f, g, h in itertools.islice(itertools.permutations(C, 3), 60):
            lhs = bracket(space, f, product(g, h), x)
            rhs = bracket(space, f, g, x) * h(x) + g(x) * bracket(space, f, h, x)
            worst = max(worst, abs(lhs - rhs))
        assert worst <= 1e-9

    def test_jacobi(self, space, rng):
        x = rng.normal(size=space.dim)
        C = coords(space)
        # brackets of coordinates are linear, so the FD inner gradient is exact
        worst = max(abs(jacobi(space, f, g, h, x)) for f, g, h in itertools.combinations(C, 3))
        assert worst <= 1e-9

    def test_casimirs_commute(self, space, rng):
        C = coords(space)
        for _ in range(20):
            x = rng.normal(size=space.dim)
            for K in casimirs(space):
                assert max(abs(bracket(space, K, c, x)) for c in C) <= 1e-9


class TestBracketS4:
    def test_matches_generic_path(self, rng):
        f, g = quadratic(rng.normal(size=(12, 12))), quadratic(rng.normal(size=(12, 12)))
        x = rng.normal(size=12)
        assert bracket_s4(f, g, x) == pytest.approx(bracket(S4, f, g, x), abs=1e-11)

    def test_antisymmetry_linear(self, rng):
        from rigidlax.poisson import linear

        f, g = linear(rng.normal(size=12)), linear(rng.normal(size=12))
        x = rng.normal(size=12)
        assert abs(bracket_s4(f, g, x) + bracket_s4(g, f, x)) <= 1e-12
        assert bracket_s4(f, f, x) == 0.0

    def test_bitop_integrals_along_flow(self, rng):
        b = bitop()
        H = b.hamiltonian()
        for F in b.case_integrals()[:2]:  # B and D
            x = b.sample_state(rng)
            dF = F.gradient(x) @ b.rhs(x)
            assert abs(bracket_s4(F, H, x) - dF) <= 1e-9
            assert abs(bracket_s4(H, F, x)) <= 1e-9


class TestBracketE4:
    def test_commuting_planes(self, rng):
        assert abs(bracket_e4(coordinate(E4, 0), coordinate(E4, 5), rng.normal(size=10))) == 0.0

    def test_moment_force(self):
        x = np.zeros(10)
        x[7] = 1.0  # G = (0, 1, 0, 0)
        assert bracket_e4(coordinate(E4, 0), coordinate(E4, 6), x) == pytest.approx(1.0)

    def test_self_bracket(self, rng):
        f = quadratic(rng.normal(size=(10, 10)))
        assert bracket_e4(f, f, rng.normal(size=10)) == pytest.approx(0.0, abs=1e-12)


class TestCasimirs:
    def test_e3_values(self):
        F1, F2 = casimirs(E3)
        x = np.array([1, 2, 3, 0, 0, 1.0])
        assert F1(x) == 3.0 and F2(x) == 1.0

    def test_e4_second_casimir(self, rng):
        F2 = casimirs(E4)[1]
        M13 = coordinate(E4, 1)
        for _ in range(10):
            assert abs(bracket_e4(F2, M13, rng.normal(size=10))) <= 1e-9

    def test_s4_count(self):
        assert [c.name for c in casimirs(S4)] == ["E", "F", "J", "K"]


class TestHamField:
    def test_heavy_top(self, rng):
        top = HeavyTop((1.0, 2.0, 3.0), (0.3, -0.4, 1.0))
        H = top.hamiltonian()
        fd = SmoothFn(H.func)  # finite-difference gradient only
        for _ in range(10):
            x = rng.normal(size=6)
            assert np.max(np.abs(ham_field(E3, fd, x) - top.rhs(x))) <= 1e-8

    def test_casimir_field_vanishes(self, rng):
        x = rng.normal(size=6)
        assert not ham_field(E3, casimirs(E3)[1], x).any()

    def test_kirchhoff_identity_mass(self, rng):
        k = Kirchhoff(np.eye(3))
        x = rng.normal(size=6)
        v = ham_field(E3, k.hamiltonian(), x)
        assert np.allclose(v[:3], 0, atol=1e-15)
        assert np.allclose(v[3:], np.cross(x[3:], x[:3]))

    def test_kind_mismatch(self):
        with pytest.raises(KindMismatch):
            check_kind(E3, np.zeros(10))


class TestDivergence:
    def test_hamiltonian_fields(self, rng):
        top = HeavyTop((1.0, 2.0, 3.0), (0.3, -0.4, 1.0))
        for _ in range(100):
            assert abs(divergence(top.rhs, rng.normal(size=6))) <= 1e-5

    def test_family_case_iii(self, rng):
        fam = Family(1.0, 0.7, 2.0, "iii")
        for _ in range(20):
            assert abs(divergence(fam.rhs, rng.normal(size=6))) <= 1e-5

    def test_family_non_preserving(self):
        fam = Family(1.0, 0.0, 2.0, "custom", lambda x: x[1], "M2")
        x = np.array([0.3, 0.2, 1.1, 0.1, 0.5, 0.8])
        assert abs(divergence(fam.rhs, x)) >= 1e-2


class TestSmoothFn:
    def test_gradient_check(self, rng):
        f = SmoothFn(lambda x: x[0] ** 3 * x[1] + np.sin(x[2]), "cs")
        assert f.check_gradient(rng.normal(size=3)) <= 1e-5

    def test_fd_default(self, rng):
        Q = rng.normal(size=(4, 4))
        f = SmoothFn(lambda x: np.einsum("i...,ij,j...->...", x, Q, x))
        x = rng.normal(size=4)
        assert np.allclose(f.gradient(x), (Q + Q.T) @ x, atol=1e-7)
