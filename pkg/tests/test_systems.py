import numpy as np
import pytest

from rigidlax.errors import InvalidArgument, NotHamiltonianError
from rigidlax.integrate import StepperConfig, monitor, simulate
from rigidlax.poisson import bracket_e3, bracket_e4, ham_field
from rigidlax.systems import (
    Family,
    HeavyTop,
    bitop,
    chaplygin1,
    chaplygin2,
    chaplygin2_rotated,
    chaplygin4,
    clebsch1,
    clebsch2,
    euler,
    goryachev_chaplygin,
    ha4,
    han,
    hess_appelrot,
    kirchhoff4,
    kirchhoff_case,
    kowalevski,
    lagrange,
    lyapunov,
    sokolov,
    steklov,
)
from rigidlax.systems.catalog import CATALOG, build

FACTORIES = {
    "euler": euler, "lagrange": lagrange, "kowalevski": kowalevski,
    "goryachev-chaplygin": goryachev_chaplygin, "hess-appelrot": hess_appelrot,
    "zhukovski": lambda: HeavyTop.zhukovski(1.0, 1.5, 0.3, 1.0),
    "kirchhoff": kirchhoff_case, "clebsch1": clebsch1, "clebsch2": clebsch2, "steklov": steklov,
    "lyapunov": lyapunov, "sokolov": sokolov, "chaplygin1": chaplygin1, "chaplygin2": chaplygin2,
    "chaplygin2-rotated": chaplygin2_rotated, "bitop": bitop, "ha4": ha4, "han": han,
    "family-i": lambda: Family(1.0, 0.7, 2.0, "i"), "family-iv": lambda: Family(1.0, 0.7, 2.0, "iv"),
    "kirchhoff4": kirchhoff4, "chaplygin4": chaplygin4,
}


def on_leaf(system, x):
    """Move a sample onto the leaf its conditional integrals need."""
    if system.case in ("goryachev-chaplygin", "chaplygin1"):
        M, G = x[:3], x[3:]
        x = np.concatenate([M - (M @ G) / (G @ G) * G, G])
    return x


class TestValidate:
    def test_kowalevski(self):
        assert HeavyTop((2, 2, 1), (1, 0, 0), "kowalevski").validate().ok

    def test_hess_appelrot(self):
        top = HeavyTop((3, 2, 1), (1, 0, -np.sqrt(3)), "hess-appelrot")
        report = top.validate()
        assert report.ok
        assert any(c.branch == "+" for c in report.checks)

    def test_lagrange_violation(self):
        report = HeavyTop((2, 3, 3), (0, 0, 1), "lagrange").validate()
        assert not report.ok
        (bad,) = report.violations
        assert bad.id == "I1==I2" and bad.lhs == 2 and bad.rhs == 3

    def test_loose_tolerance(self):
        top = HeavyTop((3, 2, 1), (1, 0, -1.7320508), "hess-appelrot")
        assert not top.validate().ok
        assert top.validate(1e-6).ok

    @pytest.mark.parametrize("name", sorted(FACTORIES))
    def test_factories_valid(self, name):
        assert FACTORIES[name]().validate().ok

    def test_bitop_conditions(self):
        assert not bitop(a=1.0, b=1.0).validate().ok
        assert not bitop(chi12=0.5, chi34=-0.5).validate().ok

    def test_zero_inertia_rejected(self):
        with pytest.raises(InvalidArgument):
            HeavyTop((0, 1, 1))

    def test_unknown_case(self):
        with pytest.raises(InvalidArgument):
            HeavyTop(case="kovalevskaya")


class TestRhs:
    def test_euler_hand_values(self):
        v = euler((1, 2, 3)).rhs(np.array([1, 2, 3, 0, 0, 1.0]))
        assert np.allclose(v, [-1, 2, -1, -1, 1, 0])

    @pytest.mark.parametrize("name", sorted(FACTORIES))
    def test_zero_state(self, name):
        s = FACTORIES[name]()
        assert not np.any(s.rhs(np.zeros(s.space.dim)))

    @pytest.mark.parametrize("make", [bitop, ha4], ids=["bitop", "ha4"])
    def test_matrix_vs_split(self, make, rng):
        s = make()
        worst = max(np.max(np.abs(s.rhs(x) - s.rhs_split(x)))
                    for x in (rng.normal(size=12) for _ in range(100)))
        assert worst <= 1e-12

    def test_split_batched(self, rng):
        s = bitop()
        X = rng.normal(size=(12, 3, 2))
        assert np.max(np.abs(s.rhs_split(X) - s.rhs(X))) <= 1e-12

    def test_batched(self, rng):
        s = hess_appelrot()
        X = rng.normal(size=(6, 7))
        V = s.rhs(X)
        assert np.allclose(V[:, 3], s.rhs(X[:, 3]), rtol=0, atol=1e-15)


class TestIntegrals:
    def test_euler_f4(self):
        (F4,) = euler().case_integrals()
        assert F4(np.array([1, 2, 3, 0, 0, 1.0])) == 14.0

    def test_goryachev_chaplygin_f4(self):
        (F4,) = goryachev_chaplygin(I3=1.0, X0=-0.5).case_integrals()
        assert F4(np.array([1, 1, 1, 0, 0, 1.0])) == pytest.approx(4.0)
        assert F4.leaf is not None

    def test_heavy_top_energy(self):
        H = HeavyTop((1, 2, 3), (0, 0, 1)).hamiltonian()
        assert H(np.array([1, 2, 3, 0, 0, 1.0])) == pytest.approx(4.0)

    @pytest.mark.parametrize("name", sorted(FACTORIES))
    def test_conserved_pointwise(self, name, rng):
        """grad F . rhs = 0 at sampled (on-manifold, on-leaf) states."""
        s = FACTORIES[name]()
        for _ in range(20):
            x = on_leaf(s, s.sample_state(rng))
            v = s.rhs(x)
            for F in s.integrals():
                scale = max(1.0, np.linalg.norm(F.gradient(x)) * np.linalg.norm(v))
                assert abs(F.gradient(x) @ v) <= 1e-10 * scale, F.name

    def test_clebsch2_drift(self, rng):
        s = clebsch2((1.0, 2.0, 3.0))
        x = s.sample_state(rng)
        rep = monitor(simulate(s, x, StepperConfig(T=10)), s.case_integrals())
        assert rep.max_drift() <= 1e-8

    def test_conditional_flag(self, rng):
        s = goryachev_chaplygin()
        x = s.sample_state(rng)
        x[0] += 0.3  # leave the leaf F1 = 0
        rep = monitor(simulate(s, x, StepperConfig(T=1, samples=5)), s.integrals())
        assert rep["F4"].conditional and not rep["H"].conditional


class TestRelations:
    def test_orthogonal_state(self):
        s = hess_appelrot()
        X0, _, Z0 = s.chi
        (F4,) = s.invariant_relations()
        assert F4(np.array([Z0, 5.0, -X0, 0, 0, 1])) == pytest.approx(0.0, abs=1e-15)

    def test_ha4_entries(self, rng):
        s = ha4()
        x = s.sample_state(rng)
        assert [r(x) for r in s.invariant_relations()] == [0.0, 0.0]

    def test_off_manifold_value(self):
        s = HeavyTop((2, 1, 1), (1, 0, 0), "hess-appelrot")
        assert s.validate().ok
        assert s.invariant_relations()[0](np.array([1.0, 0, 0, 0, 0, 1])) == 1.0

    def test_relation_tangent(self, rng):
        """The field is tangent to the relation surface: dR/dt = 0 where R = 0."""
        for s in (hess_appelrot(), ha4(), han(5), chaplygin2(), chaplygin2_rotated(), chaplygin4()):
            x = s.sample_state(rng)
            for R in s.invariant_relations():
                assert abs(R.gradient(x) @ s.rhs(x)) <= 1e-12

    def test_chaplygin_surface_unstable(self, rng):
        """A 1e-12 offset from M3 = 0 grows by orders of magnitude: the
        surface is invariant but transversally unstable."""
        s = chaplygin2_rotated()
        x = s.sample_state(rng)
        assert simulate(s, x, StepperConfig(T=30, samples=2)).final[2] == 0.0
        X = np.stack([s.sample_state(rng) for _ in range(8)], axis=1)
        X[2] = 1e-12
        grown = np.abs(simulate(s, X, StepperConfig(T=40, samples=41)).states[:, 2]).max()
        assert grown > 1e-6

    def test_han_relation_count(self):
        assert len(han(5).invariant_relations()) == 1 + 3

    def test_zhukovski_frame(self, rng):
        J1, J3, J13, Z0 = 1.0, 1.5, 0.3, 1.0
        s = HeavyTop.zhukovski(J1, J3, J13, Z0)
        assert s.invariant_relations()[0].name == "F4"
        x = s.sample_state(rng)
        assert x[2] == 0.0
        y = rng.normal(size=6)
        My, Gy = y[:3], y[3:]
        H_L = 0.5 * J1 * (My[0] ** 2 + My[1] ** 2) + 0.5 * J3 * My[2] ** 2 + Z0 * Gy[2]
        assert s.hamiltonian()(y) == pytest.approx(H_L + J13 * My[0] * My[2], rel=1e-14)


class TestHamiltonian:
    @pytest.mark.parametrize("name", sorted(set(FACTORIES) - {"family-iv"}))
    def test_field_matches_rhs(self, name, rng):
        s = FACTORIES[name]()
        for _ in range(10):
            x = rng.normal(size=s.space.dim)
            assert np.max(np.abs(s.hamiltonian_field(x) - s.rhs(x))) <= 1e-8

    def test_family_iii_form(self, rng):
        s = Family(1.0, 0.7, 2.0, "iii")
        H1, H2 = s.H1(), s.H2()
        for _ in range(10):
            x = rng.normal(size=6)
            v = ham_field(s.space, H1, x) + H2(x) * ham_field(s.space, H2, x)
            assert np.max(np.abs(v - s.rhs(x))) <= 1e-12

    @pytest.mark.parametrize("case", ["iv", "v"])
    def test_not_hamiltonian(self, case):
        with pytest.raises(NotHamiltonianError):
            Family(1.0, 0.7, 2.0, case).hamiltonian()


class TestMeasureCriterion:
    @pytest.mark.parametrize("case", ["i", "ii", "iii", "iv", "v", "M2", "M1*G2"])
    def test_divergence_iff_bracket(self, case, rng):
        from rigidlax.poisson import divergence

        if case in ("M2", "M1*G2"):
            from rigidlax.config import polynomial

            s = Family(1.0, 0.7, 2.0, "custom", polynomial(case, ["M1", "M2", "M3", "G1", "G2", "G3"]), case)
        else:
            s = Family(1.0, 0.7, 2.0, case)
        div = np.array([divergence(s.rhs, x) for x in rng.normal(size=(100, 6))])
        crit = np.array([s.measure_criterion(x) for x in rng.normal(size=(100, 6))])
        preserved = case in ("i", "ii", "iii", "iv", "v")
        assert (np.max(np.abs(div)) <= 1e-5) == preserved
        assert (np.max(np.abs(crit)) <= 1e-9) == preserved


class TestKirchhoff4:
    def test_involution(self, rng):
        s = kirchhoff4()
        fns = [s.hamiltonian()] + s.case_integrals()
        assert [f.name for f in fns] == ["H", "F3", "F4", "F5"]
        worst = 0.0
        for _ in range(100):
            x = rng.normal(size=10)
            for i in range(len(fns)):
                for j in range(i + 1, len(fns)):
                    worst = max(worst, abs(bracket_e4(fns[i], fns[j], x)))
        assert worst <= 1e-8

    def test_chaplygin4_extra_keys(self):
        with pytest.raises(InvalidArgument):
            chaplygin4(A9999=1.0)


class TestSecondChaplygin:
    def test_both_branches(self):
        assert chaplygin2(sign=-1.0).validate().ok
        report = chaplygin2(sign=1.0).validate()
        branches = {c.branch for c in report.checks if c.branch}
        assert branches == {"+"}

    def test_violation_detected(self):
        s = chaplygin2()
        s.C[0, 2] = s.C[2, 0] = s.C[0, 2] + 1e-3
        assert not s.validate().ok


class TestCatalogBuild:
    def test_size(self):
        assert len(CATALOG) >= 15

    @pytest.mark.parametrize("tag", sorted(CATALOG))
    def test_defaults_validate(self, tag):
        assert build(tag).validate().ok
