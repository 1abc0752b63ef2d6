import json

import numpy as np
import pytest

from rigidlax.errors import InvalidArgument, OffManifoldError
from rigidlax.integrate import StepperConfig, simulate
from rigidlax.reduction import (
    CubicCurve,
    QuarticCurve,
    bitop_reduction_check,
    family_curves,
    family_reduction_check,
    family_u,
    ha4_reduction_check,
    ha_spectral_curve,
    hess_coords,
    hess_delta,
    hess_reduction_check,
    quartic_j,
    reduction_checks,
    riccati_check,
)
from rigidlax.systems import Family, HeavyTop, bitop, euler, ha4, hess_appelrot


def run(system, x, tol, T=10.0):
    return simulate(system, x, StepperConfig(T=T, rel_tol=tol, abs_tol=tol * 1e-2, samples=401))


class TestCurves:
    def test_j_known_values(self):
        assert quartic_j([0, -1, 0, 1]) == pytest.approx(1728.0)
        assert quartic_j([1, 0, 0, 1]) == pytest.approx(0.0)

    def test_j_invariant_under_affine_change(self):
        # x -> 2x + 1 and scaling y leave j unchanged
        p = np.polynomial.Polynomial([0.3, -1.1, 0.4, 1.0])
        q = 5.0 * p(np.polynomial.Polynomial([1.0, 2.0]))
        assert quartic_j(q.coef) == pytest.approx(quartic_j(p.coef), rel=1e-10)

    def test_singular(self):
        with pytest.raises(InvalidArgument):
            quartic_j([0, 0, 0, 1])

    def test_serialization(self):
        c = CubicCurve(1.0, 0.0, -1.0, 0.0, "test")
        assert json.loads(c.to_json())["provenance"] == "test"
        assert c(2.0) == 6.0
        assert QuarticCurve((1.0, 0, 0, 0, 1.0))(1.0) == 2.0


class TestHess:
    def test_delta(self):
        assert abs(hess_delta(hess_appelrot())) <= 1e-12
        assert abs(hess_delta(HeavyTop((3, 2, 1), (1, 0, 1)))) > 0.1

    def test_coords(self, rng):
        top = hess_appelrot()
        x = top.sample_state(rng)
        hc = hess_coords(top, x)
        assert hc.nu == pytest.approx(x[:3] @ x[:3])
        assert abs(hc.rho) <= 1e-12

    def test_residuals(self, rng):
        top = hess_appelrot()
        res = hess_reduction_check(top, run(top, top.sample_state(rng), 1e-10))
        assert res.max() <= 1e-6
        assert res["b_printed"] > 1e-2
        assert res["rho"] <= 1e-9

    def test_off_manifold(self, rng):
        top = hess_appelrot()
        x = top.sample_state(rng)
        x[0] += 0.1
        traj = run(top, x, 1e-8, T=1.0)
        with pytest.raises(OffManifoldError):
            hess_reduction_check(top, traj)
        assert hess_reduction_check(top, traj, strict=False)["rho"] > 1e-3

    def test_wrong_system(self, rng):
        s = euler()
        with pytest.raises(InvalidArgument):
            hess_reduction_check(s, run(s, s.sample_state(rng), 1e-8, T=1.0))

    def test_spectral_curve(self, rng):
        top = hess_appelrot()
        c = ha_spectral_curve(top, top.sample_state(rng))
        assert c["mismatch"] <= 1e-12


class TestRiccati:
    @pytest.mark.parametrize("X0", [1.0, 0.7, 2.0])
    def test_corrected_form(self, X0, rng):
        top = hess_appelrot(X0=X0)
        res = riccati_check(top, run(top, top.sample_state(rng), 1e-10))
        assert res.max() <= 1e-6

    def test_printed_form_needs_unit_chi(self, rng):
        top = hess_appelrot(X0=0.7)
        traj = run(top, top.sample_state(rng), 1e-10)
        assert riccati_check(top, traj, printed=True)["angle"] > 1e-2


class TestSoN:
    def test_bitop(self, rng):
        s = bitop()
        x = s.sample_state(rng)
        loose = bitop_reduction_check(s, run(s, x, 1e-8)).max()
        tight = bitop_reduction_check(s, run(s, x, 1e-10)).max()
        assert tight <= 1e-6 and tight * 10 <= loose

    def test_ha4(self, rng):
        s = ha4()
        x = s.sample_state(rng)
        res = ha4_reduction_check(s, run(s, x, 1e-10))
        assert res.max() <= 1e-6
        assert res["relations"] <= 1e-12


class TestFamily:
    @pytest.mark.parametrize("case", ["i", "ii", "iii", "iv", "v"])
    def test_cubic(self, case, rng):
        f = Family(0.8, -1.2, 1.7, case)
        res = family_reduction_check(f, run(f, f.sample_state(rng), 1e-10))
        assert res.max() <= 1e-6

    def test_u_independent_of_case(self, rng):
        f = Family(0.8, -1.2, 1.7, "i")
        x = f.sample_state(rng)
        base = family_u(f, run(f, x, 1e-11))
        for case in ("ii", "iii", "iv", "v"):
            g = f.with_case(case)
            assert np.max(np.abs(family_u(g, run(g, x, 1e-11)) - base)) <= 1e-6

    def test_curves_isomorphic(self, rng):
        f = Family(0.8, -1.2, 1.7, "i")
        for _ in range(5):
            assert family_curves(f, f.sample_state(rng))["j_gap"] <= 1e-8


class TestDispatch:
    def test_kinds(self, rng):
        for s, kinds in [(hess_appelrot(), ["hess", "riccati"]), (bitop(), ["bitop"]), (ha4(), ["ha4"]),
                         (Family(1.0, 0.7, 2.0, "ii"), ["family"])]:
            traj = run(s, s.sample_state(rng), 1e-8, T=1.0)
            assert [r.kind for r in reduction_checks(s, traj)] == kinds

    def test_unsupported(self, rng):
        s = euler()
        with pytest.raises(InvalidArgument):
            reduction_checks(s, run(s, s.sample_state(rng), 1e-8, T=1.0))
