import csv

import numpy as np
import pytest

from rigidlax.errors import InvalidArgument, MaxStepsExceeded, NonFiniteState, StepUnderflow
from rigidlax.integrate import ConservationReport, StepperConfig, Trajectory, monitor, simulate
from rigidlax.systems import HeavyTop, euler, hess_appelrot


def oscillator(y):
    return np.stack([y[1], -y[0]])


class TestStepperConfig:
    @pytest.mark.parametrize("kw", [
        {"method": "euler"},
        {"method": "rk4"},
        {"method": "rk4", "dt": -0.1},
        {"rel_tol": 0.0},
        {"T": -1.0},
        {"T": float("inf")},
        {"samples": 0},
        {"max_steps": 0},
    ])
    def test_rejects(self, kw):
        with pytest.raises(InvalidArgument):
            StepperConfig(**kw)


class TestDopri:
    def test_oscillator(self):
        tr = simulate(oscillator, [1.0, 0.0], StepperConfig(T=20, samples=401))
        exact = np.stack([np.cos(tr.times), -np.sin(tr.times)], axis=1)
        assert np.max(np.abs(tr.states - exact)) <= 1e-8

    def test_dense_output_between_steps(self):
        t = np.sort(np.random.default_rng(5).uniform(0, 3, 50))
        tr = simulate(oscillator, [0.0, 1.0], StepperConfig(T=3), t_eval=t)
        assert np.max(np.abs(tr.states[:, 0] - np.sin(t))) <= 1e-9

    def test_zero_duration(self):
        tr = simulate(euler(), np.arange(6.0), StepperConfig(T=0))
        assert len(tr) == 1 and tr.steps == 0
        assert np.array_equal(tr.final, np.arange(6.0))

    def test_equilibrium(self):
        eq = np.array([2.0, 0, 0, 1, 0, 0])
        tr = simulate(euler(), eq, StepperConfig(T=5))
        assert np.max(np.abs(tr.states - eq)) <= 1e-14

    def test_eval_outside(self):
        with pytest.raises(InvalidArgument):
            simulate(oscillator, [1.0, 0.0], StepperConfig(T=1), t_eval=[0.0, 2.0])

    def test_max_steps(self):
        with pytest.raises(MaxStepsExceeded):
            simulate(oscillator, [1.0, 0.0], StepperConfig(T=100, max_steps=5))

    def test_blow_up(self):
        with pytest.raises((NonFiniteState, StepUnderflow)):
            simulate(lambda y: y * y, [1.0], StepperConfig(T=2.0))

    def test_nonfinite_initial(self):
        with pytest.raises(NonFiniteState):
            simulate(oscillator, [np.nan, 0.0])

    def test_time_reversal(self):
        top = HeavyTop((1, 2, 3), (0.3, 0.2, 1.0))
        x0 = np.array([0.3, 1.2, -0.4, 0.2, 0.5, 0.84])
        xT = simulate(top, x0, StepperConfig(T=10, samples=2)).final
        back = simulate(lambda y: -top.rhs(y), xT, StepperConfig(T=10, samples=2)).final
        assert np.max(np.abs(back - x0)) <= 1e-7


class TestRK4:
    def test_fourth_order(self):
        s = euler()
        x0 = np.array([1.0, 2, 3, 0, 0.6, 0.8])
        ref = simulate(s, x0, StepperConfig(T=10, rel_tol=1e-13, abs_tol=1e-15, samples=2)).final
        errs = [np.linalg.norm(simulate(s, x0, StepperConfig(T=10, method="rk4", dt=dt, samples=2)).final - ref)
                for dt in (0.02, 0.01)]
        assert 12 <= errs[0] / errs[1] <= 20

    def test_uneven_last_step(self):
        tr = simulate(oscillator, [1.0, 0.0], StepperConfig(T=1.05, method="rk4", dt=0.1, samples=2))
        assert tr.steps == 11
        assert tr.final[0] == pytest.approx(np.cos(1.05), abs=1e-6)

    def test_hermite_samples(self):
        tr = simulate(oscillator, [1.0, 0.0], StepperConfig(T=2, method="rk4", dt=0.01, samples=37))
        assert np.max(np.abs(tr.states[:, 0] - np.cos(tr.times))) <= 1e-8


class TestBatch:
    def test_matches_single(self, rng):
        s = hess_appelrot()
        X = np.stack([s.sample_state(rng) for _ in range(4)], axis=1)
        cfg = StepperConfig(T=5, samples=11)
        tb = simulate(s, X, cfg)
        assert tb.states.shape == (11, 6, 4)
        for k in range(4):
            single = simulate(s, X[:, k], cfg)
            assert np.max(np.abs(tb.states[:, :, k] - single.states)) <= 1e-8

    def test_batched_monitor(self, rng):
        s = hess_appelrot()
        X = np.stack([s.sample_state(rng) for _ in range(3)], axis=1)
        tr = simulate(s, X, StepperConfig(T=5, samples=11))
        rep = monitor(tr, s.integrals())
        assert rep["H"].initial.shape == (3,)
        assert rep.max_drift() <= 1e-8

    def test_csv_needs_single(self, rng, tmp_path):
        s = euler()
        tr = simulate(s, rng.normal(size=(6, 2)), StepperConfig(T=1, samples=3))
        with pytest.raises(InvalidArgument):
            tr.to_csv(tmp_path / "x.csv")


class TestOutput:
    def test_csv(self, tmp_path):
        s = euler()
        x0 = np.array([1.0, 2, 3, 0, 0.6, 0.8])
        tr = simulate(s, x0, StepperConfig(T=1, samples=5))
        tr.add_monitor(s.hamiltonian(), "H")
        tr.to_csv(tmp_path / "t.csv")
        rows = list(csv.reader(open(tmp_path / "t.csv")))
        assert rows[0] == ["t", "M1", "M2", "M3", "G1", "G2", "G3", "H"]
        assert len(rows) == 6
        assert np.array_equal(np.array(rows[1][1:7], dtype=float), x0)
        assert float(rows[-1][0]) == 1.0

    def test_times_checked(self):
        with pytest.raises(InvalidArgument):
            Trajectory(np.array([0.0, 0.0]), np.zeros((2, 3)))

    def test_report(self):
        t = np.linspace(0, 1, 5)
        rep = ConservationReport.from_series(t, {"f": [1.0, 1.0, 1.5, 0.8, 1.0]}, conditional=["f"])
        d = rep["f"].to_dict()
        assert d == {"initial": 1.0, "max_drift": 0.5, "t_at_max": 0.5, "conditional": True}
        rep2 = ConservationReport.from_series(t, {"g": np.zeros(5)})
        rep.merge(rep2, prefix="p:")
        assert rep.names == ["f", "p:g"] and rep["p:g"].name == "p:g"
