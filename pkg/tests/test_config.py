import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidlax.config import Expression, evaluate, parse_config, polynomial
from rigidlax.errors import ConfigError

BASE = """
system:
  case: hess-appelrot
  params:
    I: [3, 2, 1]
    chi: [1, 0, "-sqrt(3)"]
"""


class TestExpression:
    @pytest.mark.parametrize("text,value", [
        ("sqrt(3)", math.sqrt(3)),
        ("-sqrt(3)/2", -math.sqrt(3) / 2),
        ("2^3 + 1", 9.0),
        ("2**-1", 0.5),
        ("1e-10", 1e-10),
        ("(1 + 2) * 3", 9.0),
    ])
    def test_values(self, text, value):
        assert evaluate(text) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("text", ["__import__('os')", "sin(1)", "x", "1 if 1 else 2", "'a'", "sqrt(-1)", "1/0", "[1]"])
    def test_rejected(self, text):
        with pytest.raises(ConfigError):
            evaluate(text, "k")

    @given(st.floats(0.1, 100), st.floats(-100, 100), st.integers(-3, 3))
    def test_matches_python(self, a, b, k):
        text = f"sqrt({a!r}) * {b!r} - {b!r} / {a!r} + ({a!r})^{k}"
        assert evaluate(text) == pytest.approx(math.sqrt(a) * b - b / a + a**k, rel=1e-12, abs=1e-12)

    def test_bool_rejected(self):
        with pytest.raises(ConfigError):
            evaluate(True)

    def test_names(self):
        e = Expression("a*b + sqrt(b)", ["a", "b"])
        assert e(a=2.0, b=4.0) == 10.0

    def test_polynomial_batches(self):
        f = polynomial("M1*G1 + M2^2", ["M1", "M2", "M3", "G1", "G2", "G3"])
        X = np.arange(12.0).reshape(6, 2)
        assert np.array_equal(f(X), X[0] * X[3] + X[1] ** 2)


class TestParse:
    def test_minimal(self):
        cfg = parse_config(BASE)
        assert cfg.case == "hess-appelrot"
        assert cfg.params["chi"][2] == pytest.approx(-math.sqrt(3), rel=1e-15)
        assert cfg.build_system().validate().ok

    def test_full(self):
        cfg = parse_config(BASE + """
initial: {M: [0, 1, 0], G: [0, 0, 1]}
stepper: {method: rk4, dt: 0.01, max_steps: 1e6}
duration: "2*3"
samples: 7
checks: [integrals, relations]
output: {csv: a.csv}
""")
        assert cfg.duration == 6.0 and cfg.samples == 7
        sc = cfg.stepper_config()
        assert sc.method == "rk4" and sc.max_steps == 1000000
        assert cfg.output == {"csv": "a.csv", "report": "report.json"}
        assert np.array_equal(cfg.initial_state(cfg.build_system()), [0, 1, 0, 0, 0, 1])

    def test_random_seed_reproducible(self):
        cfg = parse_config(BASE + "initial: {random: {seed: 3}}\n")
        s = cfg.build_system()
        assert np.array_equal(cfg.initial_state(s), cfg.initial_state(s))
        assert np.array_equal(cfg.initial_state(s), s.sample_state(np.random.default_rng(3)))

    def test_skew_block(self):
        cfg = parse_config("""
system: {case: bitop}
initial:
  M: [[0, 1, 2, 3], [-1, 0, 4, 5], [-2, -4, 0, 6], [-3, -5, -6, 0]]
  G: [0, 0, 0, 0, 0, 1]
""")
        x = cfg.initial_state(cfg.build_system())
        assert np.array_equal(x[:6], [1, 2, 3, 4, 5, 6])

    @pytest.mark.parametrize("text,where", [
        (BASE.replace("I:", "intertia:"), "system.params.intertia"),
        (BASE + "durration: 3\n", "durration"),
        (BASE + "stepper: {metod: rk4}\n", "stepper.metod"),
        (BASE + "checks: [integrals, energy]\n", "checks[1]"),
        (BASE + "samples: 0\n", "samples"),
        (BASE + "initial: {random: {seed: 1.5}}\n", "initial.random.seed"),
        (BASE + "initial: {x: [1, 2], random: {seed: 1}}\n", "initial"),
        (BASE + "initial: {M: [1, 2, 3]}\n", "initial"),
        ("system: {case: kovalevskaya}\n", "system.case"),
        ("system: {params: {}}\n", "system.case"),
        ("duration: 1\n", "system"),
        (BASE.replace('"-sqrt(3)"', '"-sqrt(3"'), "system.params.chi[2]"),
    ])
    def test_errors_name_location(self, text, where):
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert where in str(info.value)

    def test_yaml_syntax_position(self):
        with pytest.raises(ConfigError) as info:
            parse_config("system:\n  case: [euler\n")
        assert "line" in str(info.value) and "column" in str(info.value)

    def test_empty(self):
        with pytest.raises(ConfigError):
            parse_config("")

    def test_state_length_checked(self):
        cfg = parse_config(BASE + "initial: {x: [1, 2, 3]}\n")
        with pytest.raises(ConfigError):
            cfg.initial_state(cfg.build_system())
