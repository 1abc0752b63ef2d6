"""Run configuration files.

A config is a YAML mapping::

    system:
      case: hess-appelrot
      params:
        I: [3, 2, 1]
        chi: [1, 0, "-sqrt(3)"]
    initial:
      random: {seed: 0}          # or  x: [...]  or  M: [...] and G: [...]
    stepper:
      method: dopri45
      rel_tol: 1e-10
    duration: 10
    samples: 1000
    checks: [integrals, relations, spectral, reduction]
    output:
      csv: trajectory.csv
      report: report.json

Numbers may be written as expressions in ``sqrt``, ``+ - * / ^ **`` and
parentheses so that exact case conditions such as ``Z0 = -sqrt(3)`` can be
entered. Unknown keys are rejected with the offending key path.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import ConfigError

CHECKS = ("integrals", "relations", "spectral", "reduction", "rmatrix", "divergence")

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def _sqrt(v):
    if isinstance(v, (int, float)):
        if v < 0:
            raise ValueError("sqrt of a negative number")
        return math.sqrt(v)
    return np.sqrt(v)


class Expression:
    """An arithmetic expression in numbers, ``sqrt`` and a fixed set of names.

    ``^`` is accepted as a power operator. Evaluation walks the parsed tree,
    so nothing but the listed operations can run.
    """

    def __init__(self, text, names=()):
        self.text = str(text)
        self.names = tuple(names)
        try:
            tree = ast.parse(self.text.replace("^", "**").strip(), mode="eval")
        except SyntaxError as exc:
            raise ValueError(f"cannot parse expression {self.text!r}") from exc
        self._check(tree.body)
        self._tree = tree.body

    def _check(self, node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ValueError(f"unsupported constant {node.value!r}")
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS:
                raise ValueError(f"unsupported operator in {self.text!r}")
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNARY:
                raise ValueError(f"unsupported operator in {self.text!r}")
            self._check(node.operand)
        elif isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id == "sqrt" and len(node.args) == 1 and not node.keywords):
                raise ValueError(f"only sqrt(...) calls are allowed in {self.text!r}")
            self._check(node.args[0])
        elif isinstance(node, ast.Name):
            if node.id not in self.names:
                raise ValueError(f"unknown name {node.id!r} in {self.text!r}")
        else:
            raise ValueError(f"unsupported syntax in {self.text!r}")

    def __call__(self, **values):
        return self._eval(self._tree, values)

    def _eval(self, node, env):
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](self._eval(node.operand, env))
        if isinstance(node, ast.Call):
            return _sqrt(self._eval(node.args[0], env))
        return env[node.id]

    def __repr__(self):
        return f"Expression({self.text!r})"


def evaluate(value, where=None):
    """A number, or a string holding a constant expression, as float."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}", where)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Expression(value)())
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise ConfigError(str(exc), where) from None
    raise ConfigError(f"expected a number, got {value!r}", where)


def evaluate_tree(value, where):
    """Evaluate every entry of a (possibly nested) list of numbers."""
    if isinstance(value, list):
        return [evaluate_tree(v, f"{where}[{i}]") for i, v in enumerate(value)]
    return evaluate(value, where)


def polynomial(text, names, where=None):
    """Compile a polynomial in phase coordinates, e.g. ``"M1*G1 + M2^2"``.

    The result maps a state ``x`` (coordinates on the first axis, in the
    order of ``names``) to the value.
    """
    try:
        expr = Expression(text, names)
    except ValueError as exc:
        raise ConfigError(str(exc), where) from None

    def f(x):
        return expr(**{n: x[i] for i, n in enumerate(names)})

    f.__name__ = "a"
    return f


# --- run configuration -----------------------------------------------------------------

_TOP = {"system", "initial", "stepper", "duration", "samples", "checks", "output"}
_SYSTEM = {"case", "params"}
_INITIAL = {"x", "M", "G", "random"}
_RANDOM = {"seed", "scale"}
_STEPPER = {"method", "dt", "rel_tol", "abs_tol", "max_steps"}
_OUTPUT = {"csv", "report"}


def _reject_unknown(block, allowed, where):
    if not isinstance(block, dict):
        raise ConfigError(f"expected a mapping, got {type(block).__name__}", where)
    for key in block:
        if key not in allowed:
            path = f"{where}.{key}" if where else str(key)
            raise ConfigError(f"unknown key {key!r}; allowed: {sorted(allowed)}", path)


@dataclass
class RunConfig:
    case: str
    params: dict
    initial: dict = field(default_factory=lambda: {"random": {"seed": 0, "scale": 1.0}})
    stepper: dict = field(default_factory=dict)
    duration: float = 10.0
    samples: int = 1000
    checks: list = field(default_factory=lambda: ["integrals"])
    output: dict = field(default_factory=lambda: {"csv": "trajectory.csv", "report": "report.json"})
    source: str | None = None

    def build_system(self):
        from .systems.catalog import build

        return build(self.case, self.params)

    def stepper_config(self):
        from .integrate import StepperConfig

        kw = dict(self.stepper)
        if "max_steps" in kw:
            kw["max_steps"] = int(kw["max_steps"])
        return StepperConfig(T=self.duration, samples=self.samples, **kw)

    def initial_state(self, system):
        init = self.initial
        if "random" in init:
            r = init["random"]
            rng = np.random.default_rng(int(r.get("seed", 0)))
            if r.get("scale") is None:
                return system.sample_state(rng)
            return system.sample_state(rng, float(r["scale"]))
        if "x" in init:
            x = np.asarray(init["x"], dtype=float)
        else:
            x = np.concatenate([_block(init["M"], system, "M"), _block(init["G"], system, "G")])
        if x.shape != (system.space.dim,):
            raise ConfigError(f"state needs {system.space.dim} coordinates, got {x.size}", "initial")
        return x


def _block(v, system, which):
    """An ``M`` or ``G`` block as flat coordinates; so(n) blocks may also be
    given as full skew matrices."""
    from .algebra import check_skew, skew_to_upper

    a = np.asarray(v, dtype=float)
    if a.ndim != 2:
        return a.ravel()
    if system.space.name == "e3" or (system.space.name == "e4" and which == "G"):
        raise ConfigError("expected a flat list", f"initial.{which}")
    try:
        return skew_to_upper(check_skew(a))
    except Exception as exc:
        raise ConfigError(str(exc), f"initial.{which}") from None


def parse_config(text, source=None):
    """Parse YAML text into a :class:`RunConfig` (without building the system)."""
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else None
        raise ConfigError(exc.problem or str(exc), where) from None
    except yaml.YAMLError as exc:
        raise ConfigError(str(exc)) from None
    if data is None:
        raise ConfigError("empty config")
    _reject_unknown(data, _TOP, "")
    if "system" not in data:
        raise ConfigError("missing required block", "system")
    sysb = data["system"]
    _reject_unknown(sysb, _SYSTEM, "system")
    if "case" not in sysb:
        raise ConfigError("missing case tag", "system.case")
    case = str(sysb["case"])
    params = sysb.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError("expected a mapping", "system.params")

    from .systems.catalog import CATALOG

    if case not in CATALOG:
        raise ConfigError(f"unknown case {case!r}; see `rigidlax catalog`", "system.case")
    params = CATALOG[case].parse_params(params)

    cfg = RunConfig(case, params, source=source)
    if "initial" in data:
        init = data["initial"]
        _reject_unknown(init, _INITIAL, "initial")
        modes = [k for k in ("x", "random") if k in init] + (["M/G"] if ("M" in init or "G" in init) else [])
        if len(modes) != 1:
            raise ConfigError("give exactly one of x, M and G, or random", "initial")
        if "random" in init:
            r = init["random"] or {}
            _reject_unknown(r, _RANDOM, "initial.random")
            seed = r.get("seed", 0)
            if isinstance(seed, bool) or not isinstance(seed, int):
                raise ConfigError("seed must be an integer", "initial.random.seed")
            scale = evaluate(r["scale"], "initial.random.scale") if "scale" in r else None
            cfg.initial = {"random": {"seed": seed, "scale": scale}}
        elif "x" in init:
            cfg.initial = {"x": evaluate_tree(init["x"], "initial.x")}
        else:
            if not ("M" in init and "G" in init):
                raise ConfigError("M and G must be given together", "initial")
            cfg.initial = {"M": evaluate_tree(init["M"], "initial.M"), "G": evaluate_tree(init["G"], "initial.G")}
    if "stepper" in data:
        st = data["stepper"] or {}
        _reject_unknown(st, _STEPPER, "stepper")
        out = {}
        for k, v in st.items():
            out[k] = str(v) if k == "method" else evaluate(v, f"stepper.{k}")
        cfg.stepper = out
    if "duration" in data:
        cfg.duration = evaluate(data["duration"], "duration")
    if "samples" in data:
        s = data["samples"]
        if isinstance(s, bool) or not isinstance(s, int) or s < 1:
            raise ConfigError("samples must be a positive integer", "samples")
        cfg.samples = s
    if "checks" in data:
        ch = data["checks"]
        if not isinstance(ch, list):
            raise ConfigError("expected a list", "checks")
        for i, c in enumerate(ch):
            if c not in CHECKS:
                raise ConfigError(f"unknown check {c!r}; allowed: {list(CHECKS)}", f"checks[{i}]")
        cfg.checks = list(ch)
    if "output" in data:
        ob = data["output"] or {}
        _reject_unknown(ob, _OUTPUT, "output")
        cfg.output = {**cfg.output, **{k: str(v) for k, v in ob.items()}}
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(str(exc), str(path)) from None
    return parse_config(text, source=str(path))
