"""Explicit Runge-Kutta integration with dense output and drift monitors.

Two steppers: classical fixed-step RK4 and the adaptive Dormand-Prince 5(4)
pair. States may carry trailing batch axes, ``x0.shape == (dim, *batch)``;
a batch shares one step sequence, controlled by its worst member. Output is sampled on a requested time grid by cubic Hermite
interpolation on accepted steps (RK4) or the stepper's own order-4
continuous extension (DOPRI5).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgument, MaxStepsExceeded, NonFiniteState, StepUnderflow

METHODS = ("rk4", "dopri45")

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4
# coefficients of the order-4 continuous extension (Hairer & Wanner, DOPRI5)
_D = np.array([
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799, -10690763975 / 1880347072,
    701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423,
])

SAFETY = 0.9
GROW_MIN, GROW_MAX = 0.2, 5.0


@dataclass(frozen=True)
class StepperConfig:
    """Integrator settings.

    ``rk4`` needs ``dt``; ``dopri45`` uses ``rel_tol``/``abs_tol``.
    ``samples`` uniform output times on ``[0, T]`` are produced unless an
    explicit grid is passed to :func:`simulate`.
    """

    T: float = 1.0
    method: str = "dopri45"
    dt: float | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 10**7
    samples: int = 1000
    h0: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidArgument(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not (math.isfinite(self.T) and self.T >= 0):
            raise InvalidArgument("T must be finite and >= 0")
        if self.method == "rk4":
            if self.dt is None or not self.dt > 0:
                raise InvalidArgument("rk4 needs dt > 0")
        else:
            if not (self.rel_tol > 0 and self.abs_tol > 0):
                raise InvalidArgument("tolerances must be > 0")
        if self.samples < 1:
            raise InvalidArgument("samples must be >= 1")
        if self.max_steps < 1:
            raise InvalidArgument("max_steps must be >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_samples, dim, *batch)
    monitors: dict = field(default_factory=dict)
    steps: int = 0
    rejected: int = 0
    coordinate_names: list | None = None

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise InvalidArgument("times and states differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise InvalidArgument("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def final(self):
        return self.states[-1]

    def add_monitor(self, fn, name=None):
        """Evaluate ``fn`` on every sample and store it as a channel."""
        name = name or getattr(fn, "name", "f")
        self.monitors[name] = np.array([fn(x) for x in self.states])
        return self.monitors[name]

    def to_csv(self, path):
        """Write ``t``, the state coordinates, then monitor channels."""
        if self.states.ndim != 2:
            raise InvalidArgument("CSV export needs an unbatched trajectory")
        names = self.coordinate_names or [f"x{i}" for i in range(self.states.shape[1])]
        mon = list(self.monitors)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", *names, *mon])
            for j, t in enumerate(self.times):
                row = [t, *self.states[j], *(self.monitors[m][j] for m in mon)]
                w.writerow([f"{float(v):.17g}" for v in row])


@dataclass
class Drift:
    name: str
    initial: object
    max_drift: float
    t_at_max: float
    conditional: bool = False

    def to_dict(self):
        init = self.initial.tolist() if isinstance(self.initial, np.ndarray) else self.initial
        d = {"initial": init, "max_drift": self.max_drift, "t_at_max": self.t_at_max}
        if self.conditional:
            d["conditional"] = True
        return d


class ConservationReport:
    """Per-name initial value, largest ``|f(x(t)) - f(x(0))|`` and its time."""

    def __init__(self, entries=None):
        self.entries = dict(entries or {})

    @classmethod
    def from_series(cls, times, series, conditional=()):
        out = {}
        times = np.asarray(times)
        for name, v in series.items():
            v = np.asarray(v, dtype=float)
            d = np.abs(v - v[0])
            per_t = d.reshape(len(times), -1).max(axis=1) if d.ndim > 1 else d
            j = int(np.argmax(per_t))
            init = v[0] if v.ndim > 1 else float(v[0])
            out[name] = Drift(name, init, float(per_t[j]), float(times[j]), name in conditional)
        return cls(out)

    def __getitem__(self, name):
        return self.entries[name]

    def __contains__(self, name):
        return name in self.entries

    def __iter__(self):
        return iter(self.entries.values())

    @property
    def names(self):
        return list(self.entries)

    def max_drift(self, names=None):
        names = self.names if names is None else names
        return max((self.entries[n].max_drift for n in names), default=0.0)

    def merge(self, other, prefix=""):
        for k, v in other.entries.items():
            self.entries[prefix + k] = replace(v, name=prefix + v.name) if prefix else v
        return self

    def to_dict(self):
        return {k: v.to_dict() for k, v in self.entries.items()}

    def __repr__(self):
        body = ", ".join(f"{k}: {v.max_drift:.2e}" for k, v in self.entries.items())
        return f"ConservationReport({body})"


# --- steppers --------------------------------------------------------------------

def _field(system):
    return system.rhs if hasattr(system, "rhs") else system


def _rk4_step(f, y, h, k1):
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _dopri_step(f, y, h, k1):
    a = _A
    k2 = f(y + h * (a[1][0] * k1))
    k3 = f(y + h * (a[2][0] * k1 + a[2][1] * k2))
    k4 = f(y + h * (a[3][0] * k1 + a[3][1] * k2 + a[3][2] * k3))
    k5 = f(y + h * (a[4][0] * k1 + a[4][1] * k2 + a[4][2] * k3 + a[4][3] * k4))
    k6 = f(y + h * (a[5][0] * k1 + a[5][1] * k2 + a[5][2] * k3 + a[5][3] * k4 + a[5][4] * k5))
    y5 = y + h * (a[6][0] * k1 + a[6][2] * k3 + a[6][3] * k4 + a[6][4] * k5 + a[6][5] * k6)
    k7 = f(y5)
    e = _E
    err = h * (e[0] * k1 + e[2] * k3 + e[3] * k4 + e[4] * k5 + e[5] * k6 + e[6] * k7)
    return y5, err, (k1, k2, k3, k4, k5, k6, k7)


def _error_norm(err, y0, y1, rtol, atol):
    # weighted RMS over the state axis; the worst batch member decides
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.max(np.sqrt(np.mean((err / scale) ** 2, axis=0))))


def _initial_step(f, y0, f0, T, rtol, atol):
    # Hairer, Norsett & Wanner starting-step heuristic
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, T)
    f1 = f(y0 + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    h1 = max(1e-6, h0 * 1e-3) if max(d1, d2) <= 1e-15 else (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, T)


def _dopri_dense(y0, y1, h, K):
    """Coefficients of the DOPRI5 continuous extension on one accepted step."""
    dy = y1 - y0
    b = h * K[0] - dy
    d = _D
    k1, _, k3, k4, k5, k6, k7 = K
    r5 = h * (d[0] * k1 + d[2] * k3 + d[3] * k4 + d[4] * k5 + d[5] * k6 + d[6] * k7)
    return (y0, dy, b, dy - h * k7 - b, r5)


def _dopri_eval(r, s):
    return r[0] + s * (r[1] + (1 - s) * (r[2] + s * (r[3] + (1 - s) * r[4])))


def _hermite(t0, y0, f0, t1, y1, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def simulate(system, x0, cfg=None, t_eval=None):
    """Integrate ``x' = rhs(x)`` from ``x0`` over ``[0, cfg.T]``.

    ``system`` is a catalog system (its ``rhs`` is used) or a plain callable.
    Returns a :class:`Trajectory` sampled at ``t_eval`` (default
    ``cfg.samples`` uniform points, or just ``t = 0`` when ``T = 0``).
    """
    cfg = cfg or StepperConfig()
    f = _field(system)
    y = np.array(x0, dtype=float)
    if not np.all(np.isfinite(y)):
        raise NonFiniteState("initial state is not finite")
    T = float(cfg.T)
    if t_eval is None:
        t_eval = np.array([0.0]) if T == 0 else np.linspace(0.0, T, cfg.samples if cfg.samples > 1 else 2)
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.size and (t_eval[0] < 0 or t_eval[-1] > T * (1 + 1e-12) + 1e-300):
        raise InvalidArgument("sample times must lie in [0, T]")
    out = np.empty((len(t_eval),) + y.shape)
    names = getattr(getattr(system, "space", None), "coordinate_names", lambda: None)()

    fy = np.asarray(f(y), dtype=float)
    t = 0.0
    j = 0
    while j < len(t_eval) and t_eval[j] <= 0.0:
        out[j] = y
        j += 1
    steps = rejected = 0
    if T == 0 or j == len(t_eval):
        return Trajectory(t_eval, out, steps=0, coordinate_names=names)

    if cfg.method == "rk4":
        n = max(1, int(math.ceil(T / cfg.dt - 1e-9)))
        if n > cfg.max_steps:
            raise MaxStepsExceeded(f"rk4 needs {n} steps > max_steps={cfg.max_steps}")
        for k in range(n):
            h = min(cfg.dt, T - t)
            y1 = _rk4_step(f, y, h, fy)
            f1 = np.asarray(f(y1), dtype=float)
            if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(f1))):
                raise NonFiniteState(f"non-finite state at t={t + h:.6g}")
            t1 = T if k == n - 1 else t + h
            while j < len(t_eval) and t_eval[j] <= t1:
                out[j] = y1 if t_eval[j] == t1 else _hermite(t, y, fy, t1, y1, f1, t_eval[j])
                j += 1
            t, y, fy = t1, y1, f1
            steps += 1
        return Trajectory(t_eval, out, steps=steps, coordinate_names=names)

    rtol, atol = cfg.rel_tol, cfg.abs_tol
    h = cfg.h0 or _initial_step(f, y, fy, T, rtol, atol)
    h_min = 1e-14 * T
    while t < T:
        if steps + rejected >= cfg.max_steps:
            raise MaxStepsExceeded(f"exceeded max_steps={cfg.max_steps} at t={t:.6g}")
        last = t + h >= T * (1 - 1e-15)
        if last:
            h = T - t
        y1, err, K = _dopri_step(f, y, h, fy)
        f1 = K[6]
        if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(f1))):
            rejected += 1
            h *= GROW_MIN
            if h < h_min:
                raise NonFiniteState(f"non-finite state near t={t:.6g}")
            continue
        en = _error_norm(err, y, y1, rtol, atol)
        if en <= 1.0:
            t1 = T if last else t + h
            if j < len(t_eval) and t_eval[j] <= t1:
                r = _dopri_dense(y, y1, h, K)
            while j < len(t_eval) and t_eval[j] <= t1:
                out[j] = y1 if t_eval[j] == t1 else _dopri_eval(r, (t_eval[j] - t) / h)
                j += 1
            t, y, fy = t1, y1, f1
            steps += 1
            fac = GROW_MAX if en == 0 else min(GROW_MAX, max(GROW_MIN, SAFETY * en ** (-0.2)))
        else:
            rejected += 1
            fac = min(1.0, max(GROW_MIN, SAFETY * en ** (-0.2)))
        h *= fac
        if t < T and h < h_min:
            raise StepUnderflow(f"step size {h:.3g} below {h_min:.3g} at t={t:.6g}")
    while j < len(t_eval):
        out[j] = y
        j += 1
    return Trajectory(t_eval, out, steps=steps, rejected=rejected, coordinate_names=names)


def monitor(traj, fns):
    """Drift report for SmoothFns (or ``(name, callable)`` pairs) along ``traj``.

    A function carrying a ``leaf`` condition ``(g, value)`` is reported as
    conditional when the initial state is off that leaf.
    """
    series = {}
    conditional = []
    for item in fns:
        name, fn = (item if isinstance(item, tuple) else (item.name, item))
        series[name] = np.array([np.asarray(fn(x), dtype=float) for x in traj.states])
        leaf = getattr(fn, "leaf", None)
        if leaf is not None:
            g, value = leaf
            if np.max(np.abs(np.asarray(g(traj.states[0])) - value)) > 1e-9:
                conditional.append(name)
    return ConservationReport.from_series(traj.times, series, conditional)
