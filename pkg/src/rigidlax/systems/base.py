"""Common machinery for catalog systems: case conditions, validation reports
and the abstract system interface."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgument, NotHamiltonianError
from ..poisson import SmoothFn, casimirs, check_kind, ham_field

STRICT_TOL = 1e-12
LOOSE_TOL = 1e-6


@dataclass(frozen=True)
class Condition:
    """One case condition ``lhs <op> rhs``.

    ``op`` is one of ``"=="``, ``"!="``, ``">"``. ``branches`` optionally holds
    alternative ``(label, lhs)`` pairs for sign-ambiguous equalities; the
    condition holds if any branch does.
    """

    id: str
    lhs: float
    rhs: float = 0.0
    op: str = "=="
    branches: tuple = ()

    def check(self, tol):
        if self.branches:
            for label, lhs in self.branches:
                if abs(lhs - self.rhs) <= tol * max(1.0, abs(self.rhs)):
                    return True, label
            return False, None
        if self.op == "==":
            return abs(self.lhs - self.rhs) <= tol * max(1.0, abs(self.rhs)), None
        if self.op == "!=":
            return abs(self.lhs - self.rhs) > tol * max(1.0, abs(self.rhs)), None
        if self.op == ">":
            return self.lhs > self.rhs, None
        raise InvalidArgument(f"unknown operator {self.op!r}")


@dataclass
class CheckResult:
    id: str
    lhs: float
    rhs: float
    op: str
    passed: bool
    branch: str | None = None

    def __str__(self):
        mark = "ok  " if self.passed else "FAIL"
        extra = f" [branch {self.branch}]" if self.branch else ""
        return f"{mark} {self.id}: lhs={self.lhs:.17g} {self.op} rhs={self.rhs:.17g}{extra}"


@dataclass
class ValidationReport:
    system: str
    case: str
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    @property
    def violations(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "system": self.system,
            "case": self.case,
            "ok": self.ok,
            "checks": [
                {"id": c.id, "lhs": c.lhs, "rhs": c.rhs, "op": c.op, "passed": c.passed, "branch": c.branch}
                for c in self.checks
            ],
        }

    def __str__(self):
        head = f"{self.system}/{self.case}: {'ok' if self.ok else 'violations'}"
        return "\n".join([head] + [f"  {c}" for c in self.checks])


def eq(id, lhs, rhs=0.0):
    return Condition(id, float(lhs), float(rhs), "==")


def ne(id, lhs, rhs=0.0):
    return Condition(id, float(lhs), float(rhs), "!=")


def gt(id, lhs, rhs=0.0):
    return Condition(id, float(lhs), float(rhs), ">")


def either(id, plus, minus, rhs=0.0):
    """Sign-ambiguous equality; ``plus`` and ``minus`` are the two branches."""
    return Condition(id, float(plus), float(rhs), "==", (("+", float(plus)), ("-", float(minus))))


def safe_sqrt(v):
    return math.sqrt(v) if v >= 0 else float("nan")


class System:
    """A validated parameter set on one of the phase spaces.

    Subclasses provide ``space``, ``kind``, ``case``, ``conditions``,
    ``rhs`` and usually ``hamiltonian``. Functions operate on phase points
    with the coordinate layout of ``space`` and broadcast over batch axes.
    """

    kind = "system"
    space = None
    has_lax = False
    has_reduction = False

    def __init__(self, case="generic"):
        self.case = case

    # --- case conditions ---------------------------------------------------
    def conditions(self):
        return []

    def validate(self, tol=STRICT_TOL):
        report = ValidationReport(self.kind, self.case)
        for c in self.conditions():
            passed, branch = c.check(tol)
            report.checks.append(CheckResult(c.id, c.lhs, c.rhs, c.op, passed, branch))
        return report

    # --- dynamics ------------------------------------------------------------
    def rhs(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.rhs(x)

    def hamiltonian(self):
        raise NotHamiltonianError(f"{self.kind}/{self.case} is not Hamiltonian")

    def hamiltonian_field(self, x):
        return ham_field(self.space, self.hamiltonian(), check_kind(self.space, x))

    def casimirs(self):
        return casimirs(self.space, verify=False)

    def case_integrals(self):
        return []

    def integrals(self):
        """Hamiltonian (if any), Casimirs, then case-specific integrals."""
        out = []
        try:
            out.append(self.hamiltonian())
        except NotHamiltonianError:
            pass
        return out + self.casimirs() + self.case_integrals()

    def invariant_relations(self):
        return []

    def sample_state(self, rng):
        """A random state on the case's invariant manifold / leaf."""
        raise NotImplementedError

    def params(self):
        return {}

    def describe(self):
        return f"{self.kind}/{self.case} {self.params()}"

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}(case={self.case!r}, {args})"


def fn(func, grad="cs", name=None, leaf=None):
    """Catalog functions are polynomials, so complex-step gradients are exact."""
    return SmoothFn(func, grad=grad, name=name, leaf=leaf)


def as_vec(v, n, what):
    a = np.asarray(v, dtype=float)
    if a.shape != (n,):
        raise InvalidArgument(f"{what} must have {n} components, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgument(f"{what} must be finite")
    return a
