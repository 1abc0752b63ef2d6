"""The family of systems on e(3) sharing the Hess-Appel'rot elliptic curve.

The field is ``x' = {x, H1} + a(x) {x, H2}`` with

    H1 = |M|^2 / (2 I2) + X0 G1 + Z0 G3,     H2 = X0 M1 + Z0 M3,

and ``a`` a polynomial in the phase coordinates.
"""
from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument, NotHamiltonianError
from ..poisson import E3, SmoothFn, bracket_e3
from .base import System, fn, gt

FAMILY_CASES = ("i", "ii", "iii", "iv", "v", "custom")


def _family_a(case, X0, Z0):
    if case == "i":
        return fn(lambda x: np.sum(x[:3] * x[3:6], axis=0), lambda x: np.concatenate([x[3:6], x[:3]]), "F1")
    if case == "ii":
        return fn(lambda x: np.sum(x[3:6] ** 2, axis=0), lambda x: np.concatenate([np.zeros(3), 2 * x[3:6]]), "F2")
    if case == "iii":
        c = np.array([X0, 0, Z0, 0, 0, 0.0])
        return fn(lambda x: X0 * x[0] + Z0 * x[2], lambda x: c.copy(), "H2")
    if case == "iv":
        c = np.array([0, 0, 0, X0, 0, Z0])
        return fn(lambda x: X0 * x[3] + Z0 * x[5], lambda x: c.copy(), "X0*G1+Z0*G3")
    if case == "v":
        return fn(lambda x: np.sum(x[:3] ** 2, axis=0), lambda x: np.concatenate([2 * x[:3], np.zeros(3)]), "|M|^2")
    raise InvalidArgument(f"unknown family case {case!r}")


class Family(System):
    kind = "family"
    space = E3
    has_lax = True
    has_reduction = True

    def __init__(self, X0, Z0, I2, case="i", a=None, a_source=None):
        super().__init__(case)
        if case not in FAMILY_CASES:
            raise InvalidArgument(f"unknown family case {case!r}; expected one of {FAMILY_CASES}")
        self.X0, self.Z0, self.I2 = float(X0), float(Z0), float(I2)
        self.delta = float(np.hypot(self.X0, self.Z0))
        if case == "custom":
            if a is None:
                raise InvalidArgument("custom family case needs a polynomial a")
            self.a = a if isinstance(a, SmoothFn) else SmoothFn(a, name=a_source or "a")
        else:
            self.a = _family_a(case, self.X0, self.Z0)
        self.a_source = a_source

    def params(self):
        p = {"X0": self.X0, "Z0": self.Z0, "I2": self.I2}
        if self.case == "custom":
            p["a"] = self.a_source or self.a.name
        return p

    def with_case(self, case, a=None, a_source=None):
        return Family(self.X0, self.Z0, self.I2, case, a, a_source)

    def conditions(self):
        return [gt("I2>0", self.I2), gt("X0^2+Z0^2>0", self.X0**2 + self.Z0**2)]

    @property
    def alpha(self):
        return self.X0 / self.delta

    @property
    def beta(self):
        return self.Z0 / self.delta

    def H1(self):
        X0, Z0, I2 = self.X0, self.Z0, self.I2

        def f(x):
            return np.sum(x[:3] ** 2, axis=0) / (2 * I2) + X0 * x[3] + Z0 * x[5]

        def g(x):
            return np.concatenate([x[:3] / I2, [X0, 0.0, Z0]])

        return fn(f, g, "H1")

    def H2(self):
        c = np.array([self.X0, 0, self.Z0, 0, 0, 0.0])
        return fn(lambda x: self.X0 * x[0] + self.Z0 * x[2], lambda x: c.copy(), "H2")

    def rhs_with_a(self, x, a):
        X0, Z0, I2 = self.X0, self.Z0, self.I2
        M1, M2, M3, G1, G2, G3 = x[:6]
        return np.stack(
            [
                Z0 * G2 + a * Z0 * M2,
                X0 * G3 - Z0 * G1 + a * (X0 * M3 - Z0 * M1),
                -X0 * G2 - a * X0 * M2,
                (G2 * M3 - G3 * M2) / I2 + a * Z0 * G2,
                (G3 * M1 - G1 * M3) / I2 + a * (X0 * G3 - Z0 * G1),
                (G1 * M2 - G2 * M1) / I2 - a * X0 * G2,
            ]
        )

    def rhs(self, x):
        x = np.asarray(x, dtype=float)
        return self.rhs_with_a(x, self.a(x))

    def hamiltonian(self):
        H1, H2, a = self.H1(), self.H2(), self.a
        if self.case in ("i", "ii"):
            return fn(
                lambda x: H1(x) + a(x) * H2(x),
                lambda x: H1.gradient(x) + a(x) * H2.gradient(x) + H2(x) * a.gradient(x),
                "H",
            )
        if self.case == "iii":
            return fn(
                lambda x: H1(x) + 0.5 * H2(x) ** 2,
                lambda x: H1.gradient(x) + H2(x) * H2.gradient(x),
                "H",
            )
        raise NotHamiltonianError(f"family case ({self.case}) is not Hamiltonian in the e(3) structure")

    def case_integrals(self):
        return [self.H1(), self.H2()]

    def measure_criterion(self, x):
        """``{a, H2}(x)``; the field preserves volume iff this vanishes identically."""
        return bracket_e3(self.a, self.H2(), x)

    def sample_state(self, rng, scale=1.0):
        G = rng.normal(size=3)
        return np.concatenate([scale * rng.normal(size=3), G / np.linalg.norm(G)])
