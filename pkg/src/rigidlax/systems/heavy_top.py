"""Heavy rigid body fixed at a point (Euler-Poisson equations on e(3))."""
from __future__ import annotations

import numpy as np

from ..algebra import cross0, matvec0
from ..errors import InvalidArgument
from ..poisson import E3
from .base import System, as_vec, either, eq, fn, gt, safe_sqrt

HEAVY_TOP_CASES = (
    "generic",
    "euler",
    "lagrange",
    "kowalevski",
    "goryachev-chaplygin",
    "hess-appelrot",
    "hess-appelrot-zhukovski",
)


def _unit(rng, n=3):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


class HeavyTop(System):
    """``M' = M x Omega + G x chi``, ``G' = G x Omega`` with ``Omega = J M``.

    ``J`` is the inverse inertia operator. It is ``diag(1/I)`` in the
    principal frame; the Zhukovski frame of the Hess-Appel'rot case uses
    a symmetric ``J`` with a single off-diagonal entry ``J13``.
    """

    kind = "heavy-top"
    space = E3

    def __init__(self, I=(1.0, 1.0, 1.0), chi=(0.0, 0.0, 0.0), case="generic", J=None):
        super().__init__(case)
        if case not in HEAVY_TOP_CASES:
            raise InvalidArgument(f"unknown heavy-top case {case!r}; expected one of {HEAVY_TOP_CASES}")
        self.chi = as_vec(chi, 3, "chi")
        if J is None:
            self.I = as_vec(I, 3, "I")
            if np.any(self.I == 0):
                raise InvalidArgument("principal moments must be nonzero")
            self.J = np.diag(1.0 / self.I)
        else:
            self.J = np.asarray(J, dtype=float)
            if self.J.shape != (3, 3):
                raise InvalidArgument("J must be 3x3")
            self.I = 1.0 / np.diag(self.J)
        self.has_lax = case in ("hess-appelrot", "hess-appelrot-zhukovski")
        self.has_reduction = case == "hess-appelrot"

    @classmethod
    def zhukovski(cls, J1, J3, J13, Z0):
        J = np.array([[J1, 0.0, J13], [0.0, J1, 0.0], [J13, 0.0, J3]])
        top = cls(chi=(0.0, 0.0, Z0), case="hess-appelrot-zhukovski", J=J)
        top.zh = (float(J1), float(J3), float(J13), float(Z0))
        return top

    def params(self):
        if self.case == "hess-appelrot-zhukovski":
            J1, J3, J13, Z0 = self.zh
            return {"J1": J1, "J3": J3, "J13": J13, "Z0": Z0}
        return {"I": self.I.tolist(), "chi": self.chi.tolist()}

    # --- conditions ----------------------------------------------------------
    def conditions(self):
        I1, I2, I3 = self.I
        X0, Y0, Z0 = self.chi
        c = self.case
        if c == "hess-appelrot-zhukovski":
            J1, J3, J13, _ = self.zh
            return [
                gt("J1>0", J1),
                gt("J3>0", J3),
                gt("J1*J3-J13^2>0", J1 * J3 - J13**2),
            ]
        out = [gt("I1>0", I1), gt("I2>0", I2), gt("I3>0", I3)]
        if c == "euler":
            out += [eq("X0==0", X0), eq("Y0==0", Y0), eq("Z0==0", Z0)]
        elif c == "lagrange":
            out += [eq("I1==I2", I1, I2), eq("X0==0", X0), eq("Y0==0", Y0)]
        elif c == "kowalevski":
            out += [eq("I1==I2", I1, I2), eq("I1==2*I3", I1, 2 * I3), eq("Y0==0", Y0), eq("Z0==0", Z0)]
        elif c == "goryachev-chaplygin":
            out += [eq("I1==I2", I1, I2), eq("I1==4*I3", I1, 4 * I3), eq("Y0==0", Y0), eq("Z0==0", Z0)]
        elif c == "hess-appelrot":
            r1 = safe_sqrt(I1 * (I2 - I3))
            r3 = safe_sqrt(I3 * (I1 - I2))
            out += [
                eq("Y0==0", Y0),
                gt("I1*(I2-I3)>=0", I1 * (I2 - I3), -1e-300),
                gt("I3*(I1-I2)>=0", I3 * (I1 - I2), -1e-300),
                either("X0*sqrt(I1*(I2-I3)) +- Z0*sqrt(I3*(I1-I2)) == 0", X0 * r1 + Z0 * r3, X0 * r1 - Z0 * r3),
                gt("X0^2+Z0^2>0", X0**2 + Z0**2),
            ]
        return out

    # --- dynamics -------------------------------------------------------------
    def omega(self, x):
        return matvec0(self.J, x[:3])

    def rhs(self, x):
        x = np.asarray(x, dtype=float)
        M, G = x[:3], x[3:6]
        W = self.omega(x)
        chi = self.chi.reshape((3,) + (1,) * (x.ndim - 1))
        dM = cross0(M, W) + cross0(G, chi)
        dG = cross0(G, W)
        return np.concatenate([dM, dG])

    def hamiltonian(self):
        J, chi = self.J, self.chi

        def H(x):
            M = x[:3]
            return 0.5 * np.einsum("i...,ij,j...->...", M, J, M) + np.tensordot(chi, x[3:6], axes=(0, 0))

        def dH(x):
            return np.concatenate([J @ x[:3], chi])

        return fn(H, dH, "H")

    def case_integrals(self):
        I1, I2, I3 = self.I
        X0 = self.chi[0]
        c = self.case
        if c == "euler":
            return [fn(lambda x: np.sum(x[:3] ** 2, axis=0), lambda x: np.concatenate([2 * x[:3], np.zeros(3)]), "F4")]
        if c == "lagrange":
            e = np.array([0, 0, 1.0, 0, 0, 0])
            return [fn(lambda x: x[2], lambda x: e.copy(), "F4")]
        if c == "kowalevski":
            k = X0 / I3

            def F4(x):
                W1, W2 = x[0] / I1, x[1] / I2
                return (W1**2 - W2**2 - k * x[3]) ** 2 + (2 * W1 * W2 - k * x[4]) ** 2

            return [fn(F4, name="F4")]
        if c == "goryachev-chaplygin":
            # M3 (M1^2 + M2^2) + 2 M1 G3 at I3 X0 = -1/2; general coefficient -4 I3 X0
            k = -4.0 * I3 * X0

            def F4(x):
                return x[2] * (x[0] ** 2 + x[1] ** 2) + k * x[0] * x[5]

            leaf = (fn(lambda x: np.sum(x[:3] * x[3:6], axis=0), name="F1"), 0.0)
            return [fn(F4, name="F4", leaf=leaf)]
        return []

    def invariant_relations(self):
        if self.case == "hess-appelrot":
            X0, _, Z0 = self.chi
            c = np.array([X0, 0.0, Z0, 0, 0, 0])
            return [fn(lambda x: X0 * x[0] + Z0 * x[2], lambda x: c.copy(), "F4")]
        if self.case == "hess-appelrot-zhukovski":
            e = np.array([0, 0, 1.0, 0, 0, 0])
            return [fn(lambda x: x[2], lambda x: e.copy(), "F4")]
        return []

    # --- sampling --------------------------------------------------------------
    def sample_state(self, rng, scale=1.0):
        M = scale * rng.normal(size=3)
        G = _unit(rng)
        if self.case == "goryachev-chaplygin":
            M = M - np.dot(M, G) * G
        elif self.case == "hess-appelrot":
            X0, _, Z0 = self.chi
            n = np.array([X0, 0.0, Z0]) / np.hypot(X0, Z0)
            M = M - np.dot(M, n) * n
        elif self.case == "hess-appelrot-zhukovski":
            M[2] = 0.0
        return np.concatenate([M, G])


def euler(I=(1.0, 2.0, 3.0)):
    return HeavyTop(I, (0, 0, 0), "euler")


def lagrange(I1=2.0, I3=1.0, Z0=1.0):
    return HeavyTop((I1, I1, I3), (0, 0, Z0), "lagrange")


def kowalevski(I3=1.0, X0=1.0):
    return HeavyTop((2 * I3, 2 * I3, I3), (X0, 0, 0), "kowalevski")


def goryachev_chaplygin(I3=1.0, X0=-0.5):
    return HeavyTop((4 * I3, 4 * I3, I3), (X0, 0, 0), "goryachev-chaplygin")


def hess_appelrot(I=(3.0, 2.0, 1.0), X0=1.0, sign=-1.0):
    """Hess-Appel'rot top with ``Z0`` solved from the case condition.

    ``Z0 = sign * X0 * sqrt(I1 (I2 - I3) / (I3 (I1 - I2)))``; the default sign
    puts the centre of mass on the branch with a plus sign in the condition.
    """
    I1, I2, I3 = I
    Z0 = sign * X0 * np.sqrt(I1 * (I2 - I3)) / np.sqrt(I3 * (I1 - I2))
    return HeavyTop(I, (X0, 0, Z0), "hess-appelrot")
