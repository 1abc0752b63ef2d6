"""Rigid bodies on so(n) x so(n): the Lagrange bitop and the
Hess-Appel'rot systems in dimension four and higher.

Equations of motion are ``M' = [M, Omega] + [G, chi]``, ``G' = [G, Omega]``.
The bitop uses the mass-tensor metric ``M = I Omega + Omega I``; the
Hess-Appel'rot systems use ``Omega = J M + M J``.
"""
from __future__ import annotations

import numpy as np

from ..algebra import commutator, inner, join4, skew_dim, skew_to_upper, split4, upper_indices
from ..errors import InvalidArgument
from ..poisson import S4, so_space
from .base import System, eq, fn, gt, ne


def _pf(A):
    return A[..., 0, 1] * A[..., 2, 3] - A[..., 0, 2] * A[..., 1, 3] + A[..., 0, 3] * A[..., 1, 2]


def block_chi(n, chi12, chi34=0.0):
    chi = np.zeros((n, n))
    chi[0, 1], chi[1, 0] = chi12, -chi12
    if n >= 4:
        chi[2, 3], chi[3, 2] = chi34, -chi34
    return chi


def _unit_split_gamma(rng):
    """Random ``Gamma`` in so(4) whose two split halves are unit vectors."""
    g1, g2 = rng.normal(size=(2, 3))
    return skew_to_upper(join4(g1 / np.linalg.norm(g1), g2 / np.linalg.norm(g2)))


class SoSystem(System):
    """Common parts of the so(n) x so(n) systems."""

    kind = "so"

    def __init__(self, n, chi, case):
        super().__init__(case)
        self.n = int(n)
        self.space = S4 if self.n == 4 else so_space(self.n)
        self.chi = np.asarray(chi, dtype=float)
        self._m = skew_dim(self.n)

    def omega(self, M):
        raise NotImplementedError

    def rhs(self, x):
        """Matrix form of the equations."""
        x = np.asarray(x, dtype=float)
        M, G = self.space.unpack(x)
        W = self.omega(M)
        dM = commutator(M, W) + commutator(G, self.chi)
        dG = commutator(G, W)
        return self.space.pack(dM, dG)

    def rhs_split(self, x):
        """The same field computed on so(3) x so(3) via the split of so(4)."""
        if self.n != 4:
            raise InvalidArgument("the split form exists only for n = 4")
        x = np.asarray(x, dtype=float)
        if x.ndim > 1:
            cols = x.reshape(x.shape[0], -1)
            out = np.stack([self.rhs_split(cols[:, k]) for k in range(cols.shape[1])], axis=-1)
            return out.reshape(x.shape)
        M, G = self.space.unpack(x)
        M1, M2 = split4(M)
        G1, G2 = split4(G)
        W1, W2 = self.omega_split(M1, M2)
        c1, c2 = split4(self.chi)
        dM1 = 2 * (np.cross(M1, W1) + np.cross(G1, c1))
        dM2 = 2 * (np.cross(M2, W2) + np.cross(G2, c2))
        dG1 = 2 * np.cross(G1, W1)
        dG2 = 2 * np.cross(G2, W2)
        return self.space.pack(join4(dM1, dM2), join4(dG1, dG2))

    def omega_split(self, M1, M2):
        raise NotImplementedError

    def hamiltonian(self):
        sp, chi = self.space, self.chi
        m = self._m
        cflat = skew_to_upper(chi)

        def H(x):
            M, G = sp.unpack(x)
            return 0.5 * inner(M, self.omega(M)) + inner(chi, G)

        def dH(x):
            M, _ = sp.unpack(x)
            return np.concatenate([skew_to_upper(self.omega(M)), cflat])

        return fn(H, dH, "H")

    def casimirs(self):
        from ..poisson import casimirs

        return casimirs(self.space, verify=False)

    def _random_skew(self, rng, scale=1.0):
        return scale * rng.normal(size=self._m)

    def entry(self, i, j):
        """Coordinate function of ``M_ij`` (1-based, i < j)."""
        k = upper_indices(self.n).index((i - 1, j - 1))
        e = np.zeros(self.space.dim)
        e[k] = 1.0
        return fn(lambda x: x[k], lambda x: e.copy(), f"M{i}{j}")


# --- Lagrange bitop ------------------------------------------------------------

class Bitop(SoSystem):
    """Four-dimensional body with ``I = diag(a, a, b, b)`` and block-diagonal
    ``chi``; ``Omega_ij = M_ij / (I_i + I_j)``."""

    kind = "bitop"
    has_lax = True
    has_reduction = True

    def __init__(self, a, b, chi12, chi34):
        self.a, self.b = float(a), float(b)
        self.chi12, self.chi34 = float(chi12), float(chi34)
        super().__init__(4, block_chi(4, chi12, chi34), "bitop")
        self.I = np.array([a, a, b, b], dtype=float)
        S = self.I[:, None] + self.I[None, :]
        np.fill_diagonal(S, 1.0)
        self._inv = 1.0 / S
        I1, I2, I3, I4 = self.I
        self.I_plus = np.array([I2 + I3, I1 + I3, I1 + I2])
        self.I_minus = np.array([I1 + I4, I2 + I4, I3 + I4])
        self.C = (self.a + self.b) * self.chi

    def params(self):
        return {"a": self.a, "b": self.b, "chi12": self.chi12, "chi34": self.chi34}

    def conditions(self):
        return [
            gt("a>0", self.a),
            gt("b>0", self.b),
            ne("a!=b", self.a, self.b),
            ne("chi12!=0", self.chi12),
            ne("chi34!=0", self.chi34),
            ne("|chi12|!=|chi34|", abs(self.chi12), abs(self.chi34)),
        ]

    def omega(self, M):
        return M * self._inv

    def omega_split(self, M1, M2):
        Wp = (M1 + M2) / self.I_plus
        Wm = (M1 - M2) / self.I_minus
        return (Wp + Wm) / 2, (Wp - Wm) / 2

    def case_integrals(self):
        C12, C34 = self.C[0, 1], self.C[2, 3]
        sp = self.space

        def B(x):
            M, _ = sp.unpack(x)
            return 2 * C12 * M[..., 0, 1] + 2 * C34 * M[..., 2, 3]

        def D(x):
            M, G = sp.unpack(x)
            return np.sum(x[:6] ** 2, axis=0) + 2 * C12 * G[..., 0, 1] + 2 * C34 * G[..., 2, 3]

        def Hq(x):
            M, _ = sp.unpack(x)
            return C34 * M[..., 0, 1] + C12 * M[..., 2, 3]

        def Iq(x):
            M, G = sp.unpack(x)
            return C34 * G[..., 0, 1] + C12 * G[..., 2, 3] + _pf(M)

        return [fn(B, name="B"), fn(D, name="D"), fn(Hq, name="Hq"), fn(Iq, name="I")]

    def sample_state(self, rng, scale=1.0):
        return np.concatenate([self._random_skew(rng, scale), _unit_split_gamma(rng)])


# --- Hess-Appel'rot in dimension n >= 4 ------------------------------------------

def ha_metric(n, J1, J3, J13, J24):
    J = np.zeros((n, n))
    J[0, 0] = J[1, 1] = J1
    for k in range(2, n):
        J[k, k] = J3
    J[0, 2] = J[2, 0] = J13
    J[1, 3] = J[3, 1] = J24
    return J


class HessAppelrotN(SoSystem):
    """Hess-Appel'rot body on so(n) x so(n) with ``Omega = J M + M J``."""

    kind = "han"
    has_lax = True

    def __init__(self, n, J1, J3, J13, J24, chi12, chi34=0.0):
        n = int(n)
        if n < 4:
            raise InvalidArgument("the Hess-Appel'rot metric needs n >= 4")
        self.J1, self.J3, self.J13, self.J24 = map(float, (J1, J3, J13, J24))
        self.chi12, self.chi34 = float(chi12), float(chi34)
        super().__init__(n, block_chi(n, chi12, chi34), "ha4" if n == 4 else "han")
        self.J = ha_metric(n, J1, J3, J13, J24)
        self.s = self.J1 + self.J3
        self.C = self.chi / self.s

    def params(self):
        p = {"J1": self.J1, "J3": self.J3, "J13": self.J13, "J24": self.J24, "chi12": self.chi12}
        if self.n == 4:
            p["chi34"] = self.chi34
        else:
            p = {"n": self.n, **p}
        return p

    def conditions(self):
        J1, J3, J13, J24 = self.J1, self.J3, self.J13, self.J24
        out = [
            gt("J1>0", J1),
            gt("J3>0", J3),
            gt("J1*J3-J13^2>0", J1 * J3 - J13**2),
            gt("J1*J3-J24^2>0", J1 * J3 - J24**2),
            ne("chi12!=0", self.chi12),
        ]
        if self.n > 4:
            out.append(eq("chi34==0", self.chi34))
        return out

    def omega(self, M):
        return self.J @ M + M @ self.J

    def omega_split(self, M1, M2):
        s, d = self.J1 + self.J3, self.J1 - self.J3
        p, q = self.J13 + self.J24, self.J13 - self.J24
        W1 = np.array(
            [
                s * M1[0] - q * M2[2],
                s * M1[1],
                s * M1[2] + d * M2[2] - p * M2[0],
            ]
        )
        W2 = np.array(
            [
                s * M2[0] - p * M1[2],
                s * M2[1],
                s * M2[2] + d * M1[2] - q * M1[0],
            ]
        )
        return W1, W2

    def relation_pairs(self):
        """Index pairs (1-based) of the entries of ``M`` that vanish on the
        invariant manifold."""
        pairs = [(1, 2)]
        for l in range(3, self.n + 1):
            for p in range(l + 1, self.n + 1):
                pairs.append((l, p))
        return pairs

    def invariant_relations(self):
        return [self.entry(i, j) for i, j in self.relation_pairs()]

    def case_integrals(self):
        if self.n != 4:
            return []
        C12, C34 = self.C[0, 1], self.C[2, 3]
        sp = self.space

        def c(x):
            M, G = sp.unpack(x)
            return np.sum(x[:6] ** 2, axis=0) + 2 * C12 * G[..., 0, 1] + 2 * C34 * G[..., 2, 3]

        def h(x):
            M, G = sp.unpack(x)
            return C34 * G[..., 0, 1] + C12 * G[..., 2, 3] + _pf(M)

        return [fn(c, name="c"), fn(h, name="h")]

    def sample_state(self, rng, scale=1.0):
        M = self._random_skew(rng, scale)
        for k, (i, j) in enumerate(upper_indices(self.n)):
            if (i + 1, j + 1) in self.relation_pairs():
                M[k] = 0.0
        G = _unit_split_gamma(rng) if self.n == 4 else self._random_skew(rng)
        return np.concatenate([M, G])


def ha4(J1=1.0, J3=0.5, J13=0.3, J24=0.2, chi12=1.0, chi34=0.4):
    return HessAppelrotN(4, J1, J3, J13, J24, chi12, chi34)


def han(n=5, J1=1.0, J3=0.5, J13=0.3, J24=0.2, chi12=1.0):
    return HessAppelrotN(n, J1, J3, J13, J24, chi12)


def bitop(a=1.0, b=2.0, chi12=1.0, chi34=0.5):
    return Bitop(a, b, chi12, chi34)
