"""Kirchhoff equations for a rigid body in an ideal fluid, on e(3).

    H = 1/2 <A M, M> + <B M, G> + 1/2 <C G, G>
    M' = M x dH/dM + G x dH/dG,   G' = G x dH/dM
"""
from __future__ import annotations

import numpy as np

from ..algebra import cross0, matvec0
from ..errors import InvalidArgument
from ..poisson import E3, quadratic
from .base import System, either, eq, fn, gt, ne, safe_sqrt

KIRCHHOFF_CASES = (
    "generic",
    "kirchhoff",
    "clebsch1",
    "clebsch2",
    "steklov",
    "lyapunov",
    "sokolov",
    "chaplygin1",
    "chaplygin2",
)


def _mat(A, what):
    A = np.asarray(A, dtype=float)
    if A.shape == (3,):
        A = np.diag(A)
    if A.shape != (3, 3):
        raise InvalidArgument(f"{what} must be a 3x3 matrix or a 3-vector diagonal")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument(f"{what} must be finite")
    return A


def _adj(C):
    """Adjugate, ``det(C) C^-1`` without requiring invertibility."""
    out = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            minor = np.delete(np.delete(C, j, axis=0), i, axis=1)
            out[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return out


class Kirchhoff(System):
    kind = "kirchhoff"
    space = E3

    def __init__(self, A, B=None, C=None, case="generic", params=None):
        super().__init__(case)
        if case not in KIRCHHOFF_CASES:
            raise InvalidArgument(f"unknown Kirchhoff case {case!r}; expected one of {KIRCHHOFF_CASES}")
        self.A = _mat(A, "A")
        self.B = np.zeros((3, 3)) if B is None else _mat(B, "B")
        self.C = np.zeros((3, 3)) if C is None else _mat(C, "C")
        self._params = dict(params or {})
        self.Q = np.block([[self.A, self.B.T], [self.B, self.C]])
        self.has_lax = case == "chaplygin2" and self._params.get("form") == "rotated" and not np.any(self.B)

    def params(self):
        if self._params:
            return dict(self._params)
        return {"A": self.A.tolist(), "B": self.B.tolist(), "C": self.C.tolist()}

    # --- conditions ------------------------------------------------------------
    def conditions(self):
        A, B, C = self.A, self.B, self.C
        out = [
            eq("A symmetric", np.max(np.abs(A - A.T))),
            eq("C symmetric", np.max(np.abs(C - C.T))),
            gt("A positive definite (min eigenvalue)", np.min(np.linalg.eigvalsh(0.5 * (A + A.T)))),
        ]
        out.append(eq("B symmetric", np.max(np.abs(B - B.T))))
        off = lambda X: np.max(np.abs(X - np.diag(np.diag(X))))
        a, b, c = np.diag(A), np.diag(B), np.diag(C)
        k = self.case
        if k == "kirchhoff":
            out += [
                eq("A diagonal", off(A)), eq("B diagonal", off(B)), eq("C diagonal", off(C)),
                eq("a1==a2", a[0], a[1]), eq("b1==b2", b[0], b[1]), eq("c1==c2", c[0], c[1]),
            ]
        elif k == "clebsch1":
            out += [eq("A diagonal", off(A)), eq("a1==a2", a[0], a[1]), eq("a2==a3", a[1], a[2]), eq("B==0", np.max(np.abs(B)))]
        elif k == "clebsch2":
            out += [
                eq("A diagonal", off(A)), eq("C diagonal", off(C)), eq("B==0", np.max(np.abs(B))),
                eq("(c2-c3)/a1+(c3-c1)/a2+(c1-c2)/a3==0",
                   (c[1] - c[2]) / a[0] + (c[2] - c[0]) / a[1] + (c[0] - c[1]) / a[2]),
                ne("a1!=a2", a[0], a[1]), ne("a2!=a3", a[1], a[2]), ne("a1!=a3", a[0], a[2]),
            ]
        elif k == "steklov":
            mu = self._params.get("mu", 0.0)
            a1, a2, a3 = a
            out += [
                eq("A diagonal", off(A)), eq("B diagonal", off(B)), eq("C diagonal", off(C)),
                eq("b1==mu*a2*a3", b[0], mu * a2 * a3), eq("b2==mu*a3*a1", b[1], mu * a3 * a1),
                eq("b3==mu*a1*a2", b[2], mu * a1 * a2),
                eq("c1==mu^2*a1*(a2-a3)^2", c[0], mu**2 * a1 * (a2 - a3) ** 2),
                eq("c2==mu^2*a2*(a3-a1)^2", c[1], mu**2 * a2 * (a3 - a1) ** 2),
                eq("c3==mu^2*a3*(a1-a2)^2", c[2], mu**2 * a3 * (a1 - a2) ** 2),
            ]
        elif k == "lyapunov":
            mu = self._params.get("mu", 0.0)
            d1, d2, d3 = self._params.get("d", (0.0, 0.0, 0.0))
            out += [
                eq("A==identity", np.max(np.abs(A - np.eye(3)))), eq("B diagonal", off(B)), eq("C diagonal", off(C)),
                eq("b1==-mu*d1", b[0], -mu * d1), eq("b2==-mu*d2", b[1], -mu * d2),
                eq("b3==-mu*d3", b[2], -mu * d3),
                eq("c1==mu^2*(d2-d3)^2", c[0], mu**2 * (d2 - d3) ** 2),
                eq("c2==mu^2*(d3-d1)^2", c[1], mu**2 * (d3 - d1) ** 2),
                eq("c3==mu^2*(d1-d2)^2", c[2], mu**2 * (d1 - d2) ** 2),
            ]
        elif k == "sokolov":
            al = B[0, 2]
            be = B[1, 2]
            Bref = np.zeros((3, 3))
            Bref[0, 2] = Bref[2, 0] = al
            Bref[1, 2] = Bref[2, 1] = be
            out += [
                eq("A==diag(1,1,2)", np.max(np.abs(A - np.diag([1.0, 1.0, 2.0])))),
                eq("B has only b13=b31, b23=b32", np.max(np.abs(B - Bref))),
                eq("c11==4*beta^2", C[0, 0], 4 * be**2),
                eq("c22==4*alpha^2", C[1, 1], 4 * al**2),
                eq("c12==-4*alpha*beta", C[0, 1], -4 * al * be),
                eq("c33==-4*(alpha^2+beta^2)", C[2, 2], -4 * (al**2 + be**2)),
                eq("c13==0", C[0, 2]), eq("c23==0", C[1, 2]),
            ]
        elif k == "chaplygin1":
            out += [
                eq("A diagonal", off(A)), eq("a1==a2", a[0], a[1]), eq("a3==2*a1", a[2], 2 * a[0]),
                eq("B==0", np.max(np.abs(B))), eq("C diagonal", off(C)),
                eq("c2==-c1", c[1], -c[0]), eq("c3==0", c[2]),
            ]
        elif k == "chaplygin2":
            out += self._chaplygin2_conditions()
        return out

    def _chaplygin2_conditions(self):
        A, B, C = self.A, self.B, self.C
        form = self._params.get("form", "diagonal")
        if form == "rotated":
            return [
                eq("a1==a2", A[0, 0], A[1, 1]),
                eq("a12==0", A[0, 1]), eq("a23==0", A[1, 2]),
                ne("a13!=0", A[0, 2]),
                eq("B==diag(b1,b1,b3)", max(abs(B[0, 0] - B[1, 1]), np.max(np.abs(B - np.diag(np.diag(B)))))),
                eq("C==diag(c1,c1,c3)", max(abs(C[0, 0] - C[1, 1]), np.max(np.abs(C - np.diag(np.diag(C)))))),
            ]
        a1, a2, a3 = np.diag(A)
        r21, r32 = safe_sqrt(a2 - a1), safe_sqrt(a3 - a2)
        out = [eq("A diagonal", np.max(np.abs(A - np.diag(np.diag(A))))), gt("a2>a1", a2, a1), gt("a3>a2", a3, a2)]
        for X, name in ((B, "b"), (C, "c")):
            x1, x2, x3, x13 = X[0, 0], X[1, 1], X[2, 2], X[0, 2]
            out += [
                eq(f"{name}12==0", X[0, 1]),
                eq(f"{name}23==0", X[1, 2]),
                either(
                    f"{name}13*sqrt(a2-a1) -+ ({name}2-{name}1)*sqrt(a3-a2) == 0",
                    x13 * r21 - (x2 - x1) * r32,
                    x13 * r21 + (x2 - x1) * r32,
                ),
                either(
                    f"{name}13*sqrt(a3-a2) +- ({name}3-{name}2)*sqrt(a2-a1) == 0",
                    x13 * r32 + (x3 - x2) * r21,
                    x13 * r32 - (x3 - x2) * r21,
                ),
            ]
        return out

    # --- dynamics ----------------------------------------------------------------
    def dH(self, x):
        g = matvec0(self.Q, x[:6])
        return g[:3], g[3:]

    def rhs(self, x):
        x = np.asarray(x, dtype=float)
        M, G = x[:3], x[3:6]
        HM, HG = self.dH(x)
        return np.concatenate([cross0(M, HM) + cross0(G, HG), cross0(G, HM)])

    def hamiltonian(self):
        return quadratic(self.Q, name="H")

    def case_integrals(self):
        A, C = self.A, self.C
        k = self.case
        p = self._params
        if k == "kirchhoff":
            e = np.array([0, 0, 1.0, 0, 0, 0])
            return [fn(lambda x: x[2], lambda x: e.copy(), "F4")]
        if k == "clebsch1":
            a = A[0, 0]
            Q = np.block([[2 * a * C, np.zeros((3, 3))], [np.zeros((3, 3)), -2 * _adj(C)]])
            return [quadratic(Q, name="F4")]
        if k == "clebsch2":
            th = p.get("theta")
            if th is None:
                a, c = np.diag(A), np.diag(C)
                th = (c[1] - c[2]) / (a[0] * (a[1] - a[2]))
            # <M,M> + theta <A G, G>; theta as in the ratio form of the case condition
            Q = np.block([[2 * np.eye(3), np.zeros((3, 3))], [np.zeros((3, 3)), 2 * th * A]])
            return [quadratic(Q, name="F4")]
        if k == "steklov":
            mu = p["mu"]
            a1, a2, a3 = np.diag(A)
            g = mu**2 * np.array([(a2 - a3) ** 2, (a3 - a1) ** 2, (a1 - a2) ** 2])
            Q = np.block([[2 * np.eye(3), -2 * mu * np.diag([a1, a2, a3])], [-2 * mu * np.diag([a1, a2, a3]), 2 * np.diag(g)]])
            return [quadratic(Q, name="F4")]
        if k == "lyapunov":
            mu = p["mu"]
            d1, d2, d3 = p["d"]
            d = np.array([d1, d2, d3])
            cross = 2 * mu * np.array([d2 * d3, d3 * d1, d1 * d2])
            g = mu**2 * np.array([d1 * (d2 - d3) ** 2, d2 * (d3 - d1) ** 2, d3 * (d1 - d2) ** 2])
            Q = np.block([[2 * np.diag(d), np.diag(cross)], [np.diag(cross), 2 * np.diag(g)]])
            return [quadratic(Q, name="F4")]
        if k == "sokolov":
            al, be = self.B[0, 2], self.B[1, 2]

            def F4(x):
                M1, M2, M3, G1, G2, G3 = x[:6]
                s = M3 + 2 * al * G1 + 2 * be * G2
                w = be * M1 - al * M2
                P = (al**2 + be**2) * s**2 + w**2
                Qv = (al * M1 + be * M2 + (al**2 + be**2) * G3) * s + 3 * w * (be * G1 - al * G2)
                return (M3 - al * G1 - be * G2) ** 2 * P + Qv**2

            return [fn(F4, name="F4")]
        if k == "chaplygin1":
            c = C[0, 0]

            def F4(x):
                M1, M2, G3 = x[0], x[1], x[5]
                return (M1**2 - M2**2 + c * G3**2) ** 2 + 4 * M1**2 * M2**2

            leaf = (fn(lambda x: np.sum(x[:3] * x[3:6], axis=0), name="F1"), 0.0)
            return [fn(F4, name="F4", leaf=leaf)]
        return []

    def invariant_relations(self):
        if self.case != "chaplygin2":
            return []
        if self._params.get("form") == "rotated":
            e = np.array([0, 0, 1.0, 0, 0, 0])
            return [fn(lambda x: x[2], lambda x: e.copy(), "F4")]
        a1, a2, a3 = np.diag(self.A)
        s = self._params.get("sign", 1.0)
        c = np.array([np.sqrt(a2 - a1), 0, -s * np.sqrt(a3 - a2), 0, 0, 0])
        return [fn(lambda x: np.tensordot(c, x, axes=(0, 0)), lambda x: c.copy(), "F4")]

    def sample_state(self, rng, scale=1.0):
        M = scale * rng.normal(size=3)
        G = rng.normal(size=3)
        G /= np.linalg.norm(G)
        if self.case == "chaplygin1":
            M = M - np.dot(M, G) * G
        elif self.case == "chaplygin2":
            n = self.invariant_relations()[0].gradient(np.zeros(6))[:3]
            n = n / np.linalg.norm(n)
            M = M - np.dot(M, n) * n
        return np.concatenate([M, G])


# --- case constructors -----------------------------------------------------------

def kirchhoff_case(a1=1.0, a3=2.0, b1=0.3, b3=-0.2, c1=0.5, c3=1.5):
    return Kirchhoff(
        np.diag([a1, a1, a3]), np.diag([b1, b1, b3]), np.diag([c1, c1, c3]), "kirchhoff",
        {"a1": a1, "a3": a3, "b1": b1, "b3": b3, "c1": c1, "c3": c3},
    )


def clebsch1(a=1.0, c=(0.5, 1.0, 2.0)):
    c = tuple(float(v) for v in c)
    return Kirchhoff(np.eye(3) * a, None, np.diag(c), "clebsch1", {"a": a, "c": list(c)})


def clebsch2(a=(1.0, 2.0, 3.0), theta=0.7, c0=0.0):
    """Second Clebsch case with ``c_i = c0 - theta a1 a2 a3 / a_i``."""
    a = np.asarray(a, dtype=float)
    c = c0 - theta * np.prod(a) / a
    return Kirchhoff(np.diag(a), None, np.diag(c), "clebsch2", {"a": a.tolist(), "theta": theta, "c0": c0})


def steklov(a=(1.0, 2.0, 3.0), mu=0.5):
    a1, a2, a3 = a
    B = np.diag([mu * a2 * a3, mu * a3 * a1, mu * a1 * a2])
    C = np.diag([mu**2 * a1 * (a2 - a3) ** 2, mu**2 * a2 * (a3 - a1) ** 2, mu**2 * a3 * (a1 - a2) ** 2])
    return Kirchhoff(np.diag(a), B, C, "steklov", {"a": list(a), "mu": mu})


def lyapunov(d=(1.0, 2.0, 3.0), mu=0.5):
    d1, d2, d3 = d
    # mixed coefficient -mu d_i (not -2 mu d_i): only then is F4 an integral
    B = np.diag([-mu * d1, -mu * d2, -mu * d3])
    C = np.diag([mu**2 * (d2 - d3) ** 2, mu**2 * (d3 - d1) ** 2, mu**2 * (d1 - d2) ** 2])
    return Kirchhoff(np.eye(3), B, C, "lyapunov", {"d": list(d), "mu": mu})


def sokolov(alpha=0.6, beta=0.3):
    B = np.zeros((3, 3))
    B[0, 2] = B[2, 0] = alpha
    B[1, 2] = B[2, 1] = beta
    C = np.array(
        [[4 * beta**2, -4 * alpha * beta, 0.0], [-4 * alpha * beta, 4 * alpha**2, 0.0], [0.0, 0.0, -4 * (alpha**2 + beta**2)]]
    )
    return Kirchhoff(np.diag([1.0, 1.0, 2.0]), B, C, "sokolov", {"alpha": alpha, "beta": beta})


def chaplygin1(a=1.0, c=0.8):
    return Kirchhoff(np.diag([a, a, 2 * a]), None, np.diag([c, -c, 0.0]), "chaplygin1", {"a": a, "c": c})


def chaplygin2(a=(1.0, 2.0, 4.0), b=(0.0, 0.0), c=(0.3, 0.7), sign=1.0):
    """Second Chaplygin case in the principal frame of ``A``.

    ``b = (b1, b2)`` and ``c = (c1, c2)`` are free; ``b13, b3, c13, c3`` follow
    from the case conditions on the branch selected by ``sign``.
    """
    a1, a2, a3 = a
    r = np.sqrt(a3 - a2) / np.sqrt(a2 - a1)

    def fill(v):
        v1, v2 = v
        v13 = sign * (v2 - v1) * r
        v3 = v2 - sign * v13 * r
        return np.array([[v1, 0.0, v13], [0.0, v2, 0.0], [v13, 0.0, v3]])

    return Kirchhoff(
        np.diag(a), fill(b), fill(c), "chaplygin2",
        {"form": "diagonal", "a": list(a), "b": list(b), "c": list(c), "sign": sign},
    )


def chaplygin2_rotated(a1=1.0, a3=2.0, a13=0.4, b1=0.0, b3=0.0, c1=0.5, c3=1.2):
    """Second Chaplygin case in the frame where ``a1 = a2``; relation ``M3 = 0``."""
    A = np.array([[a1, 0.0, a13], [0.0, a1, 0.0], [a13, 0.0, a3]])
    return Kirchhoff(
        A, np.diag([b1, b1, b3]), np.diag([c1, c1, c3]), "chaplygin2",
        {"form": "rotated", "a1": a1, "a3": a3, "a13": a13, "b1": b1, "b3": b3, "c1": c1, "c3": c3},
    )
