"""Lie-Poisson structures on e(3), so(n) x so(n) and e(4).

A phase point is a flat float array whose first axis holds coordinates
(trailing axes, if any, are a batch):

* ``e3``  -- ``(M1, M2, M3, G1, G2, G3)``
* ``so``  -- upper triangle of ``M`` (row-major) then upper triangle of ``G``
* ``e4``  -- upper triangle of the 4x4 ``M`` then ``(G1, G2, G3, G4)``

With upper-triangle coordinates the invariant inner product on so(n) is the
plain dot product, so coordinate gradients are already k-gradients.

Hamiltonian fields follow ``x' = {x, H} = P(x) grad H``, the sign that
reproduces the Euler-Poisson and Kirchhoff equations.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import commutator, cross0, inner, skew_dim, skew_to_upper, upper_indices, upper_to_skew
from .errors import InvalidArgument, KindMismatch


@dataclass(frozen=True)
class PhaseSpace:
    name: str
    n: int

    @property
    def dim(self):
        if self.name == "e3":
            return 6
        if self.name == "so":
            return 2 * skew_dim(self.n)
        if self.name == "e4":
            return skew_dim(4) + 4
        raise KindMismatch(self.name)

    def coordinate_names(self):
        if self.name == "e3":
            return ["M1", "M2", "M3", "G1", "G2", "G3"]
        pairs = [f"{i + 1}{j + 1}" for i, j in upper_indices(self.n)]
        if self.name == "so":
            return [f"M{p}" for p in pairs] + [f"G{p}" for p in pairs]
        return [f"M{p}" for p in pairs] + ["G1", "G2", "G3", "G4"]

    def unpack(self, x):
        """Split a phase point into ``(M, G)``.

        e3 gives 3-vectors on the first axis; so gives skew matrices with the
        batch leading, ``(*batch, n, n)``; e4 gives ``(M matrix, G vector)``.
        """
        x = np.asarray(x)
        if x.shape[0] != self.dim:
            raise KindMismatch(f"{self} expects {self.dim} coordinates, got {x.shape[0]}")
        if self.name == "e3":
            return x[:3], x[3:]
        m = skew_dim(self.n)
        if self.name == "so":
            return upper_to_skew(x[:m], self.n), upper_to_skew(x[m:], self.n)
        return upper_to_skew(x[:m], 4), x[m:]

    def pack(self, M, G):
        if self.name == "e3":
            return np.concatenate([np.asarray(M, float), np.asarray(G, float)], axis=0)
        if self.name == "so":
            return np.concatenate([skew_to_upper(M), skew_to_upper(G)], axis=0)
        return np.concatenate([skew_to_upper(M), np.asarray(G, float)], axis=0)

    def __str__(self):
        return self.name if self.name != "so" else f"so({self.n})xso({self.n})"


E3 = PhaseSpace("e3", 3)
S4 = PhaseSpace("so", 4)
E4 = PhaseSpace("e4", 4)


def so_space(n):
    return PhaseSpace("so", n)


def _fd_step(x):
    return 1e-6 * max(1.0, float(np.linalg.norm(x)))


class SmoothFn:
    """A scalar function of a phase point with an optional analytic gradient.

    Functions are expected to broadcast over trailing batch axes of ``x``.
    Without an analytic gradient, :meth:`gradient` uses central differences
    with step ``1e-6 * max(1, |x|)``.

    ``grad="cs"`` selects complex-step differentiation, exact to rounding
    for polynomial (more generally, real-analytic) ``func`` written with
    complex-safe numpy operations.

    ``leaf`` optionally names a Casimir-level condition ``(fn, value)`` under
    which the function is an integral (e.g. Goryachev-Chaplygin on F1 = 0).
    """

    def __init__(self, func, grad=None, name=None, leaf=None):
        self.func = func
        if grad == "cs":
            grad = self._complex_step
        self.grad = grad
        self.name = name or getattr(func, "__name__", "f")
        self.leaf = leaf

    def _complex_step(self, x):
        h = 1e-30
        E = np.eye(x.shape[0]) * (1j * h)
        return np.imag(self.func(x[:, None] + E)) / h

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    @property
    def has_analytic_grad(self):
        return self.grad is not None

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        return self.fd_gradient(x)

    def fd_gradient(self, x):
        x = np.asarray(x, dtype=float)
        h = _fd_step(x)
        E = np.eye(x.shape[0]) * h
        fp = self.func(x[:, None] + E)
        fm = self.func(x[:, None] - E)
        return (np.asarray(fp) - np.asarray(fm)) / (2 * h)

    def check_gradient(self, x):
        """Relative error between analytic and finite-difference gradients."""
        if self.grad is None:
            return 0.0
        g = self.gradient(x)
        fd = self.fd_gradient(x)
        return float(np.linalg.norm(g - fd) / max(1.0, np.linalg.norm(g)))

    def __repr__(self):
        return f"SmoothFn({self.name!r})"


def coordinate(space, index, name=None):
    """The ``index``-th coordinate function, with exact gradient."""
    e = np.zeros(space.dim)
    e[index] = 1.0
    return SmoothFn(
        lambda x: x[index],
        grad=lambda x: e.copy(),
        name=name or space.coordinate_names()[index],
    )


def linear(c, name=None):
    c = np.asarray(c, dtype=float)
    return SmoothFn(lambda x: np.tensordot(c, x, axes=(0, 0)), grad=lambda x: c.copy(), name=name)


def quadratic(Q, b=None, name=None):
    """``1/2 x.Q.x + b.x`` with symmetric ``Q``."""
    Q = np.asarray(Q, dtype=float)
    Q = 0.5 * (Q + Q.T)
    b = np.zeros(Q.shape[0]) if b is None else np.asarray(b, dtype=float)

    def f(x):
        return 0.5 * np.einsum("i...,ij,j...->...", x, Q, x) + np.tensordot(b, x, axes=(0, 0))

    def g(x):
        return Q @ x + b

    return SmoothFn(f, grad=g, name=name)


# --- structure tensors -------------------------------------------------------

def _e3_apply(x, v):
    M, G = x[:3], x[3:]
    vM, vG = v[:3], v[3:]
    return np.concatenate([cross0(M, vM) + cross0(G, vG), cross0(G, vM)])


def _so_apply(space, x, v):
    M, G = space.unpack(x)
    vM, vG = space.unpack(v)
    dM = commutator(M, vM) + commutator(G, vG)
    dG = commutator(G, vM)
    return space.pack(dM, dG)


@lru_cache(maxsize=None)
def _e4_tensors():
    """Structure constants of e(4) in upper-triangle coordinates.

    ``{M_a, M_b} = T[a, b, c] M_c`` and ``{M_a, G_k} = S[a, k, j] G_j``.
    """
    pairs = upper_indices(4)
    index = {p: i for i, p in enumerate(pairs)}

    def m_entry(i, j):
        # M_ij as (sign, flat index); zero on the diagonal
        if i == j:
            return 0.0, None
        if i < j:
            return 1.0, index[(i, j)]
        return -1.0, index[(j, i)]

    d = lambda a, b: 1.0 if a == b else 0.0
    T = np.zeros((6, 6, 6))
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            for coef, (p, q) in (
                (d(i, k), (j, l)),
                (d(j, l), (i, k)),
                (-d(i, l), (j, k)),
                (-d(j, k), (i, l)),
            ):
                if coef == 0.0:
                    continue
                s, c = m_entry(p, q)
                if c is not None:
                    T[a, b, c] += coef * s
    S = np.zeros((6, 4, 4))
    for a, (i, j) in enumerate(pairs):
        for k in range(4):
            S[a, k, j] += d(i, k)
            S[a, k, i] -= d(j, k)
    return T, S


def poisson_matrix_e4(x):
    """The 10x10 Poisson tensor of e(4) at a single point."""
    T, S = _e4_tensors()
    x = np.asarray(x, dtype=float)
    M, G = x[:6], x[6:]
    P = np.zeros((10, 10))
    P[:6, :6] = T @ M
    P[:6, 6:] = S @ G
    P[6:, :6] = -P[:6, 6:].T
    return P


def _e4_apply(x, v):
    T, S = _e4_tensors()
    M, G = x[:6], x[6:]
    vM, vG = v[:6], v[6:]
    dM = np.einsum("abc,c...,b...->a...", T, M, vM) + np.einsum("akj,j...,k...->a...", S, G, vG)
    dG = -np.einsum("akj,j...,a...->k...", S, G, vM)
    return np.concatenate([dM, dG])


def poisson_apply(space, x, v):
    """``P(x) v`` for a covector ``v`` in the coordinates of ``space``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if space.name == "e3":
        return _e3_apply(x, v)
    if space.name == "so":
        return _so_apply(space, x, v)
    if space.name == "e4":
        return _e4_apply(x, v)
    raise KindMismatch(str(space))


def bracket(space, f, g, x):
    """``{f, g}(x)``, antisymmetrized so that ``{f, f} = 0`` exactly."""
    x = np.asarray(x, dtype=float)
    df, dg = f.gradient(x), g.gradient(x)
    return float(0.5 * (np.dot(df, poisson_apply(space, x, dg)) - np.dot(dg, poisson_apply(space, x, df))))


def bracket_e3(f, g, x):
    """``{f, g}`` under {Mi,Mj} = -eps_ijk Mk, {Mi,Gj} = -eps_ijk Gk, {Gi,Gj} = 0."""
    return bracket(E3, f, g, x)


def bracket_s4(f, g, x, space=S4):
    """Bracket on so(n) x so(n) written with k-gradients.

    With ``xi = G`` and ``eta = M``, grad_1 = d/dxi and grad_2 = d/deta::

        {f,g} = -k(xi, [grad_2 f, grad_1 g]) - k(xi, [grad_1 f, grad_2 g])
                - k(eta, [grad_2 f, grad_2 g])
    """
    x = np.asarray(x, dtype=float)
    M, G = space.unpack(x)
    fM, fG = space.unpack(f.gradient(x))
    gM, gG = space.unpack(g.gradient(x))
    return float(
        -inner(G, commutator(fM, gG)) - inner(G, commutator(fG, gM)) - inner(M, commutator(fM, gM))
    )


def bracket_e4(f, g, x):
    return bracket(E4, f, g, x)


def ham_field(space, H, x):
    """Hamiltonian vector field ``x' = {x, H}``."""
    x = np.asarray(x, dtype=float)
    return poisson_apply(space, x, H.gradient(x))


# --- Casimirs ----------------------------------------------------------------

def _pf4(A):
    return A[..., 0, 1] * A[..., 2, 3] - A[..., 0, 2] * A[..., 1, 3] + A[..., 0, 3] * A[..., 1, 2]


def _pf4_polar(A, B):
    return _pf4(A + B) - _pf4(A) - _pf4(B)


def _e4_casimir2(x):
    M12, M13, M14, M23, M24, M34 = x[:6]
    G1, G2, G3, G4 = x[6:10]
    return (
        (M13 * G4 - M14 * G3 + M34 * G1) ** 2
        + (M23 * G1 + M12 * G3 - M13 * G2) ** 2
        + (M24 * G1 - M14 * G2 + M12 * G4) ** 2
        + (M23 * G4 + M34 * G2 - M24 * G3) ** 2
    )


def _casimir_list(space):
    if space.name == "e3":
        return [
            SmoothFn(lambda x: np.sum(x[:3] * x[3:6], axis=0), lambda x: np.concatenate([x[3:6], x[:3]]), "F1"),
            SmoothFn(lambda x: np.sum(x[3:6] ** 2, axis=0), lambda x: np.concatenate([np.zeros(3), 2 * x[3:6]]), "F2"),
        ]
    if space.name == "so":
        m = skew_dim(space.n)
        out = [
            SmoothFn(lambda x: 2 * np.sum(x[:m] * x[m:], axis=0), lambda x: 2 * np.concatenate([x[m:], x[:m]]), "E"),
            SmoothFn(lambda x: np.sum(x[m:] ** 2, axis=0), lambda x: np.concatenate([np.zeros(m), 2 * x[m:]]), "F"),
        ]
        if space.n == 4:
            out += [
                SmoothFn(lambda x: _pf4_polar(*S4.unpack(x)), "cs", name="J"),
                SmoothFn(lambda x: _pf4(S4.unpack(x)[1]), "cs", name="K"),
            ]
        return out
    if space.name == "e4":
        return [
            SmoothFn(lambda x: np.sum(x[6:10] ** 2, axis=0), "cs", name="F1"),
            SmoothFn(_e4_casimir2, "cs", name="F2"),
        ]
    raise KindMismatch(str(space))


def casimirs(space, verify=True, seed=0):
    """Casimir functions of ``space``; verified against every coordinate
    function at 10 random points unless ``verify`` is false."""
    out = _casimir_list(space)
    if verify:
        rng = np.random.default_rng(seed)
        coords = [coordinate(space, i) for i in range(space.dim)]
        for _ in range(10):
            x = rng.normal(size=space.dim)
            for C in out:
                worst = max(abs(bracket(space, C, c, x)) for c in coords)
                if worst > 1e-8 * max(1.0, float(np.linalg.norm(x)) ** 3):
                    raise InvalidArgument(f"{C.name} is not a Casimir of {space} (residual {worst:.3g})")
    return out


def divergence(field, x):
    """Central finite-difference divergence of ``field`` at a single point."""
    x = np.asarray(x, dtype=float)
    h = _fd_step(x)
    E = np.eye(x.shape[0]) * h
    fp = np.asarray(field(x[:, None] + E))
    fm = np.asarray(field(x[:, None] - E))
    return float(np.trace(fp - fm) / (2 * h))


def check_kind(space, x):
    x = np.asarray(x, dtype=float)
    if x.shape[0] != space.dim:
        raise KindMismatch(f"{space} expects {space.dim} coordinates, got {x.shape[0]}")
    return x
