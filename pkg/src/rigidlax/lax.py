"""Matrix polynomials in the spectral parameter, Lax pairs of the catalog
systems, spectral-polynomial extraction and the r-matrix identity.

A Lax pair here always means ``dL/dt = [L, A]`` with ``L`` and ``A``
(Laurent) polynomials in ``lam``. The time derivative of ``L`` is formed by
pushing the vector field through the builder, never by differencing a
trajectory, so :func:`lax_residual` is an algebraic identity test.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, NoLaxPairError

SQRT2 = np.sqrt(2.0)


# --- matrix polynomials ----------------------------------------------------------

class MatrixPoly:
    """``L(lam) = sum_k C_k lam^(k + offset)`` with square coefficients.

    ``offset`` may be negative (Laurent polynomials such as the 2x2 pair
    with ``1/lam^2`` entries). The top coefficient may vanish; the degree is
    formal.
    """

    def __init__(self, coeffs, offset=0):
        c = np.asarray(coeffs)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise InvalidArgument(f"coefficients must have shape (k, n, n), got {c.shape}")
        if not np.iscomplexobj(c):
            c = c.astype(float)
        self.coeffs = c
        self.offset = int(offset)

    @classmethod
    def from_terms(cls, terms):
        """Build from a ``{power: matrix}`` mapping."""
        if not terms:
            raise InvalidArgument("empty polynomial")
        lo, hi = min(terms), max(terms)
        mats = [np.asarray(m) for m in terms.values()]
        n = mats[0].shape[0]
        dtype = complex if any(np.iscomplexobj(m) for m in mats) else float
        c = np.zeros((hi - lo + 1, n, n), dtype=dtype)
        for p, m in terms.items():
            c[p - lo] += m
        return cls(c, lo)

    @property
    def dim(self):
        return self.coeffs.shape[1]

    @property
    def low(self):
        return self.offset

    @property
    def high(self):
        return self.offset + self.coeffs.shape[0] - 1

    @property
    def degree(self):
        return self.high

    def coeff(self, power):
        k = power - self.offset
        if 0 <= k < self.coeffs.shape[0]:
            return self.coeffs[k]
        return np.zeros(self.coeffs.shape[1:], dtype=self.coeffs.dtype)

    def __call__(self, lam):
        lam = complex(lam) if np.iscomplexobj(lam) else lam
        out = np.zeros(self.coeffs.shape[1:], dtype=np.result_type(self.coeffs, lam))
        for k, C in enumerate(self.coeffs):
            out = out + C * lam ** (k + self.offset)
        return out

    def _aligned(self, other):
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        return lo, hi

    def __add__(self, other):
        lo, hi = self._aligned(other)
        return MatrixPoly.from_terms({p: self.coeff(p) + other.coeff(p) for p in range(lo, hi + 1)})

    def __sub__(self, other):
        lo, hi = self._aligned(other)
        return MatrixPoly.from_terms({p: self.coeff(p) - other.coeff(p) for p in range(lo, hi + 1)})

    def __mul__(self, s):
        return MatrixPoly(self.coeffs * s, self.offset)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if self.dim != other.dim:
            raise InvalidArgument("dimension mismatch")
        terms = {}
        for i, A in enumerate(self.coeffs):
            for j, B in enumerate(other.coeffs):
                p = i + j + self.offset + other.offset
                terms[p] = terms.get(p, 0) + A @ B
        return MatrixPoly.from_terms(terms)

    def commutator(self, other):
        return (self @ other) - (other @ self)

    def conjugate_by(self, G):
        """``G L G^T`` coefficientwise (``G`` orthogonal for a similarity)."""
        G = np.asarray(G)
        return MatrixPoly(np.einsum("ij,kjl,ml->kim", G, self.coeffs, G), self.offset)

    def max_norm(self):
        """Largest Frobenius norm over the coefficients."""
        return float(np.max(np.linalg.norm(self.coeffs, axis=(1, 2)), initial=0.0))

    def is_skew(self, tol=1e-12):
        return bool(np.max(np.abs(self.coeffs + np.swapaxes(self.coeffs, 1, 2)), initial=0.0) <= tol)

    def __repr__(self):
        return f"MatrixPoly(dim={self.dim}, powers={self.low}..{self.high})"


def synthetic_division(coeffs, root):
    """Divide ``sum_k c_k lam^k`` (matrix coefficients, ascending) by
    ``lam - root``; returns ``(quotient, remainder)``."""
    c = np.asarray(coeffs)
    d = c.shape[0] - 1
    q = np.zeros((max(d, 1),) + c.shape[1:], dtype=np.result_type(c, root))
    acc = c[d]
    for k in range(d - 1, -1, -1):
        q[k] = acc
        acc = c[k] + root * acc
    return q[:d] if d > 0 else q[:0], acc


# --- characteristic / spectral polynomials ---------------------------------------

def char_coeffs(A):
    """Coefficients ``c_k`` (ascending in ``mu``) of ``det(A - mu*1)``.

    Faddeev-LeVerrier recursion; exact in exact arithmetic and well behaved
    for the small matrices used here.
    """
    A = np.asarray(A)
    n = A.shape[0]
    I = np.eye(n)
    p = np.zeros(n + 1, dtype=np.result_type(A, float))
    p[0] = 1.0
    Mk = np.zeros_like(A, dtype=p.dtype)
    for k in range(1, n + 1):
        Mk = A @ Mk + p[k - 1] * I
        p[k] = -np.trace(A @ Mk) / k
    # det(mu - A) = sum_k p_k mu^(n-k); det(A - mu) = (-1)^n det(mu - A)
    return ((-1) ** n) * p[::-1]


def pfaffian4(A):
    return A[0, 1] * A[2, 3] - A[0, 2] * A[1, 3] + A[0, 3] * A[1, 2]


def _laurent_interpolate(values_fn, lo, hi):
    """Coefficients of a Laurent polynomial in ``lam`` with powers in
    ``[lo, hi]`` from its values at roots of unity."""
    N = hi - lo + 1
    nodes = np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.array([values_fn(z) * z ** (-lo) for z in nodes])
    return np.fft.fft(vals, axis=0) / N


@dataclass
class SpectralPoly:
    """``p(lam, mu) = det(L(lam) - mu*1) = sum table[i, k] lam^(i + lam_low) mu^k``."""

    table: np.ndarray
    lam_low: int = 0

    @property
    def mu_degree(self):
        return self.table.shape[1] - 1

    @property
    def lam_high(self):
        return self.lam_low + self.table.shape[0] - 1

    def coeff(self, lam_power, mu_power):
        i = lam_power - self.lam_low
        if 0 <= i < self.table.shape[0] and 0 <= mu_power < self.table.shape[1]:
            return self.table[i, mu_power]
        return 0.0

    def mu_coeff(self, k):
        """The ``mu^k`` coefficient as ascending ``lam`` coefficients from ``lam_low``."""
        return self.table[:, k]

    def __call__(self, lam, mu):
        lp = lam ** (np.arange(self.table.shape[0]) + self.lam_low)
        mp = mu ** np.arange(self.table.shape[1])
        return lp @ self.table @ mp

    def real(self, tol=1e-9):
        """Real part, asserting the imaginary part is negligible."""
        im = np.max(np.abs(np.imag(self.table)), initial=0.0)
        scale = max(1.0, np.max(np.abs(self.table), initial=0.0))
        if im > tol * scale:
            raise InvalidArgument(f"spectral polynomial has imaginary part {im:.3g}")
        return SpectralPoly(np.real(self.table).copy(), self.lam_low)

    def as_dict(self):
        return {
            f"lam^{i + self.lam_low} mu^{k}": float(np.real(self.table[i, k]))
            for i in range(self.table.shape[0])
            for k in range(self.table.shape[1])
        }


def spectral(L, real=True):
    """Spectral polynomial of a matrix (Laurent) polynomial.

    Evaluates the characteristic polynomial in ``mu`` at roots of unity in
    ``lam`` and interpolates each ``mu`` coefficient by FFT.
    """
    n = L.dim
    lo = min(0, n * L.low)
    hi = max(0, n * L.high)
    table = _laurent_interpolate(lambda z: char_coeffs(L(z)), lo, hi)
    S = SpectralPoly(table, lo)
    return S.real() if real else S


def pfaffian_poly(L):
    """Ascending coefficients of ``Pf(L(lam))`` for a 4x4 skew ``L``."""
    if L.dim != 4:
        raise InvalidArgument("Pfaffian polynomial needs 4x4 matrices")
    lo = 2 * L.low
    hi = 2 * L.high
    return np.real(_laurent_interpolate(lambda z: pfaffian4(L(z)), lo, hi))


# --- Lax pairs ------------------------------------------------------------------

@dataclass
class LaxPair:
    """A Lax pair evaluated at one phase point.

    ``form`` names the construction: ``"ha3"`` (3x3 Hess-Appel'rot),
    ``"bitop"``, ``"ha4"``, ``"han"``, ``"ha2"`` (2x2 pair) or
    ``"chaplygin"``. ``relation`` is the largest invariant-relation value
    at the point; ``on_manifold`` flags whether it is within ``1e-10``.
    """

    form: str
    L: MatrixPoly
    A: MatrixPoly
    relation: float = 0.0
    remainder: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def on_manifold(self):
        return self.relation <= 1e-10

    @property
    def dim(self):
        return self.L.dim


def _hat(v):
    """Complex-safe hat map for a single 3-vector."""
    a1, a2, a3 = v
    return np.array([[0, -a3, a2], [a3, 0, -a1], [-a2, a1, 0]], dtype=np.result_type(v, float))


def lax_forms(system):
    """Lax constructions available for ``system`` (first is the default)."""
    k = system.kind
    if k == "heavy-top" and system.case == "hess-appelrot":
        return ("ha3", "ha2")
    if k == "heavy-top" and system.case == "hess-appelrot-zhukovski":
        return ("ha3",)
    if k == "bitop":
        return ("bitop",)
    if k == "han":
        return ("ha4",) if system.n == 4 else ("han",)
    if k == "family":
        return ("ha2",)
    if k == "kirchhoff" and system.has_lax:
        return ("chaplygin",)
    return ()


def _relation(system, x):
    rel = system.invariant_relations()
    return max((abs(float(r(x))) for r in rel), default=0.0)


# builders return (L terms, A terms, meta); terms map powers to matrices

def _terms_so(system, x, C):
    sp = system.space
    if sp.name == "e3":
        M, G = _hat(x[:3]), _hat(x[3:6])
        W = _hat(system.omega(x))
        chi = _hat(system.chi)
    else:
        M, G = sp.unpack(x)
        W = system.omega(M)
        chi = system.chi
    L = {2: C, 1: M, 0: G}
    A = {1: chi, 0: W}
    return L, A


def _ha3_C(system):
    if system.case == "hess-appelrot-zhukovski":
        return _hat(system.chi) / system.J[0, 0]
    return system.I[1] * _hat(system.chi)


def _ha2_data(I2, X0, Z0):
    delta = float(np.hypot(X0, Z0))
    return delta, X0 / delta, Z0 / delta, I2


def ha2_variables(x, X0, Z0):
    """The complex coordinates ``(x, xbar, y, ybar, x1, y1)`` of the 2x2 pair."""
    delta = np.hypot(X0, Z0)
    al, be = X0 / delta, Z0 / delta
    M1, M2, M3, G1, G2, G3 = x[:6]
    xv = (be * M1 - al * M3 - 1j * M2) / SQRT2
    xb = (be * M1 - al * M3 + 1j * M2) / SQRT2
    yv = (be * G1 - al * G3 - 1j * G2) / SQRT2
    yb = (be * G1 - al * G3 + 1j * G2) / SQRT2
    x1 = al * M1 + be * M3
    y1 = al * G1 + be * G3
    return xv, xb, yv, yb, x1, y1


def _ha2_L(x, I2, X0, Z0):
    """``N(lam) = lam^2 L(lam)`` as ``{power: matrix}``; ``L`` has offset -2."""
    delta, al, be, _ = _ha2_data(I2, X0, Z0)
    xv, xb, yv, yb, x1, y1 = ha2_variables(x, X0, Z0)
    c = I2 * (al * X0 + be * Z0)  # alpha C1 + beta C3 with C = I2 chi
    # omega(lam) = -i (c lam^2 + x1 lam + y1); Delta = y + lam x
    om = {2: -1j * c, 1: -1j * x1, 0: -1j * y1}
    de = {1: xv, 0: yv}
    ds = {1: xb, 0: yb}
    N = {}
    for p in (0, 1, 2):
        m = np.zeros((2, 2), dtype=complex)
        m[0, 0] = om[p]
        m[1, 1] = -om[p]
        m[0, 1] = SQRT2 * 1j * de.get(p, 0.0)
        m[1, 0] = SQRT2 * 1j * ds.get(p, 0.0)
        N[p] = m
    return N


def _ha_scalar_a(top, x):
    """The scalar ``a`` for which the 2x2 pair reproduces the heavy top."""
    I2 = top.I[1]
    X0, _, Z0 = top.chi
    delta, al, be, _ = _ha2_data(I2, X0, Z0)
    W = top.omega(x)
    return (al * (W[0] - x[0] / I2) + be * (W[2] - x[2] / I2)) / delta


def _ha2_params(system):
    if system.kind == "family":
        return system.I2, system.X0, system.Z0
    return system.I[1], system.chi[0], system.chi[2]


def _ha2_pair(system, x):
    I2, X0, Z0 = _ha2_params(system)
    if system.kind == "family":
        a = float(system.a(x))
    else:
        a = float(_ha_scalar_a(system, x))
    N = _ha2_L(x, I2, X0, Z0)
    Nc = np.array([N[0], N[1], N[2]])
    # (lam^2 L(lam) - a^2 L(a)) / (lam - a) = (N(lam) - N(a)) / (lam - a)
    Na = Nc[0] + a * Nc[1] + a * a * Nc[2]
    shifted = Nc.copy()
    shifted[0] = shifted[0] - Na
    q, rem = synthetic_division(shifted, a)
    A = {k: q[k] / (2 * I2) for k in range(q.shape[0])}
    L = {p - 2: N[p] for p in N}
    return L, A, {"a": a, "remainder": float(np.max(np.abs(rem)))}


def _chaplygin_kappa(sys):
    p = sys.params()
    a1, a3, c1, c3 = p["a1"], p["a3"], p["c1"], p["c3"]
    if a1 == a3 or c1 == c3:
        raise NoLaxPairError("the Chaplygin pair needs a1 != a3 and c1 != c3")
    return (c3 - c1) / (a3 - a1)


def _chaplygin_pair(sys, x):
    p = sys.params()
    a1, a3, c1, c3 = p["a1"], p["a3"], p["c1"], p["c3"]
    k = _chaplygin_kappa(sys)
    M, G = x[:3], x[3:6]
    L = {
        2: np.diag([c1, c1, c3]) / (k * a1),
        1: _hat(M),
        0: -k * np.outer(G, G),
    }
    A = {1: np.diag([a1, a1, a3]), 0: _hat(sys.A @ M)}
    return L, A, {"kappa": k}


def _terms(system, x, form):
    if form == "ha3":
        L, A = _terms_so(system, x, _ha3_C(system))
        return L, A, {}
    if form == "bitop":
        L, A = _terms_so(system, x, system.C)
        return L, A, {}
    if form in ("ha4", "han"):
        L, A = _terms_so(system, x, system.C)
        return L, A, {}
    if form == "ha2":
        return _ha2_pair(system, x)
    if form == "chaplygin":
        return _chaplygin_pair(system, x)
    raise NoLaxPairError(f"unknown Lax form {form!r}")


def build_lax(system, x, form=None):
    """Assemble ``(L, A)`` at ``x``.

    Raises :class:`NoLaxPairError` if the system has no Lax pair. The
    returned pair records the invariant-relation value so callers can tell
    whether the point lies on the manifold where the pair is valid.
    """
    forms = lax_forms(system)
    if not forms:
        raise NoLaxPairError(f"{system.kind}/{system.case} has no Lax pair")
    form = form or forms[0]
    if form not in forms:
        raise NoLaxPairError(f"{system.kind}/{system.case} has no {form!r} Lax pair (available: {forms})")
    x = np.asarray(x, dtype=float)
    L, A, meta = _terms(system, x, form)
    pair = LaxPair(form, MatrixPoly.from_terms(L), MatrixPoly.from_terms(A), _relation(system, x), meta=meta)
    pair.remainder = meta.get("remainder", 0.0)
    return pair


def lax_dot(system, x, form=None):
    """``dL/dt`` at ``x`` by pushing the field through the builder.

    Builders are at most quadratic in the state, so the symmetric difference
    ``(L(x + v) - L(x - v)) / 2`` with ``v = rhs(x)`` is the exact
    directional derivative.
    """
    form = form or lax_forms(system)[0]
    x = np.asarray(x, dtype=float)
    v = np.asarray(system.rhs(x), dtype=float)
    Lp, _, _ = _terms(system, x + v, form)
    Lm, _, _ = _terms(system, x - v, form)
    keys = set(Lp) | set(Lm)
    return MatrixPoly.from_terms({p: (Lp[p] - Lm[p]) / 2 for p in keys})


def lax_residual(system, x, form=None):
    """``max_k |(dL/dt - [L, A])_k|_F`` over the coefficients."""
    pair = build_lax(system, x, form)
    Ld = lax_dot(system, x, pair.form)
    return (Ld - pair.L.commutator(pair.A)).max_norm()


# --- named spectral coefficients -------------------------------------------------

_HA3_NAMES = ("A", "B", "D", "E", "F")
_BITOP_P = ("A", "B", "D", "E", "F")
_BITOP_Q = ("G", "H", "I", "J", "K")
_HA4_P = ("a", "b", "c", "d", "e")
_HA4_Q = ("f", "g", "h", "i", "j")


def spectral_coefficients(system, x, form=None):
    """Named spectral-polynomial coefficients at ``x``.

    3x3 Hess-Appel'rot: ``p = -mu (mu^2 + A lam^4 + B lam^3 + D lam^2 +
    E lam + F)``. Bitop / four-dimensional HA: ``p = mu^4 + P mu^2 + Q^2``
    with ``P`` and the Pfaffian ``Q`` read off in descending powers. The
    2x2 pair reports ``lam^4 det(L - mu)`` as ``P4_k`` (coefficient of
    ``lam^k`` in ``mu^2 - P4(lam) / lam^4`` after multiplying through).
    Other forms report the raw table.
    """
    pair = build_lax(system, x, form)
    S = spectral(pair.L)
    out = {}
    if pair.form == "ha3":
        for name, p in zip(_HA3_NAMES, (4, 3, 2, 1, 0)):
            out[name] = -float(S.coeff(p, 1))
    elif pair.form in ("bitop", "ha4"):
        pn, qn = (_BITOP_P, _BITOP_Q) if pair.form == "bitop" else (_HA4_P, _HA4_Q)
        Q = pfaffian_poly(pair.L)
        for name, p in zip(pn, (4, 3, 2, 1, 0)):
            out[name] = float(S.coeff(p, 2))
        for name, p in zip(qn, (4, 3, 2, 1, 0)):
            out[name] = float(Q[p]) if p < len(Q) else 0.0
    elif pair.form == "ha2":
        # lam^4 p(lam, mu) = lam^4 mu^2 - P4(lam)
        for p in range(5):
            out[f"P4_{p}"] = -float(S.coeff(p - 4, 0))
    else:
        for i in range(S.table.shape[0]):
            for k in range(S.table.shape[1]):
                out[f"p[{i + S.lam_low},{k}]"] = float(S.table[i, k])
    return out


def spectral_json(system, states, times=None, form=None):
    """JSON text with one coefficient table per sample."""
    rows = []
    for j, x in enumerate(states):
        row = {"coefficients": spectral_coefficients(system, x, form)}
        if times is not None:
            row["t"] = float(times[j])
        rows.append(row)
    return json.dumps(rows, indent=2)


def spectral_drift(system, traj, form=None):
    """Drift of every named spectral coefficient along a trajectory."""
    from .integrate import ConservationReport

    series = {}
    for x in traj.states:
        for k, v in spectral_coefficients(system, x, form).items():
            series.setdefault(k, []).append(v)
    return ConservationReport.from_series(traj.times, {k: np.array(v) for k, v in series.items()})


# --- r-matrix -------------------------------------------------------------------

# {z_p, z_q} for z = (x, xbar, y, ybar, x1, y1), each a linear form in z.
# Entry (p, q) holds (coefficient, index) with the value coefficient * z[index].
_ZB = {
    (0, 2): None, (1, 3): None,
    (0, 4): (1j, 0), (1, 4): (-1j, 1), (2, 4): (1j, 2), (3, 4): (-1j, 3),
    (5, 4): None, (1, 5): (-1j, 3), (0, 5): (1j, 2), (5, 2): None, (5, 3): None,
    (0, 1): (-1j, 4), (2, 3): None, (0, 3): (-1j, 5), (1, 2): (1j, 5),
}


def coordinate_bracket_table(z):
    """6x6 matrix of brackets of the complex coordinates from the listed table."""
    B = np.zeros((6, 6), dtype=complex)
    for (p, q), v in _ZB.items():
        val = 0.0 if v is None else v[0] * z[v[1]]
        B[p, q] = val
        B[q, p] = -val
    return B


def coordinate_bracket_direct(x, X0, Z0):
    """The same table computed from the e(3) structure by the chain rule."""
    from .poisson import _e3_apply

    delta = np.hypot(X0, Z0)
    al, be = X0 / delta, Z0 / delta
    s = 1 / SQRT2
    grads = np.array(
        [
            [be * s, -1j * s, -al * s, 0, 0, 0],
            [be * s, 1j * s, -al * s, 0, 0, 0],
            [0, 0, 0, be * s, -1j * s, -al * s],
            [0, 0, 0, be * s, 1j * s, -al * s],
            [al, 0, be, 0, 0, 0],
            [0, 0, 0, al, 0, be],
        ],
        dtype=complex,
    )
    x = np.asarray(x, dtype=float)
    P = np.array([_e3_apply(x, e) for e in np.eye(6)]).T  # P @ v = _e3_apply(x, v)
    return grads @ P @ grads.T


def r_matrix(lam):
    lam = complex(lam)
    if lam == 0:
        raise InvalidArgument("r(lam) has a pole at lam = 0")
    P = np.zeros((4, 4))
    P[0, 0] = P[3, 3] = P[1, 2] = P[2, 1] = 1.0
    return -P / lam


def _ha2_entry_grads(lam, I2, X0, Z0):
    """Gradients of the entries of ``L(lam)`` with respect to ``z``."""
    g = np.zeros((2, 2, 6), dtype=complex)
    l2 = lam**-2
    # omega / lam^2 = -i (c + x1/lam + y1/lam^2)
    g[0, 0, 4] = -1j / lam
    g[0, 0, 5] = -1j * l2
    g[1, 1] = -g[0, 0]
    # sqrt2 i Delta / lam^2 = sqrt2 i (y + lam x) / lam^2
    g[0, 1, 0] = SQRT2 * 1j / lam
    g[0, 1, 2] = SQRT2 * 1j * l2
    g[1, 0, 1] = SQRT2 * 1j / lam
    g[1, 0, 3] = SQRT2 * 1j * l2
    return g


def rmatrix_residual(family, x, lam, mu, table="printed"):
    """``max |{L(lam) x 1, 1 x L(mu)} - [r(lam - mu), L(lam) x 1 + 1 x L(mu)]|``.

    Brackets of ``L`` entries use the coordinate bracket table (``"printed"``)
    or the e(3) chain rule (``"direct"``).
    """
    if lam == mu:
        raise InvalidArgument("lam and mu must differ (r has a pole at lam = mu)")
    I2, X0, Z0 = _ha2_params(family)
    x = np.asarray(x, dtype=float)
    z = np.array(ha2_variables(x, X0, Z0))
    Bz = coordinate_bracket_table(z) if table == "printed" else coordinate_bracket_direct(x, X0, Z0)
    gl = _ha2_entry_grads(lam, I2, X0, Z0)
    gm = _ha2_entry_grads(mu, I2, X0, Z0)
    # {L_ik(lam), L_jl(mu)} at row (i, j), column (k, l) of the tensor product
    lhs = np.einsum("ikp,pq,jlq->ijkl", gl, Bz, gm).reshape(4, 4)
    Ll = _eval_ha2(x, lam, I2, X0, Z0)
    Lm = _eval_ha2(x, mu, I2, X0, Z0)
    E = np.eye(2)
    S = np.kron(Ll, E) + np.kron(E, Lm)
    r = r_matrix(lam - mu)
    rhs = r @ S - S @ r
    return float(np.max(np.abs(lhs - rhs)))


def _eval_ha2(x, lam, I2, X0, Z0):
    N = _ha2_L(x, I2, X0, Z0)
    return (N[0] + lam * N[1] + lam * lam * N[2]) / lam**2
