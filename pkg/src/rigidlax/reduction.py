"""Classical reductions to elliptic quadratures, as residual checks.

Each ``*_check`` function freezes the constants of the reduction at the first
sample of a trajectory and reports the largest violation of the reduced
equations along it. Time derivatives come from the vector field through the
chain rule, never from differencing samples, so the residuals measure how
well the trajectory stays on its level set.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .algebra import split4
from .errors import InvalidArgument, OffManifoldError
from .lax import SQRT2, ha2_variables, spectral_coefficients

MANIFOLD_TOL = 1e-10


# --- curves ------------------------------------------------------------------------

def quartic_j(coeffs):
    """j-invariant of ``y^2 = a0 + a1 x + a2 x^2 + a3 x^3 + a4 x^4``.

    Uses the invariants I, J of the binary quartic, so a cubic (``a4 = 0``)
    is handled by the same formula.
    """
    a0, a1, a2, a3, a4 = (list(coeffs) + [0.0] * 5)[:5]
    I = 12 * a0 * a4 - 3 * a1 * a3 + a2 * a2
    J = 72 * a0 * a2 * a4 + 9 * a1 * a2 * a3 - 27 * a0 * a3 * a3 - 27 * a4 * a1 * a1 - 2 * a2**3
    disc = 4 * I**3 - J * J
    if disc == 0:
        raise InvalidArgument("singular curve: the j-invariant is undefined")
    return 1728.0 * 4 * I**3 / disc


@dataclass(frozen=True)
class CubicCurve:
    """``y^2 = c3 x^3 + c2 x^2 + c1 x + c0``."""

    c3: float
    c2: float
    c1: float
    c0: float
    provenance: str = ""

    @property
    def ascending(self):
        return [self.c0, self.c1, self.c2, self.c3]

    def __call__(self, x):
        return ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0

    def j_invariant(self):
        return quartic_j(self.ascending)

    def to_dict(self):
        return {"c3": self.c3, "c2": self.c2, "c1": self.c1, "c0": self.c0, "provenance": self.provenance}

    def to_json(self):
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class QuarticCurve:
    """``y^2 = sum_k a_k x^k``, ``k = 0..4`` (ascending)."""

    coeffs: tuple
    provenance: str = ""

    def __call__(self, x):
        return sum(c * x**k for k, c in enumerate(self.coeffs))

    def j_invariant(self):
        return quartic_j(self.coeffs)

    def to_dict(self):
        return {"coeffs": [float(c) for c in self.coeffs], "provenance": self.provenance}


@dataclass
class ReductionResidual:
    """Largest violation per channel; ``primary`` names the acceptance channels."""

    kind: str
    channels: dict
    primary: tuple = ()
    constants: dict = field(default_factory=dict)
    t_at_max: dict = field(default_factory=dict)

    @classmethod
    def from_series(cls, kind, series, times=None, primary=(), constants=None):
        """Channels from per-sample residual arrays (absolute values are taken)."""
        channels, where = {}, {}
        for name, v in series.items():
            v = np.abs(np.asarray(v, dtype=float)).ravel()
            if v.size == 0:
                channels[name] = 0.0
                continue
            j = int(np.argmax(v))
            channels[name] = float(v[j])
            if times is not None and v.size == len(times):
                where[name] = float(times[j])
        return cls(kind, channels, tuple(primary), dict(constants or {}), where)

    def max(self, names=None):
        names = self.primary or tuple(self.channels) if names is None else names
        return max(self.channels[n] for n in names)

    def __getitem__(self, name):
        return self.channels[name]

    def to_dict(self):
        def clean(v):
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if hasattr(v, "to_dict"):
                return v.to_dict()
            return v

        return {
            "kind": self.kind,
            "channels": {k: float(v) for k, v in self.channels.items()},
            "primary": list(self.primary),
            "constants": {k: clean(v) for k, v in self.constants.items()},
            "t_at_max": dict(self.t_at_max),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _times(traj):
    return getattr(traj, "times", None)


def _columns(traj):
    """States of a trajectory (or an array of samples) as ``(dim, n_samples)``."""
    S = np.asarray(traj.states if hasattr(traj, "states") else traj, dtype=float)
    if S.ndim != 2:
        raise InvalidArgument("reductions expect an unbatched trajectory")
    return S.T


def _require(system, kinds, what):
    if (system.kind, system.case) not in kinds and system.kind not in kinds:
        raise InvalidArgument(f"{what} does not apply to {system.kind}/{system.case}")


# --- Hess coordinates -----------------------------------------------------------------

@dataclass(frozen=True)
class HessCoords:
    nu: float
    mu: float
    rho: float


def _principal_top(top):
    _require(top, ("heavy-top",), "Hess coordinates")
    if np.any(np.abs(top.J - np.diag(np.diag(top.J))) > 0):
        raise InvalidArgument("Hess coordinates need a principal-frame top")


def hess_coords(top, x, h=None):
    """``nu = <M,M>``, ``mu = sum M_i^2 / (2 I_i)``, ``rho = <M, chi>``.

    ``mu`` is also formed as ``h/2 - <chi, Gamma>``; with the default
    ``h = 2 H(x)`` the two must agree.
    """
    _principal_top(top)
    x = np.asarray(x, dtype=float)
    M, G = x[:3], x[3:6]
    mu = 0.5 * float(np.sum(M**2 / top.I))
    if h is None:
        h = 2.0 * float(top.hamiltonian()(x))
        mu_alt = h / 2 - float(np.dot(top.chi, G))
        if abs(mu - mu_alt) > MANIFOLD_TOL * max(1.0, abs(mu)):
            raise AssertionError(f"the two forms of mu disagree: {mu} vs {mu_alt}")
    return HessCoords(float(np.dot(M, M)), mu, float(np.dot(M, top.chi)))


def hess_delta(top):
    """Determinant of the linear system for ``M_i^2`` in terms of ``nu, mu``.

    It vanishes exactly on the Hess-Appel'rot condition, which is why the
    Hess coordinates do not determine the motion there.
    """
    _principal_top(top)
    I1, I2, I3 = top.I
    X0, _, Z0 = top.chi
    return float((X0**2 * I1 * (I2 - I3) - Z0**2 * I3 * (I1 - I2)) / (I1 * I2 * I3))


def _check_on_manifold(value, what, strict):
    if strict and value > MANIFOLD_TOL:
        raise OffManifoldError(f"initial state is off the invariant manifold: {what} = {value:.3g}")


def hess_reduction_check(top, traj, strict=True):
    """Residuals of the Hess reduction on the invariant surface ``rho = 0``.

    Channels:

    ``a``          max ``|mu/nu - mu0/nu0|``;
    ``b``          max ``|(nu'/2)^2 - (d^2 nu - d^2 c1^2 - nu (h/2 - c nu)^2)|``;
    ``b_printed``  the same with ``c^2 nu^3`` for the last term, which is the
                   right quadrature only on the level ``h = 0``;
    ``rho``        max ``|rho|``.

    ``h = 2H``, ``c1 = <M,Gamma>`` and ``c = mu0/nu0`` are frozen at the
    first sample, ``d^2 = <chi,chi>``.
    """
    _require(top, (("heavy-top", "hess-appelrot"),), "hess_reduction_check")
    X = _columns(traj)
    V = top.rhs(X)
    M, G = X[:3], X[3:6]
    chi = top.chi
    nu = np.sum(M**2, axis=0)
    mu = 0.5 * np.sum(M**2 / top.I[:, None], axis=0)
    rho = chi @ M
    _check_on_manifold(abs(rho[0]), "rho", strict)
    d2 = float(chi @ chi)
    h = 2.0 * float(top.hamiltonian()(X[:, 0]))
    c1 = float(M[:, 0] @ G[:, 0])
    nz = nu > 1e-300
    c = float(mu[0] / nu[0]) if nz[0] else 1.0 / (2 * top.I[1])
    half_nudot = np.sum(M * V[:3], axis=0)
    lhs = half_nudot**2
    rhs_b = d2 * nu - d2 * c1**2 - nu * (h / 2 - c * nu) ** 2
    rhs_p = d2 * nu - d2 * c1**2 - c * c * nu**3
    ratio = np.where(nz, mu / np.where(nz, nu, 1.0) - c, 0.0)
    return ReductionResidual.from_series(
        "hess",
        {"a": ratio, "b": lhs - rhs_b, "b_printed": lhs - rhs_p, "rho": rho},
        _times(traj),
        primary=("a", "b"),
        constants={"h": h, "c1": c1, "c": c, "delta2": d2},
    )


# --- Hess-Appel'rot spectral curve ------------------------------------------------------

def _pmul(p, q):
    return np.convolve(p, q)


def ha_spectral_curve(top, x):
    """``P4(lam) = omega^2 - 2 Delta Delta*`` of the 3x3 pair, coefficient by coefficient.

    Returns a dict with the quartic (ascending coefficients), the same
    quartic read from the characteristic polynomial of ``L(lam)`` as
    ``-(A lam^4 + B lam^3 + D lam^2 + E lam + F)``, their largest
    difference, and the gap between the full and the shortened ``omega``
    (the M-terms of ``omega`` cancel only on the invariant surface).
    """
    _require(top, (("heavy-top", "hess-appelrot"),), "ha_spectral_curve")
    x = np.asarray(x, dtype=float)
    I2 = top.I[1]
    X0, _, Z0 = top.chi
    delta = np.hypot(X0, Z0)
    al, be = X0 / delta, Z0 / delta
    C = I2 * top.chi
    M, G = x[:3], x[3:6]
    xv, xb, yv, yb, _, _ = ha2_variables(x, X0, Z0)
    # ascending coefficients in lam
    omega = -1j * np.array([al * G[0] + be * G[2], al * M[0] + be * M[2], al * C[0] + be * C[2]])
    omega_short = omega.copy()
    omega_short[1] = 0.0
    D = np.array([yv, xv])
    Ds = np.array([yb, xb])
    P4 = _pmul(omega, omega)
    P4[:3] -= 2 * _pmul(D, Ds)
    if np.max(np.abs(P4.imag)) > 1e-9 * max(1.0, np.max(np.abs(P4.real))):
        raise AssertionError("P4 has a non-real coefficient")
    P4 = P4.real
    sc = spectral_coefficients(top, x, "ha3")
    from_l = -np.array([sc["F"], sc["E"], sc["D"], sc["B"], sc["A"]])
    return {
        "P4": QuarticCurve(tuple(P4), "hess-appelrot (5.1)"),
        "from_spectral": from_l,
        "mismatch": float(np.max(np.abs(P4 - from_l))),
        "omega_gap": float(np.max(np.abs(omega - omega_short))),
    }


# --- Riccati equation ------------------------------------------------------------------

def riccati_rhs(u, absx, K, Q):
    """``(f + g) u^2 + (f - g)`` with ``f = K / (2|x|^2)`` and ``g = Q |x| / 2``."""
    absx = np.asarray(absx, dtype=float)
    if np.any(absx == 0):
        raise InvalidArgument("|x| = 0 is a singular point of the Riccati equation")
    f = K / (2 * absx**2)
    g = Q * absx / 2
    return (f + g) * np.asarray(u) ** 2 + (f - g)


def riccati_constants(top, x0, printed=False):
    """``(K, Q)`` for :func:`riccati_rhs`.

    ``K = delta <M,Gamma> / 2`` with ``delta = |chi|``; ``printed=True``
    gives ``<M,Gamma> / (2 delta)``, which agrees only when ``delta = 1``.
    ``Q = (beta/alpha) sqrt(2) (1/I2 - 1/I1)``.
    """
    _require(top, (("heavy-top", "hess-appelrot"),), "riccati_constants")
    I1, I2, _ = top.I
    X0, _, Z0 = top.chi
    if X0 == 0:
        raise InvalidArgument("the Riccati form needs X0 != 0")
    delta = float(np.hypot(X0, Z0))
    al, be = X0 / delta, Z0 / delta
    c1 = float(np.dot(x0[:3], x0[3:6]))
    K = c1 / (2 * delta) if printed else delta * c1 / 2
    Q = be / al * SQRT2 * (1 / I2 - 1 / I1)
    return K, Q


def riccati_check(top, traj, printed=False, u_max=10.0):
    """Check ``u = tan(arg(x)/2)`` against :func:`riccati_rhs` along ``traj``.

    ``arg x`` is unwrapped along the samples so the angle is continuous.
    Channels: ``u`` is ``max |du/dt - rhs|`` over samples with
    ``|u| <= u_max`` (``u`` has poles where ``arg x`` crosses odd multiples of
    pi); ``angle`` is the same identity written for the angle,
    ``max |phi' - 2 (f - g cos phi)|``, which has no poles.
    """
    X = _columns(traj)
    V = top.rhs(X)
    _check_on_manifold(abs(float(top.chi @ X[:3, 0])), "F4", True)
    X0, Z0 = top.chi[0], top.chi[2]
    xv = ha2_variables(X, X0, Z0)[0]
    xd = ha2_variables(V, X0, Z0)[0]
    if np.any(xv == 0):
        raise InvalidArgument("x vanishes along the trajectory")
    phi = np.unwrap(np.angle(xv))
    phidot = (xd / xv).imag
    r = np.abs(xv)
    K, Q = riccati_constants(top, X[:, 0], printed)
    u = np.tan(phi / 2)
    udot = (1 + u * u) * phidot / 2
    keep = np.abs(u) <= u_max
    f = K / (2 * r * r)
    g = Q * r / 2
    return ReductionResidual.from_series(
        "riccati",
        {
            "u": np.where(keep, udot - riccati_rhs(u, r, K, Q), 0.0),
            "angle": phidot - 2 * (f - g * np.cos(phi)),
        },
        _times(traj),
        primary=("u", "angle"),
        constants={"K": K, "Q": Q, "winding": float((phi[-1] - phi[0]) / (2 * np.pi)), "samples_used": int(keep.sum())},
    )


# --- Lagrange bitop ---------------------------------------------------------------------

def _so_split(system, X):
    M, G = system.space.unpack(X)
    M1, M2 = split4(M)
    G1, G2 = split4(G)
    return M1, M2, G1, G2


def bitop_constants(bt, x0):
    """Frozen constants of the bitop reduction for ``i = 1, 2``.

    ``g_i = |Gamma_i|^2`` enters ``C_i`` as ``n_i^2 g_i``; for unit
    ``Gamma_i`` this is the usual ``n_i^2``.
    """
    X = np.asarray(x0, dtype=float)[:, None]
    M1, M2, G1, G2 = _so_split(bt, X)
    W = bt.omega_split(M1, M2)
    s = bt.a + bt.b
    chi3 = [split4(bt.chi)[i][2] for i in range(2)]
    out = []
    for i, (Wi, Gi) in enumerate(zip(W, (G1, G2))):
        p, q, _ = Wi[0]
        al = M1[0, 2] / s if i == 0 else M2[0, 2] / s
        u = p * p + q * q
        f2 = s * (s * u + s * al * al + 2 * chi3[i] * Gi[0, 2])
        f3 = s * (p * Gi[0, 0] + q * Gi[0, 1] + al * Gi[0, 2])
        n = -2 * chi3[i] / s
        g = float(Gi[0] @ Gi[0])
        ai = (al * al * s * s - f2) / (s * s)
        B = 2 * ai + al * al
        C = n * n * g - ai * ai - 4 * al * chi3[i] * f3 / s**2 - 2 * al * al * ai
        D = -4 * (2 * chi3[i] * f3 / s**2 + al * ai) ** 2
        out.append({"alpha": al, "f1": s * al * chi3[i], "f2": f2, "f3": f3, "n": n, "a": ai, "g": g,
                    "B": B, "C": C, "D": D, "chi3": chi3[i],
                    "curve": CubicCurve(-4.0, -4 * B, 4 * C, D, f"bitop E{i + 1}")})
    return out


def bitop_reduction_check(bt, traj):
    """``max |u_i'^2 - P_i(u_i)|`` with ``u_i = p_i^2 + q_i^2`` from ``Omega_i``.

    ``P_i(u) = -4u^3 - 4 B_i u^2 + 4 C_i u + D_i``. Also reports the drift
    of ``alpha_i`` (channel ``alpha{i}``), constant by the ``r``-equations.
    """
    _require(bt, ("bitop",), "bitop_reduction_check")
    X = _columns(traj)
    V = bt.rhs(X)
    M1, M2, _, _ = _so_split(bt, X)
    dM1, dM2, _, _ = _so_split(bt, V)
    W = bt.omega_split(M1, M2)
    dW = bt.omega_split(dM1, dM2)
    s = bt.a + bt.b
    consts = bitop_constants(bt, X[:, 0])
    channels = {}
    for i in range(2):
        p, q = W[i][:, 0], W[i][:, 1]
        u = p * p + q * q
        udot = 2 * (p * dW[i][:, 0] + q * dW[i][:, 1])
        c = consts[i]
        P = -4 * u**3 - 4 * c["B"] * u * u + 4 * c["C"] * u + c["D"]
        channels[f"u{i + 1}"] = udot**2 - P
        al = (M1 if i == 0 else M2)[:, 2] / s
        channels[f"alpha{i + 1}"] = al - c["alpha"]
    return ReductionResidual.from_series(
        "bitop",
        channels,
        _times(traj),
        primary=("u1", "u2"),
        constants={f"E{i + 1}": consts[i]["curve"] for i in range(2)},
    )


# --- four-dimensional Hess-Appel'rot ---------------------------------------------------

def ha4_reduction_check(sys4, traj, strict=True):
    """Elliptic quadratures for ``Gamma_(i)3`` on ``M_(1)3 = M_(2)3 = 0``.

    Channels ``curve{i}``: ``max |G3'^2 - 4 s^2 [K^2 (g_i - G3^2) - c_i^2]|``
    with ``s = J1 + J3``, ``K^2 = h_i - 2 chi_(i)3 G3 / s``, ``g_i = |Gamma_i|^2``
    (1 for a unit ``Gamma_i``, as the curves ``E_i`` assume); channels
    ``K{i}``: ``max |M_(i)1^2 + M_(i)2^2 - K^2|``; channel ``relations``:
    ``max |M_(i)3|``.
    """
    _require(sys4, (("han", "ha4"),), "ha4_reduction_check")
    X = _columns(traj)
    V = sys4.rhs(X)
    M1, M2, G1, G2 = _so_split(sys4, X)
    _, _, dG1, dG2 = _so_split(sys4, V)
    rel = np.maximum(np.abs(M1[:, 2]), np.abs(M2[:, 2]))
    _check_on_manifold(max(abs(M1[0, 2]), abs(M2[0, 2])), "M_(i)3", strict)
    s = sys4.s
    chi3 = [split4(sys4.chi)[i][2] for i in range(2)]
    channels = {}
    constants = {}
    for i, (Mi, Gi, dGi) in enumerate(((M1, G1, dG1), (M2, G2, dG2))):
        h = float(Mi[0] @ Mi[0] + 2 * chi3[i] * Gi[0, 2] / s)
        c = float(Mi[0] @ Gi[0])
        g = float(Gi[0] @ Gi[0])
        z = Gi[:, 2]
        K2 = h - 2 * chi3[i] * z / s
        channels[f"curve{i + 1}"] = dGi[:, 2] ** 2 - 4 * s * s * (K2 * (g - z * z) - c * c)
        channels[f"K{i + 1}"] = Mi[:, 0] ** 2 + Mi[:, 1] ** 2 - K2
        A, B, C = s * chi3[i], s * s * h, s * s * (c * c - h)
        constants[f"h{i + 1}"] = h
        constants[f"c{i + 1}"] = c
        constants[f"E{i + 1}"] = CubicCurve(8 * A, -4 * B, -8 * A, -4 * C, f"ha4 E{i + 1}")
    channels["relations"] = rel
    return ReductionResidual.from_series(
        "ha4", channels, _times(traj), primary=("curve1", "curve2", "K1", "K2"), constants=constants
    )


# --- the family on e(3) -------------------------------------------------------------------

def family_xy(fam, X):
    """Rotated coordinates ``X1..X3, Y1..Y3`` (first axis)."""
    al, be = fam.alpha, fam.beta
    M, G = X[:3], X[3:6]
    Xc = np.stack([al * M[0] + be * M[2], M[1], -be * M[0] + al * M[2]])
    Yc = np.stack([al * G[0] + be * G[2], G[1], -be * G[0] + al * G[2]])
    return Xc, Yc


def family_constants(fam, x0):
    """``(c1, c2, d1, d2)`` and the cubic of the reduced equation.

    ``d1, d2`` are the values of ``|X|^2 / (2 I2 delta) + Y1`` and ``X1``,
    i.e. ``H1 / delta`` and ``H2 / delta``.
    """
    x0 = np.asarray(x0, dtype=float)
    d, I2 = fam.delta, fam.I2
    M, G = x0[:3], x0[3:6]
    c1, c2 = float(M @ G), float(G @ G)
    d1, d2 = float(fam.H1()(x0)) / d, float(fam.H2()(x0)) / d
    A = d1 - d2**2 / (2 * I2 * d)
    B = -4 * A * d / I2 + d2**2 / I2**2
    C = 4 * d * d * (A * A - c2 + d2 * (c1 - d2 * A) / (I2 * d))
    D = 4 * d * d * (c1 - d2 * A) ** 2
    curve = CubicCurve(-1 / I2**2, -B, -C, -D, f"family ({fam.case}) reduced cubic")
    return {"c1": c1, "c2": c2, "d1": d1, "d2": d2, "A": A, "B": B, "C": C, "D": D, "curve": curve}


def family_u(fam, traj):
    """``u = X2^2 + X3^2`` along ``traj``."""
    Xc, _ = family_xy(fam, _columns(traj))
    return Xc[1] ** 2 + Xc[2] ** 2


def family_reduction_check(fam, traj):
    """``max |u'^2 - (-u^3/I2^2 - B u^2 - C u - D)|`` and the drift of ``X1``."""
    _require(fam, ("family",), "family_reduction_check")
    X = _columns(traj)
    V = fam.rhs(X)
    Xc, _ = family_xy(fam, X)
    dX, _ = family_xy(fam, V)
    u = Xc[1] ** 2 + Xc[2] ** 2
    udot = 2 * (Xc[1] * dX[1] + Xc[2] * dX[2])
    k = family_constants(fam, X[:, 0])
    return ReductionResidual.from_series(
        "family",
        {"cubic": udot**2 - k["curve"](u), "X1": Xc[0] - Xc[0, 0]},
        _times(traj),
        primary=("cubic",),
        constants={key: k[key] for key in ("c1", "c2", "d1", "d2", "curve")},
    )


def family_curves(fam, x):
    """The quartic of the 2x2 pair and the reduced cubic at ``x``, with j-invariants.

    The two curves live in different variables, so their coefficients are
    not comparable; the comparison is between j-invariants.
    """
    sc = spectral_coefficients(fam, x, "ha2")
    quartic = QuarticCurve(tuple(sc[f"P4_{k}"] for k in range(5)), "2x2 pair spectral curve")
    cubic = family_constants(fam, x)["curve"]
    jq, jc = quartic.j_invariant(), cubic.j_invariant()
    return {
        "quartic": quartic,
        "cubic": cubic,
        "j_quartic": jq,
        "j_cubic": jc,
        "j_gap": abs(jq - jc) / max(1.0, abs(jq)),
    }


# --- dispatch ---------------------------------------------------------------------------

def reduction_checks(system, traj):
    """All reduction checks that apply to ``system``, run on ``traj``."""
    k = system.kind
    if k == "heavy-top" and system.case == "hess-appelrot":
        return [hess_reduction_check(system, traj), riccati_check(system, traj)]
    if k == "bitop":
        return [bitop_reduction_check(system, traj)]
    if k == "han" and system.n == 4:
        return [ha4_reduction_check(system, traj)]
    if k == "family":
        return [family_reduction_check(system, traj)]
    raise InvalidArgument(f"no reduction check for {system.kind}/{system.case}")
