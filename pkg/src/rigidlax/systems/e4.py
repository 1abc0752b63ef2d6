"""Four-dimensional Kirchhoff and Chaplygin cases on e(4).

Coordinates: ``M12, M13, M14, M23, M24, M34, G1, G2, G3, G4``.
Both Hamiltonians are quadratic forms ``2H = x.Q.x``.
"""
from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument
from ..poisson import E4, quadratic
from .base import System, fn

IDX = {"12": 0, "13": 1, "14": 2, "23": 3, "24": 4, "34": 5}
G0 = 6

KIRCHHOFF4_KEYS = ("A1212", "A1313", "A3434", "A1234", "C11", "C33")
CHAPLYGIN4_EXTRA = (
    "A1213", "A1214", "A1223", "A1224", "A1334", "A1434", "A2334", "A2434",
    "B121", "B122", "B123", "B124", "B341", "B342", "B343", "B344",
)


def _add(Q, i, j, coef):
    """Add ``coef * x_i * x_j`` to ``x.Q.x``."""
    if i == j:
        Q[i, i] += coef
    else:
        Q[i, j] += coef / 2
        Q[j, i] += coef / 2


def _pf(x):
    return x[0] * x[5] + x[2] * x[3] - x[1] * x[4]


def _v(x):
    """The four bilinear forms entering the second Casimir."""
    M12, M13, M14, M23, M24, M34 = x[:6]
    G1, G2, G3, G4 = x[6:10]
    return (
        M13 * G4 - M14 * G3 + M34 * G1,
        M23 * G1 + M12 * G3 - M13 * G2,
        M24 * G1 - M14 * G2 + M12 * G4,
        M23 * G4 + M34 * G2 - M24 * G3,
    )


class E4System(System):
    space = E4

    def __init__(self, coeffs, case):
        super().__init__(case)
        self.coeffs = {k: float(v) for k, v in coeffs.items()}
        self.Q = self._build_q()

    def _build_q(self):
        c = self.coeffs
        Q = np.zeros((10, 10))
        _add(Q, 0, 0, c["A1212"])
        for p in ("13", "14", "23", "24"):
            _add(Q, IDX[p], IDX[p], c["A1313"])
        _add(Q, 5, 5, c["A3434"])
        _add(Q, 0, 5, c["A1234"])
        for k in (0, 1):
            _add(Q, G0 + k, G0 + k, c["C11"])
        for k in (2, 3):
            _add(Q, G0 + k, G0 + k, c["C33"])
        for key in CHAPLYGIN4_EXTRA:
            v = c.get(key, 0.0)
            if v == 0.0:
                continue
            if key[0] == "A":
                _add(Q, IDX[key[1:3]], IDX[key[3:5]], v)
            else:
                _add(Q, IDX[key[1:3]], G0 + int(key[3]) - 1, v)
        return Q

    def params(self):
        return dict(self.coeffs)

    def rhs(self, x):
        from ..poisson import poisson_apply

        x = np.asarray(x, dtype=float)
        return poisson_apply(E4, x, np.tensordot(self.Q, x, axes=(1, 0)))

    def hamiltonian(self):
        return quadratic(self.Q, name="H")

    def sample_state(self, rng, scale=1.0):
        x = rng.normal(size=10)
        x[:6] *= scale
        x[6:] /= np.linalg.norm(x[6:])
        return x


class Kirchhoff4(E4System):
    kind = "kirchhoff4"

    def __init__(self, A1212, A1313, A3434, A1234, C11, C33):
        super().__init__(dict(zip(KIRCHHOFF4_KEYS, (A1212, A1313, A3434, A1234, C11, C33))), "kirchhoff4")

    def case_integrals(self):
        e12 = np.eye(10)[0]
        e34 = np.eye(10)[5]
        a1, c1, c3 = self.coeffs["A1313"], self.coeffs["C11"], self.coeffs["C33"]

        def F5(x):
            v1, v2, v3, v4 = _v(x)
            return a1 * _pf(x) ** 2 - c1 * (v1**2 + v4**2) - c3 * (v2**2 + v3**2)

        return [
            fn(lambda x: x[0], lambda x: e12.copy(), "F3"),
            fn(lambda x: x[5], lambda x: e34.copy(), "F4"),
            fn(F5, name="F5"),
        ]


class Chaplygin4(E4System):
    kind = "chaplygin4"

    def __init__(self, **coeffs):
        unknown = set(coeffs) - set(KIRCHHOFF4_KEYS) - set(CHAPLYGIN4_EXTRA)
        if unknown:
            raise InvalidArgument(f"unknown Chaplygin-4 coefficients: {sorted(unknown)}")
        full = {k: 0.0 for k in KIRCHHOFF4_KEYS + CHAPLYGIN4_EXTRA}
        full.update(coeffs)
        super().__init__(full, "chaplygin4")

    def invariant_relations(self):
        e12 = np.eye(10)[0]
        e34 = np.eye(10)[5]
        return [fn(lambda x: x[0], lambda x: e12.copy(), "M12"), fn(lambda x: x[5], lambda x: e34.copy(), "M34")]

    def sample_state(self, rng, scale=1.0):
        x = super().sample_state(rng, scale)
        x[0] = x[5] = 0.0
        return x


def kirchhoff4(A1212=1.0, A1313=1.5, A3434=2.0, A1234=0.3, C11=0.5, C33=1.2):
    return Kirchhoff4(A1212, A1313, A3434, A1234, C11, C33)


def chaplygin4(**overrides):
    base = dict(A1212=1.0, A1313=1.5, A3434=2.0, A1234=0.3, C11=0.5, C33=1.2,
                A1213=0.2, A1224=-0.1, A1434=0.15, A2334=0.05, B121=0.1, B343=-0.2)
    base.update(overrides)
    return Chaplygin4(**base)
