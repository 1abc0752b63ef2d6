"""Named catalog of cases: parameter schemas, condition summaries, builders
and config templates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import yaml

from ..errors import ConfigError, InvalidArgument, NotHamiltonianError
from . import e4, family, heavy_top, kirchhoff, so_n

# --- parameter schema -------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    """One entry of a case's parameter block.

    ``type`` is ``"number"``, ``"int"``, ``"vec2"``, ``"vec3"``, ``"mat3"``
    (3x3, or a 3-vector diagonal), ``"choice"`` or ``"text"``. Numeric
    defaults may be expression strings such as ``"-sqrt(3)"``.
    """

    name: str
    type: str
    default: object
    doc: str = ""
    choices: tuple = ()

    def parse(self, value, where):
        from ..config import evaluate, evaluate_tree

        t = self.type
        if t == "number":
            return evaluate(value, where)
        if t == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError("expected an integer", where)
            return value
        if t in ("vec2", "vec3"):
            n = int(t[-1])
            if not isinstance(value, list) or len(value) != n:
                raise ConfigError(f"expected a list of {n} numbers", where)
            return evaluate_tree(value, where)
        if t == "mat3":
            if not isinstance(value, list):
                raise ConfigError("expected a 3-vector diagonal or a 3x3 matrix", where)
            v = evaluate_tree(value, where)
            shape = np.shape(v)
            if shape not in ((3,), (3, 3)):
                raise ConfigError(f"expected a 3-vector diagonal or a 3x3 matrix, got shape {shape}", where)
            return v
        if t == "choice":
            if str(value) not in self.choices:
                raise ConfigError(f"expected one of {list(self.choices)}, got {value!r}", where)
            return str(value)
        if t == "text":
            return "" if value is None else str(value)
        raise InvalidArgument(f"unknown parameter type {t!r}")


@dataclass(frozen=True)
class CaseEntry:
    tag: str
    kind: str
    description: str
    params: tuple
    condition: str
    build_fn: object
    reduction: bool = False
    rmatrix: bool = False
    notes: str = ""
    supports_note: str = ""

    def defaults(self):
        return {p.name: p.default for p in self.params}

    def parse_params(self, raw):
        """Evaluate a raw params mapping; missing entries take their defaults."""
        known = {p.name: p for p in self.params}
        for key in raw:
            if key not in known:
                raise ConfigError(f"unknown parameter {key!r} for case {self.tag!r}; allowed: {list(known)}",
                                  f"system.params.{key}")
        out = {}
        for p in self.params:
            out[p.name] = p.parse(raw.get(p.name, p.default), f"system.params.{p.name}")
        return out

    def build(self, params=None):
        # parsing is idempotent, so raw and parsed parameters both work
        return self.build_fn(**self.parse_params(params or {}))

    def template(self):
        """A config for this case that parses and validates as written."""
        doc = {
            "system": {"case": self.tag, "params": {p.name: p.default for p in self.params}},
            "initial": {"random": {"seed": 0}},
            "stepper": {"method": "dopri45", "rel_tol": 1e-10, "abs_tol": 1e-12},
            "duration": 10.0,
            "samples": 201,
            "checks": ["integrals"],
            "output": {"csv": "trajectory.csv", "report": "report.json"},
        }
        checks = supported_checks(self.build())
        doc["checks"] = [c for c in checks if c != "rmatrix"]
        head = f"# {self.tag}: {self.description}\n# conditions: {self.condition}\n"
        return head + yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


# --- builders -----------------------------------------------------------------------

def _heavy(case):
    def build(I, chi):
        return heavy_top.HeavyTop(I, chi, case)

    return build


def _zhukovski(J1, J3, J13, Z0):
    return heavy_top.HeavyTop.zhukovski(J1, J3, J13, Z0)


def _kirchhoff_generic(A, B, C):
    return kirchhoff.Kirchhoff(A, B, C, "generic")


def _family(X0, Z0, I2, a_case, a):
    if a_case == "custom":
        from ..config import polynomial
        from ..poisson import E3

        if not a.strip():
            raise ConfigError("a custom family needs a polynomial a", "system.params.a")
        f = polynomial(a, E3.coordinate_names(), "system.params.a")
        return family.Family(X0, Z0, I2, "custom", f, a)
    if a.strip():
        raise ConfigError("a is only used with a_case: custom", "system.params.a")
    return family.Family(X0, Z0, I2, a_case)


def _chaplygin2(a, b, c, sign):
    return kirchhoff.chaplygin2(tuple(a), tuple(b), tuple(c), sign)


def _chaplygin4(**coeffs):
    return e4.Chaplygin4(**coeffs)


_N = "number"
_V3 = "vec3"

_HEAVY_PARAMS = lambda I, chi: (  # noqa: E731
    Param("I", _V3, I, "principal moments of inertia"),
    Param("chi", _V3, chi, "centre-of-mass vector (X0, Y0, Z0) times mg"),
)

_CHAPLYGIN4_DEFAULTS = dict(
    A1212=1.0, A1313=1.5, A3434=2.0, A1234=0.3, C11=0.5, C33=1.2,
    A1213=0.2, A1214=0.0, A1223=0.0, A1224=-0.1, A1334=0.0, A1434=0.15, A2334=0.05, A2434=0.0,
    B121=0.1, B122=0.0, B123=0.0, B124=0.0, B341=0.0, B342=0.0, B343=-0.2, B344=0.0,
)

_ENTRIES = [
    CaseEntry("heavy-top", "heavy-top", "heavy top, no case conditions",
              _HEAVY_PARAMS([1.0, 2.0, 3.0], [0.3, 0.2, 1.0]), "I1, I2, I3 > 0", _heavy("generic")),
    CaseEntry("euler", "heavy-top", "Euler case (fixed at the centre of mass)",
              _HEAVY_PARAMS([1.0, 2.0, 3.0], [0.0, 0.0, 0.0]), "X0 = Y0 = Z0 = 0", _heavy("euler")),
    CaseEntry("lagrange", "heavy-top", "Lagrange case (symmetric top)",
              _HEAVY_PARAMS([2.0, 2.0, 1.0], [0.0, 0.0, 1.0]), "I1 = I2, X0 = Y0 = 0", _heavy("lagrange")),
    CaseEntry("kowalevski", "heavy-top", "Kowalevski case",
              _HEAVY_PARAMS([2.0, 2.0, 1.0], [1.0, 0.0, 0.0]), "I1 = I2 = 2 I3, Y0 = Z0 = 0", _heavy("kowalevski")),
    CaseEntry("goryachev-chaplygin", "heavy-top", "Goryachev-Chaplygin case (integral on the leaf <M,G> = 0)",
              _HEAVY_PARAMS([4.0, 4.0, 1.0], [1.0, 0.0, 0.0]), "I1 = I2 = 4 I3, Y0 = Z0 = 0; F1 = 0",
              _heavy("goryachev-chaplygin")),
    CaseEntry("hess-appelrot", "heavy-top", "Hess-Appel'rot case",
              _HEAVY_PARAMS([3.0, 2.0, 1.0], [1.0, 0.0, "-sqrt(3)"]),
              "Y0 = 0, X0 sqrt(I1 (I2 - I3)) + Z0 sqrt(I3 (I1 - I2)) = 0 (either sign); relation X0 M1 + Z0 M3 = 0",
              _heavy("hess-appelrot"), reduction=True, rmatrix=True),
    CaseEntry("hess-appelrot-zhukovski", "heavy-top", "Hess-Appel'rot case in the Zhukovski frame",
              (Param("J1", _N, 1.0), Param("J3", _N, 1.5), Param("J13", _N, 0.3), Param("Z0", _N, 1.0)),
              "J1 > 0, J3 > 0, J1 J3 - J13^2 > 0; relation M3 = 0", _zhukovski),
    CaseEntry("kirchhoff-generic", "kirchhoff", "Kirchhoff equations with raw A, B, C",
              (Param("A", "mat3", [1.0, 2.0, 3.0]), Param("B", "mat3", [0.0, 0.0, 0.0]),
               Param("C", "mat3", [0.5, 1.0, 1.5])),
              "A, B, C symmetric, A positive definite", _kirchhoff_generic),
    CaseEntry("kirchhoff", "kirchhoff", "Kirchhoff case (axially symmetric body)",
              tuple(Param(k, _N, v) for k, v in dict(a1=1.0, a3=2.0, b1=0.3, b3=-0.2, c1=0.5, c3=1.5).items()),
              "A, B, C diagonal with a1 = a2, b1 = b2, c1 = c2", kirchhoff.kirchhoff_case),
    CaseEntry("clebsch1", "kirchhoff", "first Clebsch case",
              (Param("a", _N, 1.0), Param("c", _V3, [0.5, 1.0, 2.0])),
              "A = a 1, B = 0, C diagonal", kirchhoff.clebsch1),
    CaseEntry("clebsch2", "kirchhoff", "second Clebsch case, c_i = c0 - theta a1 a2 a3 / a_i",
              (Param("a", _V3, [1.0, 2.0, 3.0]), Param("theta", _N, 0.7), Param("c0", _N, 0.0)),
              "B = 0, (c2 - c3)/a1 + (c3 - c1)/a2 + (c1 - c2)/a3 = 0, a_i distinct", kirchhoff.clebsch2),
    CaseEntry("steklov", "kirchhoff", "Steklov case",
              (Param("a", _V3, [1.0, 2.0, 3.0]), Param("mu", _N, 0.5)),
              "b1 = mu a2 a3 (cyclic), c1 = mu^2 a1 (a2 - a3)^2 (cyclic)", kirchhoff.steklov),
    CaseEntry("lyapunov", "kirchhoff", "Lyapunov case",
              (Param("d", _V3, [1.0, 2.0, 3.0]), Param("mu", _N, 0.5)),
              "A = 1, b_i = -mu d_i, c1 = mu^2 (d2 - d3)^2 (cyclic)", kirchhoff.lyapunov),
    CaseEntry("sokolov", "kirchhoff", "Sokolov case",
              (Param("alpha", _N, 0.6), Param("beta", _N, 0.3)),
              "A = diag(1, 1, 2), b13 = alpha, b23 = beta, c11 = 4 beta^2, c22 = 4 alpha^2, "
              "c12 = -4 alpha beta, c33 = -4 (alpha^2 + beta^2)", kirchhoff.sokolov),
    CaseEntry("chaplygin1", "kirchhoff", "first Chaplygin case (integral on the leaf <M,G> = 0)",
              (Param("a", _N, 1.0), Param("c", _N, 0.8)),
              "A = diag(a, a, 2a), B = 0, C = diag(c, -c, 0); F1 = 0", kirchhoff.chaplygin1),
    CaseEntry("chaplygin2", "kirchhoff", "second Chaplygin case in the principal frame of A",
              (Param("a", _V3, [1.0, 2.0, 4.0]), Param("b", "vec2", [0.0, 0.0]),
               Param("c", "vec2", [0.3, 0.7]), Param("sign", _N, 1.0, "branch of the conditions (+1 or -1)")),
              "a1 < a2 < a3, x13 sqrt(a2 - a1) = +-(x2 - x1) sqrt(a3 - a2), "
              "x13 sqrt(a3 - a2) = -+(x3 - x2) sqrt(a2 - a1) for x = b, c; "
              "relation M1 sqrt(a2 - a1) -+ M3 sqrt(a3 - a2) = 0",
              _chaplygin2, supports_note="invariant relation, Lax pair (B=0 subcase)",
              notes="the Lax pair is built in the chaplygin2-rotated frame"),
    CaseEntry("chaplygin2-rotated", "kirchhoff", "second Chaplygin case in the frame with a1 = a2",
              tuple(Param(k, _N, v) for k, v in
                    dict(a1=1.0, a3=2.0, a13=0.4, b1=0.0, b3=0.0, c1=0.5, c3=1.2).items()),
              "a1 = a2, a13 != 0, B = diag(b1, b1, b3), C = diag(c1, c1, c3); relation M3 = 0; "
              "Lax pair when b1 = b3 = 0", kirchhoff.chaplygin2_rotated,
              supports_note="invariant relation, Lax pair (B=0 subcase)"),
    CaseEntry("bitop", "bitop", "Lagrange bitop on so(4) x so(4)",
              tuple(Param(k, _N, v) for k, v in dict(a=1.0, b=2.0, chi12=1.0, chi34=0.5).items()),
              "I = diag(a, a, b, b), a != b, chi12 != 0, chi34 != 0, |chi12| != |chi34|",
              so_n.bitop, reduction=True),
    CaseEntry("ha4", "han", "four-dimensional Hess-Appel'rot system",
              tuple(Param(k, _N, v) for k, v in dict(J1=1.0, J3=0.5, J13=0.3, J24=0.2, chi12=1.0, chi34=0.4).items()),
              "J1, J3 > 0, J1 J3 > J13^2, J1 J3 > J24^2, chi12 != 0; relations M12 = M34 = 0",
              so_n.ha4, reduction=True),
    CaseEntry("han", "han", "n-dimensional Hess-Appel'rot system (n >= 5)",
              (Param("n", "int", 5),) + tuple(Param(k, _N, v) for k, v in
                                              dict(J1=1.0, J3=0.5, J13=0.3, J24=0.2, chi12=1.0).items()),
              "J1, J3 > 0, J1 J3 > J13^2, J1 J3 > J24^2, chi12 != 0; relations M12 = 0, M_lp = 0 for 3 <= l < p",
              so_n.han),
    CaseEntry("family", "family", "e(3) family x' = {x, H1} + a(x) {x, H2}",
              (Param("X0", _N, 1.0), Param("Z0", _N, 0.5), Param("I2", _N, 2.0),
               Param("a_case", "choice", "i", "choice of a: i <M,G>, ii <G,G>, iii H2, "
                     "iv X0 G1 + Z0 G3, v <M,M>, custom", family.FAMILY_CASES),
               Param("a", "text", "", "polynomial in M1..G3 for a_case custom")),
              "I2 > 0, X0^2 + Z0^2 > 0; Hamiltonian for a_case i-iii",
              _family, reduction=True, rmatrix=True),
    CaseEntry("kirchhoff4", "kirchhoff4", "four-dimensional Kirchhoff case on e(4)",
              tuple(Param(k, _N, v) for k, v in
                    dict(A1212=1.0, A1313=1.5, A3434=2.0, A1234=0.3, C11=0.5, C33=1.2).items()),
              "finite coefficients", e4.kirchhoff4),
    CaseEntry("chaplygin4", "chaplygin4", "four-dimensional Chaplygin case on e(4)",
              tuple(Param(k, _N, v) for k, v in _CHAPLYGIN4_DEFAULTS.items()),
              "finite coefficients; relations M12 = M34 = 0", _chaplygin4),
]

CATALOG = {e.tag: e for e in _ENTRIES}


def build(tag, params=None):
    """Build the system for ``tag`` from parsed (or raw) parameters."""
    if tag not in CATALOG:
        raise InvalidArgument(f"unknown case {tag!r}; known: {list(CATALOG)}")
    return CATALOG[tag].build(params)


def template(tag):
    if tag not in CATALOG:
        raise InvalidArgument(f"unknown case {tag!r}; known: {list(CATALOG)}")
    return CATALOG[tag].template()


# --- capabilities ---------------------------------------------------------------------

def is_hamiltonian(system):
    try:
        system.hamiltonian()
    except NotHamiltonianError:
        return False
    return True


def entry_for(system):
    """The catalog entry a built system belongs to (by kind and case)."""
    for e in _ENTRIES:
        if e.kind != system.kind:
            continue
        if e.kind == "heavy-top" and e.tag != {"generic": "heavy-top"}.get(system.case, system.case):
            continue
        if e.kind == "kirchhoff":
            want = "kirchhoff-generic" if system.case == "generic" else system.case
            if system.case == "chaplygin2" and system.params().get("form") == "rotated":
                want = "chaplygin2-rotated"
            if e.tag != want:
                continue
        if e.kind == "han" and e.tag != ("ha4" if system.n == 4 else "han"):
            continue
        return e
    return None


def supported_checks(system):
    """The run checks that apply to ``system``, in canonical order."""
    from ..config import CHECKS

    e = entry_for(system)
    ok = {"integrals", "divergence"}
    if system.invariant_relations():
        ok.add("relations")
    if system.has_lax:
        ok.add("spectral")
    if e is not None and e.reduction:
        ok.add("reduction")
    if e is not None and e.rmatrix:
        ok.add("rmatrix")
    return [c for c in CHECKS if c in ok]


def listing():
    """Human-readable catalog: tag, parameters, conditions and capabilities."""
    lines = []
    for e in _ENTRIES:
        sys_ = e.build()
        caps = []
        if is_hamiltonian(sys_):
            caps.append("hamiltonian")
        if sys_.invariant_relations():
            caps.append("invariant relation")
        if sys_.has_lax:
            caps.append("lax")
        if e.reduction:
            caps.append("reduction")
        if e.supports_note:
            caps = [c for c in caps if c not in ("invariant relation", "lax")] + [e.supports_note]
        schema = ", ".join(f"{p.name}:{p.type}" for p in e.params)
        lines.append(f"{e.tag}  [{e.kind}]  {e.description}")
        lines.append(f"    params: {schema}")
        lines.append(f"    conditions: {e.condition}")
        lines.append(f"    supports: {', '.join(caps)}")
        if e.notes:
            lines.append(f"    note: {e.notes}")
    return "\n".join(lines)
