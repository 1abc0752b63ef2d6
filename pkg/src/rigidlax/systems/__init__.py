"""Catalog systems on e(3), so(n) x so(n) and e(4)."""
from .base import STRICT_TOL, LOOSE_TOL, Condition, ValidationReport, System
from .e4 import Chaplygin4, Kirchhoff4, chaplygin4, kirchhoff4
from .family import FAMILY_CASES, Family
from .heavy_top import HEAVY_TOP_CASES, HeavyTop, euler, goryachev_chaplygin, hess_appelrot, kowalevski, lagrange
from .kirchhoff import (
    KIRCHHOFF_CASES,
    Kirchhoff,
    chaplygin1,
    chaplygin2,
    chaplygin2_rotated,
    clebsch1,
    clebsch2,
    kirchhoff_case,
    lyapunov,
    sokolov,
    steklov,
)
from .so_n import Bitop, HessAppelrotN, bitop, ha4, han

__all__ = [
    "STRICT_TOL", "LOOSE_TOL", "Condition", "ValidationReport", "System",
    "HeavyTop", "HEAVY_TOP_CASES", "euler", "lagrange", "kowalevski", "goryachev_chaplygin", "hess_appelrot",
    "Kirchhoff", "KIRCHHOFF_CASES", "kirchhoff_case", "clebsch1", "clebsch2", "steklov", "lyapunov",
    "sokolov", "chaplygin1", "chaplygin2", "chaplygin2_rotated",
    "Bitop", "HessAppelrotN", "bitop", "ha4", "han",
    "Family", "FAMILY_CASES",
    "Kirchhoff4", "Chaplygin4", "kirchhoff4", "chaplygin4",
]
