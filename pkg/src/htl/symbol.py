"""Branch-correct evaluation of the symbol family a+, a-, a = a+/a- and the target g.

Scalar functions follow the principal branch of the logarithm with
arg in (-pi, pi]. Array functions whose name ends in ``_vt`` take
vartheta = arg(-z) for z on the unit circle; they keep full relative
precision next to z = -1, where z = -exp(i*vartheta).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._circle import CircleFunction, normalize_theta
from .errors import DomainError, SingularPointError

DELTA0 = math.exp(-3.0)
SPLIT_CROSSOVER = 1e-3
_ON_CIRCLE_TOL = 1e-12

BRANCH_PRINCIPAL_PLUS = "principal Log(1+z); cut Re z <= -1, Im z = 0"
BRANCH_SPLIT_PLUS = "circle split ln(2 sin(|vt|/2)) + i theta/2 near z = -1"
BRANCH_PRINCIPAL_MINUS = "principal Log(1+1/z); cut -1 <= Re z <= 0, Im z = 0"
BRANCH_SPLIT_MINUS = "conjugate circle split near z = -1"
BRANCH_SYMBOL = "a+/a- = exp(2i arg a+) on the circle"


@dataclass(frozen=True)
class UnitAngle:
    """Point exp(i*theta) of the unit circle with theta normalized into (-pi, pi]."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(normalize_theta(self.theta)))

    @property
    def vartheta(self) -> float:
        """arg(-z), equal to theta - sign(theta)*pi for theta != 0."""
        return self.theta - math.pi if self.theta > 0 else self.theta + math.pi

    @property
    def z(self) -> complex:
        return cmath.exp(1j * self.theta)


@dataclass(frozen=True)
class SymbolValue:
    value: complex
    branch_tag: str


def arg_principal(z: complex) -> UnitAngle:
    if z == 0:
        raise DomainError("arg is undefined at z = 0")
    # atan2 returns -pi for -1 - 0j; UnitAngle maps it back to pi
    return UnitAngle(math.atan2(z.imag, z.real))


# ---- array evaluation in vartheta --------------------------------------------

def _check_nonzero_vt(vt: np.ndarray) -> None:
    bad = np.flatnonzero(vt == 0)
    if bad.size:
        raise SingularPointError("evaluation at the singular point z = -1", index=int(bad[0]))


def log1p_vt(vt) -> np.ndarray:
    """ln(1+z) at z = -exp(i*vt), vt in [-pi, pi] \\ {0}."""
    vt = np.asarray(vt, dtype=float)
    _check_nonzero_vt(np.atleast_1d(vt))
    theta = vt - np.sign(vt) * np.pi
    return np.log(2.0 * np.sin(np.abs(vt) / 2.0)) + 0.5j * theta


def one_plus_z_vt(vt) -> np.ndarray:
    """1+z at z = -exp(i*vt) without cancellation."""
    vt = np.asarray(vt, dtype=float)
    return -2j * np.sin(vt / 2.0) * np.exp(0.5j * vt)


def a_plus_vt(vt) -> np.ndarray:
    return 1.0 - log1p_vt(vt)


def a_minus_vt(vt) -> np.ndarray:
    return np.conj(a_plus_vt(vt))


def symbol_vt(vt) -> np.ndarray:
    return np.exp(2j * np.angle(a_plus_vt(vt)))


def log_symbol_vt(vt) -> np.ndarray:
    """ln a = ln a+ - ln a-, purely imaginary on the circle."""
    return 2j * np.angle(a_plus_vt(vt))


def log_a_plus_vt(vt) -> np.ndarray:
    return np.log(a_plus_vt(vt))


def g_vt(vt) -> np.ndarray:
    ap = a_plus_vt(vt)
    return 1.0 / (one_plus_z_vt(vt) * ap * (np.log(ap) + 2.0) ** 2)


def g_antiderivative_vt(vt) -> np.ndarray:
    """F = 1/(ln a+ + 2), which satisfies dF/dz = g."""
    return 1.0 / (np.log(a_plus_vt(vt)) + 2.0)


def _g_tail(eps: float) -> float:
    # integral of g over |vt| < eps in d theta; near -1, d theta = i dz
    return float(-2.0 * np.imag(g_antiderivative_vt(np.array([eps]))[0]))


A_PLUS = CircleFunction(a_plus_vt, name="a_plus")
A_MINUS = CircleFunction(a_minus_vt, name="a_minus")
SYMBOL = CircleFunction(symbol_vt, name="a")
LOG_SYMBOL = CircleFunction(log_symbol_vt, name="ln a")
RE_LOG_A_PLUS = CircleFunction(lambda vt: np.log(np.abs(a_plus_vt(vt))), name="Re ln a_plus")
IM_LOG_SYMBOL = CircleFunction(lambda vt: 2.0 * np.angle(a_plus_vt(vt)), name="Im ln a")
G_TARGET = CircleFunction(g_vt, name="g", tail=_g_tail)


# ---- scalar evaluation ---------------------------------------------------------

def _near_minus_one_on_circle(z: complex) -> float | None:
    """vartheta of z if z is on the circle within the split crossover of -1."""
    if abs(abs(z) - 1.0) > _ON_CIRCLE_TOL:
        return None
    vt = math.atan2(-z.imag, -z.real)
    if 0 < abs(vt) < SPLIT_CROSSOVER:
        return vt
    return None


def eval_a_plus(z: complex) -> SymbolValue:
    z = complex(z)
    if z.imag == 0 and z.real <= -1:
        raise DomainError(f"a+ is undefined on its cut Re z <= -1, Im z = 0 (z = {z})")
    vt = _near_minus_one_on_circle(z)
    if vt is not None:
        return SymbolValue(complex(a_plus_vt(vt)), BRANCH_SPLIT_PLUS)
    return SymbolValue(1.0 - cmath.log(1.0 + z), BRANCH_PRINCIPAL_PLUS)


def eval_a_minus(z: complex) -> SymbolValue:
    z = complex(z)
    if z.imag == 0 and -1 <= z.real <= 0:
        raise DomainError(f"a- is undefined on its cut -1 <= Re z <= 0, Im z = 0 (z = {z})")
    vt = _near_minus_one_on_circle(z)
    if vt is not None:
        return SymbolValue(complex(a_minus_vt(vt)), BRANCH_SPLIT_MINUS)
    return SymbolValue(1.0 - cmath.log(1.0 + 1.0 / z), BRANCH_PRINCIPAL_MINUS)


def eval_symbol(t: UnitAngle | float) -> SymbolValue:
    if not isinstance(t, UnitAngle):
        t = UnitAngle(t)
    if t.theta == math.pi:
        raise SingularPointError("the symbol a is singular at theta = pi (z = -1)")
    return SymbolValue(complex(symbol_vt(t.vartheta)), BRANCH_SYMBOL)


def eval_g(z: complex) -> complex:
    z = complex(z)
    if z == -1:
        raise SingularPointError("g is singular at z = -1")
    vt = _near_minus_one_on_circle(z)
    if vt is not None:
        return complex(g_vt(vt))
    ap = eval_a_plus(z).value
    return 1.0 / ((1.0 + z) * ap * (cmath.log(ap) + 2.0) ** 2)


def deriv_log_a_plus(x: float, delta0: float = DELTA0) -> complex:
    """d/dx ln a+(-exp(ix)) for 0 < |x| <= delta0."""
    x = float(x)
    if x == 0:
        raise SingularPointError("d ln a+/dx is singular at x = 0")
    if abs(x) > delta0:
        raise DomainError(f"|x| = {abs(x)} exceeds delta0 = {delta0}")
    # 1 - exp(-ix) = 2i sin(x/2) exp(-ix/2)
    one_minus = 2j * math.sin(x / 2.0) * cmath.exp(-0.5j * x)
    return complex(-1j / (one_minus * a_plus_vt(x)))


def deriv_im_log_a_plus(x: float) -> float:
    """Closed form of d/dx Im ln a+(-exp(ix)), an independent route to Im deriv_log_a_plus."""
    x = float(x)
    if x == 0:
        raise SingularPointError("d Im ln a+/dx is singular at x = 0")
    s = math.sin(abs(x) / 2.0)
    big_a = 1.0 - math.log(2.0 * s)
    theta = x - math.copysign(math.pi, x)
    num = (math.cos(x) - 1.0) * big_a - math.sin(x) * theta / 2.0
    den = 4.0 * s * s * (big_a ** 2 + (math.pi / 2.0 - abs(x) / 2.0) ** 2)
    return num / den
