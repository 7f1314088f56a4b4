"""Quadrature for the real-line singular integrals attached to the symbol.

All integrals over t in [-1, 0] are written in u = 1 + t and evaluated by
composite Gauss-Legendre on a mesh graded geometrically toward u = 0, where
the integrands carry logarithmic factors (1 - ln u)^-k.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._circle import CircleFunction
from ._quad import composite_rule, geometric_edges, merge_edges
from .errors import DomainError, PreconditionError, ResolutionError
from .hardy import GridFunction, sample_circle
from .symbol import (DELTA0, a_minus_vt, deriv_im_log_a_plus, deriv_log_a_plus,
                     one_plus_z_vt, symbol_vt)

MESH_FLOOR = 1e-14
GL_ORDER = 20
BREAK_U = math.exp(-3.0)  # t = e^-3 - 1
_CHUNK = 1024


def _u_edges(floor: float = MESH_FLOOR, extra=()) -> np.ndarray:
    e = merge_edges(geometric_edges(1.0, floor), [BREAK_U], list(extra))
    return e[(e > 0) & (e <= 1.0)]


def _extra_edges(z: complex) -> list[float]:
    """Panel breaks near the point of [0, 1] closest to 1 + z."""
    w = z + 1.0
    out = []
    if 0 < abs(w) < 1:
        out.append(abs(w))
    if 0 < w.real < 1 and abs(w.imag) < 0.25:
        d = max(abs(w.imag), 1e-15)
        while d < 1:
            for p in (w.real - d, w.real + d):
                if 0 < p < 1:
                    out.append(p)
            d *= 2.0
    return out


def _check_cut(z: np.ndarray, allow_minus_one: bool = False) -> None:
    on = (z.imag == 0) & (z.real >= -1) & (z.real <= 0)
    if allow_minus_one:
        on &= z != -1
    bad = np.flatnonzero(on)
    if bad.size:
        raise DomainError(f"z = {z[bad[0]]} lies on the cut [-1, 0]", index=int(bad[0]))


def _vector_sum(z: np.ndarray, t: np.ndarray, wf: np.ndarray) -> np.ndarray:
    """sum_q wf_q / (t_q - z) for each z, chunked."""
    out = np.empty(z.shape, dtype=complex)
    flat = z.ravel()
    res = out.ravel()
    for s in range(0, flat.size, _CHUNK):
        res[s: s + _CHUNK] = (1.0 / (t[None, :] - flat[s: s + _CHUNK, None])) @ wf
    return res.reshape(z.shape)


def _rule(z_scalar: complex | None, floor: float):
    extra = _extra_edges(z_scalar) if z_scalar is not None else []
    edges = _u_edges(floor, extra)
    u, w = composite_rule(edges, GL_ORDER)
    return edges, u, w


def q_tilde_a(z, floor: float = MESH_FLOOR):
    """int_{-1}^0 dt / ((t - z)(1 - ln(1 + t))) for z off [-1, 0]."""
    za = np.asarray(z, dtype=complex)
    _check_cut(np.atleast_1d(za))
    if za.ndim == 0:
        _, u, w = _rule(complex(za), floor)
        return complex(np.sum(w / ((u - 1.0 - complex(za)) * (1.0 - np.log(u)))))
    _, u, w = _rule(None, floor)
    return _vector_sum(za, u - 1.0, w / (1.0 - np.log(u)))


def _dq_parts(z: complex, floor: float, split: float | None):
    """Integral part of the derivative split at u = split and u = e^-3 (I1, I2, I3)."""
    extra = _extra_edges(z) + ([split] if split else [])
    edges = _u_edges(floor, extra)
    eps = edges[0]
    tail = 1.0 / ((-1.0 - z) * (1.0 - math.log(eps)))
    bounds = [0.0, split if split else BREAK_U, BREAK_U, 1.0]
    parts = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        e = edges[(edges >= max(lo, eps)) & (edges <= hi)]
        if len(e) < 2:
            parts.append(0j)
            continue
        u, w = composite_rule(e, GL_ORDER)
        parts.append(complex(np.sum(w / ((u - 1.0 - z) * u * (1.0 - np.log(u)) ** 2))))
    parts[0] += tail
    return parts


def dq_tilde_a(z, floor: float = MESH_FLOOR):
    """Derivative of q_tilde_a via 1/z + int dt / ((t - z)(1 + t)(1 - ln(1 + t))^2)."""
    za = np.asarray(z, dtype=complex)
    _check_cut(np.atleast_1d(za))
    if np.any(za == 0):
        raise DomainError("z = 0 is excluded")
    if za.ndim == 0:
        zc = complex(za)
        return 1.0 / zc + sum(_dq_parts(zc, floor, None))
    edges, u, w = _rule(None, floor)
    tail = 1.0 / ((-1.0 - za) * (1.0 - math.log(edges[0])))
    return 1.0 / za + _vector_sum(za, u - 1.0, w / (u * (1.0 - np.log(u)) ** 2)) + tail


def dq_parts(z: complex, theta: float, floor: float = MESH_FLOOR) -> tuple[complex, complex, complex]:
    """The pieces I1, I2, I3 of the derivative integral split at t = theta - 1 and t = e^-3 - 1."""
    if not 0 < theta < BREAK_U:
        raise PreconditionError("split point must lie in (0, e^-3)")
    return tuple(_dq_parts(complex(z), floor, theta))


# ---- symbol coefficient a_0 and Qa on the circle ------------------------------

def symbol_mean(floor: float = 1e-14) -> float:
    """a_0 = (1/2pi) int a d theta by graded quadrature in vartheta (Re a is even)."""
    edges = geometric_edges(math.pi, floor)
    x, w = composite_rule(edges, GL_ORDER)
    return float((np.sum(w * symbol_vt(x).real) + edges[0]) / math.pi)


_A0 = None


def _a0() -> float:
    global _A0
    if _A0 is None:
        _A0 = symbol_mean()
    return _A0


def qa_vt(vt, a0: float | None = None) -> np.ndarray:
    """Qa = a - a_0 - q_tilde_a(1/z) at z = -exp(i vt)."""
    vt = np.asarray(vt, dtype=float)
    a0 = _a0() if a0 is None else a0
    zinv = -np.exp(-1j * vt)
    return symbol_vt(vt) - a0 - q_tilde_a(zinv.reshape(-1)).reshape(vt.shape)


QA = CircleFunction(qa_vt, name="Qa")
RE_QA = CircleFunction(lambda vt: qa_vt(vt).real, name="Re Qa")
IM_QA = CircleFunction(lambda vt: qa_vt(vt).imag, name="Im Qa")


def qa_on_circle(n: int, window: float = 1e-3) -> GridFunction:
    """Qa sampled on the uniform grid of size n, flagged within ``window`` of -1."""
    return sample_circle(QA, n, window)


# ---- G and the tail model -----------------------------------------------------

def _ug(u: np.ndarray) -> np.ndarray:
    """(1 + t) g(t) = 1 / (L (ln L + 2)^2) with L = 1 - ln(1 + t)."""
    big_l = 1.0 - np.log(u)
    return 1.0 / (big_l * (np.log(big_l) + 2.0) ** 2)


def g_integral(floor: float = MESH_FLOOR) -> float:
    """G(-1) = int_{-1}^0 g(t) dt, with the exact contribution of u < floor."""
    edges = _u_edges(floor)
    u, w = composite_rule(edges, GL_ORDER)
    eps = edges[0]
    return float(np.sum(w * _ug(u) / u) + 1.0 / (math.log(1.0 - math.log(eps)) + 2.0))


def big_g(z, floor: float = MESH_FLOOR):
    """G(z) = int_{-1}^0 (1 + t) g(t) / (t - z) dt; z = -1 returns the limit G(-1)."""
    za = np.asarray(z, dtype=complex)
    if za.ndim == 0:
        zc = complex(za)
        if zc == -1:
            return complex(g_integral(floor))
        _check_cut(np.atleast_1d(za))
        _, u, w = _rule(zc, floor)
        return complex(np.sum(w * _ug(u) / (u - 1.0 - zc)))
    _check_cut(np.atleast_1d(za), allow_minus_one=True)
    _, u, w = _rule(None, floor)
    out = _vector_sum(za, u - 1.0, w * _ug(u))
    out[za == -1] = g_integral(floor)
    return out


@dataclass(frozen=True)
class TailModel:
    h_minus_one: complex | None = None  # None means G(-1)
    window: float = 0.0

    def coefficient(self) -> complex:
        return complex(g_integral()) if self.h_minus_one is None else complex(self.h_minus_one)


@dataclass(frozen=True)
class TailValue:
    vartheta: float
    h: complex
    model: complex
    residual: float  # |G(z) - G(-1) + 1/(ln(1 - ln|vt|) + 2)|
    scaled_residual: float  # residual * |ln vt| * (ln|ln vt|)^2


def _loglog_model(vt: np.ndarray) -> np.ndarray:
    return 1.0 / (np.log(1.0 - np.log(np.abs(vt))) + 2.0)


def tail_model_h(vt: float, model: TailModel = TailModel()) -> TailValue:
    vt = float(vt)
    if not 0 < abs(vt) <= DELTA0:
        raise PreconditionError(f"tail model needs 0 < |vartheta| <= e^-3, got {vt}")
    z = -complex(math.cos(vt), math.sin(vt))
    gz = big_g(z)
    h1 = model.coefficient()
    den = complex(one_plus_z_vt(vt) * a_minus_vt(vt))
    f = float(_loglog_model(np.array(vt)))
    residual = abs(gz - g_integral() + f)
    lg = abs(math.log(abs(vt)))
    return TailValue(vt, (h1 - gz) / den, f / den, residual, residual * lg * math.log(lg) ** 2)


def tail_function(model: TailModel = TailModel(), support: float = DELTA0) -> CircleFunction:
    """The tail h on |vartheta| <= support, extended by 0."""
    h1 = model.coefficient()

    def f(vt):
        vt = np.asarray(vt, dtype=float)
        out = np.zeros(vt.shape, dtype=complex)
        inside = (np.abs(vt) <= support) & (vt != 0)
        v = vt[inside]
        z = -np.exp(1j * v)
        out[inside] = (h1 - big_g(z)) / (one_plus_z_vt(v) * a_minus_vt(v))
        return out

    return CircleFunction(f, name="tail h")


# ---- asymptotic checks --------------------------------------------------------

@dataclass
class AsymptoticCheck:
    name: str
    theta_grid: np.ndarray
    lhs: np.ndarray
    model: np.ndarray
    ratio: np.ndarray
    rho: float
    passed: bool
    note: str = ""
    constants: dict = field(default_factory=dict)

    @property
    def ratio_min(self) -> float:
        return float(np.min(self.ratio))

    @property
    def ratio_max(self) -> float:
        return float(np.max(self.ratio))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "abs_lhs", "abs_model", "ratio"])
        for t, l, m, r in zip(self.theta_grid, self.lhs, self.model, self.ratio):
            w.writerow([repr(float(t)), repr(float(abs(l))), repr(float(abs(m))), repr(float(r))])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"name": self.name, "passed": self.passed, "rho": self.rho,
                "ratio_min": self.ratio_min, "ratio_max": self.ratio_max,
                "theta_min": float(self.theta_grid[0]), "theta_max": float(self.theta_grid[-1]),
                "note": self.note, "constants": self.constants}


MIN_DECADES = 3.0
POINTS_PER_DECADE = 4
HEADROOM = 1.5


def log_grid(theta_range: tuple[float, float], per_decade: int = POINTS_PER_DECADE) -> np.ndarray:
    lo, hi = sorted(float(t) for t in theta_range)
    if lo <= 0 or hi > DELTA0 * (1 + 1e-12):
        raise PreconditionError("theta range must lie in (0, e^-3]")
    decades = math.log10(hi / lo)
    if decades < MIN_DECADES - 1e-9:
        raise ResolutionError(f"need at least {MIN_DECADES:g} decades, got {decades:.2f}")
    return np.logspace(math.log10(lo), math.log10(hi), int(round(decades * per_decade)) + 1)


def _circle_point(theta: float) -> complex:
    return -complex(math.cos(theta), math.sin(theta))


def _eval_check(name: str, th: float) -> tuple[complex, complex]:
    lg = math.log(th)
    inv_th_l2 = 1.0 / (th * lg * lg)
    if name == "d-lna":
        return deriv_log_a_plus(th), 1.0 / (th * lg)
    if name == "d-ilna":
        return deriv_im_log_a_plus(th), (math.pi / 2) * inv_th_l2
    if name == "d-lnaa":
        return deriv_log_a_plus(th).real, 1.0 / (th * lg)
    z = _circle_point(th)
    opz = complex(one_plus_z_vt(th))
    lnopz = complex(np.log(opz))
    if name == "I1":
        return dq_parts(z, th)[0], 1.0 / (opz * lnopz)
    if name == "i2":
        return dq_parts(z, th)[1], 1.0 / (opz * lnopz ** 2)
    dq = dq_tilde_a(z)
    if name == "ddq":
        return dq + 1.0 / (opz * (1.0 - lg)), inv_th_l2
    dtheta = 1j * z * dq  # d/d theta along z = -exp(i theta)
    if name == "dreq":
        # sign-consistent form; see dreq-as-printed
        return dtheta.real - 1.0 / (th * lg), inv_th_l2
    if name == "dreq-as-printed":
        return dtheta.real + 1.0 / (th * lg), inv_th_l2
    if name == "diq":
        return dtheta.imag, inv_th_l2
    raise ValueError(f"unknown asymptotic check {name!r}")


CHECK_NAMES = ("d-lna", "d-ilna", "I1", "i2", "ddq", "dreq", "diq")
EXTRA_CHECK_NAMES = ("d-lnaa", "dreq-as-printed")


def asym_check(name: str, theta_range: tuple[float, float] = (1e-6, 1e-3),
               rho: float = 4.0) -> AsymptoticCheck:
    """Ratio of an estimated quantity to its model over a log-spaced theta grid.

    Passes when every ratio lies in [1/rho, rho] and the spread
    max ln(ratio) - min ln(ratio) stays below ln(rho). The check ``diq``
    uses |ratio| and also asserts 0 >= lhs >= -M * model with M calibrated
    on the largest-theta decade (max |ratio| times 1.5), then verified on all
    points.
    """
    if rho < 1:
        raise ValueError("rho must be >= 1")
    grid = log_grid(theta_range)
    lhs = np.empty(grid.size, dtype=complex)
    model = np.empty(grid.size, dtype=complex)
    for i, th in enumerate(grid):
        lhs[i], model[i] = _eval_check(name, float(th))
    signed = name in ("d-ilna", "d-lnaa")
    if signed:
        ratio = (lhs / model).real
    else:
        ratio = np.abs(lhs) / np.abs(model)
    with np.errstate(divide="ignore", invalid="ignore"):
        logr = np.log(ratio)
    passed = bool(np.all(np.isfinite(logr)) and np.all(ratio >= 1 / rho) and np.all(ratio <= rho)
                  and (logr.max() - logr.min()) < math.log(rho))
    note = ""
    constants = {}
    if name == "diq":
        top = grid >= grid[-1] / 10.0
        big_m = HEADROOM * float(np.max(np.abs(lhs[top].real / model[top].real)))
        constants["M"] = big_m
        sign_ok = bool(np.all(lhs.real <= 0) and np.all(lhs.real >= -big_m * model.real))
        passed = passed and sign_ok
        note = "sign condition " + ("holds" if sign_ok else "fails")
    elif name == "dreq":
        note = "lhs = d/dtheta Re q_tilde_a - 1/(theta ln theta); the printed + sign diverges"
    elif name == "dreq-as-printed":
        note = "lhs as printed; informational"
    return AsymptoticCheck(name, grid, lhs, model, ratio, rho, passed, note, constants)


def calibrate_constant(values: np.ndarray, bounds: np.ndarray, headroom: float = HEADROOM) -> float:
    """Smallest C with |values| <= C * bounds, times the headroom factor."""
    return headroom * float(np.max(np.abs(values) / np.abs(bounds)))
