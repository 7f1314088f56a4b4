"""Mean oscillation, total variation and BMO_log estimates over arc families.

Functions are callables of one real coordinate. For circle functions the
coordinate is vartheta = arg(-z), so arcs centred at z = -1 are symmetric
around 0 and the singular point sits at vartheta = 0 (mod 2 pi).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from ._circle import CircleFunction
from ._quad import composite_rule, gauss_legendre
from .errors import DomainError, PreconditionError

TWO_PI = 2.0 * math.pi
GRADE_FLOOR = 1e-12
MIN_ARC = 1e-10
PANELS_PER_ARC = 8
ORDER = 16
TOL = 1e-8


@dataclass(frozen=True)
class Arc:
    theta_left: float
    theta_right: float

    def __post_init__(self):
        if not self.theta_right > self.theta_left:
            raise DomainError("arc must have positive length")
        if self.length > TWO_PI * (1 + 1e-12):
            raise DomainError("arc longer than the circle")

    @property
    def length(self) -> float:
        return self.theta_right - self.theta_left

    @property
    def center(self) -> float:
        return 0.5 * (self.theta_left + self.theta_right)


def bmo_weight(length: float) -> float:
    """Adopted weight ln(4 pi / |I|)."""
    return math.log(4 * math.pi / length)


def raw_weight(length: float) -> float:
    """The printed weight 4 pi / log|I| with absolute value; infinite at |I| = 1."""
    lg = math.log(length)
    return math.inf if lg == 0 else abs(4 * math.pi / lg)


@dataclass
class OscillationReport:
    arc: Arc
    mean: complex
    mo: float
    variation: float | None = None
    weighted: float = 0.0
    raw_weighted: float = 0.0

    def to_dict(self) -> dict:
        return {"theta_left": self.arc.theta_left, "theta_right": self.arc.theta_right,
                "length": self.arc.length, "mean_re": self.mean.real, "mean_im": self.mean.imag,
                "mo": self.mo, "weight": bmo_weight(self.arc.length), "weighted": self.weighted,
                "raw_weighted": self.raw_weighted}


def _mesh(arc: Arc, anchors: Sequence[float], breakpoints: Sequence[float]) -> np.ndarray:
    a, b = arc.theta_left, arc.theta_right
    L = arc.length
    pts = {a, b}
    pts.update(p for p in breakpoints if a < p < b)
    for p in anchors:
        if not a <= p <= b:
            continue
        pts.add(p)
        d = L
        while d > GRADE_FLOOR * L:
            for x in (p - d, p + d):
                if a < x < b:
                    pts.add(x)
            d *= 0.5
    e = np.array(sorted(pts))
    out = [e[:1]]
    for lo, hi in zip(e[:-1], e[1:]):
        m = max(1, int(math.ceil((hi - lo) / (L / PANELS_PER_ARC))))
        out.append(np.linspace(lo, hi, m + 1)[1:])
    return np.concatenate(out)


def _eval(f: Callable, x: np.ndarray) -> np.ndarray:
    v = np.asarray(f(x))
    v = np.broadcast_to(v, x.shape)
    if not np.all(np.isfinite(v)):
        i = int(np.flatnonzero(~np.isfinite(v))[0])
        raise DomainError(f"non-integrable sample at x = {x[i]!r}", index=i)
    return v


def _crossings(f: Callable, x: np.ndarray, r: np.ndarray, level: float) -> list[float]:
    s = np.sign(r - level)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    out = []
    for i in idx:
        g = lambda t: float(np.real(f(np.array([t]))[0])) - level
        try:
            out.append(brentq(g, x[i], x[i + 1], xtol=1e-14 * (x[i + 1] - x[i]),
                              rtol=4 * np.finfo(float).eps, maxiter=200, disp=False))
        except ValueError:
            pass
    return out


def mean_oscillation(f: Callable, arc: Arc, singular_points: Sequence[float] = (),
                     breakpoints: Sequence[float] = ()) -> OscillationReport:
    """MO_I(f) = (1/|I|) int_I |f - f_I| with f_I the arc average.

    The mesh is graded toward ``singular_points`` inside the arc; for real f
    the crossings of f with its mean are added as panel breaks so that the
    kink of |f - f_I| does not spoil the Gauss-Legendre rule.
    """
    edges = _mesh(arc, singular_points, breakpoints)
    x, w = composite_rule(edges, ORDER)
    v = _eval(f, x)
    L = arc.length
    mean = complex(np.sum(w * v) / L)
    if np.isrealobj(v) or np.all(np.imag(v) == 0):
        level = mean.real
        cross = _crossings(f, x, np.real(v), level)
        if cross:
            edges = np.unique(np.concatenate([edges, cross]))
            x, w = composite_rule(edges, ORDER)
            v = _eval(f, x)
        mo = float(np.sum(w * np.abs(np.real(v) - level)) / L)
        mean = complex(level)
    else:
        mo = float(np.sum(w * np.abs(v - mean)) / L)
    return OscillationReport(arc, mean, mo, None, bmo_weight(L) * mo, raw_weight(L) * mo)


def total_variation(f: Callable, arc: Arc, breakpoints: Sequence[float] = (),
                    rtol: float = TOL, start: int = 1024, max_points: int = 2 ** 22) -> float:
    """Partition sum of |increments| on doubling uniform meshes; inf if it does not settle."""
    a, b = arc.theta_left, arc.theta_right
    extra = np.array([p for p in breakpoints if a < p < b], dtype=float)
    prev = None
    m = start
    while m <= max_points:
        x = np.union1d(np.linspace(a, b, m + 1), extra)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.asarray(f(x))
        if not np.all(np.isfinite(v)):
            return math.inf
        s = float(np.sum(np.abs(np.diff(v))))
        if prev is not None and abs(s - prev) <= rtol * max(s, 1e-300):
            return s
        if prev is not None and s == 0.0 and prev == 0.0:
            return 0.0
        prev = s
        m *= 2
    return math.inf


@dataclass
class VariationCheck:
    passed: bool
    mo: float
    variation: float
    margin: float
    vacuous: bool


def check_variation_bound(f: Callable, arc: Arc, breakpoints: Sequence[float] = (),
                          singular_points: Sequence[float] = ()) -> VariationCheck:
    """MO_I(f) <= V_I(f)/2 + 1e-8; vacuous pass when V_I is infinite."""
    mo = mean_oscillation(f, arc, singular_points, breakpoints).mo
    var = total_variation(f, arc, breakpoints)
    if math.isinf(var):
        return VariationCheck(True, mo, var, math.inf, True)
    margin = var / 2 - mo
    return VariationCheck(margin >= -TOL, mo, var, margin, False)


@dataclass
class DominationCheck:
    passed: bool
    precondition_ok: bool
    mo_f: float
    mo_g: float
    factor: float
    note: str = ""


def _is_monotone(v: np.ndarray) -> bool:
    d = np.diff(np.real(v))
    return bool(np.all(d >= -1e-14) or np.all(d <= 1e-14))


def check_domination(f: Callable, g: Callable, arc: Arc, monotone: bool = False,
                     breakpoints: Sequence[float] = (), derivatives: tuple | None = None,
                     mesh_size: int = 257) -> DominationCheck:
    """MO_I(f) <= 2 MO_I(g) when |f(x1) - f(x2)| <= |g(x1) - g(x2)| on the mesh.

    With ``monotone`` and both functions monotone the factor is 1. Passing
    ``derivatives = (f', g')`` checks the derivative form |f'| <= g' instead.
    """
    x = np.union1d(np.linspace(arc.theta_left, arc.theta_right, mesh_size),
                   [p for p in breakpoints if arc.theta_left < p < arc.theta_right])
    fv, gv = np.asarray(f(x)), np.asarray(g(x))
    if derivatives is not None:
        fp, gp = derivatives
        xm = 0.5 * (x[:-1] + x[1:])
        ok = bool(np.all(np.abs(fp(xm)) <= gp(xm) * (1 + 1e-12) + 1e-14))
        note = "derivative domination"
    else:
        df = np.abs(fv[:, None] - fv[None, :])
        dg = np.abs(gv[:, None] - gv[None, :])
        ok = bool(np.all(df <= dg * (1 + 1e-12) + 1e-12))
        note = "pairwise increment domination"
    mo_f = mean_oscillation(f, arc, breakpoints=breakpoints).mo
    mo_g = mean_oscillation(g, arc, breakpoints=breakpoints).mo
    factor = 1.0 if monotone and _is_monotone(fv) and _is_monotone(gv) else 2.0
    if not ok:
        return DominationCheck(False, False, mo_f, mo_g, factor, "precondition violated: " + note)
    return DominationCheck(mo_f <= factor * mo_g + TOL, True, mo_f, mo_g, factor, note)


# ---- arc families -------------------------------------------------------------

def dyadic_arcs(center: float, radius: float, depth: int) -> list[Arc]:
    """Per level s = radius 2^-k: centred, right half, left half, shifted and outer-quarter arcs."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    arcs = []
    for k in range(depth):
        s = radius * 2.0 ** -k
        for lo, hi in ((-s, s), (0.0, s), (-s, 0.0), (-s / 2, s), (s / 2, s)):
            if hi - lo >= MIN_ARC:
                arcs.append(Arc(center + lo, center + hi))
    return arcs


def random_arcs(count: int, seed: int, min_length: float = 1e-8) -> list[Arc]:
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-math.pi, math.pi, count)
    lengths = np.exp(rng.uniform(math.log(min_length), math.log(TWO_PI), count))
    return [Arc(c - l / 2, c + l / 2) for c, l in zip(centers, lengths)]


def arc_family(depth: int = 20, n_random: int = 200, seed: int = 0) -> list[Arc]:
    """Dyadic arcs centred at -1 (vartheta = 0) followed by random arcs."""
    return dyadic_arcs(0.0, math.pi, depth) + random_arcs(n_random, seed)


@dataclass
class BMOLogEstimate:
    sup: float
    argsup: Arc | None
    raw_sup: float
    reports: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta_left", "theta_right", "length", "mo", "weight", "weighted"])
        for r in self.reports:
            # vartheta coordinates shifted back to theta = vartheta + pi
            w.writerow([repr(r.arc.theta_left + math.pi), repr(r.arc.theta_right + math.pi),
                        repr(r.arc.length), repr(r.mo), repr(bmo_weight(r.arc.length)),
                        repr(r.weighted)])
        return buf.getvalue()


def _wrap(vt: np.ndarray) -> np.ndarray:
    return np.where(np.abs(vt) <= math.pi, vt, (vt + math.pi) % TWO_PI - math.pi)


def _singular_anchors(arc: Arc) -> list[float]:
    lo = math.ceil(arc.theta_left / TWO_PI)
    hi = math.floor(arc.theta_right / TWO_PI)
    return [TWO_PI * m for m in range(lo, hi + 1)]


def oscillation_reports(f: CircleFunction | Callable, arcs: Sequence[Arc]) -> list[OscillationReport]:
    if isinstance(f, CircleFunction):
        fv = lambda x: f.at_vartheta(_wrap(np.asarray(x, dtype=float)))
    else:
        fv = lambda x: f(_wrap(np.asarray(x, dtype=float)))
    out = []
    for arc in arcs:
        if arc.length < MIN_ARC:
            raise DomainError(f"degenerate arc of length {arc.length}")
        out.append(mean_oscillation(fv, arc, _singular_anchors(arc)))
    return out


def sup_of(reports: Sequence[OscillationReport]) -> BMOLogEstimate:
    best, arg = 0.0, None
    raw = 0.0
    for r in reports:
        if r.weighted > best or arg is None:
            best, arg = r.weighted, r.arc
        raw = max(raw, r.raw_weighted)
    return BMOLogEstimate(best, arg, raw, list(reports))


def bmo_log_norm(f: CircleFunction | Callable, arcs: Sequence[Arc]) -> BMOLogEstimate:
    """sup over the family of ln(4 pi/|I|) MO_I(f); arcs in vartheta coordinates."""
    if not arcs:
        raise ValueError("arc family is empty")
    return sup_of(oscillation_reports(f, arcs))


# ---- proposition checkers -----------------------------------------------------

@dataclass
class PropRow:
    arc: Arc
    mo: float
    bound: float
    passed: bool


@dataclass
class PropCheck:
    rows: list
    precondition_ok: bool
    notes: list
    constant: float

    @property
    def passed(self) -> bool:
        return self.precondition_ok and all(r.passed for r in self.rows)


def _derivative(f: Callable, derivative: Callable | None, x: np.ndarray) -> tuple[np.ndarray, float]:
    if derivative is not None:
        return np.abs(np.asarray(derivative(x), dtype=float)), 1e-12
    h = 1e-6 * np.abs(x)
    return np.abs((np.asarray(f(x + h)) - np.asarray(f(x - h))) / (2 * h)), 1e-6


def _probe_points(delta: float, decades: int = 12) -> np.ndarray:
    pos = np.logspace(math.log10(delta) - decades, math.log10(delta), 8 * decades + 1)
    return np.concatenate([-pos[::-1], pos])


def _check_arcs_inside(arcs, delta, notes) -> bool:
    ok = all(-delta * (1 + 1e-12) <= a.theta_left and a.theta_right <= delta * (1 + 1e-12) for a in arcs)
    if not ok:
        notes.append("an arc leaves [-delta, delta]")
    return ok


def check_prop_log(f: Callable, delta: float, arcs: Sequence[Arc], monotone: bool = False,
                   derivative: Callable | None = None, scale: float = 1.0,
                   probe_decades: int = 12) -> PropCheck:
    """MO_I(f) <= -c e^-1 scale / ln(|I|/2) with c = 8, or 4 for monotone f on (0, delta].

    Preconditions checked on a log-spaced probe mesh: f even and
    |f'(x)| <= -scale / (|x| ln|x|).
    """
    notes = []
    if delta > math.exp(-1) / 4:
        notes.append(f"delta = {delta:.4g} exceeds the hypothesis bound e^-1/4")
    x = _probe_points(delta, probe_decades)
    fx = np.asarray(f(x), dtype=float)
    ok = bool(np.allclose(fx, fx[::-1], rtol=1e-10, atol=1e-12))
    if not ok:
        notes.append("f is not even")
    dv, tol = _derivative(f, derivative, x)
    bound = -scale / (np.abs(x) * np.log(np.abs(x)))
    if not np.all(dv <= bound * (1 + tol)):
        ok = False
        notes.append("derivative bound violated")
    c = 8.0
    if monotone:
        if _is_monotone(fx[x > 0]):
            c = 4.0
        else:
            ok = False
            notes.append("monotone flag set but f is not monotone on (0, delta]")
    ok = _check_arcs_inside(arcs, delta, notes) and ok
    rows = []
    for arc in arcs:
        mo = mean_oscillation(f, arc, singular_points=(0.0,)).mo
        b = -c * scale * math.exp(-1) / math.log(arc.length / 2)
        rows.append(PropRow(arc, mo, b, mo <= b + TOL))
    return PropCheck(rows, ok, notes, c * scale)


def check_prop_loglog(f: Callable, delta: float, arcs: Sequence[Arc],
                      derivative: Callable | None = None, scale: float = 1.0,
                   probe_decades: int = 12) -> PropCheck:
    """MO_I(f) <= scale / ln(-ln(|I|/2)) for f continuous at 0 with |f'| <= scale |x|^-1 ln^-2|x|."""
    notes = []
    ok = True
    if delta > math.exp(-2) * (1 + 1e-12):
        ok = False
        notes.append("delta exceeds e^-2")
    x = _probe_points(delta, probe_decades)
    dv, tol = _derivative(f, derivative, x)
    bound = scale / (np.abs(x) * np.log(np.abs(x)) ** 2)
    if not np.all(dv <= bound * (1 + tol)):
        ok = False
        notes.append("derivative bound violated")
    eps = 10.0 ** -probe_decades * delta
    jump = abs(float(np.real(f(np.array([eps]))[0] - f(np.array([-eps]))[0])))
    if jump > 2 * scale / abs(math.log(eps)) + 1e-9:
        ok = False
        notes.append("f is not continuous at 0")
    ok = _check_arcs_inside(arcs, delta, notes) and ok
    rows = []
    for arc in arcs:
        mo = mean_oscillation(f, arc, singular_points=(0.0,)).mo
        b = scale / math.log(-math.log(arc.length / 2))
        rows.append(PropRow(arc, mo, b, mo <= b + TOL))
    return PropCheck(rows, ok, notes, scale)
