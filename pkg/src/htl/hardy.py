"""Discrete Hardy-space machinery on the unit circle.

Samples sit at theta_k = -pi + 2*pi*k/n, so sample 0 is the point z = -1 where
the symbol family is singular. Samples closer to -1 than the exclusion window
are flagged and never enter a quadrature sum.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import erfc

from ._circle import CircleFunction, as_circle_function, vartheta_to_theta
from ._quad import composite_rule
from .errors import (DegenerateSymbolError, DomainError, ResolutionError,
                     SampleEvaluationError)

# partition-of-unity blend used by the graded transform
BLEND_BINS = 32
BLEND_SHARPNESS = 6.0
ZONE_FLOOR = 1e-14
ZONE_ORDER = 20
WINDING_MIN_SAMPLES = 2 ** 12
WINDING_JUMP = np.pi / 2
DEGENERATE_MODULUS = 1e-6


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def grid_vartheta(n: int) -> np.ndarray:
    """vartheta = arg(-z) at the grid nodes, computed exactly from the index."""
    h = 2 * np.pi / n
    k = np.arange(n)
    return np.where(k <= n // 2, h * k, h * (k - n))


@dataclass(frozen=True)
class GridFunction:
    values: np.ndarray
    window: float = 0.0
    source: CircleFunction | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.values)
        if n < 16 or not _is_pow2(n):
            raise ValueError(f"n_samples must be a power of two >= 16, got {n}")
        if self.window < 0:
            raise ValueError("exclusion window must be >= 0")

    @property
    def n_samples(self) -> int:
        return len(self.values)

    @property
    def vartheta(self) -> np.ndarray:
        return grid_vartheta(self.n_samples)

    @property
    def theta(self) -> np.ndarray:
        return -np.pi + 2 * np.pi * np.arange(self.n_samples) / self.n_samples

    @property
    def flagged(self) -> np.ndarray:
        return np.abs(self.vartheta) < self.window

    @property
    def valid_values(self) -> np.ndarray:
        return self.values[~self.flagged]


def sample_circle(f, n: int, window: float = 0.0) -> GridFunction:
    """Sample a circle function on the uniform grid of size ``n``."""
    if n < 16 or not _is_pow2(n):
        raise ValueError(f"n must be a power of two >= 16, got {n}")
    if window < 0:
        raise ValueError("window must be >= 0")
    cf = as_circle_function(f)
    vt = grid_vartheta(n)
    keep = np.flatnonzero(np.abs(vt) >= window)
    values = np.full(n, np.nan, dtype=complex)
    try:
        vals = np.broadcast_to(cf.at_vartheta(vt[keep]), keep.shape)
    except DomainError as exc:
        local = exc.index if exc.index is not None else 0
        k = int(keep[local])
        raise SampleEvaluationError(f"sample {k}: {exc}", index=k,
                                    theta=float(vartheta_to_theta(vt[k]))) from exc
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        k = int(keep[bad[0]])
        raise SampleEvaluationError(f"non-finite value at sample {k}", index=k,
                                    theta=float(vartheta_to_theta(vt[k])))
    values[keep] = vals
    return GridFunction(values, float(window), cf)


@dataclass(frozen=True)
class FourierCoeffs:
    """Coefficients c_{-N}..c_N stored in index order."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise ValueError("coefficient vector must have odd length 2N+1")
        object.__setattr__(self, "coeffs", c)

    @property
    def max_index(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def indices(self) -> np.ndarray:
        N = self.max_index
        return np.arange(-N, N + 1)

    def __getitem__(self, k: int) -> complex:
        N = self.max_index
        if abs(k) > N:
            return 0j
        return complex(self.coeffs[k + N])

    def analytic(self) -> np.ndarray:
        """c_0..c_N."""
        return self.coeffs[self.max_index:].copy()

    def coanalytic(self) -> np.ndarray:
        """c_{-N}..c_{-1}."""
        return self.coeffs[: self.max_index].copy()

    def resize(self, N: int) -> "FourierCoeffs":
        M = self.max_index
        if N <= M:
            return FourierCoeffs(self.coeffs[M - N: M + N + 1])
        out = np.zeros(2 * N + 1, dtype=complex)
        out[N - M: N + M + 1] = self.coeffs
        return FourierCoeffs(out)

    def evaluate(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, self.indices())) @ self.coeffs

    @classmethod
    def from_analytic(cls, c, N: int | None = None) -> "FourierCoeffs":
        c = np.asarray(c, dtype=complex)
        N = len(c) - 1 if N is None else N
        if len(c) > N + 1:
            raise ValueError("N too small for the given coefficients")
        out = np.zeros(2 * N + 1, dtype=complex)
        out[N: N + len(c)] = c
        return cls(out)

    @classmethod
    def monomial(cls, k: int, N: int, value: complex = 1.0) -> "FourierCoeffs":
        out = np.zeros(2 * N + 1, dtype=complex)
        out[k + N] = value
        return cls(out)

    def to_json(self) -> str:
        return json.dumps({"max_index": self.max_index,
                           "coefficients": [[float(c.real), float(c.imag)] for c in self.coeffs]})

    @classmethod
    def from_json(cls, text: str) -> "FourierCoeffs":
        data = json.loads(text)
        c = np.array([complex(re, im) for re, im in data["coefficients"]])
        if len(c) != 2 * data["max_index"] + 1:
            raise ValueError("coefficient count does not match max_index")
        return cls(c)


def _blend(dist, r0: float, width: float):
    """1 inside r0, 0 beyond r0 + width, smooth erfc ramp in between."""
    x = (dist - r0) / width
    ramp = 0.5 * erfc(BLEND_SHARPNESS * (2.0 * x - 1.0))
    return np.where(dist <= r0, 1.0, np.where(dist >= r0 + width, 0.0, ramp))


def _zone_edges(radius: float, h: float, tail: bool) -> np.ndarray:
    edges = [radius]
    u = radius
    while u > radius * ZONE_FLOOR:
        u = max(u / 2.0, u - h)
        edges.append(u)
    if not tail:
        edges.append(0.0)
    return np.array(edges[::-1])


def _zone_sum(k: np.ndarray, u: np.ndarray, fr: np.ndarray, fl: np.ndarray,
              block: int = 128) -> np.ndarray:
    """sum_q exp(i k u_q) fr_q + exp(-i k u_q) fl_q for consecutive integers k."""
    out = np.empty(len(k), dtype=complex)
    base = np.exp(1j * np.outer(np.arange(block), u))
    for s in range(0, len(k), block):
        kb = k[s: s + block]
        e = base[: len(kb)] * np.exp(1j * kb[0] * u)
        out[s: s + len(kb)] = e @ fr + e.conj() @ fl
    return out


def fourier_coeffs(g: GridFunction, N: int) -> FourierCoeffs:
    """Coefficients c_k = (1/2pi) int f exp(-ik theta) d theta for |k| <= N.

    Without flagged samples this is the plain FFT. Otherwise the function is
    split by a smooth partition of unity around -1: the far part is transformed
    by FFT on the uniform grid, the part near -1 by composite Gauss-Legendre on
    a mesh graded toward -1 that reads the source function directly.
    """
    n = g.n_samples
    if 2 * N >= n:
        raise ResolutionError(f"need 2N < n_samples (N = {N}, n = {n})")
    k = np.arange(-N, N + 1)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    flagged = g.flagged
    if not flagged.any():
        c = np.fft.fft(g.values) / n
        return FourierCoeffs(c[k % n] * sign)
    if g.source is None:
        raise ValueError("flagged samples need the source function for the graded fill")
    h = 2 * np.pi / n
    width = min(BLEND_BINS, n // 8) * h
    r0 = g.window
    if r0 + width >= np.pi:
        raise ResolutionError("exclusion window too large for the graded fill")
    vt = g.vartheta
    far = np.where(flagged, 0.0, g.values * (1.0 - _blend(np.abs(vt), r0, width)))
    c = np.fft.fft(far) / n
    c_far = c[k % n] * sign

    f = g.source
    edges = _zone_edges(r0 + width, h, tail=f.tail is not None)
    u, w = composite_rule(edges, ZONE_ORDER)
    wb = w * _blend(u, r0, width)
    fr = f.at_vartheta(-u) * wb  # theta = pi - u
    fl = f.at_vartheta(u) * wb   # theta = -pi + u
    zone = _zone_sum(k, u, fr, fl)
    if f.tail is not None:
        zone = zone + f.tail(edges[0])
    return FourierCoeffs(c_far + sign * zone / (2 * np.pi))


def riesz_P(c: FourierCoeffs) -> FourierCoeffs:
    out = c.coeffs.copy()
    out[: c.max_index] = 0
    return FourierCoeffs(out)


def riesz_Q(c: FourierCoeffs) -> FourierCoeffs:
    out = c.coeffs.copy()
    out[c.max_index:] = 0
    return FourierCoeffs(out)


@dataclass(frozen=True)
class ToeplitzTruncation:
    order: int
    entries: np.ndarray

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, atol=tol, rtol=0))


def toeplitz_truncation(c: FourierCoeffs, n: int) -> ToeplitzTruncation:
    """Finite section with entry (j, k) = c_{j-k}, 0 <= j, k < n."""
    if n < 1:
        raise ValueError("order must be positive")
    N = c.max_index
    if N < n - 1:
        raise ResolutionError(f"order {n} needs max_index >= {n - 1}, have {N}")
    col = c.coeffs[N: N + n]
    row = c.coeffs[N - n + 1: N + 1][::-1]
    entries = toeplitz(col, row)
    if not np.iscomplexobj(c.coeffs) or np.all(entries.imag == 0):
        entries = entries.real
    return ToeplitzTruncation(n, entries)


def winding_number(g: GridFunction) -> int:
    """Winding number about 0 of the sampled closed curve, bridging the flagged gap."""
    if g.n_samples < WINDING_MIN_SAMPLES:
        raise ResolutionError(f"winding number needs n >= {WINDING_MIN_SAMPLES}")
    vals = g.values[~g.flagged]
    if vals.size < 2:
        raise ResolutionError("too few unflagged samples")
    if np.min(np.abs(vals)) < DEGENERATE_MODULUS:
        raise DegenerateSymbolError("symbol sample within 1e-6 of zero")
    # cyclic order; the step from the last to the first sample bridges the gap
    steps = np.angle(np.roll(vals, -1) / vals)
    if np.max(np.abs(steps)) > WINDING_JUMP:
        raise ResolutionError("argument jump above pi/2 between samples; refine the grid")
    return int(np.rint(np.sum(steps) / (2 * np.pi)))


def h1_surrogate(g: GridFunction) -> float:
    """Boundary L1 mean (1/n) sum |f| over unflagged samples."""
    return float(np.sum(np.abs(g.valid_values)) / g.n_samples)
