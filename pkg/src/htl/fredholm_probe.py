"""Finite-section evidence for the kernel, dense-range and proper-range theorems.

Finite sections cannot prove statements about the operator on H^1; every
report produced here is labelled as evidence, not proof.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import svd

from ._circle import CircleFunction
from .errors import PreconditionError, ResolutionError
from .hardy import FourierCoeffs, fourier_coeffs, riesz_P, sample_circle, toeplitz_truncation
from .symbol import A_MINUS, a_plus_vt

LABEL = "evidence, not proof"
PROXY = "l1 norm of coefficients (dominates the H1 norm)"
ZERO_SINGULAR = 1e-12
COANALYTIC_TOL = 1e-10


def _degree(c: FourierCoeffs) -> int:
    nz = np.flatnonzero(c.analytic())
    return int(nz[-1]) if nz.size else 0


def _require_analytic(c: FourierCoeffs, what: str) -> None:
    energy = float(np.sum(np.abs(c.coanalytic()) ** 2))
    if energy > COANALYTIC_TOL:
        raise PreconditionError(f"{what} has co-analytic energy {energy:.3g} > {COANALYTIC_TOL}")


def apply_toeplitz(a_coeffs: FourierCoeffs, f_coeffs: FourierCoeffs) -> FourierCoeffs:
    """P(a f) on indices 0..N_a for analytic f of degree at most N_a."""
    _require_analytic(f_coeffs, "f")
    N = a_coeffs.max_index
    d = _degree(f_coeffs)
    if d > N:
        raise ResolutionError(f"f has degree {d}; need symbol coefficients up to N >= {d}")
    full = np.convolve(a_coeffs.coeffs, f_coeffs.analytic()[: d + 1])
    return FourierCoeffs.from_analytic(full[N: 2 * N + 1], N)


def _poly_on_circle(c: np.ndarray, vt: np.ndarray) -> np.ndarray:
    z = -np.exp(1j * vt)
    return np.polyval(c[::-1], z)


def preimage_smooth(g_target: FourierCoeffs, bounded: bool = True, n_grid: int = 2 ** 14,
                    window: float = 1e-5) -> FourierCoeffs:
    """eta = P(a^- g) / a^+ on the grid, re-projected onto indices 0..n_grid/2 - 1.

    Then T_a eta = P(P(a^- g)/a^-) = g because Q(a^- g)/a^- has only
    negative indices.
    """
    if not bounded:
        raise PreconditionError("the preimage formula needs a bounded target")
    _require_analytic(g_target, "target")
    N = n_grid // 2 - 1
    d = _degree(g_target)
    g = g_target.analytic()[: d + 1]
    if not np.any(g):
        return FourierCoeffs(np.zeros(2 * N + 1, dtype=complex))
    am = fourier_coeffs(sample_circle(A_MINUS, n_grid, window), d)
    # P(a^- g)_m = sum_k a^-_{-k} g_{m+k}
    am_neg = np.array([am[-k] for k in range(d + 1)])
    p = np.array([np.sum(am_neg[: d + 1 - m] * g[m:]) for m in range(d + 1)])
    eta_fn = CircleFunction(lambda vt: _poly_on_circle(p, vt) / a_plus_vt(vt), name="eta")
    return riesz_P(fourier_coeffs(sample_circle(eta_fn, n_grid, window), N))


@dataclass
class RoundTrip:
    full: float  # l2 over all output indices 0..N_a
    target_band: float  # l2 over indices 0..deg g


def roundtrip_residual(a_coeffs: FourierCoeffs, eta: FourierCoeffs, g: FourierCoeffs) -> RoundTrip:
    out = apply_toeplitz(a_coeffs, eta).analytic()
    ref = np.zeros_like(out)
    gd = g.analytic()[: len(out)]
    ref[: len(gd)] = gd
    r = out - ref
    d = _degree(g)
    return RoundTrip(float(np.linalg.norm(r)), float(np.linalg.norm(r[: d + 1])))


@dataclass
class ProbeReport:
    orders: list
    sigma_min: list
    residual: list
    coeff_l1: list
    flags: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def growth_ratios(self) -> list:
        v = self.coeff_l1
        return [v[i + 1] / v[i] if v[i] > 0 else float("nan") for i in range(len(v) - 1)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "sigma_min", "residual", "coeff_l1"])
        for row in zip(self.orders, self.sigma_min, self.residual, self.coeff_l1):
            w.writerow([row[0]] + [repr(float(x)) for x in row[1:]])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"orders": list(self.orders), "sigma_min": [float(x) for x in self.sigma_min],
                "residual": [float(x) for x in self.residual],
                "coeff_l1": [float(x) for x in self.coeff_l1],
                "growth_ratios": [float(x) for x in self.growth_ratios()],
                "flags": list(self.flags), "label": LABEL, "proxy": PROXY,
                "metadata": self.metadata}


class SectionSolver:
    """One SVD per order, reused for sigma_min and every least-squares right-hand side."""

    def __init__(self, a_coeffs: FourierCoeffs):
        self.a = a_coeffs
        self._cache = {}

    def factor(self, n: int):
        if n not in self._cache:
            T = toeplitz_truncation(self.a, n).entries
            try:
                U, s, Vh = svd(T, lapack_driver="gesdd")
            except np.linalg.LinAlgError:
                U, s, Vh = svd(T, lapack_driver="gesvd")
            self._cache[n] = (T, U, s, Vh)
        return self._cache[n]

    def sigma_min(self, n: int) -> float:
        return float(self.factor(n)[2][-1])

    def lstsq(self, n: int, b: np.ndarray) -> tuple[np.ndarray, float, bool]:
        T, U, s, Vh = self.factor(n)
        keep = s > ZERO_SINGULAR
        coef = (U[:, keep].conj().T @ b) / s[keep]
        x = Vh[keep].conj().T @ coef
        return x, float(np.linalg.norm(T @ x - b)), bool(not keep.all())


def _check_orders(orders) -> list:
    orders = [int(n) for n in orders]
    if not orders or any(n < 1 for n in orders):
        raise ValueError("orders must be positive")
    if any(b <= a for a, b in zip(orders, orders[1:])):
        raise ValueError("orders must be strictly increasing")
    return orders


def kernel_probe(a_coeffs: FourierCoeffs, orders, solver: SectionSolver | None = None) -> ProbeReport:
    orders = _check_orders(orders)
    if a_coeffs.max_index < orders[-1] - 1:
        raise ResolutionError(f"order {orders[-1]} exceeds the symbol bandwidth")
    solver = solver or SectionSolver(a_coeffs)
    sig = [solver.sigma_min(n) for n in orders]
    flags = []
    if len(orders) < 2:
        flags.append("insufficient data for a trend")
    if any(s <= ZERO_SINGULAR for s in sig):
        flags.append("finite-section kernel detected")
    return ProbeReport(orders, sig, [0.0] * len(orders), [0.0] * len(orders), flags,
                       {"label": LABEL, "zero_singular": ZERO_SINGULAR})


def surjectivity_probe(a_coeffs: FourierCoeffs, g_coeffs: FourierCoeffs, orders,
                       solver: SectionSolver | None = None) -> ProbeReport:
    """Least-squares solutions of T_n f = g_n and their l1 norms across orders."""
    orders = _check_orders(orders)
    if 2 * orders[-1] > a_coeffs.max_index + 1:
        raise ResolutionError(f"max order {orders[-1]} exceeds half the symbol bandwidth")
    if g_coeffs.max_index < orders[-1] - 1:
        raise ResolutionError("target has too few coefficients")
    solver = solver or SectionSolver(a_coeffs)
    g = g_coeffs.analytic()
    if np.all(np.isreal(solver.factor(orders[0])[0])):
        g = g.real if np.max(np.abs(g.imag)) < 1e-13 else g
    sig, res, l1 = [], [], []
    flags = []
    for n in orders:
        x, r, deficient = solver.lstsq(n, g[:n])
        sig.append(solver.sigma_min(n))
        res.append(r)
        l1.append(float(np.sum(np.abs(x))))
        if deficient:
            flags.append(f"rank-deficient section at n = {n}; pseudo-inverse used")
    if len(orders) < 2:
        flags.append("insufficient data for a trend")
    return ProbeReport(orders, sig, res, l1, flags, {"label": LABEL, "proxy": PROXY,
                                                      "zero_singular": ZERO_SINGULAR})


def strictly_increasing(v) -> bool:
    return all(b > a for a, b in zip(v, v[1:]))


def strictly_decreasing(v) -> bool:
    return all(b < a for a, b in zip(v, v[1:]))


def control_target(a_coeffs: FourierCoeffs) -> FourierCoeffs:
    """In-range control T_a(z^2)."""
    return apply_toeplitz(a_coeffs, FourierCoeffs.monomial(2, 2))
