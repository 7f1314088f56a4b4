import numpy as np
import pytest

from htl.errors import PreconditionError, ResolutionError
from htl.fredholm_probe import (LABEL, SectionSolver, apply_toeplitz, control_target,
                                kernel_probe, preimage_smooth, roundtrip_residual,
                                strictly_decreasing, strictly_increasing, surjectivity_probe)
from htl.hardy import FourierCoeffs, fourier_coeffs, sample_circle, toeplitz_truncation
from htl.symbol import SYMBOL

GRID = 2 ** 14


@pytest.fixture(scope="module")
def a_coeffs():
    return fourier_coeffs(sample_circle(SYMBOL, GRID, 1e-5), GRID // 2 - 1)


def test_identity_symbol_returns_f():
    one = FourierCoeffs.monomial(0, 8)
    f = FourierCoeffs.from_analytic([1, 2 - 1j, 3], 8)
    assert np.allclose(apply_toeplitz(one, f).analytic()[:3], [1, 2 - 1j, 3])
    assert not np.any(apply_toeplitz(one, f).analytic()[3:])


def test_shift_symbol():
    z = FourierCoeffs.monomial(1, 4)
    out = apply_toeplitz(z, FourierCoeffs.monomial(0, 0)).analytic()
    assert np.allclose(out, [0, 1, 0, 0, 0])


def test_apply_toeplitz_errors():
    one = FourierCoeffs.monomial(0, 2)
    with pytest.raises(ResolutionError):
        apply_toeplitz(one, FourierCoeffs.monomial(5, 5))
    with pytest.raises(PreconditionError):
        apply_toeplitz(one, FourierCoeffs.monomial(-1, 1))


def test_apply_toeplitz_drops_negative_part():
    # a = z^-1: P(z^-1 * (1 + z)) = 1
    a = FourierCoeffs.monomial(-1, 3)
    out = apply_toeplitz(a, FourierCoeffs.from_analytic([1, 1], 3)).analytic()
    assert np.allclose(out, [1, 0, 0, 0])


def test_linearity(a_coeffs):
    rng = np.random.default_rng(1)
    f = FourierCoeffs.from_analytic(rng.normal(size=20) + 1j * rng.normal(size=20))
    g = FourierCoeffs.from_analytic(rng.normal(size=20))
    al, be = 0.7 - 0.2j, -1.3
    lhs = apply_toeplitz(a_coeffs, FourierCoeffs.from_analytic(al * f.analytic() + be * g.analytic()))
    rhs = al * apply_toeplitz(a_coeffs, f).analytic() + be * apply_toeplitz(a_coeffs, g).analytic()
    assert np.max(np.abs(lhs.analytic() - rhs)) < 1e-10


def test_finite_section_consistency(a_coeffs):
    n = 50
    rng = np.random.default_rng(2)
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    T = toeplitz_truncation(a_coeffs, n).entries
    direct = apply_toeplitz(a_coeffs, FourierCoeffs.from_analytic(c)).analytic()[:n]
    assert np.max(np.abs(T @ c - direct)) < 1e-12


def test_preimage_zero():
    eta = preimage_smooth(FourierCoeffs.from_analytic([0.0]), n_grid=GRID)
    assert not np.any(eta.coeffs)


def test_preimage_requires_analytic_bounded():
    with pytest.raises(PreconditionError):
        preimage_smooth(FourierCoeffs.monomial(-2, 2), n_grid=GRID)
    with pytest.raises(PreconditionError):
        preimage_smooth(FourierCoeffs.monomial(0, 0), bounded=False)


@pytest.mark.parametrize("g", [[1.0], [0, 2, 0, 1]])
def test_preimage_roundtrip_on_target_band(a_coeffs, g):
    gc = FourierCoeffs.from_analytic(g)
    rt = roundtrip_residual(a_coeffs, preimage_smooth(gc, n_grid=GRID), gc)
    assert rt.target_band <= 1e-6
    # outside the target band the truncated eta leaves a slowly decaying remainder
    assert rt.full >= rt.target_band


def test_kernel_probe_identity_symbol():
    rep = kernel_probe(FourierCoeffs.monomial(0, 63), [4, 16, 64])
    assert np.allclose(rep.sigma_min, 1.0)
    assert rep.metadata["label"] == LABEL


def test_kernel_probe_shift_is_singular():
    rep = kernel_probe(FourierCoeffs.monomial(1, 63), [4, 16, 64])
    assert max(rep.sigma_min) < 1e-12
    assert "finite-section kernel detected" in rep.flags


def test_kernel_probe_symbol_positive(a_coeffs):
    rep = kernel_probe(a_coeffs, [16, 64, 256])
    assert all(s > 0.1 for s in rep.sigma_min)


def test_single_order_flag(a_coeffs):
    rep = kernel_probe(a_coeffs, [16])
    assert "insufficient data for a trend" in rep.flags
    rep = surjectivity_probe(a_coeffs, control_target(a_coeffs), [16])
    assert "insufficient data for a trend" in rep.flags and rep.growth_ratios() == []


def test_orders_validation(a_coeffs):
    with pytest.raises(ValueError):
        kernel_probe(a_coeffs, [64, 16])
    with pytest.raises(ResolutionError):
        kernel_probe(FourierCoeffs.monomial(0, 7), [64])
    with pytest.raises(ResolutionError):
        surjectivity_probe(FourierCoeffs.monomial(0, 15), FourierCoeffs.monomial(0, 15), [16])


def test_control_l1_stable(a_coeffs):
    rep = surjectivity_probe(a_coeffs, control_target(a_coeffs), [16, 64, 256])
    assert np.allclose(rep.coeff_l1, 1.0, atol=1e-10)
    assert max(rep.residual) < 1e-12


def test_rank_deficient_section_uses_pseudo_inverse():
    z = FourierCoeffs.monomial(1, 63)
    rep = surjectivity_probe(z, FourierCoeffs.monomial(1, 63), [4, 8])
    assert any("rank-deficient" in f for f in rep.flags)
    assert np.allclose(rep.residual, 0, atol=1e-12)


def test_solver_caches_factorization(a_coeffs):
    s = SectionSolver(a_coeffs)
    s.sigma_min(32)
    first = s.factor(32)
    assert s.factor(32) is first


def test_report_serialization(a_coeffs):
    rep = surjectivity_probe(a_coeffs, control_target(a_coeffs), [8, 32])
    lines = rep.to_csv().splitlines()
    assert lines[0] == "n,sigma_min,residual,coeff_l1" and len(lines) == 3
    d = rep.to_dict()
    assert d["label"] == LABEL and len(d["growth_ratios"]) == 1


def test_monotone_helpers():
    assert strictly_increasing([1, 2, 3]) and not strictly_increasing([1, 1])
    assert strictly_decreasing([3, 2]) and not strictly_decreasing([2, 3])


def test_roundtrip_residual_shrinks_with_grid():
    g = FourierCoeffs.from_analytic([0.3, 0, -1, 0.5j])
    res = []
    for n in (2 ** 12, 2 ** 13, 2 ** 14):
        a = fourier_coeffs(sample_circle(SYMBOL, n, 1e-5), n // 2 - 1)
        res.append(roundtrip_residual(a, preimage_smooth(g, n_grid=n), g))
    assert res[0].full > res[1].full > res[2].full
    assert res[0].target_band > res[1].target_band > res[2].target_band
