import cmath
import math

import numpy as np
import pytest

from htl.errors import DomainError, SingularPointError
from htl.symbol import (DELTA0, UnitAngle, a_plus_vt, arg_principal, deriv_im_log_a_plus,
                        deriv_log_a_plus, eval_a_minus, eval_a_plus, eval_g, eval_symbol,
                        log_symbol_vt)


def test_arg_principal_examples():
    assert arg_principal(1).theta == 0.0
    assert arg_principal(-1).theta == math.pi
    assert arg_principal(complex(-1, -0.0)).theta == math.pi
    assert arg_principal(1j).theta == pytest.approx(math.pi / 2)
    with pytest.raises(DomainError):
        arg_principal(0)


def test_arg_matches_log_imag():
    for z in (2 - 3j, -0.5 + 0.1j, -4 - 1e-9j, 1j):
        assert arg_principal(z).theta == pytest.approx(cmath.log(z).imag, abs=1e-15)


def test_unit_angle_normalization_and_vartheta():
    assert UnitAngle(-math.pi).theta == math.pi
    assert UnitAngle(3 * math.pi).theta == pytest.approx(math.pi)
    assert UnitAngle(-3.0).theta == -3.0
    for th in (0.3, -0.3, 2.5, -2.5):
        t = UnitAngle(th)
        assert t.vartheta == pytest.approx(th - math.copysign(math.pi, th))
    assert UnitAngle(0.0).vartheta == math.pi


def test_a_plus_examples():
    assert eval_a_plus(0).value == 1
    assert eval_a_plus(1).value == pytest.approx(1 - math.log(2))
    # oracle: ln(1+i) = ln(sqrt 2) + i pi/4
    expected = 1 - 0.5 * math.log(2) - 1j * math.pi / 4
    assert abs(eval_a_plus(1j).value - expected) < 1e-15


def test_a_plus_cut():
    with pytest.raises(DomainError, match="cut"):
        eval_a_plus(-1)
    with pytest.raises(DomainError):
        eval_a_plus(-2.5)
    eval_a_plus(-2.5 + 1e-9j)


def test_a_plus_split_branch_near_minus_one():
    vt = 1e-5
    z = -cmath.exp(1j * vt)
    v = eval_a_plus(z)
    assert "split" in v.branch_tag
    # independent: 1 - log(1+z) with 1+z formed without cancellation
    opz = 1 - cmath.exp(1j * vt)
    assert abs(v.value - (1 - cmath.log(opz))) < 1e-9


def test_a_minus_examples():
    assert eval_a_minus(1).value == pytest.approx(1 - math.log(2))
    z = cmath.exp(1j)
    assert abs(eval_a_minus(z).value - eval_a_plus(z).value.conjugate()) < 1e-15
    assert abs(eval_a_minus(1e12).value - 1) < 1e-11
    for bad in (0, -0.5, -1):
        with pytest.raises(DomainError):
            eval_a_minus(bad)


def test_symbol_examples():
    assert eval_symbol(0.0).value == pytest.approx(1)
    ap = eval_a_plus(1j).value
    v = eval_symbol(math.pi / 2).value
    assert abs(v - ap / ap.conjugate()) < 1e-15
    assert abs(v - (0.653426 - 0.785398j) / (0.653426 + 0.785398j)) < 1e-6
    assert abs(abs(v) - 1) < 1e-15
    for th in (0.1, 1.0, 3.0):
        assert abs(eval_symbol(th).value - eval_symbol(-th).value.conjugate()) < 1e-15
    with pytest.raises(SingularPointError):
        eval_symbol(math.pi)
    with pytest.raises(SingularPointError):
        eval_symbol(UnitAngle(-math.pi))


def test_log_symbol_is_imaginary_and_odd():
    vt = np.linspace(-3, 3, 101)
    vt = vt[vt != 0]
    ls = log_symbol_vt(vt)
    assert np.all(ls.real == 0)
    assert np.allclose(ls.imag, -log_symbol_vt(-vt).imag, atol=1e-15)


def test_g_examples():
    assert eval_g(0) == pytest.approx(0.25)
    L = 1 - math.log(2)
    assert eval_g(1) == pytest.approx(0.5 / L / (math.log(L) + 2) ** 2, rel=1e-14)
    for t in (-0.9, -0.5, -1e-6, -1 + 1e-12):
        v = eval_g(t)
        assert v.imag == 0 and v.real > 0
    with pytest.raises(SingularPointError):
        eval_g(-1)


def test_deriv_log_a_plus_examples():
    for x in (1e-5, 1e-3, 0.03):
        assert deriv_log_a_plus(x).real == pytest.approx(-deriv_log_a_plus(-x).real, rel=1e-12)
    x = 1e-4
    r = (deriv_log_a_plus(x) * x * math.log(x)).real
    assert 0.5 <= r <= 2
    with pytest.raises(SingularPointError):
        deriv_log_a_plus(0)
    with pytest.raises(DomainError):
        deriv_log_a_plus(0.2)


def _fd_log_a_plus(x, h):
    f = lambda s: cmath.log(eval_a_plus(-cmath.exp(1j * s)).value)
    return (f(x + h) - f(x - h)) / (2 * h)


@pytest.mark.parametrize("x", [DELTA0, 1e-2, 1e-3, 1e-4, -1e-4, -DELTA0])
def test_deriv_log_a_plus_finite_difference(x):
    d = deriv_log_a_plus(x)
    fd = _fd_log_a_plus(x, 1e-4 * abs(x))
    assert abs(d - fd) / abs(d) < 1e-6


@pytest.mark.parametrize("x", [1e-6, 1e-4, 1e-2, -1e-3, DELTA0])
def test_closed_form_im_derivative_agrees(x):
    assert deriv_im_log_a_plus(x) == pytest.approx(deriv_log_a_plus(x).imag, rel=1e-8)


def test_vartheta_path_matches_principal_away_from_minus_one():
    vt = np.array([0.5, -1.0, 2.0, 3.1])
    z = -np.exp(1j * vt)
    assert np.allclose(a_plus_vt(vt), 1 - np.log(1 + z), atol=1e-14)
