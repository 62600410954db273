import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra import numpy as hnp

from bohm_lab.errors import DegenerateFieldError, UsageError
from bohm_lab.field import (NONNEGATIVE, SIGNED, ComplexField, Grid1D, PhysicalParams, PolarField,
                            derivative, fd_weights, norm, polar_decompose, read_field_csv, recompose,
                            restore_sign, write_field_csv)
from bohm_lab.specfun import airy_ai

P = PhysicalParams()


def test_grid_spacing_conventions():
    assert Grid1D(0.0, 1.0, 10, periodic=True).dx == pytest.approx(0.1)
    assert Grid1D(0.0, 1.0, 11).dx == pytest.approx(0.1)
    g = Grid1D.from_spacing(-2.0, 2.0, 0.01)
    assert g.n == 401 and g.x[-1] == pytest.approx(2.0)
    with pytest.raises(UsageError):
        Grid1D(0.0, 1.0, 4)
    with pytest.raises(UsageError):
        Grid1D(1.0, 0.0, 16)
    with pytest.raises(UsageError):
        Grid1D(0.0, 1.0, 100, periodic=True).require_power_of_two()


def test_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams(mass=-1.0)
    with pytest.raises(ValueError):
        PhysicalParams(hbar=0.0)
    assert PhysicalParams(extras={"beta": 2.0}).get("beta") == 2.0


def test_fields_are_immutable_and_finite():
    g = Grid1D(-1, 1, 16)
    psi = ComplexField(g, np.ones(16))
    with pytest.raises(ValueError):
        psi.values[0] = 2.0
    with pytest.raises(UsageError):
        ComplexField(g, np.full(16, np.nan))
    with pytest.raises(UsageError):
        ComplexField(g, np.ones(15))
    with pytest.raises(ValueError):
        PolarField(g, -np.ones(16), np.zeros(16), mode=NONNEGATIVE)


def test_plane_wave_decomposition():
    g = Grid1D(0.0, 2 * np.pi, 128, periodic=True)
    polar = polar_decompose(ComplexField(g, np.exp(1j * g.x)), P)
    np.testing.assert_allclose(polar.amplitude, 1.0, atol=1e-15)
    np.testing.assert_allclose(polar.phase, g.x, atol=1e-12)


def test_real_gaussian_decomposition():
    g = Grid1D.from_spacing(-5, 5, 0.05)
    polar = polar_decompose(ComplexField(g, np.exp(-g.x**2)), P)
    np.testing.assert_allclose(polar.amplitude, np.exp(-g.x**2), rtol=1e-15)
    assert np.all(polar.phase == 0)


def test_signed_mode_absorbs_sign_changes():
    g = Grid1D.from_spacing(-12, 4, 0.01)
    real = airy_ai(g.x)
    polar = polar_decompose(ComplexField(g, real.astype(complex)), P, mode=SIGNED)
    np.testing.assert_allclose(polar.amplitude, real, rtol=0, atol=1e-15)
    np.testing.assert_allclose(polar.phase, 0.0, atol=1e-15)
    # nonnegative mode puts pi jumps into S instead
    flat = polar_decompose(ComplexField(g, real.astype(complex)), P, mode=NONNEGATIVE)
    assert np.all(flat.amplitude >= 0)
    assert np.ptp(flat.phase) > 3.0


def test_unwrapped_phase_is_linear_over_many_wraps():
    g = Grid1D.from_spacing(0.0, 200.0, 0.05)
    k = 3.7
    polar = polar_decompose(ComplexField(g, np.exp(1j * k * g.x)), P)
    fit = np.polyval(np.polyfit(g.x, polar.phase, 1), g.x)
    assert np.max(np.abs(polar.phase - fit)) < 1e-9
    assert -np.pi < polar.phase[0] <= np.pi


def test_phase_carries_hbar():
    hb = PhysicalParams(hbar=0.3)
    g = Grid1D(0.0, 2 * np.pi, 64, periodic=True)
    polar = polar_decompose(ComplexField(g, np.exp(2j * g.x)), hb)
    np.testing.assert_allclose(polar.phase, 0.3 * 2 * g.x, atol=1e-12)
    np.testing.assert_allclose(recompose(polar, hb).values, np.exp(2j * g.x), atol=1e-13)


def test_degenerate_field():
    g = Grid1D(-1, 1, 16)
    with pytest.raises(DegenerateFieldError):
        polar_decompose(ComplexField(g, np.zeros(16)), P)


def test_recompose_examples():
    g = Grid1D(-3, 3, 64)
    one = recompose(PolarField(g, np.ones(64), np.zeros(64)), P)
    np.testing.assert_array_equal(one.values, np.ones(64))
    gauss = np.exp(-g.x**2)
    out = recompose(PolarField(g, gauss, 1.5 * g.x), P)
    np.testing.assert_allclose(out.values, gauss * np.exp(1.5j * g.x), rtol=1e-15)


@given(hnp.arrays(np.float64, 32, elements=st.floats(0.0, 10.0)),
       hnp.arrays(np.float64, 32, elements=st.floats(-50.0, 50.0)))
def test_round_trip(mag, ang):
    assume(mag.max() > 1e-3)
    g = Grid1D(0.0, 1.0, 32)
    psi = ComplexField(g, mag * np.exp(1j * ang))
    for mode in (NONNEGATIVE, SIGNED):
        back = recompose(polar_decompose(psi, P, mode=mode), P).values
        keep = mag > 1e-8 * mag.max()
        err = np.abs(back - psi.values)[keep]
        assert err.max() <= 1e-12 * mag.max()


def test_restore_sign_recovers_linear_amplitude():
    g = Grid1D.from_spacing(-3, 3, 0.01)
    lin = 2 * g.x + 3
    # the global sign is not recoverable from |A|
    back = restore_sign(np.abs(lin))
    np.testing.assert_allclose(back * np.sign(back[0] * lin[0]), lin, atol=1e-15)
    h2 = (4 * g.x**2 - 2) * np.exp(-g.x**2 / 2)
    signed = restore_sign(np.abs(h2))
    assert np.allclose(signed, h2) or np.allclose(signed, -h2)


def test_fd_weights_known_stencils():
    assert [float(w) for w in fd_weights([-1, 0, 1], 2)] == [1.0, -2.0, 1.0]
    np.testing.assert_allclose([float(w) for w in fd_weights([-2, -1, 0, 1, 2], 1)],
                               [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12])
    assert [float(w) for w in fd_weights([0, 1, 2, 3], 2)] == [2.0, -5.0, 4.0, -1.0]


def test_spectral_derivative_of_sine():
    g = Grid1D(0.0, 2 * np.pi, 64, periodic=True)
    np.testing.assert_allclose(derivative(np.sin(g.x), g, 1, scheme="spectral"), np.cos(g.x), atol=1e-10)
    np.testing.assert_allclose(derivative(np.sin(g.x), g, 2, scheme="spectral"), -np.sin(g.x), atol=1e-10)


def test_fd_second_derivative_exact_on_quadratic():
    g = Grid1D.from_spacing(-2, 3, 0.1)
    np.testing.assert_allclose(derivative(g.x**2, g, 2), 2.0, atol=1e-8)


def test_periodic_fd_wraps():
    g = Grid1D(0.0, 2 * np.pi, 256, periodic=True)
    d = derivative(np.sin(g.x), g, 1)
    assert np.max(np.abs(d - np.cos(g.x))) < 1e-3
    assert abs(d[0] - 1.0) < 1e-3


def test_derivative_errors():
    g = Grid1D(0.0, 1.0, 16)
    with pytest.raises(UsageError):
        derivative(np.zeros(16), g, 3)
    with pytest.raises(UsageError):
        derivative(np.zeros(16), g, 1, scheme="spectral")
    with pytest.raises(UsageError):
        derivative(np.zeros(15), g, 1)


def _fd_error(dx, order, accuracy):
    g = Grid1D.from_spacing(-4, 4, dx)
    f = np.exp(-g.x**2)
    exact = (4 * g.x**2 - 2) * f if order == 2 else -2 * g.x * f
    return np.max(np.abs(derivative(f, g, order, accuracy=accuracy) - exact))


@pytest.mark.parametrize("order", [1, 2])
def test_fd_convergence_second_order(order):
    ratio = _fd_error(0.02, order, 2) / _fd_error(0.01, order, 2)
    assert 3.5 <= ratio <= 4.5


def test_higher_accuracy_stencils_converge_faster():
    assert _fd_error(0.05, 2, 4) / _fd_error(0.025, 2, 4) == pytest.approx(16, rel=0.1)
    assert _fd_error(0.025, 2, 8) < 1e-10


def test_norm_examples():
    g = Grid1D.from_spacing(-10, 10, 0.01)
    gauss = (2 / np.pi) ** 0.25 * np.exp(-g.x**2)
    psi = ComplexField(g, gauss)
    assert norm(psi) == pytest.approx(1.0, abs=1e-10)
    assert norm(ComplexField(g, np.zeros(g.n))) == 0.0
    assert norm(ComplexField(g, 2 * gauss)) == pytest.approx(2 * norm(psi), rel=1e-15)


def test_csv_round_trip(tmp_path):
    g = Grid1D.from_spacing(-1, 1, 0.1)
    psi = ComplexField(g, np.exp(-g.x**2) * np.exp(0.3j * g.x))
    write_field_csv(tmp_path / "c.csv", psi)
    assert (tmp_path / "c.csv").read_text().splitlines()[0] == "x,re,im"
    back = read_field_csv(tmp_path / "c.csv")
    np.testing.assert_array_equal(back.values, psi.values)
    polar = polar_decompose(psi, P)
    write_field_csv(tmp_path / "p.csv", polar)
    again = read_field_csv(tmp_path / "p.csv", mode=NONNEGATIVE)
    np.testing.assert_array_equal(again.amplitude, polar.amplitude)
    np.testing.assert_array_equal(again.phase, polar.phase)
