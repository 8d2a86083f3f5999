import numpy as np
import pytest

from aderdg.errors import ConfigError, InadmissibleStateError
from aderdg.euler import (
    GasModel,
    admissible,
    cons_to_prim,
    max_signal_speed,
    mirror,
    physical_flux,
    physical_fluxes,
    pressure,
    prim_to_cons,
    swap_xy,
)
from aderdg.flux import _abs_jacobian_times, _eigenvectors_x, euler_eigenvalues, get_flux, osher_flux, rusanov_flux


def test_prim_cons_roundtrip_1d_and_2d(rng):
    for d in (1, 2):
        W = np.abs(rng.standard_normal((d + 2, 7))) + 0.1
        W[1:1 + d] -= 0.5
        np.testing.assert_allclose(cons_to_prim(prim_to_cons(W)), W, rtol=1e-13)


def test_total_energy_by_hand():
    Q = prim_to_cons(np.array([2.0, 3.0, 1.0]))
    # rho E = p/(gamma-1) + rho u^2 / 2 = 2.5 + 9
    np.testing.assert_allclose(Q, [2.0, 6.0, 11.5])
    assert pressure(Q) == pytest.approx(1.0)


def test_pressure_raises_on_bad_density():
    with pytest.raises(InadmissibleStateError):
        pressure(np.array([0.0, 0.0, 1.0]))


def test_admissible_flags_each_failure_mode():
    Q = np.array([[1.0, -1.0, 1.0, np.nan],
                  [0.0, 0.0, 0.0, 0.0],
                  [2.5, 2.5, 0.1, 2.5]])
    Q[1, 2] = 1.0  # kinetic energy exceeds total energy: negative pressure
    np.testing.assert_array_equal(admissible(Q), [True, False, False, False])
    assert admissible(np.array([1.0, 0.0, 2.5])) is True


def test_gas_model_validates_gamma():
    with pytest.raises(ConfigError):
        GasModel(1.0)


def test_physical_flux_by_hand():
    Q = prim_to_cons(np.array([2.0, 3.0, -1.0, 4.0]))
    p = 4.0
    E = Q[-1]
    np.testing.assert_allclose(physical_flux(Q, 0), [6.0, 2 * 9 + p, -6.0, 3 * (E + p)])
    np.testing.assert_allclose(physical_flux(Q, 1), [-2.0, -6.0, 2 + p, -(E + p)])
    for a, F in enumerate(physical_fluxes(Q)):
        np.testing.assert_allclose(F, physical_flux(Q, a))


def test_signal_speed_and_mirror():
    Q = prim_to_cons(np.array([1.4, -0.5, 1.0]))
    assert max_signal_speed(Q, 0) == pytest.approx(0.5 + 1.0)
    with pytest.raises(InadmissibleStateError):
        max_signal_speed(np.array([-1.0, 0.0, 1.0]), 0)
    np.testing.assert_allclose(mirror(Q, 0), [Q[0], -Q[1], Q[2]])
    Q2 = np.array([1.0, 0.2, -0.3, 2.0])
    np.testing.assert_allclose(swap_xy(Q2), [1.0, -0.3, 0.2, 2.0])


@pytest.mark.parametrize("flux", [rusanov_flux, osher_flux])
@pytest.mark.parametrize("axis", [0, 1])
def test_numerical_fluxes_are_consistent(flux, axis, rng):
    W = np.stack([1 + rng.random(6), rng.standard_normal(6), rng.standard_normal(6), 1 + rng.random(6)])
    Q = prim_to_cons(W)
    np.testing.assert_allclose(flux(Q, Q, axis), physical_flux(Q, axis), atol=1e-12)


def test_osher_is_upwind_for_supersonic_flow():
    # both states supersonic to the right: the exact flux is F(qL)
    qL = prim_to_cons(np.array([1.0, 3.0, 1.0]))
    qR = prim_to_cons(np.array([0.8, 3.2, 0.9]))
    np.testing.assert_allclose(osher_flux(qL, qR, 0), physical_flux(qL, 0), atol=1e-12)


def test_rusanov_dissipation_uses_the_larger_speed():
    qL = prim_to_cons(np.array([1.0, 0.0, 1.0]))
    qR = prim_to_cons(np.array([0.5, 0.0, 1.0]))
    s = max(max_signal_speed(qL, 0), max_signal_speed(qR, 0))
    ref = 0.5 * (physical_flux(qL, 0) + physical_flux(qR, 0)) - 0.5 * s * (qR - qL)
    np.testing.assert_allclose(rusanov_flux(qL, qR, 0), ref)


def test_osher_axis_symmetry():
    qL = prim_to_cons(np.array([1.0, 0.1, 0.3, 1.0]))
    qR = prim_to_cons(np.array([0.5, -0.2, 0.1, 0.4]))
    Gy = osher_flux(qL, qR, 1)
    Gx = swap_xy(osher_flux(swap_xy(qL), swap_xy(qR), 0))
    np.testing.assert_allclose(Gy, Gx, atol=1e-14)


def test_osher_falls_back_on_inadmissible_path():
    qL = np.array([1.0, 0.0, 2.5])
    qR = np.array([-1.0, 0.0, 2.5])
    stats = {}
    G = osher_flux(qL[:, None], qR[:, None], 0, stats=stats)
    assert stats["osher_fallbacks"] == 1
    np.testing.assert_allclose(G, rusanov_flux(qL[:, None], qR[:, None], 0))


def test_eigenvalues_sorted_around_velocity():
    Q = prim_to_cons(np.array([1.4, 0.5, -0.25, 1.0]))
    np.testing.assert_allclose(euler_eigenvalues(Q, 0), [-0.5, 0.5, 0.5, 1.5])
    np.testing.assert_allclose(euler_eigenvalues(Q, 1), [-1.25, -0.25, -0.25, 0.75])


def test_get_flux_unknown_name():
    assert get_flux("rusanov") is rusanov_flux
    with pytest.raises(ConfigError):
        get_flux("roe")


@pytest.mark.parametrize("d", [1, 2])
def test_closed_form_wave_strengths_match_eigen_decomposition(d):
    rng = np.random.default_rng(7 + d)
    W = np.abs(rng.standard_normal((d + 2, 64))) + 0.2
    W[1 : d + 1] -= 0.6
    Q = prim_to_cons(W)
    dq = rng.standard_normal(Q.shape)
    R, lam = _eigenvectors_x(Q, 1.4)
    alpha = np.linalg.solve(R, np.moveaxis(dq, 0, -1)[..., None])[..., 0]
    ref = np.einsum("...ij,...j->...i", R, np.abs(lam) * alpha)
    np.testing.assert_allclose(_abs_jacobian_times(Q, dq, 1.4), np.moveaxis(ref, -1, 0), atol=1e-12)
