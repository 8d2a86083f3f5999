import numpy as np
import pytest

from aderdg.basis import build_nodal_basis
from aderdg.euler import prim_to_cons
from aderdg.weno import (
    GHOST,
    WenoParams,
    evaluate_quadratic,
    fv_evolve_periodic,
    gather_windows,
    smoothness,
    subcell_fv_step,
    weno3_coefficients,
    weno3_nodal,
)

NODES = build_nodal_basis(2).nodes


def _cell_averages_of_quadratic(a, b, c, n):
    # averages of a + b x + c x^2 over unit cells [j, j+1)
    j = np.arange(n, dtype=float)
    F = lambda x: a * x + b * x**2 / 2 + c * x**3 / 3  # noqa: E731
    return F(j + 1) - F(j)


def test_quadratic_data_is_reconstructed_exactly():
    avg = _cell_averages_of_quadratic(1.0, -0.5, 0.25, 9)
    coeffs = weno3_coefficients(avg)
    assert coeffs.shape == (5, 3)
    vals = evaluate_quadratic(coeffs, NODES)
    j = np.arange(2, 7)[:, None]
    x = j + NODES[None, :]
    np.testing.assert_allclose(vals, 1.0 - 0.5 * x + 0.25 * x * x, atol=1e-12)


def test_mean_is_preserved_exactly(rng):
    avg = rng.standard_normal(20)
    coeffs = weno3_coefficients(avg)
    np.testing.assert_array_equal(coeffs[:, 0], avg[2:-2])


def test_smoothness_of_pure_slope_and_curvature():
    assert smoothness(np.array([0.0, 2.0, 0.0])) == pytest.approx(4.0)
    assert smoothness(np.array([0.0, 0.0, 3.0])) == pytest.approx(39.0)


def test_step_data_stays_essentially_non_oscillatory():
    avg = np.where(np.arange(16) < 8, 1.0, 0.0)
    vals = evaluate_quadratic(weno3_coefficients(avg), NODES)
    # the overshoot of an upwind-biased quadratic is O(eps^(1/r)) small
    assert vals.max() <= 1.0 + 1e-3
    assert vals.min() >= -1e-3


def test_step_smooth_side_uses_the_smooth_stencil():
    avg = np.where(np.arange(12) < 6, 1.0, 0.0)
    c = weno3_coefficients(avg)
    # cells well away from the jump are constant
    np.testing.assert_allclose(c[:2, 1:], 0.0, atol=1e-12)


def test_two_dimensional_reconstruction_is_tensor_exact():
    n = 8
    a = _cell_averages_of_quadratic(1.0, 0.5, 0.0, n)
    b = _cell_averages_of_quadratic(2.0, -0.25, 0.0, n)
    avg = np.add.outer(a, b)  # average of (1+0.5x) + (2-0.25y)
    vals = weno3_nodal(avg[None], 2)
    assert vals.shape == (1, n - 4, n - 4, 3, 3)
    x = np.arange(2, n - 2)[:, None] + NODES[None, :]
    exact = (1 + 0.5 * x)[:, None, :, None] + (2 - 0.25 * x)[None, :, None, :]
    np.testing.assert_allclose(vals[0], exact, atol=1e-12)


def test_weno_params_linear_weights():
    np.testing.assert_array_equal(WenoParams().linear_weights, [1.0, 100.0, 1.0])


def _entropy_wave_subcells(n, d=1):
    x = (np.arange(n) + 0.5) / n
    rho = 1.0 + 0.2 * np.sin(2 * np.pi * x)
    if d == 1:
        return prim_to_cons(np.stack([rho, np.ones(n), np.ones(n)]))
    R = np.broadcast_to(rho[:, None], (n, n))
    return prim_to_cons(np.stack([R, np.ones((n, n)), np.zeros((n, n)), np.ones((n, n))]))


@pytest.mark.parametrize("d", [1, 2])
def test_periodic_fv_step_conserves(d):
    v = _entropy_wave_subcells(12, d)
    v2 = fv_evolve_periodic(v, 0.01, (1 / 12,) * d)
    np.testing.assert_allclose(v2.sum(axis=tuple(range(1, d + 1))), v.sum(axis=tuple(range(1, d + 1))),
                               rtol=1e-13, atol=1e-13)


def test_fv_records_match_the_boundary_fluxes():
    # conservation of a patch: interior change equals the net flux through its border
    v = _entropy_wave_subcells(20)
    window = v[:, 4:4 + 3 + 2 * GHOST][:, None]
    dt, hs = 0.004, 0.05
    res = subcell_fv_step(window, dt, (hs,))
    before = window[:, 0, GHOST:-GHOST].sum(axis=-1)
    after = res.v[:, 0].sum(axis=-1)
    np.testing.assert_allclose(after - before, -dt / hs * (res.right[0][:, 0] - res.left[0][:, 0]), atol=1e-13)
    assert res.fallbacks == 0


def test_inadmissible_reconstruction_falls_back_to_constants():
    # a near-vacuum cell next to a strong jump
    rho = np.array([1.0, 1.0, 1.0, 1.0, 1e-6, 1e-6, 1.0, 1.0, 1.0, 1.0, 1.0])
    W = np.stack([rho, np.zeros_like(rho), np.where(rho < 1, 1e-6, 1.0)])
    window = prim_to_cons(W)[:, None]
    res = subcell_fv_step(window, 1e-4, (0.1,))
    assert np.all(np.isfinite(res.v))


def test_gather_windows_matches_direct_slicing():
    Ns, gc = 3, 1
    n = 5
    glob = np.arange((n + 2 * gc) * Ns, dtype=float)
    sub = glob.reshape(1, n + 2 * gc, Ns)
    w = gather_windows(sub, (np.array([0, 3]),), Ns, gc, 1)
    np.testing.assert_array_equal(w[0, 0], glob[gc * Ns - GHOST: gc * Ns + Ns + GHOST])
    np.testing.assert_array_equal(w[0, 1], glob[(3 + gc) * Ns - GHOST: (3 + gc) * Ns + Ns + GHOST])


def test_gather_windows_2d_shape_and_content():
    Ns, gc, n = 3, 1, 4
    sub = np.random.default_rng(1).random((2, n + 2, n + 2, Ns, Ns))
    w = gather_windows(sub, (np.array([1]), np.array([2])), Ns, gc, 2)
    assert w.shape == (2, 1, Ns + 2 * GHOST, Ns + 2 * GHOST)
    # the centre block of the window is the cell itself
    np.testing.assert_array_equal(w[:, 0, GHOST:GHOST + Ns, GHOST:GHOST + Ns], sub[:, 2, 3])


def test_trace_positivity_failure_falls_back():
    # nodal values and space-time nodes of this window are admissible, but
    # one extrapolated face trace has negative pressure
    rho = np.array([0.2815371041889747, 0.12287102111130883, 0.09668313865950066, 0.12656993615677015,
                    0.5161643358622736, 0.06676144690565347, 0.153858259239467, 0.08250305364191285,
                    0.4014487052599816])
    u = np.array([0.8017803346886119, -0.9128838700130204, 0.8089439640467098, -0.01783033837660342,
                  0.3482463460565348, -0.27320241828254055, -0.9260329873326643, -0.42440223858037585,
                  -0.12799083919941112])
    p = np.array([1.4983256293924866e-02, 2.0420653030404657e-04, 6.0402558315664620e-03,
                  4.8137784484441476e-02, 1.5374090119303617e-02, 6.7113198262477425e-01,
                  2.8569029519350758e-01, 1.7615567258773512e-04, 1.6541264962015387e-02])
    window = prim_to_cons(np.stack([rho, u, p]))[:, None]
    res = subcell_fv_step(window, 1e-3, (0.1,))
    assert res.fallbacks >= 1
    assert np.all(np.isfinite(res.v))
    assert all(np.all(np.isfinite(r)) for r in res.left + res.right)
