import numpy as np
import pytest

from aderdg.errors import InadmissibleStateError
from aderdg.riemann_exact import exact_riemann_1d, sample, star_state

SOD_L = (1.0, 0.0, 1.0)
SOD_R = (0.125, 0.0, 0.1)
G = 1.4


def test_sod_star_state_matches_textbook_values():
    s = star_state(SOD_L, SOD_R)
    assert s.p == pytest.approx(0.30313, abs=1e-5)
    assert s.u == pytest.approx(0.92745, abs=1e-5)
    assert s.rho_left == pytest.approx(0.42632, abs=1e-5)
    assert s.rho_right == pytest.approx(0.26557, abs=1e-5)


def _shock_speed(s, rho, u, p, sign):
    c = np.sqrt(G * p / rho)
    return u + sign * c * np.sqrt((G + 1) / (2 * G) * s.p / p + (G - 1) / (2 * G))


def test_right_shock_satisfies_rankine_hugoniot():
    s = star_state(SOD_L, SOD_R)
    rr, ur, pr = SOD_R
    S = _shock_speed(s, rr, ur, pr, +1)
    E = lambda rho, u, p: p / (G - 1) + 0.5 * rho * u * u  # noqa: E731
    pre = np.array([rr, rr * ur, E(rr, ur, pr)])
    post = np.array([s.rho_right, s.rho_right * s.u, E(s.rho_right, s.u, s.p)])
    F = lambda rho, u, p: np.array([rho * u, rho * u * u + p, u * (E(rho, u, p) + p)])  # noqa: E731
    np.testing.assert_allclose(S * (post - pre), F(s.rho_right, s.u, s.p) - F(rr, ur, pr), atol=1e-10)


def test_rarefaction_fan_is_isentropic_and_continuous():
    s = star_state(SOD_L, SOD_R)
    cl = np.sqrt(G)
    c_star = cl * (s.p / 1.0) ** ((G - 1) / (2 * G))
    xi = np.linspace(-cl + 1e-9, s.u - c_star - 1e-9, 50)
    W = sample(SOD_L, SOD_R, xi)
    np.testing.assert_allclose(W[2] / W[0] ** G, 1.0, rtol=1e-12)
    # the fan is a simple wave: u - 2c/(gamma-1) is constant along it
    c = np.sqrt(G * W[2] / W[0])
    np.testing.assert_allclose(W[1] + 2 * c / (G - 1), 2 * cl / (G - 1), rtol=1e-12)
    assert np.all(np.diff(W[0]) < 0)
    tail = sample(SOD_L, SOD_R, np.array([s.u - c_star + 1e-12]))
    assert tail[0, 0] == pytest.approx(s.rho_left, rel=1e-9)


def test_symmetric_collision_has_zero_star_velocity():
    s = star_state((1.0, 1.0, 1.0), (1.0, -1.0, 1.0))
    assert s.u == pytest.approx(0.0, abs=1e-13)
    assert s.rho_left == pytest.approx(s.rho_right)
    assert s.p > 1.0


def test_trivial_problem_returns_the_state():
    x = np.linspace(-1, 1, 9)
    W = exact_riemann_1d((0.7, 0.2, 0.5), (0.7, 0.2, 0.5), x, 0.3)
    np.testing.assert_allclose(W, np.tile([[0.7], [0.2], [0.5]], (1, 9)), atol=1e-12)


def test_initial_time_returns_the_jump():
    x = np.array([-0.1, 0.1])
    W = exact_riemann_1d(SOD_L, SOD_R, x, 0.0)
    np.testing.assert_allclose(W[:, 0], SOD_L)
    np.testing.assert_allclose(W[:, 1], SOD_R)


def test_vacuum_and_bad_input_raise():
    with pytest.raises(InadmissibleStateError):
        star_state((1.0, -10.0, 0.1), (1.0, 10.0, 0.1))
    with pytest.raises(InadmissibleStateError):
        star_state((1.0, 0.0, -1.0), SOD_R)
