import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import assume, given
from hypothesis import strategies as st

from tcground import (ModelParams, NuMaxPolicy, PhaseRegion, SurfacePoint, critical_point,
                      energy_surface, observables_sc, occupation_distribution,
                      trial_coefficients, trial_lambda_distribution)
from tcground.semiclassical import TruncationError, line_path, transition_order


def surface(params, x):
    """energy_surface at (q, p, theta) for any real theta, phi held at params.phi."""
    q, p, theta = x
    phi = params.phi
    # Continue through the poles: (-theta, phi) and (theta, phi + pi) are the same point.
    theta = math.remainder(theta, 2 * math.pi)
    if theta < 0:
        theta, phi = -theta, phi + math.pi
    return energy_surface(params, SurfacePoint(q, p, theta, phi))[0]


def _hess(f, x, h):
    n = len(x)
    out = np.empty((n, n))
    for i in range(n):
        for k in range(n):
            ei, ek = np.eye(n)[i] * h, np.eye(n)[k] * h
            out[i, k] = (f(x + ei + ek) - f(x + ei - ek) - f(x - ei + ek) + f(x - ei - ek)) / (4 * h * h)
    return out


def fd_hessian(f, x, h=2e-3):
    # One Richardson step on the central-difference stencil.
    return (4 * _hess(f, x, h / 2) - _hess(f, x, h)) / 3


def fd_gradient(f, x, h=1e-4):
    def central(step):
        return np.array([(f(x + e) - f(x - e)) / (2 * step) for e in np.eye(len(x)) * step])
    return (4 * central(h / 2) - central(h)) / 3


def critical_x(cp):
    return np.array([cp.q_c, cp.p_c, cp.theta_c])


# Points kept away from the separatrix so Hessians are well conditioned.
def off_separatrix(margin=0.05):
    return st.tuples(
        st.integers(1, 100),
        st.floats(-3, 3),
        st.floats(-2, 2),
        st.floats(0, 2 * math.pi),
    ).filter(lambda t: abs(t[1] ** 2 - abs(t[2])) > margin)


class TestEnergySurface:
    def test_north_pole_value(self):
        p = ModelParams.from_delta(6, 1.0, 0.2)
        e, lam = energy_surface(p, SurfacePoint(0, 0, 0))
        assert e == pytest.approx(-0.4) and lam == -3

    def test_south_pole_value(self):
        p = ModelParams.from_delta(6, 1.0, 0.2)
        e, lam = energy_surface(p, SurfacePoint(0, 0, math.pi))
        assert e == pytest.approx(0.4) and lam == pytest.approx(3)

    def test_parallel_minimum(self):
        p = ModelParams.from_omega_a(6, 1.5, 0.8)
        cp = critical_point(p)
        e, lam = energy_surface(p, SurfacePoint(cp.q_c, cp.p_c, cp.theta_c))
        assert e == pytest.approx(-(0.8 ** 2 + 1.5 ** 4) / (4 * 1.5 ** 2), abs=1e-12)
        assert e == pytest.approx(-0.633611, abs=1e-6)
        assert lam == pytest.approx(cp.lambda_sc, abs=1e-12)

    def test_surface_point_normalizes_angles(self):
        pt = SurfacePoint(0, 0, 4.0, -1.0)
        assert pt.theta == math.pi
        assert pt.phi == pytest.approx(2 * math.pi - 1.0)
        with pytest.raises(ValueError):
            SurfacePoint(math.inf, 0, 0)


class TestCriticalPoint:
    def test_parallel_example(self):
        cp = critical_point(ModelParams.from_omega_a(6, 1.5, 0.8))
        assert cp.region is PhaseRegion.PARALLEL
        assert cp.theta_c == pytest.approx(math.acos(0.8 / 2.25), abs=1e-12)
        assert cp.theta_c == pytest.approx(1.207288, abs=1e-6)
        assert cp.lambda_sc == pytest.approx(1.881667, abs=1e-6)
        assert cp.q_c == pytest.approx(-math.sqrt(3) * 1.5 * math.sin(cp.theta_c), abs=1e-12)
        assert cp.q_c == pytest.approx(-2.428305, abs=1e-6)
        assert cp.p_c == 0.0

    def test_north_hessian_example(self):
        # j = 1, omega_a = 1, gamma = 0.5: (1 + 1 +- sqrt(0 + 1))/4 and 1/2.
        cp = critical_point(ModelParams.from_omega_a(2, 0.5, 1.0))
        assert cp.hessian_eigs == pytest.approx((0.25, 0.5, 0.75), abs=1e-15)
        assert cp.is_minimum

    def test_zero_eigenvalue_on_arm(self):
        g = math.sqrt(0.8)
        cp = critical_point(ModelParams.from_omega_a(6, g, 0.8))
        assert cp.region is PhaseRegion.ARM and cp.degenerate
        assert min(abs(x) for x in cp.hessian_eigs) < 1e-12

    def test_south_pole(self):
        cp = critical_point(ModelParams.from_omega_a(6, 0.5, -1.0))
        assert cp.region is PhaseRegion.SOUTH
        assert cp.theta_c == math.pi and cp.lambda_sc == 3 and cp.energy_per_atom == -0.5
        assert cp.is_minimum

    @given(off_separatrix())
    def test_gradient_vanishes(self, t):
        n, g, w, phi = t
        p = ModelParams.from_omega_a(n, g, w, phi)
        cp = critical_point(p)
        grad = fd_gradient(lambda x: surface(p, x), critical_x(cp))
        assert np.max(np.abs(grad)) < 1e-8

    @given(off_separatrix(margin=0.1))
    def test_hessian_closed_forms(self, t):
        n, g, w, _ = t
        # phi = 0 keeps (q, p, theta) the natural coordinates at the poles too.
        p = ModelParams.from_omega_a(n, g, w)
        cp = critical_point(p)
        h = fd_hessian(lambda x: surface(p, x), critical_x(cp))
        eigs = np.sort(np.linalg.eigvalsh(h))
        scale = max(abs(e) for e in cp.hessian_eigs)
        for got, want in zip(eigs, cp.hessian_eigs):
            assert got == pytest.approx(want, rel=1e-6, abs=1e-6 * scale)

    @given(off_separatrix())
    def test_minimum_is_minimum(self, t):
        n, g, w, phi = t
        assert critical_point(ModelParams.from_omega_a(n, g, w, phi)).is_minimum

    @given(st.integers(1, 50), st.floats(0.05, 3), st.floats(-2, 2))
    def test_gamma_parity(self, n, g, w):
        a = critical_point(ModelParams.from_omega_a(n, g, w))
        b = critical_point(ModelParams.from_omega_a(n, -g, w))
        assert a.energy_per_atom == b.energy_per_atom
        assert a.lambda_sc == b.lambda_sc
        assert a.q_c == -b.q_c

    @pytest.mark.parametrize("w", [0.8, -0.8])
    def test_continuous_across_arm(self, w):
        g0 = math.sqrt(abs(w))
        inside = critical_point(ModelParams.from_omega_a(6, g0 + 1e-7, w))
        outside = critical_point(ModelParams.from_omega_a(6, g0 - 1e-7, w))
        assert inside.energy_per_atom == pytest.approx(outside.energy_per_atom, abs=1e-6)
        assert inside.lambda_sc == pytest.approx(outside.lambda_sc, abs=1e-5)
        assert np.allclose(inside.hessian_eigs, outside.hessian_eigs, atol=1e-5)


def binomial_entropy(n, p):
    probs = [math.comb(n, k) * p ** k * (1 - p) ** (n - k) for k in range(n + 1)]
    return -sum(x * math.log(x) for x in probs if x > 0)


class TestObservables:
    def test_parallel_example(self):
        p = ModelParams.from_delta(6, 2.0, 0.2)
        obs = observables_sc(p)
        c = 0.8 / 4
        assert obs.n_per_n == pytest.approx(4 * (1 - c * c) / 4, abs=1e-12)
        assert obs.jz_per_n == pytest.approx(-c / 2, abs=1e-15)
        assert obs.var_jz == pytest.approx(1.5 * (1 - c * c), abs=1e-12)
        assert obs.var_n == pytest.approx(obs.n_per_n * 6, abs=1e-12)
        assert obs.squeezing_xi == pytest.approx(1.0, abs=1e-12)
        assert obs.entropy_nats == pytest.approx(binomial_entropy(6, (1 - c) / 2), abs=1e-12)
        assert obs.entropy_nats == pytest.approx(1.5927, abs=1e-4)

    def test_north_has_no_entropy(self):
        obs = observables_sc(ModelParams.from_delta(6, 0.5, 0.2))
        assert obs.entropy_nats == 0.0
        assert obs.n_per_n == 0.0 and obs.jz_per_n == -0.5
        assert obs.var_jx == pytest.approx(3 / 2) and obs.var_jz == 0.0

    @given(st.integers(1, 200), st.floats(-3, 3), st.floats(-2, 2), st.floats(0, 6.3))
    def test_entropy_bounded(self, n, g, w, phi):
        obs = observables_sc(ModelParams.from_omega_a(n, g, w, phi))
        assert 0 <= obs.entropy_nats <= math.log(n + 1) + 1e-12
        assert obs.squeezing_xi == pytest.approx(1.0, abs=1e-9)


class TestOccupation:
    def test_equator(self):
        d = occupation_distribution(ModelParams.from_delta(6, 1.0, 1.0))
        assert d.weights[3] == pytest.approx(0.3125, abs=1e-15)

    def test_parallel(self, fig8_params):
        d = occupation_distribution(fig8_params)
        assert d.weights[0] == pytest.approx((1 - 0.322222222222) ** 6, rel=1e-10)
        assert d.total() == pytest.approx(1.0, abs=1e-15)

    def test_poles_are_point_masses(self):
        assert occupation_distribution(ModelParams.from_delta(6, 0.1, 0.2)).point_mass_at() == 0
        assert occupation_distribution(ModelParams.from_delta(6, 0.1, 2.0)).point_mass_at() == 6


def dense_trial(params, nu_dim):
    """Coherent product state from matrix exponentials of the ladder operators."""
    cp = critical_point(params)
    n = params.n_atoms
    j = params.j
    # J_+ on |j, m> indexed by j + m.
    m = np.arange(n + 1) - j
    jp = np.diag(np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1)), -1)
    tau = math.tan(cp.theta_c / 2) * np.exp(1j * params.phi)
    atom = scipy.linalg.expm(tau * jp)[:, 0]
    atom /= np.linalg.norm(atom)

    big = nu_dim + 60
    a = np.diag(np.sqrt(np.arange(1, big)), 1)
    alpha = (cp.q_c + 1j * cp.p_c) / math.sqrt(2)
    field = scipy.linalg.expm(alpha * a.T - np.conj(alpha) * a)[:, 0][:nu_dim]
    return np.outer(atom, field)


class TestTrialCoefficients:
    def test_normalized_and_photon_mean(self, fig8_params):
        coeffs = trial_coefficients(fig8_params)
        assert coeffs.probabilities().sum() + coeffs.tail_mass == pytest.approx(1.0, abs=1e-12)
        photons = coeffs.photon_distribution()
        assert photons.mean() == pytest.approx(6 * 2.25 / 4 * (1 - (0.8 / 2.25) ** 2), abs=1e-9)
        assert photons.mean() == pytest.approx(2.948333, abs=1e-6)

    @pytest.mark.parametrize("gamma, omega_a, phi", [
        (1.5, 0.8, 0.0), (-1.5, 0.8, 0.0), (2.0, -0.5, 0.7), (-1.2, 0.0, 2.5),
    ])
    def test_matches_dense_construction(self, gamma, omega_a, phi):
        p = ModelParams.from_omega_a(4, gamma, omega_a, phi)
        coeffs = trial_coefficients(p)
        ref = dense_trial(p, coeffs.nu_max + 1)
        assert np.allclose(coeffs.amplitudes, ref, atol=1e-10)

    def test_amplitude_lookup(self, fig8_params):
        coeffs = trial_coefficients(fig8_params)
        assert coeffs.amplitude(-3, 0) == coeffs.amplitudes[0, 0]
        assert coeffs.amplitude(4, 0) == 0
        assert coeffs.amplitude(0, coeffs.nu_max + 1) == 0

    def test_point_mass_outside_parallel(self):
        coeffs = trial_coefficients(ModelParams.from_delta(6, 0.5, 0.2))
        assert coeffs.nu_max == 0 and coeffs.amplitude(-3, 0) == 1

    def test_truncation_cap(self):
        with pytest.raises(TruncationError):
            trial_coefficients(ModelParams.from_delta(100, 3.0, 0.0), NuMaxPolicy(cap=100))

    @given(st.integers(1, 60), st.floats(0.3, 3), st.floats(-1.5, 1.5), st.floats(0, 6.3))
    def test_lambda_moments(self, n, g, w, phi):
        assume(g * g > abs(w) + 1e-3)
        p = ModelParams.from_omega_a(n, g, w, phi)
        dist, mean, std = trial_lambda_distribution(trial_coefficients(p))
        cp = critical_point(p)
        obs = observables_sc(p)
        assert dist.total() + dist.tail == pytest.approx(1.0, abs=1e-10)
        assert mean == pytest.approx(cp.lambda_sc, abs=1e-8 * max(1, abs(cp.lambda_sc)))
        var = obs.var_n + n / 4 * math.sin(cp.theta_c) ** 2
        assert std ** 2 == pytest.approx(var, rel=1e-8, abs=1e-10)

    def test_gamma_parity_of_lambda_distribution(self, fig8_params):
        a, _, _ = trial_lambda_distribution(trial_coefficients(fig8_params))
        b, _, _ = trial_lambda_distribution(trial_coefficients(fig8_params.with_gamma(1.5)))
        assert np.allclose(a.weights, b.weights, atol=1e-15)


class TestTransitionOrder:
    def test_arm(self):
        r = transition_order(lambda s: (s, 0.8), math.sqrt(0.8))
        assert r.order == 2
        assert r.left_region is PhaseRegion.NORTH and r.right_region is PhaseRegion.PARALLEL
        assert r.jumps[2] == pytest.approx(-2.0, abs=0.05)

    def test_vertex(self):
        r = transition_order(line_path((-0.5, -0.5), (0.5, 0.5)), 0.5)
        assert r.order == 1
        assert r.jumps[1] == pytest.approx(-1.0, abs=1e-6)

    def test_interior(self):
        r = transition_order(line_path((0, 2), (1, 2)), 0.5)
        assert r.order is None

    def test_stencil_across_region_rejected(self):
        with pytest.raises(ValueError):
            transition_order(lambda s: (s, 0.8), math.sqrt(0.8) + 2e-3)
