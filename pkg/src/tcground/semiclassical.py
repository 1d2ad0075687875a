"""Coherent-state (semiclassical) description of the ground state.

The trial state is a field coherent state times an SU(2) atomic coherent
state. Its energy surface, minima, closed-form observables and expansion
in the Fock x Dicke basis live here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import stats
from scipy.special import gammaln

from .model import (DEFAULT_EPS, ModelParams, ObservableSet, PhaseRegion,
                    ProbabilityDistribution, classify_region)


class TruncationError(RuntimeError):
    """The photon cutoff needed for the requested tail bound exceeds the cap."""


@dataclass(frozen=True)
class SurfacePoint:
    q: float
    p: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.q) and math.isfinite(self.p)):
            raise ValueError("q and p must be finite")
        object.__setattr__(self, "theta", min(max(float(self.theta), 0.0), math.pi))
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))


@dataclass(frozen=True)
class CriticalPoint:
    region: PhaseRegion
    theta_c: float
    q_c: float
    p_c: float
    energy_per_atom: float
    lambda_sc: float
    hessian_eigs: tuple[float, float, float]
    degenerate: bool = False

    @property
    def is_minimum(self) -> bool:
        return min(self.hessian_eigs) >= -1e-12


def energy_surface(params: ModelParams, point: SurfacePoint) -> tuple[float, float]:
    """Trial-state energy per atom and expectation of the excitation number.

    Returns ``(E/N, lambda)`` with ``lambda = (q^2 + p^2)/2 - j cos(theta)``.
    """
    n, j = params.n_atoms, params.j
    lam = 0.5 * (point.q ** 2 + point.p ** 2) - j * math.cos(point.theta)
    energy = (lam / n + params.delta * j / n * math.cos(point.theta)
              + params.gamma / math.sqrt(2 * n) * math.sin(point.theta)
              * (point.q * math.cos(point.phi) - point.p * math.sin(point.phi)))
    return energy, lam


def _north_hessian(j, gamma, omega_a):
    root = math.sqrt((1 - j * omega_a) ** 2 + 4 * j * gamma ** 2)
    return (1 / (2 * j), (1 + j * omega_a + root) / (4 * j), (1 + j * omega_a - root) / (4 * j))


def _south_hessian(j, gamma, omega_a):
    # Mirror image of the North triple under theta -> pi - theta, omega_a -> -omega_a.
    root = math.sqrt((1 + j * omega_a) ** 2 + 4 * j * gamma ** 2)
    return (1 / (2 * j), (1 - j * omega_a + root) / (4 * j), (1 - j * omega_a - root) / (4 * j))


def _parallel_hessian(j, gamma, omega_a):
    g2 = gamma ** 2
    root = math.sqrt(g2 ** 2 * (1 - j * g2) ** 2 + 4 * j * omega_a ** 2 * g2)
    return (1 / (2 * j), (g2 * (1 + j * g2) + root) / (4 * j * g2),
            (g2 * (1 + j * g2) - root) / (4 * j * g2))


def _polar_angle(region: PhaseRegion, gamma: float, omega_a: float) -> tuple[float, float]:
    """(cos theta_c, sin theta_c) with exact values at the poles."""
    if region in (PhaseRegion.NORTH, PhaseRegion.VERTEX):
        return 1.0, 0.0
    if region is PhaseRegion.SOUTH:
        return -1.0, 0.0
    if region is PhaseRegion.ARM:
        return (1.0, 0.0) if omega_a >= 0 else (-1.0, 0.0)
    c = omega_a / gamma ** 2
    return c, math.sqrt(max(0.0, 1.0 - c * c))


def critical_point(params: ModelParams, eps: float = DEFAULT_EPS) -> CriticalPoint:
    """Minimum of the energy surface at gauge angle ``params.phi``.

    On the separatrix the limiting pole values are returned with
    ``degenerate=True``; one Hessian eigenvalue is then zero.
    """
    region = classify_region(params, eps)
    j, g, w, phi = params.j, params.gamma, params.omega_a, params.phi
    cos_t, sin_t = _polar_angle(region, g, w)
    theta = math.acos(cos_t)

    if region is PhaseRegion.PARALLEL:
        energy = -(w ** 2 + g ** 4) / (4 * g ** 2)
        lam = j * (-w * (w + 2) + g ** 4) / (2 * g ** 2)
        hess = _parallel_hessian(j, g, w)
    elif cos_t > 0:
        energy, lam = -w / 2, -j
        hess = _north_hessian(j, g, w)
    else:
        energy, lam = w / 2, j
        hess = _south_hessian(j, g, w)

    amp = math.sqrt(j) * g * sin_t
    return CriticalPoint(
        region=region,
        theta_c=theta,
        q_c=-amp * math.cos(phi),
        p_c=amp * math.sin(phi) + 0.0,
        energy_per_atom=energy,
        lambda_sc=lam,
        hessian_eigs=tuple(sorted(hess)),
        degenerate=region.is_boundary,
    )


def occupation_distribution(params: ModelParams, eps: float = DEFAULT_EPS) -> ProbabilityDistribution:
    """Binomial probability of n excited atoms in the atomic coherent state."""
    region = classify_region(params, eps)
    cos_t, _ = _polar_angle(region, params.gamma, params.omega_a)
    n = np.arange(params.n_atoms + 1)
    weights = stats.binom.pmf(n, params.n_atoms, (1 - cos_t) / 2)
    return ProbabilityDistribution("n", n, weights)


def observables_sc(params: ModelParams, eps: float = DEFAULT_EPS) -> ObservableSet:
    cp = critical_point(params, eps)
    j, phi = params.j, params.phi
    cos_t, sin_t = _polar_angle(cp.region, params.gamma, params.omega_a)

    bloch = np.array([sin_t * math.cos(phi), sin_t * math.sin(phi), -cos_t])
    # Spin coherent state covariance: (j/2)(1 - n n^T) about the mean direction.
    cov = 0.5 * j * (np.eye(3) - np.outer(bloch, bloch))
    perp = np.array([-math.sin(phi), math.cos(phi), 0.0])
    var_perp = float(perp @ cov @ perp)

    mean_n = 0.5 * (cp.q_c ** 2 + cp.p_c ** 2)
    return ObservableSet(
        jz_per_n=-cos_t / 2,
        jx_per_n=bloch[0] / 2,
        jy_per_n=bloch[1] / 2,
        var_jx=float(cov[0, 0]),
        var_jy=float(cov[1, 1]),
        var_jz=float(cov[2, 2]),
        n_per_n=mean_n / params.n_atoms,
        var_n=mean_n,
        q_mean=cp.q_c,
        p_mean=cp.p_c,
        var_q=0.5,
        var_p=0.5,
        entropy_nats=occupation_distribution(params, eps).entropy(),
        squeezing_xi=math.sqrt(2 * var_perp / j),
    )


@dataclass(frozen=True)
class NuMaxPolicy:
    """Photon cutoff rule: start near mean + sigmas*sqrt(mean+1) + pad, double until the tail fits."""

    sigmas: float = 12.0
    pad: int = 25
    tail_tol: float = 1e-12
    cap: int = 20_000

    def initial(self, mean_n: float) -> int:
        return math.ceil(mean_n + self.sigmas * math.sqrt(mean_n + 1) + self.pad)


@dataclass(frozen=True, eq=False)
class TrialCoefficients:
    """Trial-state amplitudes ``amplitudes[j + m, nu]`` for nu <= nu_max."""

    n_atoms: int
    amplitudes: np.ndarray
    nu_max: int
    tail_mass: float

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    def amplitude(self, m: float, nu: int) -> complex:
        k = round(m + self.j)
        if not (0 <= k <= self.n_atoms) or not (0 <= nu <= self.nu_max):
            return 0j
        return complex(self.amplitudes[k, nu])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def photon_distribution(self) -> ProbabilityDistribution:
        w = self.probabilities().sum(axis=0)
        return ProbabilityDistribution("nu", np.arange(self.nu_max + 1), w, self.tail_mass)


def trial_coefficients(params: ModelParams, policy: NuMaxPolicy | None = None,
                       eps: float = DEFAULT_EPS) -> TrialCoefficients:
    """Expand the minimizing coherent trial state in the |nu> x |j, m> basis.

    Outside the Parallel region the trial state is a single product state
    and a point mass is returned. Amplitudes are built from log-magnitudes
    so large N and strong coupling do not overflow.
    """
    policy = policy or NuMaxPolicy()
    region = classify_region(params, eps)
    n_atoms = params.n_atoms
    if region is not PhaseRegion.PARALLEL:
        cos_t, _ = _polar_angle(region, params.gamma, params.omega_a)
        amps = np.zeros((n_atoms + 1, 1), dtype=complex)
        amps[0 if cos_t > 0 else n_atoms, 0] = 1.0
        return TrialCoefficients(n_atoms, amps, 0, 0.0)

    g, w, phi, j = params.gamma, params.omega_a, params.phi, params.j
    c = w / g ** 2
    up, down = (1 + c) / 2, (1 - c) / 2
    mean_n = n_atoms * g ** 2 * (1 - c * c) / 4

    nu_max = min(policy.initial(mean_n), policy.cap)
    tail = stats.poisson.sf(nu_max, mean_n)
    while tail >= policy.tail_tol:
        if nu_max >= policy.cap:
            raise TruncationError(
                f"photon tail {tail:.3g} still above {policy.tail_tol:g} at nu_max={nu_max}")
        nu_max = min(2 * nu_max, policy.cap)
        tail = stats.poisson.sf(nu_max, mean_n)

    n = np.arange(n_atoms + 1)[:, None]
    nu = np.arange(nu_max + 1)[None, :]
    log_binom = gammaln(n_atoms + 1) - gammaln(n + 1) - gammaln(n_atoms - n + 1)
    log_mag = (0.5 * log_binom - mean_n / 2
               + nu * math.log(math.sqrt(2 * j) * abs(g)) - 0.5 * gammaln(nu + 1)
               + 0.5 * (n_atoms - n + nu) * math.log(up) + 0.5 * (n + nu) * math.log(down))
    phase = (n - nu) * phi + (math.pi * nu if g > 0 else 0.0)
    amps = np.exp(log_mag) * np.exp(1j * phase)
    return TrialCoefficients(n_atoms, amps, nu_max, float(tail))


def trial_lambda_distribution(coeffs: TrialCoefficients) -> tuple[ProbabilityDistribution, float, float]:
    """Regroup |A|^2 by the conserved excitation number lambda = m + nu.

    Returns the distribution and its moment-matched mean and standard deviation.
    """
    prob = coeffs.probabilities()
    n_idx, nu_idx = np.indices(prob.shape)
    weights = np.bincount((n_idx + nu_idx).ravel(), weights=prob.ravel())
    index = np.arange(len(weights)) - coeffs.j
    dist = ProbabilityDistribution("lambda", index, weights, coeffs.tail_mass)
    return dist, dist.mean(), dist.std()


# -- Ehrenfest order of transitions along a control-parameter path ---------------

Path = Callable[[float], tuple[float, float]]


def ground_energy_sc(gamma: float, omega_a: float, eps: float = DEFAULT_EPS) -> float:
    """Semiclassical E0/N; independent of the number of atoms."""
    return critical_point(ModelParams.from_omega_a(2, gamma, omega_a), eps).energy_per_atom


def line_path(start: tuple[float, float], stop: tuple[float, float]) -> Path:
    """Straight segment s in [0, 1] -> (gamma, omega_a)."""
    (g0, w0), (g1, w1) = start, stop
    return lambda s: (g0 + s * (g1 - g0), w0 + s * (w1 - w0))


def find_crossing(path: Path, a: float, b: float, eps: float = DEFAULT_EPS,
                  tol: float = 1e-14) -> float | None:
    """Bisect for the first region change on [a, b]; None if the ends agree."""
    def region(s):
        g, w = path(s)
        return classify_region(gamma=g, omega_a=w, eps=eps)

    ra = region(a)
    if region(b) is ra:
        return None
    lo, hi = a, b
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if region(mid) is ra:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class TransitionResult:
    order: int | None
    left: tuple[float, float, float]
    right: tuple[float, float, float]
    left_region: PhaseRegion
    right_region: PhaseRegion

    @property
    def jumps(self) -> tuple[float, float, float]:
        return tuple(r - l for l, r in zip(self.left, self.right))


def _one_sided(path, s0, h, sign, points, eps):
    steps = sign * np.arange(1, points + 1)
    regions, energies = set(), []
    for k in steps:
        g, w = path(s0 + k * h)
        regions.add(classify_region(gamma=g, omega_a=w, eps=eps))
        energies.append(ground_energy_sc(g, w, eps))
    if len(regions) != 1 or next(iter(regions)).is_boundary:
        names = sorted(str(r) for r in regions)
        raise ValueError(f"stencil on the {'right' if sign > 0 else 'left'} of s0={s0} "
                         f"spans regions {names}; reduce h")
    # Interpolating polynomial in t = (s - s0)/h, evaluated at t = 0.
    coef = P.polyfit(steps.astype(float), energies, points - 1)
    derivs = tuple(float(P.polyval(0.0, P.polyder(coef, i))) / h ** i for i in range(3))
    return derivs, regions.pop()


def transition_order(path: Path, s0: float, h: float = 1e-3, tol: float = 1e-2,
                     eps: float = DEFAULT_EPS, points: int = 5) -> TransitionResult:
    """Ehrenfest order of the semiclassical ground-energy transition at ``s0``.

    Derivatives of E0/N up to second order are extrapolated to ``s0`` from
    ``points`` samples on each side; the order is the first derivative whose
    one-sided limits differ by more than ``tol`` (``None`` if orders 0-2 agree).
    """
    left, lreg = _one_sided(path, s0, h, -1, points, eps)
    right, rreg = _one_sided(path, s0, h, +1, points, eps)
    order = next((i for i in range(3) if abs(left[i] - right[i]) > tol), None)
    return TransitionResult(order, left, right, lreg, rreg)
