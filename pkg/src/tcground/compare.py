"""Side-by-side comparison of the coherent-state and exact ground states."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (DEFAULT_EPS, ModelParams, ObservableSet, PhaseRegion,
                    ProbabilityDistribution, classify_region)
from .quantum import ScanPolicy, find_ground, reduced_distributions
from .semiclassical import (TrialCoefficients, critical_point, observables_sc,
                            occupation_distribution)


def fidelity(matter_q: ProbabilityDistribution, matter_sc: ProbabilityDistribution) -> float:
    """Bhattacharyya overlap sum_n sqrt(q_n p_n) of two diagonal distributions.

    Both must be indexed over the same support; restrict the semiclassical
    binomial to the quantum support first.
    """
    if len(matter_q) != len(matter_sc) or not np.array_equal(matter_q.index, matter_sc.index):
        raise ValueError(
            f"support mismatch: [{_span(matter_q)}] vs [{_span(matter_sc)}]")
    overlap = float(np.sqrt(matter_q.weights * matter_sc.weights).sum())
    return min(1.0, max(0.0, overlap))


def _span(dist):
    if len(dist) == 0:
        return "empty"
    return f"{dist.index[0]:g}..{dist.index[-1]:g}"


@dataclass(frozen=True, eq=False)
class RestrictedTrial:
    lam: float
    weight: float
    photon_probs: ProbabilityDistribution


def restricted_trial(coeffs: TrialCoefficients, lam: float) -> RestrictedTrial:
    """Keep only the trial-state components with excitation number ``lam`` and renormalize."""
    j = coeffs.j
    k = lam + j
    if k < 0 or abs(k - round(k)) > 1e-9:
        raise ValueError(f"lambda={lam} is not on the lattice lambda >= -j, lambda + j integer")
    k = int(round(k))
    nu = np.arange(max(0, k - coeffs.n_atoms), k + 1)
    n_excited = k - nu
    inside = nu <= coeffs.nu_max
    weights = np.zeros(len(nu))
    weights[inside] = np.abs(coeffs.amplitudes[n_excited[inside], nu[inside]]) ** 2
    mass = float(weights.sum())
    if mass <= 0.0:
        raise ValueError(f"trial state has no weight at lambda={lam}")
    return RestrictedTrial(k - j, min(1.0, mass),
                           ProbabilityDistribution("nu", nu, weights / mass))


@dataclass(frozen=True)
class ComparisonRecord:
    params: ModelParams
    region: PhaseRegion
    sc: ObservableSet
    q: ObservableSet
    fidelity: float
    lambda_sc: float
    lambda_q: float
    e_sc: float
    e_q: float
    theta_c: float
    tie: bool = False


def compare_point(params: ModelParams, eps: float = DEFAULT_EPS,
                  scan_policy: ScanPolicy | None = None) -> ComparisonRecord:
    cp = critical_point(params, eps)
    gs = find_ground(params, scan_policy)
    _, matter_q = reduced_distributions(gs)
    matter_sc = occupation_distribution(params, eps).restrict(matter_q.index[0], matter_q.index[-1])
    return ComparisonRecord(
        params=params,
        region=classify_region(params, eps),
        sc=observables_sc(params, eps),
        q=gs.observables,
        fidelity=fidelity(matter_q, matter_sc),
        lambda_sc=cp.lambda_sc,
        lambda_q=gs.lam,
        e_sc=cp.energy_per_atom,
        e_q=gs.energy_per_atom,
        theta_c=cp.theta_c,
        tie=gs.tie,
    )


# -- figure presets -------------------------------------------------------------

@dataclass(frozen=True)
class Preset:
    """Parameter set pinned to one published figure.

    ``gammas`` lists the discrete couplings shown; ``gamma_range`` is
    (start, stop, step) for swept curves.
    """

    name: str
    n_atoms: int
    delta: float
    gammas: tuple[float, ...] = ()
    gamma_range: tuple[float, float, float] | None = None
    lam: float | None = None
    note: str = ""

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    def params(self, gamma: float | None = None) -> ModelParams:
        if gamma is None:
            if not self.gammas:
                raise ValueError(f"preset {self.name} has no default gamma")
            gamma = self.gammas[0]
        return ModelParams.from_delta(self.n_atoms, gamma, self.delta)


PRESETS: dict[str, Preset] = {p.name: p for p in (
    Preset("fig5", 6, 0.0, gamma_range=(0.0, 3.0, 0.01),
           note="E0/N and lambda0 vs gamma, N=6 at resonance (N=100 companion: fig9)"),
    Preset("fig6", 6, 0.2, gamma_range=(0.0, 3.0, 0.01), note="<J_z>/N vs gamma"),
    Preset("fig7", 6, 0.2, gamma_range=(0.0, 3.0, 0.01),
           note="fidelity vs gamma for j=3; rerun with --delta 0 for the resonant curve"),
    Preset("fig8", 6, 0.2, gammas=(-1.5, -1.0, -0.9, -0.8),
           note="Path II compositions; quantum lambda = 2, -1, -2, -3"),
    Preset("fig9", 100, 0.0, gammas=(-2.0, -1.5, -1.1, -1.01, -0.9, 1.01),
           note="Path II compositions; quantum lambda = 81, 23, -31, -48, -50, -48"),
    Preset("fig10", 6, 0.2, gammas=(-1.5,),
           note="trial-state lambda distribution, mean ~1.87, sigma ~2.06"),
    Preset("fig12", 20, 0.2, gammas=(5.0,), lam=124,
           note="j=10 (N=20); the lambda=124 sector is the exact ground sector here"),
)}


def gamma_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid with count floor((stop - start)/step) + 1."""
    if step <= 0:
        raise ValueError("step must be positive")
    if stop < start:
        raise ValueError("range must satisfy start <= stop")
    count = math.floor((stop - start) / step + 1e-9) + 1
    return start + step * np.arange(count)
