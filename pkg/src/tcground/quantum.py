"""Exact ground state by diagonalizing each excitation-number block.

The Hamiltonian commutes with Lambda = a^dag a + J_z, so in the basis
|nu> x |j, lambda - nu> every block is real symmetric tridiagonal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tridiagonal
from .model import ModelParams, ObservableSet, ProbabilityDistribution
from .semiclassical import critical_point, observables_sc


class ScanCapError(RuntimeError):
    """The lambda scan reached its cap without bracketing a minimum."""


def _check_lambda(params: ModelParams, lam: float) -> int:
    """Return lambda + j as an integer, rejecting values off the lattice."""
    k = lam + params.j
    if k < 0 or abs(k - round(k)) > 1e-9:
        raise ValueError(f"lambda={lam} must satisfy lambda >= -j and lambda + j integer (j={params.j})")
    return int(round(k))


@dataclass(frozen=True, eq=False)
class SectorHamiltonian:
    lam: float
    n_atoms: int
    nu_min: int
    nu_max: int
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.diag)

    @property
    def nu(self) -> np.ndarray:
        return np.arange(self.nu_min, self.nu_max + 1)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def build_sector(params: ModelParams, lam: float) -> SectorHamiltonian:
    """Tridiagonal block of the intensive Hamiltonian at fixed lambda.

    Rows are ordered by ascending photon number nu, with m = lambda - nu.
    """
    k = _check_lambda(params, lam)
    lam = k - params.j
    n, two_j = params.n_atoms, params.two_j
    nu_min = max(0, k - two_j)
    nu_max = k
    nu = np.arange(nu_min, nu_max + 1, dtype=float)
    # j + m and j - m as exact integers: j + m = k - nu.
    j_plus_m = k - nu
    j_minus_m = two_j - j_plus_m
    diag = lam / n - params.delta * (lam - nu) / n
    coupling = params.gamma / (n * math.sqrt(n))
    # <nu+1, m-1| a^dag J_- |nu, m> = sqrt(nu+1) sqrt((j+m)(j-m+1))
    offdiag = coupling * np.sqrt(nu[:-1] + 1) * np.sqrt(j_plus_m[:-1] * (j_minus_m[:-1] + 1))
    return SectorHamiltonian(lam, n, nu_min, nu_max, diag, offdiag)


@dataclass(frozen=True, eq=False)
class SectorSolution:
    lam: float
    n_atoms: int
    nu_min: int
    energy_per_atom: float
    coeffs: np.ndarray
    residual: float

    @property
    def nu(self) -> np.ndarray:
        return np.arange(self.nu_min, self.nu_min + len(self.coeffs))


def solve_sector(h: SectorHamiltonian) -> SectorSolution:
    energy, vec, residual = tridiagonal.lowest_eigenpair(h.diag, h.offdiag)
    return SectorSolution(h.lam, h.n_atoms, h.nu_min, energy, vec, residual)


def analytic_sector_energy(params: ModelParams, lam: float) -> float:
    """Closed-form ground energy per atom for the three lowest sectors.

    Supports lambda = -j, -j+1 and -j+2 (the last needs N >= 2). The third
    case is the trigonometric root of the traceless 3x3 characteristic
    polynomial, with the angle taken by atan2 so any sign of the detuning works.
    """
    k = _check_lambda(params, lam)
    n, d, g = params.n_atoms, params.delta, params.gamma
    if k == 0:
        return -0.5 * (1 - d)
    if k == 1:
        return (2 - n - d + n * d - math.sqrt(4 * g ** 2 + d ** 2)) / (2 * n)
    if k == 2:
        if n < 2:
            raise ValueError("lambda = -j + 2 closed form needs N >= 2")
        p = (4 * n - 2) * g ** 2 / n + d ** 2
        disc = max(0.0, p ** 3 - 27 * g ** 4 * d ** 2 / n ** 2)
        angle = math.atan2(n * math.sqrt(disc), 3 * math.sqrt(3) * g ** 2 * d)
        return ((n * d - n - 2 * d + 4) / (2 * n)
                - 2 * math.sqrt(p) * math.sin((2 * angle + math.pi) / 6) / (math.sqrt(3) * n))
    raise ValueError(f"no closed form for lambda = -j + {k}")


@dataclass(frozen=True)
class ScanPolicy:
    """How the lambda scan proceeds.

    ``guided`` starts at the rounded semiclassical lambda and expands both
    ways; ``ascending`` walks up from -j. Either stops once ``patience``
    consecutive sectors rise beyond the running minimum.
    """

    patience: int = 5
    strategy: str = "guided"
    tie_tol: float = 1e-12

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.strategy not in ("guided", "ascending"):
            raise ValueError(f"unknown scan strategy {self.strategy!r}")


@dataclass(frozen=True, eq=False)
class GroundState:
    sector: SectorSolution
    scanned_range: tuple[float, float]
    observables: ObservableSet
    energies: dict
    tie: bool = False

    @property
    def lam(self) -> float:
        return self.sector.lam

    @property
    def energy_per_atom(self) -> float:
        return self.sector.energy_per_atom


def _scan_cap(params: ModelParams) -> int:
    """Largest admissible lambda + j."""
    cp = critical_point(params)
    obs = observables_sc(params)
    var_lambda = obs.var_n + obs.var_jz
    return math.floor(cp.lambda_sc + params.j + max(50.0, 10 * math.sqrt(var_lambda)))


class _Scanner:
    def __init__(self, params: ModelParams, cap: int):
        self.params, self.cap = params, cap
        self.solutions: dict[int, SectorSolution] = {}

    def energy(self, k: int) -> float:
        if k not in self.solutions:
            if k > self.cap:
                raise ScanCapError(f"lambda scan hit its cap lambda={self.cap - self.params.j}")
            self.solutions[k] = solve_sector(build_sector(self.params, k - self.params.j))
        return self.solutions[k].energy_per_atom

    def walk(self, start: int, step: int, patience: int) -> None:
        """Step from ``start`` until ``patience`` consecutive rises past the best value."""
        best = self.energy(start)
        prev, rises, k = best, 0, start
        while True:
            k += step
            if k < 0:
                return
            e = self.energy(k)
            if e < best:
                best, rises = e, 0
            elif e > prev:
                rises += 1
                if rises >= patience:
                    return
            else:
                rises = 0
            prev = e


def _local_minima(energies: list[float]) -> int:
    count = 0
    for i, e in enumerate(energies):
        left = energies[i - 1] if i > 0 else math.inf
        right = energies[i + 1] if i + 1 < len(energies) else math.inf
        if e < left and e <= right:
            count += 1
    return count


def find_ground(params: ModelParams, policy: ScanPolicy | None = None) -> GroundState:
    """Global ground state across lambda sectors.

    Ties within ``policy.tie_tol`` resolve to the smaller lambda and set
    ``GroundState.tie``.
    """
    policy = policy or ScanPolicy()
    cap = _scan_cap(params)
    scanner = _Scanner(params, cap)

    if policy.strategy == "guided":
        start = min(max(0, round(critical_point(params).lambda_sc + params.j)), cap)
        scanner.walk(start, +1, policy.patience)
        scanner.walk(start, -1, policy.patience)
        ks = sorted(scanner.solutions)
        contiguous = ks == list(range(ks[0], ks[-1] + 1))
        if not contiguous or _local_minima([scanner.energy(k) for k in ks]) > 1:
            # Not unimodal over the window: fall back to the exhaustive walk.
            scanner.walk(0, +1, policy.patience)
            hi = max(scanner.solutions)
            for k in range(0, hi + 1):
                scanner.energy(k)
    else:
        scanner.walk(0, +1, policy.patience)

    ks = sorted(scanner.solutions)
    e_min = min(scanner.energy(k) for k in ks)
    ties = [k for k in ks if scanner.energy(k) <= e_min + policy.tie_tol]
    best = ties[0]
    sector = scanner.solutions[best]
    energies = {k - params.j: scanner.solutions[k].energy_per_atom for k in ks}
    return GroundState(
        sector=sector,
        scanned_range=(ks[0] - params.j, ks[-1] - params.j),
        observables=_sector_observables(sector, params),
        energies=energies,
        tie=len(ties) > 1,
    )


def _sector_observables(sol: SectorSolution, params: ModelParams) -> ObservableSet:
    n_atoms, j = params.n_atoms, params.j
    prob = sol.coeffs ** 2
    prob = prob / prob.sum()
    nu = sol.nu.astype(float)
    m = sol.lam - nu
    mean_n = float(prob @ nu)
    var_n = max(0.0, float(prob @ nu ** 2) - mean_n ** 2)
    jz = float(prob @ m)
    jz2 = float(prob @ m ** 2)
    var_jz = max(0.0, jz2 - jz ** 2)
    # <J_x> = 0 and <J_x^2> = <J_y^2> = (j(j+1) - <J_z^2>)/2 within one sector.
    var_jperp = 0.5 * (j * (j + 1) - jz2)
    nz = prob[prob > 0]
    return ObservableSet(
        jz_per_n=jz / n_atoms,
        jx_per_n=0.0,
        jy_per_n=0.0,
        var_jx=var_jperp,
        var_jy=var_jperp,
        var_jz=var_jz,
        n_per_n=mean_n / n_atoms,
        var_n=var_n,
        q_mean=0.0,
        p_mean=0.0,
        var_q=mean_n + 0.5,
        var_p=mean_n + 0.5,
        entropy_nats=float(-(nz * np.log(nz)).sum()),
        squeezing_xi=math.sqrt(max(0.0, j + 1 - jz2 / j)),
    )


def observables_q(gs: GroundState, params: ModelParams) -> ObservableSet:
    return _sector_observables(gs.sector, params)


def reduced_distributions(gs: GroundState) -> tuple[ProbabilityDistribution, ProbabilityDistribution]:
    """Diagonal reduced density matrices of the field (over nu) and matter (over n)."""
    sol = gs.sector
    prob = sol.coeffs ** 2
    photon = ProbabilityDistribution("nu", sol.nu, prob)
    # n excited atoms = j + m = lambda + j - nu; reverse so n ascends from 0.
    n_excited = np.rint(sol.lam + sol.n_atoms / 2 - sol.nu).astype(int)
    matter = ProbabilityDistribution("n", n_excited[::-1], prob[::-1])
    return photon, matter
