"""Model parameters, phase regions and the small shared record types.

Everything is in units of the field frequency and per atom where noted.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields

import numpy as np

MAX_ATOMS = 10_000
DEFAULT_EPS = 1e-12


class PhaseRegion(enum.Enum):
    NORTH = "NorthPole"
    SOUTH = "SouthPole"
    PARALLEL = "Parallel"
    ARM = "BoundaryArm"
    VERTEX = "BoundaryVertex"

    @property
    def is_boundary(self) -> bool:
        return self in (PhaseRegion.ARM, PhaseRegion.VERTEX)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ModelParams:
    """Intensive Tavis-Cummings Hamiltonian parameters.

    Use :meth:`from_delta` or :meth:`from_omega_a`; the other frequency is
    derived so that ``delta + omega_a == 1``. The superradiant sector
    ``j = n_atoms / 2`` is assumed throughout.
    """

    n_atoms: int
    gamma: float
    omega_a: float
    delta: float
    phi: float = 0.0

    def __post_init__(self):
        if isinstance(self.n_atoms, bool) or int(self.n_atoms) != self.n_atoms:
            raise ValueError(f"n_atoms must be an integer, got {self.n_atoms!r}")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        if not 1 <= self.n_atoms <= MAX_ATOMS:
            raise ValueError(f"n_atoms must lie in [1, {MAX_ATOMS}], got {self.n_atoms}")
        for name in ("gamma", "omega_a", "delta", "phi"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.delta + self.omega_a != 1.0:
            raise ValueError("delta + omega_a must equal 1; use from_delta/from_omega_a")

    @classmethod
    def from_delta(cls, n_atoms: int, gamma: float, delta: float, phi: float = 0.0) -> "ModelParams":
        delta = float(delta)
        omega_a = 1.0 - delta
        # 1 - delta can round so that the sum misses 1 by an ulp; nudge delta back.
        if delta + omega_a != 1.0:
            delta = 1.0 - omega_a
        return cls(n_atoms, gamma, omega_a, delta, phi)

    @classmethod
    def from_omega_a(cls, n_atoms: int, gamma: float, omega_a: float, phi: float = 0.0) -> "ModelParams":
        omega_a = float(omega_a)
        delta = 1.0 - omega_a
        if delta + omega_a != 1.0:
            omega_a = 1.0 - delta
        return cls(n_atoms, gamma, omega_a, delta, phi)

    @property
    def two_j(self) -> int:
        return self.n_atoms

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    def with_gamma(self, gamma: float) -> "ModelParams":
        return ModelParams(self.n_atoms, gamma, self.omega_a, self.delta, self.phi)


def classify_region(params: ModelParams | None = None, eps: float = DEFAULT_EPS, *,
                    gamma: float | None = None, omega_a: float | None = None) -> PhaseRegion:
    """Locate (gamma, omega_a) relative to the separatrix omega_a = +-gamma**2.

    Accepts either a :class:`ModelParams` or bare ``gamma``/``omega_a``
    keywords. Points within ``eps`` of a parabola arm are reported as
    boundary points since the Hessian is singular there.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if params is not None:
        gamma, omega_a = params.gamma, params.omega_a
    if gamma is None or omega_a is None:
        raise TypeError("classify_region needs params or both gamma and omega_a")
    g2 = gamma * gamma
    if omega_a - g2 > eps:
        return PhaseRegion.NORTH
    if omega_a + g2 < -eps:
        return PhaseRegion.SOUTH
    if g2 - abs(omega_a) > eps:
        return PhaseRegion.PARALLEL
    if abs(gamma) <= eps and abs(omega_a) <= eps:
        return PhaseRegion.VERTEX
    return PhaseRegion.ARM


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    """Nonnegative weights over an integer-spaced index.

    ``kind`` names the index: ``"nu"`` (photons), ``"n"`` (excited atoms) or
    ``"lambda"`` (excitation number, half-integer for odd N). ``tail`` is the
    probability mass known to lie outside the stored support.
    """

    kind: str
    index: np.ndarray
    weights: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        index = np.asarray(self.index, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if index.shape != weights.shape or index.ndim != 1:
            raise ValueError("index and weights must be 1-d arrays of equal length")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.weights)

    def total(self) -> float:
        return float(self.weights.sum())

    def mean(self) -> float:
        return float(np.dot(self.index, self.weights) / self.total())

    def variance(self) -> float:
        mu = self.mean()
        return float(np.dot((self.index - mu) ** 2, self.weights) / self.total())

    def std(self) -> float:
        return math.sqrt(self.variance())

    def entropy(self) -> float:
        """Shannon entropy in nats, with 0 ln 0 = 0."""
        w = self.weights[self.weights > 0]
        return float(-(w * np.log(w)).sum())

    def restrict(self, lo: float, hi: float) -> "ProbabilityDistribution":
        """Keep entries with lo <= index <= hi; dropped mass joins the tail."""
        keep = (self.index >= lo) & (self.index <= hi)
        dropped = float(self.weights[~keep].sum())
        return ProbabilityDistribution(self.kind, self.index[keep], self.weights[keep],
                                       self.tail + dropped)

    def point_mass_at(self) -> float | None:
        nz = np.flatnonzero(self.weights)
        return float(self.index[nz[0]]) if len(nz) == 1 else None


@dataclass(frozen=True)
class ObservableSet:
    """Matter and field expectation values of one ground-state description.

    Per-atom means carry a ``_per_n`` suffix; variances are absolute.
    """

    jz_per_n: float
    jx_per_n: float
    jy_per_n: float
    var_jx: float
    var_jy: float
    var_jz: float
    n_per_n: float
    var_n: float
    q_mean: float
    p_mean: float
    var_q: float
    var_p: float
    entropy_nats: float
    squeezing_xi: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
