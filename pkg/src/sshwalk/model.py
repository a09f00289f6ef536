"""Lattice parameters and kinematic momentum-space quantities.

Everything here is purely algebraic: the complex intracell/intercell hopping
amplitude, its phase and phase derivative across the Brillouin zone, and the
integer winding of that phase.  Energies are measured in units of the
intracell hopping, which is fixed to 1 and taken positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DegenerateParameterError

# |v(k)| below this is treated as an exact zero of the hopping amplitude,
# where the phase is undefined.
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class WalkParams:
    """Couplings and detunings of the walk, in units of the intracell hopping.

    u is the intercell-to-intracell hopping ratio, omega the detuning of the
    intermediate sublattice site, eps_A the walker on-site energy.  u = 1 is a
    degenerate configuration (the hopping amplitude vanishes at the zone edge);
    it may be constructed but phase-based operations refuse it.
    """

    u: float
    omega: float = 0.0
    eps_A: float = 0.0
    v: float = field(default=1.0)

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError(f"intracell hopping must be positive, got v={self.v}")
        if self.u < 0:
            raise ValueError(f"hopping ratio must be nonnegative, got u={self.u}")

    @property
    def degenerate(self) -> bool:
        return abs(self.u - 1.0) <= DEGENERACY_TOL


@dataclass(frozen=True)
class KGrid:
    """Uniform grid over the Brillouin zone [-pi, pi).

    The grid always contains k = 0 and is closed under k -> -k up to the
    periodic identification, so parity cancellations in zone integrals are
    exact.  Even counts use an endpoint grid (containing -pi); odd counts use
    a midpoint grid.  Zone integrals over this grid use the periodic
    rectangle rule (equivalent to the trapezoidal rule on a periodic domain).
    """

    n: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if len(pts) != self.n or self.n < 2:
            raise ValueError("grid length mismatch or too few points")
        d = np.diff(pts)
        if not np.allclose(d, d[0], rtol=0, atol=1e-12):
            raise ValueError("grid points must be uniform")
        if not np.any(pts == 0.0):
            raise ValueError("grid must contain k = 0")
        object.__setattr__(self, "points", pts)

    @classmethod
    def make(cls, n: int) -> "KGrid":
        if n < 2:
            raise ValueError("need at least 2 momentum points")
        h = 2.0 * math.pi / n
        if n % 2 == 0:
            # endpoint grid: -pi, ..., -h, 0, h, ..., pi - h
            pos = h * np.arange(1, n // 2)
            pts = np.concatenate(([-math.pi], -pos[::-1], [0.0], pos))
        else:
            # odd n: midpoint grid on [-pi, pi) is h * {-(n-1)/2, ..., (n-1)/2},
            # symmetric pairs around an exact k = 0 center
            pos = h * np.arange(1, (n + 1) // 2)
            pts = np.concatenate((-pos[::-1], [0.0], pos))
        return cls(n=n, points=pts)

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.n

    def integrate(self, values: np.ndarray) -> float:
        """Zone integral by the periodic rectangle rule."""
        values = np.asarray(values)
        if values.shape[0] != self.n:
            raise ValueError("values do not cover the grid")
        return float(np.sum(values) * self.spacing)


def hopping_amplitude(params: WalkParams, k: float) -> complex:
    """Complex hopping amplitude v(k) = v (1 + u e^{ik})."""
    return params.v * (1.0 + params.u * complex(math.cos(k), math.sin(k)))


def hopping_mod2(params: WalkParams, k) -> np.ndarray:
    """|v(k)|^2 = v^2 (1 + u^2 + 2 u cos k), vectorized over k."""
    k = np.asarray(k, dtype=float)
    u = params.u
    return params.v**2 * (1.0 + u * u + 2.0 * u * np.cos(k))


def phase_and_derivative(params: WalkParams, k: float) -> tuple[float, float]:
    """Phase of the hopping amplitude and its momentum derivative.

    Returns (phi, dphi/dk) with phi the principal argument of v(k) and the
    derivative from the closed form (u cos k + u^2) / (1 + 2 u cos k + u^2),
    which is the branch-continuous derivative across the zone.

    Raises DegenerateParameterError where |v(k)| vanishes (u = 1, k = pi).
    """
    vk = hopping_amplitude(params, k)
    if abs(vk) < DEGENERACY_TOL * params.v:
        raise DegenerateParameterError(
            f"hopping amplitude vanishes at k={k:.6g} for u={params.u}; phase undefined"
        )
    u = params.u
    c = math.cos(k)
    dphi = (u * c + u * u) / (1.0 + 2.0 * u * c + u * u)
    return math.atan2(vk.imag, vk.real), dphi


def phase_derivative_grid(params: WalkParams, k) -> np.ndarray:
    """Vectorized dphi/dk over an array of momenta."""
    if params.degenerate:
        raise DegenerateParameterError("phase derivative undefined at |u| = 1")
    k = np.asarray(k, dtype=float)
    u = params.u
    c = np.cos(k)
    return (u * c + u * u) / (1.0 + 2.0 * u * c + u * u)


def winding_number(params: WalkParams) -> int:
    """Number of times the hopping phase wraps around the Brillouin zone.

    Integrates dphi/dk over the zone and rounds; the integral must land
    within 1e-9 * 2pi of an integer multiple of 2pi.  Equals 0 for u < 1 and
    1 for u > 1.  Refuses |u| = 1, where the phase is undefined at k = pi.
    """
    if params.degenerate:
        raise DegenerateParameterError("winding undefined at |u| = 1 (gap closes at k = pi)")

    u = params.u

    def dphi(k: float) -> float:
        c = math.cos(k)
        return (u * c + u * u) / (1.0 + 2.0 * u * c + u * u)

    # integrand is even in k; the peak for u near 1 sits at the k = pi endpoint
    half, _ = quad(dphi, 0.0, math.pi, epsabs=1e-13, epsrel=1e-13, limit=200)
    total = 2.0 * half
    w = total / (2.0 * math.pi)
    nearest = round(w)
    if abs(w - nearest) > 1e-9:
        raise DegenerateParameterError(
            f"winding integral {w:.3e} not within 1e-9 of an integer (u={u})"
        )
    return int(nearest)
