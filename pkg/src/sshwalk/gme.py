"""Born master equation for the walker occupation at fixed momentum.

The occupation density rho_A(k, t) obeys a scalar Volterra
integro-differential equation

    d/dt rho_A(k, t) = - integral_0^t K(t - t') rho_A(k, t') dt',

with the memory kernel from `kernel` and initial value rho_A(k, 0) = 1/(2 pi).
The production solver is second-order product integration (trapezoidal in
both the derivative and the convolution, with half weight at the t' = t
endpoint); Bromwich contour inversion of the Laplace-domain solution

    rho_A(k, s) = (1/2pi) / (s + i Sigma(k, s))

serves as an independent cross-check.  The long-time time average is the
residue of that expression at s = 0 and has a closed form for the power-law
reservoir; a numeric residue estimator validates the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel as _kernel
from .errors import StepSizeError, TailBoundError
from .kernel import SpectralLaw, omega_minus, omega_plus, self_energy_laplace, self_energy_over_s

TWO_PI = 2.0 * math.pi

# h * Delta above this fails the step-size precondition.
MAX_PHASE_PER_STEP = 0.2

# 2pi-normalized occupations outside [0, 1] by more than this flag the trace.
BOUND_FLAG_TOL = 1e-3


@dataclass(frozen=True)
class KTrace:
    """Occupation density time series at one momentum.

    rho_A is stored as a density (initial value 1/2pi); two_pi_rho gives the
    dimensionless occupation used in figures.  Born dynamics may leak
    slightly outside [0, 1]; bound_excess measures the worst leakage.
    """

    k: float
    times: np.ndarray
    rho_A: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        r = np.asarray(self.rho_A, dtype=float)
        if t.shape != r.shape or t.ndim != 1:
            raise ValueError("times and rho_A must be 1-d arrays of equal length")
        # exact for time-domain solvers; contour inversion hits it only to
        # quadrature accuracy, so allow the flagging tolerance
        if t[0] == 0.0 and abs(r[0] * TWO_PI - 1.0) > BOUND_FLAG_TOL:
            raise ValueError("initial occupation must be 1/(2 pi) at t = 0")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "rho_A", r)

    @property
    def two_pi_rho(self) -> np.ndarray:
        return TWO_PI * self.rho_A

    @property
    def rho_res(self) -> np.ndarray:
        """Complementary reservoir density 1/2pi - rho_A."""
        return 1.0 / TWO_PI - self.rho_A

    def bound_excess(self) -> float:
        p = self.two_pi_rho
        return float(max(np.max(-p, initial=0.0), np.max(p - 1.0, initial=0.0), 0.0))

    @property
    def flagged(self) -> bool:
        return self.bound_excess() > BOUND_FLAG_TOL


@dataclass(frozen=True)
class BromwichConfig:
    """Contour parameters for the inverse Laplace cross-check."""

    gamma: float
    n_nodes: int
    t_max: float
    l_cap: float = field(default=1e5)

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("abscissa gamma must be positive")
        if self.gamma * self.t_max > 30.0:
            raise ValueError("gamma * t_max > 30 would overflow the e^{gamma t} factor")
        if self.n_nodes % 2 != 0 or self.n_nodes < 4:
            raise ValueError("n_nodes must be even and at least 4")

    @classmethod
    def auto(cls, t_max: float, n_nodes: int | None = None) -> "BromwichConfig":
        gamma = min(1.0, 2.0 / max(t_max, 1e-6))
        if n_nodes is None:
            # resolve e^{iyt} along the contour: dy * t_max <~ 0.4
            n_nodes = 2 * max(512, int(40 * max(t_max, 1.0)))
        return cls(gamma=gamma, n_nodes=n_nodes, t_max=t_max)


def _check_uniform_step(times: np.ndarray) -> float:
    d = np.diff(times)
    if len(d) == 0:
        return 0.0
    h = float(d[0])
    if not np.allclose(d, h, rtol=0, atol=1e-12 * max(1.0, abs(h))):
        raise ValueError("time grid must be uniform")
    return h


def _volterra_occupation(kern: np.ndarray, h: float) -> np.ndarray:
    """Product-integration solve of p' = -(K * p) with p(0) = 1.

    Trapezoid on the outer derivative and on the convolution; the implicit
    endpoint term is linear in the unknown and solved in closed form each
    step.  Global error is O(h^2).
    """
    n = len(kern)
    p = np.empty(n)
    f = np.empty(n)  # f_m = -(K * p)(t_m) by trapezoid
    p[0] = 1.0
    f[0] = 0.0
    k0 = kern[0]
    kr = np.ascontiguousarray(kern[::-1])  # kr[j] = kern[n-1-j]; keeps dots stride-1
    denom = 1.0 + h * h * k0 / 4.0
    for m in range(1, n):
        # known part of the convolution at t_m: all samples except p_m itself
        conv = 0.5 * kern[m] * p[0]
        if m > 1:
            conv += np.dot(kr[n - m : n - 1], p[1:m])
        g = -h * conv
        p[m] = (p[m - 1] + 0.5 * h * (f[m - 1] + g)) / denom
        f[m] = g - 0.5 * h * k0 * p[m]
    return p


def evolve_volterra(law: SpectralLaw, vk2: float, times: np.ndarray,
                    k: float = 0.0) -> KTrace:
    """Solve the Born master equation in the time domain at one momentum.

    Requires a uniform grid starting at 0 with step h satisfying
    h * Delta <= 0.2, so the fastest kernel oscillation is resolved.
    """
    times = np.asarray(times, dtype=float)
    if times[0] != 0.0:
        raise ValueError("time grid must start at 0")
    h = _check_uniform_step(times)
    if h * law.delta > MAX_PHASE_PER_STEP + 1e-12:
        raise StepSizeError(
            f"h * Delta = {h * law.delta:.3g} exceeds {MAX_PHASE_PER_STEP}; refine the grid"
        )
    kern = _kernel.memory_kernel_grid(law, vk2, times)
    p = _volterra_occupation(kern, h)
    return KTrace(k=k, times=times, rho_A=p / TWO_PI)


def evolve_volterra_discrete(eps: np.ndarray, weights: np.ndarray,
                             times: np.ndarray, k: float = 0.0) -> KTrace:
    """Born master equation driven by the kernel of a finite level set.

    Same solver as evolve_volterra with K(t) = 2 sum_j w_j cos(eps_j t);
    used to compare the Born truncation against exact dynamics of the same
    discrete model with no discretization mismatch.
    """
    times = np.asarray(times, dtype=float)
    if times[0] != 0.0:
        raise ValueError("time grid must start at 0")
    h = _check_uniform_step(times)
    emax = float(np.max(np.abs(eps))) if len(np.atleast_1d(eps)) else 0.0
    if h * emax > MAX_PHASE_PER_STEP + 1e-12:
        raise StepSizeError(
            f"h * max|eps| = {h * emax:.3g} exceeds {MAX_PHASE_PER_STEP}; refine the grid"
        )
    kern = _kernel.discrete_kernel_grid(eps, weights, times)
    p = _volterra_occupation(kern, h)
    return KTrace(k=k, times=times, rho_A=p / TWO_PI)


def invert_bromwich(law: SpectralLaw, vk2: float, config: BromwichConfig,
                    times: np.ndarray, k: float = 0.0) -> KTrace:
    """Bromwich-contour inversion of the Laplace-domain occupation.

    A damped-cosine reference with the same two leading orders of the
    large-s expansion,

        m(s) = (1/2pi) (s + c) / (s^2 + c s + K(0)),    c = min(1, sqrt(K(0))),

    is inverted analytically; the remainder r(s) = rho(s) - m(s) falls off
    like |s|^-4 along the contour and carries no feature narrower than the
    physical decay scales, so the trapezoidal rule on Re s = gamma converges
    quickly.  The truncation half-height L doubles until the estimated tail
    contribution drops below 1e-6 in 2pi-normalized units (TailBoundError at
    the cap); the node count is raised above config.n_nodes if needed to
    keep the contour oscillation e^{iyt} resolved.

    Line-contour inversion degrades when the occupation has persistent
    oscillations (poles approaching the contour axis); it is a cross-check
    for the decaying regime, not the production solver.
    """
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(times > config.t_max + 1e-12):
        raise ValueError("requested times must lie within [0, config.t_max]")
    gamma = config.gamma

    k0 = omega_plus(law, vk2)
    c = min(1.0, math.sqrt(k0)) if k0 > 0 else 1.0
    wd = math.sqrt(max(k0 - c * c / 4.0, 0.25 * c * c))

    def remainder(s: complex) -> complex:
        sig = self_energy_laplace(law, vk2, s)
        return (1.0 / TWO_PI) * (1.0 / (s + 1.0j * sig)
                                 - (s + c) / (s * s + c * s + k0))

    amp = math.exp(gamma * config.t_max)
    L = max(8.0 * law.delta, 8.0 * math.sqrt(k0), 40.0 / max(config.t_max, 1e-6))
    while True:
        tail = abs(remainder(complex(gamma, L))) * L / 2.0
        if 2.0 * amp * tail < 1e-6:
            break
        L *= 2.0
        if L > config.l_cap:
            raise TailBoundError(
                f"tail bound not reached by |Im s| = {config.l_cap:.3g}"
            )

    n = max(config.n_nodes, 2 * int(math.ceil(L * config.t_max / 0.6)))
    y = np.linspace(0.0, L, n + 1)
    rem = np.array([remainder(complex(gamma, yi)) for yi in y])
    w = np.full(len(y), L / n)
    w[0] *= 0.5
    w[-1] *= 0.5
    # rho(t) = m(t) + (e^{gamma t}/pi) * Re integral_0^L e^{iyt} r(gamma+iy) dy
    phase = np.exp(1.0j * np.outer(times, y))
    corr = (phase @ (w * rem)).real
    m_t = np.exp(-0.5 * c * times) * (np.cos(wd * times)
                                      + (c / (2.0 * wd)) * np.sin(wd * times)) / TWO_PI
    rho = m_t + np.exp(gamma * times) / math.pi * corr
    return KTrace(k=k, times=times, rho_A=rho)


def steady_average(law: SpectralLaw, vk2: float) -> float:
    """Long-time time-averaged occupation density at one momentum.

    0 when the reservoir empties the walker level completely (alpha <= 1),
    (1/2pi) / (1 + omega_minus) otherwise.
    """
    om = omega_minus(law, vk2)
    if math.isinf(om):
        return 0.0
    return (1.0 / TWO_PI) / (1.0 + om)


# s samples for the numeric residue validator.
RESIDUE_S_VALUES = (1e-3, 1e-4, 1e-5)


def steady_average_residue(law: SpectralLaw, vk2: float) -> float:
    """Numeric s -> 0 residue of the Laplace-domain occupation.

    Samples G(s) = i Sigma(k, s)/s at the fixed ladder RESIDUE_S_VALUES and
    Richardson-extrapolates.  The residue equals (1/2pi)/(1 + G(0+)), so the
    extrapolation runs on G, whose limit is the quantity in the closed form.
    A divergent G (non-decaying differences down the ladder, covering both
    power-law and logarithmic divergence) yields residue 0.
    """
    s1, s2, s3 = RESIDUE_S_VALUES
    g = [self_energy_over_s(law, vk2, s) for s in (s1, s2, s3)]
    d1 = g[1] - g[0]
    d2 = g[2] - g[1]
    if d1 <= 0 and d2 <= 0:
        # G nonincreasing toward s=0: already converged within quadrature noise
        return (1.0 / TWO_PI) / (1.0 + g[2])
    if d2 >= 0.95 * d1:
        # differences not contracting: G diverges and the residue vanishes
        return 0.0
    # contraction factor per decade gives the leading correction exponent
    ratio = d2 / d1
    q = ratio  # G(s) ~ G0 - C s^p with 10^-p = ratio
    g12 = (g[1] - q * g[0]) / (1.0 - q)
    g23 = (g[2] - q * g[1]) / (1.0 - q)
    # second stage removes the next power, s^{2p}
    q2 = q * q
    g0 = (g23 - q2 * g12) / (1.0 - q2)
    return (1.0 / TWO_PI) / (1.0 + g0)
