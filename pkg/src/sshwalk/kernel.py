"""Memory kernel and self-energy of the reservoir coupling.

The reservoir is characterized by a hard-cutoff power-law spectral density

    J(k, eps) = J_alpha |v(k)|^2 eps^alpha,   0 <= eps <= Delta,

and enters the reduced dynamics through two equivalent objects:

* the time-domain memory kernel  K(t) = 2 * integral_0^Delta J(k,eps) cos(eps t) deps,
  which drives the convolution term of the master equation, and
* its Laplace image  Sigma(k, s) = -2i * integral J(k,eps) s / (s^2 + eps^2) deps,
  whose s -> 0 behavior fixes the long-time average.

All integrals are done by adaptive quadrature; oscillatory regimes
(t * Delta large) switch to a Clenshaw-Curtis method with an explicit
cosine weight, which integrates the oscillation analytically per panel.
Closed forms at integer exponents exist but are reserved for tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

# Above this phase Delta * t, plain adaptive quadrature of the cosine moment
# degrades; switch to the oscillatory-weight rule.
_OSCILLATORY_PHASE = 20.0

# Gauss-Legendre panel rule used for vectorized kernel tabulation: the panel
# width is chosen so the cosine phase advances at most _PANEL_PHASE per panel.
_PANEL_PHASE = 2.0
_PANEL_NODES = 8


@dataclass(frozen=True)
class SpectralLaw:
    """Power-law reservoir spectral density with a sharp bandwidth cutoff.

    alpha: spectral exponent (>= 0); sub-Ohmic below 1, Ohmic at 1,
    super-Ohmic above.  j_alpha: dimensionful prefactor (> 0).  delta:
    bandwidth cutoff (> 0).  The full density carries an additional
    |v(k)|^2 factor supplied by the caller.
    """

    alpha: float
    j_alpha: float
    delta: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"spectral exponent must be nonnegative, got {self.alpha}")
        if self.j_alpha <= 0:
            raise ValueError(f"spectral prefactor must be positive, got {self.j_alpha}")
        if self.delta <= 0:
            raise ValueError(f"bandwidth must be positive, got {self.delta}")

    def density(self, vk2: float, eps) -> np.ndarray:
        """J(k, eps) evaluated on an array of energies."""
        eps = np.asarray(eps, dtype=float)
        inside = (eps >= 0.0) & (eps <= self.delta)
        with np.errstate(invalid="ignore"):
            vals = self.j_alpha * vk2 * np.where(inside, eps, 0.0) ** self.alpha
        return np.where(inside, vals, 0.0)


@dataclass(frozen=True)
class SelfEnergyData:
    """s -> 0 data of the self-energy at one momentum.

    omega_plus = K(0); omega_minus = 2 J_a |v|^2 Delta^(a-1)/(a-1) when the
    defining integral converges (a > 1) and +inf otherwise.  i_sigma_prime is
    the product i * Sigma'(k) = lim_{s->0} i Sigma(k,s)/s, which equals
    omega_minus; its divergence for a <= 1 is what empties the walker level.
    """

    omega_plus: float
    omega_minus: float

    @property
    def i_sigma_prime(self) -> float:
        return self.omega_minus

    @property
    def decays_completely(self) -> bool:
        return math.isinf(self.omega_minus)


def omega_plus(law: SpectralLaw, vk2: float) -> float:
    """2 J_a |v|^2 Delta^(a+1)/(a+1); equals the kernel at t = 0."""
    return 2.0 * law.j_alpha * vk2 * law.delta ** (law.alpha + 1.0) / (law.alpha + 1.0)


def omega_minus(law: SpectralLaw, vk2: float) -> float:
    """2 J_a |v|^2 Delta^(a-1)/(a-1) for a > 1; +inf for a <= 1."""
    if law.alpha <= 1.0:
        return math.inf
    return 2.0 * law.j_alpha * vk2 * law.delta ** (law.alpha - 1.0) / (law.alpha - 1.0)


def sigma_prime(law: SpectralLaw, vk2: float) -> SelfEnergyData:
    """Collect the s -> 0 self-energy data for one momentum."""
    return SelfEnergyData(omega_plus=omega_plus(law, vk2), omega_minus=omega_minus(law, vk2))


def memory_kernel(law: SpectralLaw, vk2: float, t: float) -> float:
    """Memory kernel K(t) = 2 * integral_0^Delta J(k,eps) cos(eps t) deps.

    K(0) equals omega_plus exactly.  For t * Delta beyond the oscillatory
    threshold the cosine moment is evaluated with quadpack's oscillatory
    (cosine-weight) rule.
    """
    if t < 0:
        raise ValueError("kernel is defined for t >= 0")
    pref = 2.0 * law.j_alpha * vk2
    if t == 0.0:
        return omega_plus(law, vk2)
    a = law.alpha
    if t * law.delta <= _OSCILLATORY_PHASE:
        val, _ = quad(lambda e: e**a * math.cos(e * t), 0.0, law.delta,
                      epsabs=1e-12, epsrel=1e-10, limit=200)
    else:
        val, _ = quad(lambda e: e**a, 0.0, law.delta, weight="cos", wvar=t,
                      epsabs=1e-12, epsrel=1e-10, limit=500)
    return pref * val


def _gl_panels(delta: float, t_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Panelized Gauss-Legendre nodes/weights on [0, delta].

    Panel width keeps the phase advance per panel below _PANEL_PHASE at the
    largest time, so the fixed-order rule stays accurate for every t in the
    grid.
    """
    n_panels = max(8, int(math.ceil(delta * max(t_max, 1e-30) / _PANEL_PHASE)))
    x, w = np.polynomial.legendre.leggauss(_PANEL_NODES)
    edges = np.linspace(0.0, delta, n_panels + 1)
    # grade the first panel geometrically toward eps = 0, where fractional
    # exponents have an endpoint singularity in the derivatives
    graded = edges[1] * 0.5 ** np.arange(12, 0, -1)
    edges = np.concatenate(([0.0], graded, edges[1:]))
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def memory_kernel_grid(law: SpectralLaw, vk2: float, times: np.ndarray) -> np.ndarray:
    """Tabulate K on a time grid, vectorized.

    Same integral as memory_kernel.  Integer exponents use the elementary
    antiderivative (Taylor series below phase 10, boundary terms above);
    other exponents fall back to a phase-bounded Gauss-Legendre panel rule
    shared by all grid times.  The |v(k)|^2 and J_alpha prefactors scale
    out, so the eps-moment table is cached per (alpha, delta, time grid) and
    reused across momenta.
    """
    times = np.asarray(times, dtype=float)
    base = _kernel_moment_cached(law.alpha, law.delta, times)
    return 2.0 * law.j_alpha * vk2 * base


_MOMENT_CACHE: dict = {}

# switch from the Taylor series of the cosine moment to its boundary-term
# form at this phase delta * t
_SERIES_PHASE = 10.0


def _integer_moment(m: int, delta: float, times: np.ndarray) -> np.ndarray:
    """integral_0^delta eps^m cos(eps t) deps for integer m in {0, 1, 2, 3}."""
    t = np.asarray(times, dtype=float)
    out = np.empty_like(t)
    small = delta * t <= _SERIES_PHASE

    # Taylor series: delta^(m+1) * sum_n (-1)^n (delta t)^(2n) / ((2n)! (m+2n+1))
    ts = t[small]
    z = (delta * ts) ** 2
    p = np.ones_like(z)
    s = np.full_like(z, 1.0 / (m + 1))
    for n in range(1, 40):
        p *= -z / ((2 * n - 1) * (2 * n))
        s += p / (m + 2 * n + 1)
        if np.all(np.abs(p) < 1e-18):
            break
    out[small] = delta ** (m + 1) * s

    tl = t[~small]
    x = delta * tl
    sn, cs = np.sin(x), np.cos(x)
    if m == 0:
        val = sn / tl
    elif m == 1:
        val = (cs - 1.0) / tl**2 + delta * sn / tl
    elif m == 2:
        val = (delta**2 / tl - 2.0 / tl**3) * sn + 2.0 * delta * cs / tl**2
    else:
        val = ((delta**3 / tl - 6.0 * delta / tl**3) * sn
               + (3.0 * delta**2 / tl**2 - 6.0 / tl**4) * cs + 6.0 / tl**4)
    out[~small] = val
    return out


def _kernel_moment_cached(alpha: float, delta: float, times: np.ndarray) -> np.ndarray:
    key = (alpha, delta, times.shape[0], float(times[0]), float(times[-1]))
    hit = _MOMENT_CACHE.get(key)
    if hit is not None and np.array_equal(hit[0], times):
        return hit[1]
    if alpha == int(alpha) and int(alpha) in (0, 1, 2, 3):
        out = _integer_moment(int(alpha), delta, times)
    else:
        nodes, weights = _gl_panels(delta, float(np.max(times)))
        wf = weights * nodes**alpha
        out = np.empty_like(times)
        block = max(1, int(2e6 // max(len(nodes), 1)))
        for i in range(0, len(times), block):
            chunk = times[i : i + block]
            out[i : i + block] = wf @ np.cos(np.outer(nodes, chunk))
    if len(_MOMENT_CACHE) > 8:
        _MOMENT_CACHE.clear()
    _MOMENT_CACHE[key] = (times.copy(), out)
    return out


def discrete_kernel_grid(eps: np.ndarray, weights: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Kernel of a finite level set: K(t) = 2 sum_j w_j cos(eps_j t)."""
    eps = np.asarray(eps, dtype=float)
    weights = np.asarray(weights, dtype=float)
    times = np.asarray(times, dtype=float)
    return 2.0 * (weights @ np.cos(np.outer(eps, times)))


def self_energy_laplace(law: SpectralLaw, vk2: float, s: complex) -> complex:
    """Laplace-domain self-energy -2i * integral J(k,eps) s/(s^2+eps^2) deps.

    Valid for Re(s) > 0, and on the imaginary axis as long as s^2 stays off
    the branch cut [-Delta^2, 0].  When s sits near the imaginary axis the
    Lorentzian factor peaks at eps = |Im s|; the quadrature range is split
    there.  A band of half-width 1e-6 around the branch points s = +-i Delta
    is excluded.
    """
    s = complex(s)
    if s == 0:
        raise ValueError("self-energy Laplace transform undefined at s = 0")
    if s.real < 0:
        raise ValueError("self-energy evaluated on the principal sheet requires Re(s) >= 0")
    y = abs(s.imag)
    if s.real == 0.0:
        if y <= law.delta:
            raise ValueError(
                f"s = {s} touches the branch cut: s^2 in [-Delta^2, 0]"
            )
        if abs(y - law.delta) < 1e-6:
            raise ValueError(f"s = {s} within the excluded band around the branch point")

    a = law.alpha
    pts = [y] if 0.0 < y < law.delta else None

    def f_re(e: float) -> float:
        return (e**a * (s / (s * s + e * e))).real

    def f_im(e: float) -> float:
        return (e**a * (s / (s * s + e * e))).imag

    kw = dict(epsabs=1e-14, epsrel=1e-11, limit=400)
    re, _ = quad(f_re, 0.0, law.delta, points=pts, **kw)
    im, _ = quad(f_im, 0.0, law.delta, points=pts, **kw)
    return -2.0j * law.j_alpha * vk2 * (re + 1.0j * im)


def self_energy_over_s(law: SpectralLaw, vk2: float, s: float) -> float:
    """i * Sigma(k, s) / s = 2 * integral J(k,eps) / (s^2 + eps^2) deps, for real s > 0.

    This ratio is real and positive; its s -> 0 limit (when finite) is
    omega_minus and controls the residue at s = 0.
    """
    if s <= 0:
        raise ValueError("requires real s > 0")
    a = law.alpha

    def f(e: float) -> float:
        return e**a / (s * s + e * e)

    # resolve the scale-s shoulder of the Lorentzian near eps = 0
    pts = [min(s, law.delta)] if s < law.delta else None
    val, _ = quad(f, 0.0, law.delta, points=pts, epsabs=1e-14, epsrel=1e-12, limit=400)
    return 2.0 * law.j_alpha * vk2 * val
