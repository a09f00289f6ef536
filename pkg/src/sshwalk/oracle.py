"""Brute-force exact references for the approximate machinery.

Three independent oracles, all dense Hermitian eigensolves in the
single-excitation sector:

* the reduced star model at fixed momentum (walker level + N reservoir
  levels), against which the Born master equation is measured;
* the full three-band model including the intermediate site, against which
  the Schrieffer-Wolff reduction is measured;
* a finite real-space chain with open boundaries, against which the
  momentum-space displacement formula is measured.

Dimensions stay small by construction, so exactness and simplicity win over
scalability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryReachedError, DegenerateSpectrumError, DimensionBudgetError
from .gme import TWO_PI, KTrace
from .model import WalkParams, hopping_amplitude
from .swt import DiscreteReservoir, ReducedModel

# Dense eigensolve budget (matrix dimension).
DIM_BUDGET = 4000


@dataclass(frozen=True)
class ExactSpectrum:
    """Eigenvalues and walker overlaps of a single-excitation Hamiltonian.

    weights[n] = |<walker|n>|^2; they are nonnegative and sum to 1, and the
    walker amplitude is sum_n weights[n] * exp(-i E_n t).
    """

    energies: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if e.shape != w.shape or e.ndim != 1:
            raise ValueError("energies and weights must be 1-d arrays of equal length")
        if np.any(w < -1e-12):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12 * len(w):
            raise ValueError(f"weights sum to {w.sum():.15f}, not 1 (completeness broken)")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))

    def amplitude(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        return np.exp(-1.0j * np.outer(times, self.energies)) @ self.weights.astype(complex)

    def occupation_trace(self, times: np.ndarray, k: float = 0.0) -> KTrace:
        psi = self.amplitude(times)
        return KTrace(k=k, times=np.asarray(times, dtype=float),
                      rho_A=np.abs(psi) ** 2 / TWO_PI)


def _check_budget(dim: int):
    if dim > DIM_BUDGET:
        raise DimensionBudgetError(f"dimension {dim} exceeds dense budget {DIM_BUDGET}")


def spectrum_reduced(model: ReducedModel, vk2: float,
                     include_cross: bool = False) -> ExactSpectrum:
    """Spectral decomposition of the reduced star model at one momentum.

    Only |v(k)| enters: the common phase of the couplings is a gauge on the
    walker level.  include_cross adds the induced level-level couplings,
    quantifying how much their default neglect costs.
    """
    n = model.n_levels
    _check_budget(n + 1)
    h = np.zeros((n + 1, n + 1), dtype=complex)
    h[0, 0] = model.eps_A_tilde
    eta = np.sqrt(vk2) * model.eta_base
    h[0, 1:] = eta
    h[1:, 0] = np.conj(eta)
    idx = np.arange(1, n + 1)
    h[idx, idx] = model.eps_tilde
    if include_cross:
        h[1:, 1:] += model.t_cross
    energies, vecs = np.linalg.eigh(h)
    return ExactSpectrum(energies=energies, weights=np.abs(vecs[0, :]) ** 2)


def exact_evolve_reduced(model: ReducedModel, vk2: float, times: np.ndarray,
                         k: float = 0.0, include_cross: bool = False) -> KTrace:
    """Exact occupation of the reduced model, rho_A = |psi_A|^2 / 2pi."""
    return spectrum_reduced(model, vk2, include_cross).occupation_trace(times, k=k)


def exact_longtime_average(spectrum: ExactSpectrum) -> float:
    """Infinite-time average of the exact occupation density.

    For a nondegenerate spectrum the oscillating cross terms average away and
    the limit is (1/2pi) * sum_n weights[n]^2.
    """
    e = np.sort(spectrum.energies)
    if len(e) > 1 and float(np.min(np.diff(e))) < 1e-10:
        raise DegenerateSpectrumError("spectrum has a gap below 1e-10; average formula invalid")
    return float(np.sum(spectrum.weights**2)) / TWO_PI


def spectrum_full(params: WalkParams, reservoir: DiscreteReservoir,
                  k: float) -> ExactSpectrum:
    """Spectral decomposition of the un-reduced three-band model at momentum k."""
    n = reservoir.n_levels
    _check_budget(n + 2)
    h = np.zeros((n + 2, n + 2), dtype=complex)
    vk = hopping_amplitude(params, k)
    h[0, 0] = params.eps_A
    h[1, 1] = params.eps_A + params.omega
    h[0, 1] = vk
    h[1, 0] = np.conj(vk)
    idx = np.arange(2, n + 2)
    h[idx, idx] = reservoir.eps
    h[idx, 1] = reservoir.g
    h[1, idx] = np.conj(reservoir.g)
    energies, vecs = np.linalg.eigh(h)
    return ExactSpectrum(energies=energies, weights=np.abs(vecs[0, :]) ** 2)


def exact_evolve_full(params: WalkParams, reservoir: DiscreteReservoir,
                      k: float, times: np.ndarray) -> KTrace:
    """Exact occupation of the three-band model, no reduction performed."""
    return spectrum_full(params, reservoir, k).occupation_trace(times, k=k)


@dataclass(frozen=True)
class ChainModel:
    """Open finite chain with one walker site, one intermediate site and a
    replicated reservoir per unit cell.  m_cells must be odd so the initial
    cell sits at the center."""

    m_cells: int
    params: WalkParams
    reservoir: DiscreteReservoir

    def __post_init__(self):
        if self.m_cells < 3 or self.m_cells % 2 == 0:
            raise ValueError("need an odd number of cells >= 3")

    @property
    def cell_dim(self) -> int:
        return 2 + self.reservoir.n_levels

    @property
    def dim(self) -> int:
        return self.m_cells * self.cell_dim


@dataclass(frozen=True)
class ChainTrace:
    """Real-space evolution record: per-cell reservoir occupations and the
    displacement they carry."""

    times: np.ndarray
    cells: np.ndarray          # cell indices m, centered at 0
    rho_res: np.ndarray        # shape (n_times, m_cells)
    mean_m: np.ndarray
    boundary_occ: np.ndarray   # total probability in the two edge cells

    def boundary_time(self, tol: float = 1e-6) -> float:
        """First time the edge cells hold more than tol probability."""
        bad = np.nonzero(self.boundary_occ > tol)[0]
        return float(self.times[bad[0]]) if len(bad) else float("inf")


def exact_evolve_chain(chain: ChainModel, times: np.ndarray,
                       boundary_tol: float = 1e-6, strict: bool = True) -> ChainTrace:
    """Evolve |walker, center cell> on the open chain and record displacement.

    Returns per-cell reservoir occupations, the mean displacement
    sum_m m * rho_res[m], and the boundary occupation.  With strict=True a
    BoundaryReachedError (carrying the safe horizon) is raised if any
    requested time falls past the wavefront's arrival at the edges.
    """
    _check_budget(chain.dim)
    times = np.asarray(times, dtype=float)
    M = chain.m_cells
    cd = chain.cell_dim
    n = chain.reservoir.n_levels
    p = chain.params

    h = np.zeros((chain.dim, chain.dim), dtype=complex)
    for c in range(M):
        o = c * cd
        h[o, o] = p.eps_A
        h[o + 1, o + 1] = p.eps_A + p.omega
        idx = o + 2 + np.arange(n)
        h[idx, idx] = chain.reservoir.eps
        h[idx, o + 1] = chain.reservoir.g
        h[o + 1, idx] = np.conj(chain.reservoir.g)
        h[o, o + 1] = p.v          # intracell walker-intermediate hop
        h[o + 1, o] = p.v
        if c + 1 < M:
            o2 = (c + 1) * cd
            h[o, o2 + 1] = p.v * p.u   # intercell hop to the next intermediate site
            h[o2 + 1, o] = p.v * p.u
    energies, vecs = np.linalg.eigh(h)

    center = (M - 1) // 2
    amp0 = np.conj(vecs[center * cd, :])          # <n|psi(0)>
    phases = np.exp(-1.0j * np.outer(times, energies))
    # <site|e^{-iHt}|psi0> = sum_n vecs[site, n] e^{-iE_n t} conj(vecs[site0, n])
    psi = (phases * amp0[None, :]) @ vecs.T
    prob = np.abs(psi) ** 2                       # (n_times, dim)

    prob_cells = prob.reshape(len(times), M, cd)
    rho_res = prob_cells[:, :, 1:].sum(axis=2)    # everything but the walker site
    cells = np.arange(M) - center
    mean_m = rho_res @ cells.astype(float)
    boundary = prob_cells[:, 0, :].sum(axis=1) + prob_cells[:, -1, :].sum(axis=1)

    trace = ChainTrace(times=times, cells=cells, rho_res=rho_res,
                       mean_m=mean_m, boundary_occ=boundary)
    if strict:
        t_safe = trace.boundary_time(boundary_tol)
        if times[-1] >= t_safe:
            raise BoundaryReachedError(
                f"wavefront reached the open boundary at t = {t_safe:.4g}; "
                "results past that time are untrusted", t_safe=t_safe)
    return trace


def displacement_kspace_discrete(params: WalkParams, reservoir: DiscreteReservoir,
                                 kgrid, times: np.ndarray) -> np.ndarray:
    """Momentum-space displacement of the same discrete model the chain uses.

    Evolves the three-band model exactly at each grid momentum and applies
    the zone-integral displacement formula, so the only thing compared
    against the chain is the real-space/momentum-space identity itself.
    Momenta are deduplicated by |k| (the occupation is parity even).
    """
    from .model import phase_derivative_grid

    dphi = phase_derivative_grid(params, kgrid.points)
    absk = np.abs(kgrid.points)
    uniq, inverse = np.unique(absk, return_inverse=True)
    rho = np.empty((len(uniq), len(times)))
    for i, kk in enumerate(uniq):
        rho[i] = exact_evolve_full(params, reservoir, kk, times).rho_A
    rho_full = rho[inverse, :]                     # (n_k, n_times)
    res = 1.0 / TWO_PI - rho_full
    return (dphi @ res) * kgrid.spacing
