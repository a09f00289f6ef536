"""Displacement observables, phase diagram and non-Markovianity machinery."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameterError, GridMismatchError
from .gme import TWO_PI, KTrace, evolve_volterra, steady_average
from .kernel import SpectralLaw
from .model import KGrid, WalkParams, hopping_mod2, phase_derivative_grid


@dataclass(frozen=True)
class PhaseCell:
    """One point of the displacement phase diagram."""

    u: float
    alpha: float
    mean_displacement: float

    def __post_init__(self):
        m = self.mean_displacement
        if not (-1e-9 <= m <= 1.0 + 1e-9):
            raise ValueError(f"mean displacement {m} outside [0, 1]")


@dataclass(frozen=True)
class ReducedDensity2:
    """Diagonal two-level reduced state: weight p_A on the walker manifold,
    1 - p_A on the emptied manifold."""

    p_A: float

    def __post_init__(self):
        if not (-1e-12 <= self.p_A <= 1.0 + 1e-12):
            raise ValueError(f"p_A = {self.p_A} is not a probability")


@dataclass(frozen=True)
class WitnessTrace:
    """Rate of change of the survival probability and its accumulated
    positive part (lower bound on the backflow measure)."""

    times: np.ndarray
    sigma: np.ndarray
    n_lower: float

    def __post_init__(self):
        if self.n_lower < 0:
            raise ValueError("accumulated positive part cannot be negative")


def _check_traces(traces: list[KTrace], kgrid: KGrid):
    if len(traces) != kgrid.n:
        raise GridMismatchError(f"{len(traces)} traces for a {kgrid.n}-point grid")
    for tr, k in zip(traces, kgrid.points):
        if tr.k != k:
            raise GridMismatchError(f"trace at k={tr.k} does not match grid point {k}")


def traces_over_grid(law: SpectralLaw, params: WalkParams, kgrid: KGrid,
                     times: np.ndarray) -> list[KTrace]:
    """Born traces for every grid momentum.

    The dynamics depends on k only through |v(k)|^2, so traces are solved
    once per unique modulus and mirrored onto the symmetric grid; parity of
    the results is then exact by construction.
    """
    vk2 = hopping_mod2(params, np.abs(kgrid.points))
    uniq, inverse = np.unique(vk2, return_inverse=True)
    solved = [evolve_volterra(law, float(v2), times) for v2 in uniq]
    return [KTrace(k=float(k), times=solved[i].times, rho_A=solved[i].rho_A)
            for k, i in zip(kgrid.points, inverse)]


def mean_displacement(params: WalkParams, traces: list[KTrace], kgrid: KGrid,
                      t_index: int) -> float:
    """Zone integral of the phase derivative against the reservoir density."""
    _check_traces(traces, kgrid)
    dphi = phase_derivative_grid(params, kgrid.points)
    res = np.array([1.0 / TWO_PI - tr.rho_A[t_index] for tr in traces])
    return float(np.sum(dphi * res) * kgrid.spacing)


def mean_displacement_series(params: WalkParams, traces: list[KTrace],
                             kgrid: KGrid) -> np.ndarray:
    """Displacement at every time of the traces."""
    _check_traces(traces, kgrid)
    dphi = phase_derivative_grid(params, kgrid.points)
    res = np.stack([1.0 / TWO_PI - tr.rho_A for tr in traces])  # (n_k, n_t)
    return (dphi @ res) * kgrid.spacing


def mean_displacement_longtime(params: WalkParams, law: SpectralLaw,
                               kgrid: KGrid) -> float:
    """Long-time time-averaged displacement from the steady occupation.

    Equals the winding number exactly whenever the walker empties completely
    (alpha <= 1); otherwise a non-quantized zone integral.
    """
    if params.degenerate:
        raise DegenerateParameterError("displacement undefined at |u| = 1")
    dphi = phase_derivative_grid(params, kgrid.points)
    vk2 = hopping_mod2(params, np.abs(kgrid.points))
    rho = np.array([steady_average(law, float(v2)) for v2 in vk2])
    return float(np.sum(dphi * (1.0 / TWO_PI - rho)) * kgrid.spacing)


def phase_diagram(u_values: np.ndarray, alpha_values: np.ndarray,
                  law_template: SpectralLaw, kgrid: KGrid) -> list[PhaseCell]:
    """Displacement over a (u, alpha) lattice, row-major in u then alpha."""
    cells = []
    for u in u_values:
        params = WalkParams(u=float(u))
        for alpha in alpha_values:
            law = SpectralLaw(alpha=float(alpha), j_alpha=law_template.j_alpha,
                              delta=law_template.delta)
            m = mean_displacement_longtime(params, law, kgrid)
            cells.append(PhaseCell(u=float(u), alpha=float(alpha),
                                   mean_displacement=m))
    return cells


def survival_probability(traces: list[KTrace], kgrid: KGrid, t_index: int) -> float:
    """Total walker probability p_A(t) as a zone integral of the density."""
    _check_traces(traces, kgrid)
    rho = np.array([tr.rho_A[t_index] for tr in traces])
    return float(np.sum(rho) * kgrid.spacing)


def survival_series(traces: list[KTrace], kgrid: KGrid) -> np.ndarray:
    """p_A at every time of the traces."""
    _check_traces(traces, kgrid)
    rho = np.stack([tr.rho_A for tr in traces])
    return rho.sum(axis=0) * kgrid.spacing


def trace_distance(r1: ReducedDensity2, r2: ReducedDensity2) -> float:
    """Trace distance of two diagonal two-level states: |p_A,1 - p_A,2|."""
    return abs(r1.p_A - r2.p_A)


def witness(p_series: np.ndarray, times: np.ndarray) -> WitnessTrace:
    """Backflow witness sigma = dp_A/dt and its accumulated positive part.

    sigma comes from central differences (one-sided at the ends), so the
    witness stays independent of the solver that produced p_A.  The positive
    part is integrated by the trapezoidal rule restricted to sigma > 0.
    """
    p = np.asarray(p_series, dtype=float)
    times = np.asarray(times, dtype=float)
    if p.shape != times.shape or p.ndim != 1 or len(p) < 3:
        raise ValueError("need matching 1-d series with at least 3 samples")
    h = times[1] - times[0]
    if not np.allclose(np.diff(times), h, rtol=0, atol=1e-12 * max(1.0, h)):
        raise ValueError("witness requires a uniform time grid")
    sigma = np.gradient(p, h)
    pos = np.clip(sigma, 0.0, None)
    n_lower = float(np.trapezoid(pos, dx=h))
    return WitnessTrace(times=times, sigma=sigma, n_lower=n_lower)


def survival_from_law(law: SpectralLaw, params: WalkParams, kgrid: KGrid,
                      times: np.ndarray) -> np.ndarray:
    """Convenience pipeline: Born traces over the grid, then p_A(t)."""
    traces = traces_over_grid(law, params, kgrid, times)
    return survival_series(traces, kgrid)
