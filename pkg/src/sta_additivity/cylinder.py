"""Slice integrals over a periodic box and the additivity bookkeeping.

The spacetime region is the box times [t_start, t_end].  Its lateral
boundary is empty because the box is periodic, so energy-momentum balance
between two time slices reduces to P^a(t2) - P^a(t1) = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._slabs import map_chunks
from .energy import cross_rows, density_rows, divergence_residual
from .errors import SetupError
from .fields import (DomainSpec, FieldState, cfl_limit, evolve_leapfrog,
                     maxwell_residual, sample_pulses, superpose)

__all__ = [
    "neumaier_sum", "neumaier_rows", "integrate_slice", "CylinderSpec",
    "SliceReport", "AnalyticScenario", "EvolvedScenario", "additivity_report",
    "flux_balance", "Verdict", "verdict", "overlap_time",
]

_BLOCK = 64


def _neumaier(x):
    """Compensated sum along the last axis: returns (sum, correction)."""
    s = np.zeros(x.shape[:-1])
    c = np.zeros(x.shape[:-1])
    for j in range(x.shape[-1]):
        v = x[..., j]
        t = s + v
        c += np.where(np.abs(s) >= np.abs(v), (s - t) + v, (v - t) + s)
        s = t
    return s, c


def neumaier_sum(values) -> float:
    """Kahan-Neumaier sum of a 1-D sequence in index order."""
    s, c = _neumaier(np.asarray(values, dtype=np.float64)[None, :])
    return float(s[0] + c[0])


def neumaier_rows(a) -> np.ndarray:
    """Compensated sum of each row of a 2-D array.

    Rows are cut into blocks of 64 entries; block sums and their corrections
    are then accumulated separately.  The traversal order is fixed, and each
    row is reduced independently of the others.
    """
    a = np.asarray(a, dtype=np.float64)
    rows, m = a.shape
    pad = (-m) % _BLOCK
    if pad:
        a = np.concatenate([a, np.zeros((rows, pad))], axis=1)
    blocks = a.reshape(rows, -1, _BLOCK)
    s, c = _neumaier(blocks)
    s2, c2 = _neumaier(s)
    cs, cc = _neumaier(c)
    return s2 + (c2 + (cs + cc))


def _combine(slab_sums, domain: DomainSpec) -> float:
    return neumaier_sum(slab_sums) * domain.cell_volume


def integrate_slice(density_grid, domain: DomainSpec, workers: int = 1) -> float:
    """Midpoint-rule integral of a scalar density over the periodic box."""
    grid = np.asarray(density_grid, dtype=np.float64)
    if grid.shape != domain.shape:
        raise ValueError(f"density grid {grid.shape} does not match domain {domain.shape}")
    sums = map_chunks(
        lambda k0, k1: neumaier_rows(grid[k0:k1].reshape(k1 - k0, -1)),
        domain.nz, workers)
    return _combine(np.concatenate(sums), domain)


# ---------------------------------------------------------------------------
# scenarios


class AnalyticScenario:
    """Superposition of closed-form pulses, sampled exactly at any time."""

    provenance = "analytic"

    def __init__(self, pulses):
        self.pulses = tuple(pulses)

    def state_at(self, t: float, domain: DomainSpec) -> FieldState:
        return sample_pulses(self.pulses, domain, t)

    def time_levels(self, state: FieldState, domain: DomainSpec):
        # probe step tied to the grid so the divergence check stays second order
        dt = 0.5 * domain.spacing[2]
        return [self.state_at(state.time - dt, domain), state,
                self.state_at(state.time + dt, domain)]

    def combined(self, other):
        return AnalyticScenario(self.pulses + other.pulses)


class EvolvedScenario:
    """Pulses used as Cauchy data at ``t_start`` and advanced by leapfrog.

    ``state_at`` must be called with non-decreasing times; the scheme steps
    forward from the last returned state.
    """

    provenance = "evolved"

    def __init__(self, pulses, t_start: float = 0.0, dt_cfl: float = 0.5):
        if not 0 < dt_cfl <= 1:
            raise ValueError("dt_cfl must lie in (0, 1]")
        self.pulses = tuple(pulses)
        self.t_start = t_start
        self.dt_cfl = dt_cfl
        self._current = None

    def state_at(self, t: float, domain: DomainSpec) -> FieldState:
        dt_max = self.dt_cfl * cfl_limit(domain)
        if self._current is None:
            initial = sample_pulses(self.pulses, domain, self.t_start)
            self._current = evolve_leapfrog(initial, domain, dt_max, 0)
        span = t - self._current.time
        if span < 0:
            raise ValueError("evolved scenarios only move forward in time")
        if span > 0:
            steps = max(1, math.ceil(span / dt_max - 1e-9))
            self._current = evolve_leapfrog(self._current, domain, span / steps, steps)
        return self._current

    def time_levels(self, state: FieldState, domain: DomainSpec):
        prev, nxt, dt = state.levels
        return [FieldState(state.time - dt, prev, "evolved"), state,
                FieldState(state.time + dt, nxt, "evolved")]

    def combined(self, other):
        return EvolvedScenario(self.pulses + other.pulses, self.t_start, self.dt_cfl)


def overlap_time(pulse_a, pulse_b) -> float:
    """Time at which the centres of two approaching counter-propagating pulses meet."""
    if pulse_a.sigma == pulse_b.sigma:
        raise SetupError("pulses travel in the same direction and never meet")
    right, left = (pulse_a, pulse_b) if pulse_a.sigma > 0 else (pulse_b, pulse_a)
    gap = left.center_z - right.center_z
    if gap <= 0:
        raise SetupError("pulses are moving apart")
    return 0.5 * gap


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CylinderSpec:
    t_start: float
    t_end: float
    slice_times: tuple
    domain: DomainSpec

    def __post_init__(self):
        times = tuple(float(t) for t in self.slice_times)
        object.__setattr__(self, "slice_times", times)
        if not self.t_start < self.t_end:
            raise ValueError("t_start must precede t_end")
        if list(times) != sorted(times):
            raise ValueError("slice times must be ordered")
        if any(t < self.t_start or t > self.t_end for t in times):
            raise ValueError("slice times must lie in [t_start, t_end]")


@dataclass(frozen=True)
class SliceReport:
    t: float
    P: tuple
    P1: tuple
    P2: tuple
    K: tuple
    K_direct: tuple
    maxwell_residual: float
    divergence_residual: float
    provenance: str = field(default="analytic", compare=False)

    def __post_init__(self):
        values = (self.t, *self.P, *self.P1, *self.P2, *self.K, *self.K_direct,
                  self.maxwell_residual, self.divergence_residual)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"non-finite entry in slice report at t={self.t}")


def _slab_densities(s1, s2, s, k0, k1):
    """Per-row sums of T^{a0} for F1, F2, F and of the Clifford-route K^{a0}."""
    rows = k1 - k0

    def reduce(dens):
        return np.stack([neumaier_rows(d.reshape(rows, -1)) for d in dens])

    return (reduce(density_rows(s1.biv[:, k0:k1])),
            reduce(density_rows(s2.biv[:, k0:k1])),
            reduce(density_rows(s.biv[:, k0:k1])),
            reduce(cross_rows(s1.biv[:, k0:k1], s2.biv[:, k0:k1])))


def _check_hypotheses(pulses1, pulses2, spec: CylinderSpec):
    for t in spec.slice_times + (spec.t_start,):
        for p in pulses1 + pulses2:
            if not spec.domain.contains_support(p, t):
                raise SetupError(f"pulse support leaves the box at t={t}")
    for p in pulses1:
        for q in pulses2:
            lo1, hi1 = p.support(spec.t_start)
            lo2, hi2 = q.support(spec.t_start)
            if lo1 < hi2 and lo2 < hi1:
                raise SetupError(f"pulse supports overlap at t={spec.t_start}")


def additivity_report(F1, F2, spec: CylinderSpec, workers: int = 1) -> list[SliceReport]:
    """P^a of F1 + F2, of each field alone, and the interference integral per slice.

    ``F1`` and ``F2`` are scenarios (``F2`` may be None for a zero field).
    The interference integral is reported twice: as P - P1 - P2 and as the
    direct integral of the Clifford cross density.
    """
    domain = spec.domain
    if F2 is None:
        F2 = type(F1)(()) if isinstance(F1, AnalyticScenario) else \
            EvolvedScenario((), F1.t_start, F1.dt_cfl)
    _check_hypotheses(F1.pulses, F2.pulses, spec)
    total = F1.combined(F2)
    reports = []
    for t in spec.slice_times:
        s1 = F1.state_at(t, domain)
        s2 = F2.state_at(t, domain)
        s = superpose(s1, s2) if isinstance(total, AnalyticScenario) else total.state_at(t, domain)
        parts = map_chunks(lambda k0, k1: _slab_densities(s1, s2, s, k0, k1),
                           domain.nz, workers)
        integrals = [
            tuple(_combine(np.concatenate([p[i][a] for p in parts]), domain) for a in range(4))
            for i in range(4)
        ]
        P1, P2, P, K_direct = integrals
        reports.append(SliceReport(
            t=t, P=P, P1=P1, P2=P2,
            K=tuple(P[a] - P1[a] - P2[a] for a in range(4)),
            K_direct=K_direct,
            maxwell_residual=maxwell_residual(s, domain, workers),
            divergence_residual=divergence_residual(total.time_levels(s, domain), domain, workers),
            provenance=s.provenance,
        ))
    return reports


def flux_balance(report1: SliceReport, report2: SliceReport, lateral_flux=(0.0, 0.0, 0.0, 0.0)):
    """P^a(t2) - P^a(t1) + lateral flux; zero for exact conservation."""
    return np.array([report2.P[a] - report1.P[a] + lateral_flux[a] for a in range(4)])


@dataclass(frozen=True)
class Verdict:
    additivity: float      # max_a,t |K^a| / P^0
    route_gap: float       # max_a,t |K^a - K_direct^a|, absolute
    drift: float           # max_a,t |P^a(t) - P^a(t0)| / P^0(t0)
    additivity_tol: float
    conservation_tol: float
    route_tol: float

    @property
    def additive(self) -> bool:
        return self.additivity <= self.additivity_tol and self.route_gap <= self.route_tol

    @property
    def conserved(self) -> bool:
        return self.drift <= self.conservation_tol

    @property
    def passed(self) -> bool:
        return self.additive and self.conserved


def verdict(reports, additivity_tol, conservation_tol, route_tol=1e-12) -> Verdict:
    """Summarize a report list against the additivity and conservation tolerances."""
    first = reports[0]
    scale = first.P[0] if first.P[0] > 0 else 1.0
    additivity = max(abs(r.K[a]) / (r.P[0] if r.P[0] > 0 else 1.0)
                     for r in reports for a in range(4))
    gap = max(abs(r.K[a] - r.K_direct[a]) for r in reports for a in range(4))
    drift = max(float(np.max(np.abs(flux_balance(first, r)))) for r in reports) / scale
    return Verdict(additivity, gap, drift, additivity_tol, conservation_tol, route_tol)
