"""Electromagnetic 2-form fields on a periodic box.

Two sources of fields are provided: closed-form null pulses, which are exact
free Maxwell solutions, and grid states evolved by a leapfrog scheme.  The
Dirac operator is applied with second-order central differences and its
grade-3 / grade-1 parts give dF and -deltaF.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import convention
from ._slabs import map_chunks, rows_with_halo
from .algebra import GRADE_OF, clifford_product, sparse_product, theta
from .algebra import Multivector
from .errors import (GradeError, IncompatibleStatesError, ResolutionError,
                     StabilityError)

PROFILES = ("bump", "cosine-window")
DIRECTIONS = ("+z", "-z")
PROVENANCES = ("analytic", "evolved")


@dataclass(frozen=True)
class PulseSpec:
    """Longitudinally compact, transversally uniform null pulse.

    The profile is evaluated at ``s = (z - sigma*t - center_z) / half_width``
    with ``sigma = +1`` for a ``+z`` pulse, and vanishes for ``|s| >= 1``.
    """

    profile: str = "bump"
    amplitude: float = 1.0
    center_z: float = 0.0
    half_width: float = 1.0
    direction: str = "+z"
    polarization_angle: float = 0.0

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}, got {self.profile!r}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise ValueError(f"half_width must be positive, got {self.half_width!r}")
        for name in ("amplitude", "center_z", "polarization_angle"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def sigma(self) -> float:
        return 1.0 if self.direction == "+z" else -1.0

    def support(self, t: float) -> tuple[float, float]:
        """Closed interval in z outside of which the pulse vanishes at time t."""
        c = self.center_z + self.sigma * t
        return c - self.half_width, c + self.half_width

    def _pattern(self) -> np.ndarray:
        """Unit bivector du ^ p in slot order."""
        phi = math.radians(self.polarization_angle)
        c, s = math.cos(phi), math.sin(phi)
        sg = self.sigma
        return np.array([c, s, 0.0, 0.0, sg * c, sg * s])


def profile_value(profile: str, s: np.ndarray) -> np.ndarray:
    """Unit-amplitude window f(s), zero for |s| >= 1."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    if profile == "bump":
        out[inside] = np.exp(1.0 + 1.0 / (si * si - 1.0))
    elif profile == "cosine-window":
        out[inside] = np.cos(0.5 * np.pi * si) ** 2
    else:
        raise ValueError(f"unknown profile {profile!r}")
    return out


def profile_derivative(profile: str, s: np.ndarray) -> np.ndarray:
    """df/ds of the unit-amplitude window."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    if profile == "bump":
        q = si * si - 1.0
        out[inside] = np.exp(1.0 + 1.0 / q) * (-2.0 * si / (q * q))
    elif profile == "cosine-window":
        out[inside] = -0.5 * np.pi * np.sin(np.pi * si)
    else:
        raise ValueError(f"unknown profile {profile!r}")
    return out


def _pulse_on_z(spec: PulseSpec, t: float, z: np.ndarray, derivative=None) -> np.ndarray:
    """Bivector slots (6, len(z)) of the pulse, or of one partial derivative.

    ``derivative`` is None, ``"t"`` or ``"z"``.
    """
    s = (z - spec.sigma * t - spec.center_z) / spec.half_width
    if derivative is None:
        f = spec.amplitude * profile_value(spec.profile, s)
    else:
        ds = -spec.sigma if derivative == "t" else 1.0
        f = spec.amplitude * profile_derivative(spec.profile, s) * (ds / spec.half_width)
    return spec._pattern()[:, None] * f[None, :]


def eval_pulse(spec: PulseSpec, t: float, x) -> Multivector:
    """Exact pulse 2-form f(u) du ^ p at the spacetime point (t, x)."""
    z = np.array([float(x[2])])
    biv = _pulse_on_z(spec, t, z)[:, 0]
    return Multivector(convention.to_multivector(biv))


def pulse_dirac(spec: PulseSpec, t: float, x) -> Multivector:
    """theta^0 d_t F + theta^3 d_z F evaluated from the differentiated profile."""
    z = np.array([float(x[2])])
    out = np.zeros(16)
    for a, which in ((0, "t"), (3, "z")):
        d = convention.to_multivector(_pulse_on_z(spec, t, z, which)[:, 0])
        out = out + clifford_product(theta(a).coeffs, d)
    return Multivector(out)


@dataclass(frozen=True)
class DomainSpec:
    """Periodic box: [-Lx/2, Lx/2) x [-Ly/2, Ly/2) x [z_min, z_max).

    Samples sit at cell centres.
    """

    Lx: float
    Ly: float
    z_min: float
    z_max: float
    nx: int
    ny: int
    nz: int

    def __post_init__(self):
        if not (self.Lx > 0 and self.Ly > 0 and self.z_max > self.z_min):
            raise ValueError("box lengths must be positive")
        for name in ("nx", "ny", "nz"):
            if getattr(self, name) < 4:
                raise ValueError(f"{name} must be at least 4")

    @property
    def Lz(self) -> float:
        return self.z_max - self.z_min

    @property
    def spacing(self) -> tuple[float, float, float]:
        return self.Lx / self.nx, self.Ly / self.ny, self.Lz / self.nz

    @property
    def cell_volume(self) -> float:
        hx, hy, hz = self.spacing
        return hx * hy * hz

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.nz, self.ny, self.nx

    def x(self):
        return -0.5 * self.Lx + (np.arange(self.nx) + 0.5) * (self.Lx / self.nx)

    def y(self):
        return -0.5 * self.Ly + (np.arange(self.ny) + 0.5) * (self.Ly / self.ny)

    def z(self):
        return self.z_min + (np.arange(self.nz) + 0.5) * (self.Lz / self.nz)

    def contains_support(self, spec: PulseSpec, t: float) -> bool:
        lo, hi = spec.support(t)
        return self.z_min < lo and hi < self.z_max


@dataclass(frozen=True, eq=False)
class FieldState:
    """Grade-2 field on the grid at one time.

    ``biv`` holds the six bivector slots with shape (6, nz, ny, nx).  An
    analytic state remembers the pulses that generated it; an evolved state
    may carry the neighbouring time levels ``(prev, next, dt)`` used for its
    time derivative.
    """

    time: float
    biv: np.ndarray
    provenance: str = "analytic"
    pulses: tuple = ()
    levels: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        biv = np.asarray(self.biv, dtype=np.float64)
        if biv.ndim != 4 or biv.shape[0] != 6:
            raise ValueError(f"biv must have shape (6, nz, ny, nx), got {biv.shape}")
        biv.setflags(write=False)
        object.__setattr__(self, "biv", biv)

    @property
    def grid_shape(self):
        return self.biv.shape[1:]

    @property
    def E(self):
        return convention.electric(self.biv)

    @property
    def B(self):
        return convention.magnetic(self.biv)

    def multivectors(self) -> np.ndarray:
        """Samples as a (nz, ny, nx, 16) array."""
        return convention.to_multivector(self.biv)

    def sample(self, k, j, i) -> Multivector:
        return Multivector(convention.to_multivector(self.biv[:, k, j, i]))


def sample_pulse(spec: PulseSpec, domain: DomainSpec, t: float) -> np.ndarray:
    """Bivector slots of one pulse on the grid; identical to :func:`eval_pulse` pointwise."""
    line = _pulse_on_z(spec, t, domain.z())
    return np.ascontiguousarray(
        np.broadcast_to(line[:, :, None, None], (6,) + domain.shape))


def sample_pulses(pulses, domain: DomainSpec, t: float) -> FieldState:
    """Analytic state of a superposition of pulses (zero field for none)."""
    pulses = tuple(pulses)
    biv = np.zeros((6,) + domain.shape)
    for spec in pulses:
        biv += sample_pulse(spec, domain, t)
    return FieldState(t, biv, "analytic", pulses)


def static_state(biv, t=0.0) -> FieldState:
    """Time-independent analytic state from explicit bivector slots."""
    return FieldState(t, np.array(biv, dtype=np.float64), "analytic", ())


def superpose(F1: FieldState, F2: FieldState) -> FieldState:
    """Pointwise sum of two states sampled on the same grid at the same time."""
    if F1.grid_shape != F2.grid_shape:
        raise IncompatibleStatesError(
            f"grid mismatch: {F1.grid_shape} vs {F2.grid_shape}")
    if F1.time != F2.time:
        raise IncompatibleStatesError(f"time mismatch: {F1.time} vs {F2.time}")
    both_analytic = F1.provenance == F2.provenance == "analytic"
    levels = None
    if F1.levels is not None and F2.levels is not None and F1.levels[2] == F2.levels[2]:
        levels = (F1.levels[0] + F2.levels[0], F1.levels[1] + F2.levels[1], F1.levels[2])
    return FieldState(
        F1.time, F1.biv + F2.biv,
        "analytic" if both_analytic else "evolved",
        F1.pulses + F2.pulses if both_analytic else (),
        levels,
    )


# ---------------------------------------------------------------------------
# Dirac operator


def _check_grid(state: FieldState, domain: DomainSpec):
    if state.grid_shape != domain.shape:
        raise ResolutionError(
            f"state grid {state.grid_shape} does not match domain {domain.shape}")
    if min(domain.shape) < 3:
        raise ResolutionError("central differences need at least 3 points per axis")


def _time_derivative_rows(state: FieldState, domain: DomainSpec, k0, k1):
    if state.levels is not None:
        prev, nxt, dt = state.levels
        return (nxt[:, k0:k1] - prev[:, k0:k1]) / (2.0 * dt)
    if state.provenance == "analytic":
        z = domain.z()[k0:k1]
        out = np.zeros((6, k1 - k0) + domain.shape[1:])
        for spec in state.pulses:
            out += _pulse_on_z(spec, state.time, z, "t")[:, :, None, None]
        return out
    raise ValueError("evolved state carries no adjacent time levels")


def _dirac_sparse(state: FieldState, domain: DomainSpec, k0, k1) -> dict:
    """Discrete theta^a d_a F on rows k0..k1 as ``{bitmask: array}``."""
    hx, hy, hz = domain.spacing
    halo = rows_with_halo(state.biv, k0, k1, 1, axis=1)
    mid = halo[:, 1:-1]
    partials = (
        _time_derivative_rows(state, domain, k0, k1),
        (np.roll(mid, -1, axis=3) - np.roll(mid, 1, axis=3)) / (2.0 * hx),
        (np.roll(mid, -1, axis=2) - np.roll(mid, 1, axis=2)) / (2.0 * hy),
        (halo[:, 2:] - halo[:, :-2]) / (2.0 * hz),
    )
    out = {}
    for a, d in enumerate(partials):
        blades = dict(zip(convention.BIVECTOR_BLADES, d))
        for k, v in sparse_product({1 << a: 1.0}, blades).items():
            out[k] = v if k not in out else out[k] + v
    return out


def _dirac_rows(state: FieldState, domain: DomainSpec, k0, k1) -> np.ndarray:
    """Discrete theta^a d_a F on rows k0..k1, shape (rows, ny, nx, 16)."""
    out = np.zeros((k1 - k0,) + domain.shape[1:] + (16,))
    for k, v in _dirac_sparse(state, domain, k0, k1).items():
        out[..., k] = v
    return out


def dirac_fd(state: FieldState, domain: DomainSpec, workers: int = 1):
    """Finite-difference Dirac operator split by grade.

    Returns ``(dF, deltaF)`` as (nz, ny, nx, 16) arrays: the grade-3 part of
    the discrete dF-deltaF and minus its grade-1 part.
    """
    _check_grid(state, domain)
    parts = map_chunks(lambda k0, k1: _dirac_rows(state, domain, k0, k1),
                       domain.nz, workers)
    full = np.concatenate(parts, axis=0)
    dF = np.where(GRADE_OF == 3, full, 0.0)
    deltaF = np.where(GRADE_OF == 1, -full, 0.0)
    return dF, deltaF


def maxwell_residual(state: FieldState, domain: DomainSpec, workers: int = 1) -> float:
    """Grid max of the Euclidean coefficient norm of the discrete dF - deltaF."""
    _check_grid(state, domain)

    def chunk_max(k0, k1):
        total = sum(v * v for v in _dirac_sparse(state, domain, k0, k1).values())
        return float(np.sqrt(np.max(total)))

    return max(map_chunks(chunk_max, domain.nz, workers))


# ---------------------------------------------------------------------------
# leapfrog evolution


def cfl_limit(domain: DomainSpec) -> float:
    """Largest admissible time step, 1 / sqrt(sum 1/h_i^2)."""
    return 1.0 / math.sqrt(sum(1.0 / h ** 2 for h in domain.spacing))


def _ddx(f, axis, h):
    return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)


def curl(V, domain: DomainSpec):
    """Central-difference curl of a (3, nz, ny, nx) vector field."""
    hx, hy, hz = domain.spacing
    dx = lambda f: _ddx(f, 2, hx)
    dy = lambda f: _ddx(f, 1, hy)
    dz = lambda f: _ddx(f, 0, hz)
    return np.stack([
        dy(V[2]) - dz(V[1]),
        dz(V[0]) - dx(V[2]),
        dx(V[1]) - dy(V[0]),
    ])


def _synchronized_step(E, B, dt, domain):
    B = B - 0.5 * dt * curl(E, domain)
    E = E + dt * curl(B, domain)
    B = B - 0.5 * dt * curl(E, domain)
    return E, B


def evolve_leapfrog(initial: FieldState, domain: DomainSpec, dt: float, steps: int) -> FieldState:
    """Advance ``steps`` leapfrog steps of the vacuum curl equations.

    E lives on integer steps and B on half steps; B is brought back to the
    integer level with a half kick at the end.  The returned state carries
    its neighbours at +/- dt for centred time derivatives.
    """
    _check_grid(initial, domain)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    limit = cfl_limit(domain)
    if not (0 < dt <= limit * (1 + 1e-12)):
        raise StabilityError(f"dt={dt!r} outside (0, {limit!r}] required by the CFL condition")
    E = initial.E.copy()
    B = initial.B.copy()
    if steps:
        B -= 0.5 * dt * curl(E, domain)
        for n in range(steps):
            E += dt * curl(B, domain)
            if n + 1 < steps:
                B -= dt * curl(E, domain)
        B -= 0.5 * dt * curl(E, domain)
    E_next, B_next = _synchronized_step(E, B, dt, domain)
    E_prev, B_prev = _synchronized_step(E, B, -dt, domain)
    return FieldState(
        initial.time + steps * dt,
        convention.from_em(E, B),
        "evolved",
        (),
        (convention.from_em(E_prev, B_prev), convention.from_em(E_next, B_next), dt),
    )


def require_bivector(mv, what="F"):
    """Raise GradeError unless every non-bivector coefficient is exactly zero."""
    coeffs = np.asarray(getattr(mv, "coeffs", mv))
    if np.any(coeffs[..., ~convention.BIVECTOR_MASK]):
        raise GradeError(f"{what} must be a pure 2-form")
