"""Riesz energy-momentum densities and the interference term.

Pointwise functions take grade-2 multivectors (``Multivector`` or arrays of
shape (..., 16)).  Grid functions work on :class:`~.fields.FieldState` and
return upper-index components ``T^{ab} = T^a . theta^b``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import convention
from ._slabs import map_chunks, rows_with_halo
from .algebra import (ETA, Multivector, clifford_product, grade_project,
                      left_contract, reverse, scalar_product, sparse_product,
                      theta)
from .fields import DomainSpec, FieldState, require_bivector

__all__ = [
    "riesz_density", "cross_density", "component_tensor", "cross_tensor",
    "check_riesz_identity", "EnergyMomentum", "energy_momentum",
    "density_rows", "cross_rows", "divergence_density", "divergence_residual",
]

_ETA = np.array(ETA)


def _coeffs(x):
    return x.coeffs if isinstance(x, Multivector) else np.asarray(x, dtype=np.float64)


def _wrap_like(result, *inputs):
    if any(isinstance(x, Multivector) for x in inputs) and result.shape == (16,):
        return Multivector(result)
    return result


def _sandwich(F1, a, F2):
    """<F1 theta^a reverse(F2)>_1 on coefficient arrays."""
    left = clifford_product(F1, theta(a).coeffs)
    return grade_project(clifford_product(left, reverse(F2)), 1)


def riesz_density(F, a: int):
    """Energy-momentum 1-form T^a = 1/2 <F theta^a ~F>_1."""
    require_bivector(F)
    f = _coeffs(F)
    return _wrap_like(0.5 * _sandwich(f, a, f), F)


def cross_density(F1, F2, a: int):
    """Interference 1-form K^a = 1/2 <F1 theta^a ~F2 + F2 theta^a ~F1>_1."""
    require_bivector(F1, "F1")
    require_bivector(F2, "F2")
    f1, f2 = _coeffs(F1), _coeffs(F2)
    return _wrap_like(0.5 * (_sandwich(f1, a, f2) + _sandwich(f2, a, f1)), F1, F2)


def _fab(F):
    return convention.fab_matrix(convention.from_multivector(_coeffs(F)))


def component_tensor(F, upper: bool = False) -> np.ndarray:
    """T_ab = -eta^cl F_ac F_bl + 1/4 F_cd F^cd eta_ab, shape (..., 4, 4).

    With ``upper=True`` both indices are raised, giving T^{ab}.
    """
    require_bivector(F)
    f = _fab(F)
    ff = np.einsum("...cd,c,d,...cd->...", f, _ETA, _ETA, f)
    t = -np.einsum("...ac,c,...bc->...ab", f, _ETA, f)
    t = t + 0.25 * ff[..., None, None] * np.diag(_ETA)
    if upper:
        t = t * _ETA[:, None] * _ETA[None, :]
    return t


def cross_tensor(F1, F2, upper: bool = False) -> np.ndarray:
    """Bilinear polarization of :func:`component_tensor` (components of K)."""
    require_bivector(F1, "F1")
    require_bivector(F2, "F2")
    f1, f2 = _fab(F1), _fab(F2)
    ff = np.einsum("...cd,c,d,...cd->...", f1, _ETA, _ETA, f2)
    t = -(np.einsum("...ac,c,...bc->...ab", f1, _ETA, f2)
          + np.einsum("...ac,c,...bc->...ab", f2, _ETA, f1))
    t = t + 0.5 * ff[..., None, None] * np.diag(_ETA)
    if upper:
        t = t * _ETA[:, None] * _ETA[None, :]
    return t


def check_riesz_identity(n, F) -> float:
    """Max residual of 1/2 F n ~F = (n _| F) _| F + 1/2 n (F.F)."""
    n, F = _coeffs(n), _coeffs(F)
    lhs = 0.5 * clifford_product(clifford_product(F, n), reverse(F))
    ff = np.asarray(scalar_product(F, F))
    rhs = left_contract(left_contract(n, F), F) + 0.5 * n * ff[..., None]
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# grid densities


def _component(biv, a, b):
    """F_ab as a grid array (None for a structural zero)."""
    if a == b:
        return None
    if a < b:
        return biv[convention.BIVECTOR_PAIRS.index((a, b))]
    return -biv[convention.BIVECTOR_PAIRS.index((b, a))]


def _invariant(biv):
    """F_cd F^cd on the grid."""
    total = np.zeros(biv.shape[1:])
    for slot, (c, d) in enumerate(convention.BIVECTOR_PAIRS):
        total += (2.0 * _ETA[c] * _ETA[d]) * biv[slot] * biv[slot]
    return total


def _tensor_entry(biv, a, b, ff):
    """T^{ab} on the grid from the component formula."""
    t = np.zeros(biv.shape[1:])
    for c in range(4):
        fa, fb = _component(biv, a, c), _component(biv, b, c)
        if fa is not None and fb is not None:
            t -= _ETA[c] * fa * fb
    if a == b:
        t += 0.25 * ff * _ETA[a]
    return t * (_ETA[a] * _ETA[b])


def density_rows(biv) -> np.ndarray:
    """Slice densities T^{a0} for a = 0..3, shape (4, ...), via the component formula."""
    biv = np.asarray(biv)
    ff = _invariant(biv)
    return np.stack([_tensor_entry(biv, a, 0, ff) for a in range(4)])


def cross_rows(biv1, biv2) -> np.ndarray:
    """Slice densities K^{a0} of the interference term, shape (4, ...).

    Evaluated with sparse Clifford products from the bivector slots, so it
    shares no arithmetic with the component route of :func:`density_rows`.
    """
    f1 = dict(zip(convention.BIVECTOR_BLADES, np.asarray(biv1)))
    f2 = dict(zip(convention.BIVECTOR_BLADES, np.asarray(biv2)))
    # reversion flips the sign of every 2-form
    r1 = {k: -v for k, v in f1.items()}
    r2 = {k: -v for k, v in f2.items()}
    out = []
    for a in range(4):
        th = {1 << a: 1.0}
        # theta^0 coefficient of K^a is K^a . theta^0 = K^{a0}
        left = sparse_product(sparse_product(f1, th), r2, only=(1,))
        right = sparse_product(sparse_product(f2, th), r1, only=(1,))
        out.append(0.5 * (left.get(1, 0.0) + right.get(1, 0.0)))
    shape = np.asarray(biv1).shape[1:]
    return np.stack([np.broadcast_to(k, shape) for k in out])


def _full_tensor(biv) -> np.ndarray:
    ff = _invariant(biv)
    out = np.empty((4, 4) + biv.shape[1:])
    for a in range(4):
        for b in range(a, 4):
            out[a, b] = _tensor_entry(biv, a, b, ff)
            out[b, a] = out[a, b]
    return out


@dataclass(frozen=True, eq=False)
class EnergyMomentum:
    """Upper-index tensor T^{ab} on a grid at one time, shape (4, 4, nz, ny, nx)."""

    time: float
    tensor: np.ndarray

    def vectors(self) -> np.ndarray:
        """The four 1-forms T^a as an array of shape (4, nz, ny, nx, 16)."""
        t = np.moveaxis(self.tensor, (0, 1), (-2, -1))
        out = np.zeros(t.shape[:-2] + (4, 16))
        for c in range(4):
            # coefficient of theta^c is T^a . theta^c / eta^cc
            out[..., 1 << c] = t[..., c] * _ETA[c]
        return np.moveaxis(out, -2, 0)


def energy_momentum(state: FieldState) -> EnergyMomentum:
    return EnergyMomentum(state.time, _full_tensor(state.biv))


def _divergence(levels, spacing, interior=slice(None)):
    """d_t T^{a0} + d_i T^{ai}; spatial z-derivative uses one halo row each side."""
    hx, hy, hz = spacing
    if len(levels) == 3:
        t_prev, t_mid, t_next = levels
        dt = t_next[0] - t_mid[0]
        space = [t_mid[1]]
        dtime = (t_next[1][:, 0] - t_prev[1][:, 0]) / (2.0 * dt)
    elif len(levels) == 2:
        (ta, Ta), (tb, Tb) = levels
        dt = tb - ta
        space = [Ta, Tb]
        dtime = (Tb[:, 0] - Ta[:, 0]) / dt
    else:
        raise ValueError("divergence needs two or three time levels")
    div = dtime[:, 1:-1]
    for T in space:
        w = 1.0 / len(space)
        core = T[:, :, 1:-1]
        div = div + w * (np.roll(core[:, 1], -1, axis=3) - np.roll(core[:, 1], 1, axis=3)) / (2 * hx)
        div = div + w * (np.roll(core[:, 2], -1, axis=2) - np.roll(core[:, 2], 1, axis=2)) / (2 * hy)
        div = div + w * (T[:, 3, 2:] - T[:, 3, :-2]) / (2 * hz)
    return div


def divergence_density(levels, domain: DomainSpec) -> np.ndarray:
    """Discrete d_b T^{ab} for a = 0..3, shape (4, nz, ny, nx).

    ``levels`` holds two or three :class:`EnergyMomentum` samples at equally
    spaced times.  With three levels the result refers to the middle time;
    with two, to their midpoint.
    """
    if len({lv.tensor.shape for lv in levels}) != 1:
        raise ValueError("time levels must share a grid")
    padded = [(lv.time, rows_with_halo(lv.tensor, 0, domain.nz, 1, axis=2)) for lv in levels]
    return _divergence(padded, domain.spacing)


def divergence_residual(states, domain: DomainSpec, workers: int = 1) -> float:
    """Grid max of |d_b T^{ab}| over a, from two or three field states.

    Evaluated slab by slab so no full-grid tensor is ever held in memory.
    """
    states = list(states)

    def chunk_max(k0, k1):
        levels = [(s.time, _full_tensor(rows_with_halo(s.biv, k0, k1, 1, axis=1)))
                  for s in states]
        return float(np.max(np.abs(_divergence(levels, domain.spacing))))

    return max(map_chunks(chunk_max, domain.nz, workers))
