"""Frozen bivector <-> (E, B) component convention.

A 2-form is ``F = 1/2 F_ab theta^a ^ theta^b`` and grids store its six
coefficients in the blade order below.  The electric and magnetic vectors are

    E_i = F_0i,   B_1 = -F_23,   B_2 = -F_31 = F_13,   B_3 = -F_12,

which makes the Riesz densities come out as T^00 = (|E|^2 + |B|^2)/2 and
T^0i = (E x B)_i.  These signs were fixed by evaluating the Clifford route
once against an E/B oracle; ``tests/test_energy.py`` keeps them frozen.

=======  =======  =========
 slot     blade    physical
=======  =======  =========
   0      e01       E_x
   1      e02       E_y
   2      e03       E_z
   3      e12      -B_z
   4      e13       B_y
   5      e23      -B_x
=======  =======  =========
"""
import numpy as np

from .algebra import NBLADES

BIVECTOR_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
BIVECTOR_BLADES = tuple((1 << a) | (1 << b) for a, b in BIVECTOR_PAIRS)
BIVECTOR_MASK = np.zeros(NBLADES, dtype=bool)
BIVECTOR_MASK[list(BIVECTOR_BLADES)] = True

# (slot, sign) giving B_x, B_y, B_z from bivector slots
_B_FROM_SLOT = ((5, -1.0), (4, 1.0), (3, -1.0))


def to_multivector(biv):
    """Scatter six bivector slots, shape (6, ...), into a (..., 16) array."""
    biv = np.asarray(biv, dtype=np.float64)
    out = np.zeros(biv.shape[1:] + (NBLADES,))
    for slot, blade in enumerate(BIVECTOR_BLADES):
        out[..., blade] = biv[slot]
    return out


def from_multivector(mv):
    """Gather the bivector slots of a (..., 16) array into shape (6, ...)."""
    mv = np.asarray(getattr(mv, "coeffs", mv), dtype=np.float64)
    return np.stack([mv[..., blade] for blade in BIVECTOR_BLADES])


def electric(biv):
    biv = np.asarray(biv)
    return np.stack([biv[0], biv[1], biv[2]])


def magnetic(biv):
    biv = np.asarray(biv)
    return np.stack([sign * biv[slot] for slot, sign in _B_FROM_SLOT])


def from_em(E, B):
    """Bivector slots from electric and magnetic vectors, each shape (3, ...)."""
    E = np.asarray(E, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    return np.stack([E[0], E[1], E[2], -B[2], B[1], -B[0]])


def fab_matrix(biv):
    """Antisymmetric component matrix F_ab with shape (..., 4, 4)."""
    biv = np.asarray(biv, dtype=np.float64)
    out = np.zeros(biv.shape[1:] + (4, 4))
    for slot, (a, b) in enumerate(BIVECTOR_PAIRS):
        out[..., a, b] = biv[slot]
        out[..., b, a] = -biv[slot]
    return out
