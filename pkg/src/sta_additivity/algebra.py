"""Dense arithmetic in the spacetime algebra Cl(1,3).

A multivector is stored as 16 float64 coefficients indexed by blade bitmask:
bit ``i`` set means the generator ``theta^i`` is a factor, and factors are
kept in ascending order.  The metric is ``eta = diag(1, -1, -1, -1)`` and the
volume element is ``theta^5 = theta^0 theta^1 theta^2 theta^3`` (bitmask 15).

Every array-level function accepts arrays of shape ``(..., 16)`` and
broadcasts over the leading axes, so the same code evaluates one multivector
or a whole grid of them.  The public functions also accept and return
:class:`Multivector` values.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass
from numbers import Real

import numpy as np

from .errors import GradeError, InvalidBladeError

__all__ = [
    "ETA", "NBLADES", "PSEUDOSCALAR", "GRADE_OF", "Multivector",
    "basis_blade", "theta", "theta_lower", "pseudoscalar", "scalar",
    "clifford_product", "grade_project", "reverse", "exterior",
    "scalar_product", "left_contract", "right_contract", "hodge_star",
    "hodge_star_inverse", "blade_name", "format_multivector",
    "product_table", "sign_table_fault", "sparse_product",
]

ETA = (1.0, -1.0, -1.0, -1.0)
NBLADES = 16
PSEUDOSCALAR = 0b1111
GRADE_OF = np.array([bin(b).count("1") for b in range(NBLADES)])

# (-1)^(k(k-1)/2) indexed by grade
_REVERSE_SIGN = np.array([1.0, 1.0, -1.0, -1.0, 1.0])
# sign of star(star(A_k)) in Lorentzian signature: -(-1)^(k(4-k))
_DOUBLE_STAR_SIGN = np.array([-(-1.0) ** (k * (4 - k)) for k in range(5)])


def _reorder_sign(a: int, b: int) -> int:
    """Sign picked up when the generators of blade ``b`` are moved past those of ``a``."""
    swaps = 0
    a >>= 1
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def _product_sign(a: int, b: int) -> float:
    sign = float(_reorder_sign(a, b))
    common = a & b
    for i in range(4):
        if common >> i & 1:
            sign *= ETA[i]
    return sign


def _gram_determinant(a: int, b: int) -> float:
    """Scalar product of two unit blades as the Gram determinant of their generators."""
    ga = [i for i in range(4) if a >> i & 1]
    gb = [i for i in range(4) if b >> i & 1]
    if len(ga) != len(gb):
        return 0.0
    if not ga:
        return 1.0
    gram = np.array([[ETA[i] if i == j else 0.0 for j in gb] for i in ga])
    return float(round(np.linalg.det(gram)))


@dataclass
class _Table:
    """Sign table of one bilinear product: ``e_i op e_j = sign[i, j] e_{i^j}``."""

    sign: np.ndarray
    dense: np.ndarray = None

    def __post_init__(self):
        dense = np.zeros((NBLADES, NBLADES, NBLADES))
        for i in range(NBLADES):
            for j in range(NBLADES):
                dense[i, j, i ^ j] = self.sign[i, j]
        self.dense = dense


_TABLES: dict[str, _Table] = {}


def _build_tables(product_sign: np.ndarray) -> None:
    idx = np.arange(NBLADES)
    a, b = np.meshgrid(idx, idx, indexing="ij")
    masks = {
        "product": np.ones((NBLADES, NBLADES), dtype=bool),
        "wedge": (a & b) == 0,
        "lcontract": (a & b) == a,
        "rcontract": (a & b) == b,
    }
    for name, mask in masks.items():
        _TABLES[name] = _Table(np.where(mask, product_sign, 0.0))
    gram = np.array([[_gram_determinant(i, j) for j in range(NBLADES)]
                     for i in range(NBLADES)])
    # scalar product lands on the scalar slot; i ^ j == 0 whenever gram != 0
    _TABLES["scalar"] = _Table(gram)


_PRODUCT_SIGN = np.array([[_product_sign(i, j) for j in range(NBLADES)]
                          for i in range(NBLADES)])
_PRODUCT_SIGN.setflags(write=False)
_build_tables(_PRODUCT_SIGN)


def product_table() -> np.ndarray:
    """Return a copy of the 16x16 Clifford product sign table in use."""
    return _TABLES["product"].sign.copy()


@contextlib.contextmanager
def sign_table_fault(i: int, j: int):
    """Flip the sign of ``e_i e_j`` for the duration of the block.

    Fault-injection hook for exercising the verification suite.
    """
    corrupted = _PRODUCT_SIGN.copy()
    corrupted[i, j] = -corrupted[i, j]
    _build_tables(corrupted)
    try:
        yield
    finally:
        _build_tables(_PRODUCT_SIGN)


# ---------------------------------------------------------------------------
# array-level kernels


def _as_coeffs(x) -> np.ndarray:
    if isinstance(x, Multivector):
        return x.coeffs
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape[-1:] != (NBLADES,):
        raise ValueError(f"expected trailing axis of length 16, got shape {arr.shape}")
    return arr


def _sparse_bilinear(xs: dict, ys: dict, table: _Table, only=None) -> dict:
    """Bilinear product on sparse component-major operands.

    Operands map blade bitmask to a coefficient (scalar or array); absent
    blades are zero.  ``only`` optionally restricts which output blades are
    accumulated.
    """
    out = {}
    for i, xi in xs.items():
        for j, yj in ys.items():
            k = i ^ j
            s = table.sign[i, j]
            if s == 0.0 or (only is not None and k not in only):
                continue
            term = xi * yj
            if s == -1.0:
                term = -term
            elif s != 1.0:
                term = s * term
            out[k] = term if k not in out else out[k] + term
    return out


def sparse_product(xs: dict, ys: dict, only=None) -> dict:
    """Clifford product of sparse operands ``{bitmask: coefficient array}``.

    Grid kernels use this form to avoid materializing 16 slots per point.
    """
    return _sparse_bilinear(xs, ys, _TABLES["product"], only)


def _bilinear(x: np.ndarray, y: np.ndarray, table: _Table) -> np.ndarray:
    if x.ndim == 1 and y.ndim == 1:
        return y @ np.tensordot(x, table.dense, axes=(0, 0))
    shape = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
    xs = {i: x[..., i] for i in range(NBLADES) if x[..., i].any()}
    ys = {j: y[..., j] for j in range(NBLADES) if y[..., j].any()}
    out = np.zeros(shape + (NBLADES,))
    for k, v in _sparse_bilinear(xs, ys, table).items():
        out[..., k] = v
    return out


def _check_grade(k) -> int:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 0 <= k <= 4:
        raise GradeError(f"grade must be an integer in 0..4, got {k!r}")
    return int(k)


def _grade_mask(k: int) -> np.ndarray:
    return (GRADE_OF == k).astype(np.float64)


def _polymorphic(fn):
    """Wrap array-level results back into Multivector when any input was one."""

    def wrapper(*args):
        wrap = any(isinstance(a, Multivector) for a in args)
        result = fn(*args)
        if wrap and isinstance(result, np.ndarray) and result.shape == (NBLADES,):
            return Multivector(result)
        return result

    wrapper.__name__ = fn.__name__
    wrapper.__qualname__ = fn.__qualname__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_polymorphic
def clifford_product(a, b):
    """Geometric product, generated by theta^a theta^b + theta^b theta^a = 2 eta^ab."""
    return _bilinear(_as_coeffs(a), _as_coeffs(b), _TABLES["product"])


def grade_project(a, k):
    """Keep the grade-``k`` part of ``a``."""
    k = _check_grade(k)
    out = _as_coeffs(a) * _grade_mask(k)
    return Multivector(out) if isinstance(a, Multivector) else out


@_polymorphic
def reverse(a):
    return _as_coeffs(a) * _REVERSE_SIGN[GRADE_OF]


@_polymorphic
def exterior(a, b):
    """Exterior product: the grade r+s part of A_r B_s, extended bilinearly."""
    return _bilinear(_as_coeffs(a), _as_coeffs(b), _TABLES["wedge"])


@_polymorphic
def left_contract(a, b):
    """Left contraction A_r _| B_s = <A_r B_s>_{s-r}; zero when r > s."""
    return _bilinear(_as_coeffs(a), _as_coeffs(b), _TABLES["lcontract"])


@_polymorphic
def right_contract(a, b):
    """Right contraction A_r |_ B_s = <A_r B_s>_{r-s}; zero when r < s."""
    return _bilinear(_as_coeffs(a), _as_coeffs(b), _TABLES["rcontract"])


def scalar_product(a, b):
    """Scalar product of multivectors.

    Equal-grade parts pair through the Gram determinant of their generator
    inner products, scalars multiply ordinarily, and different grades give
    zero.  Returns a float, or an array over the leading axes.
    """
    out = _bilinear(_as_coeffs(a), _as_coeffs(b), _TABLES["scalar"])[..., 0]
    return float(out) if np.ndim(out) == 0 else out


_PSEUDO = np.zeros(NBLADES)
_PSEUDO[PSEUDOSCALAR] = 1.0


@_polymorphic
def hodge_star(a):
    """Hodge dual, computed as reverse(A) theta^5."""
    return _bilinear(reverse(_as_coeffs(a)), _PSEUDO, _TABLES["product"])


@_polymorphic
def hodge_star_inverse(a):
    """Inverse Hodge dual; undoes :func:`hodge_star` on every grade."""
    coeffs = _as_coeffs(a)
    return hodge_star(coeffs) * _DOUBLE_STAR_SIGN[4 - GRADE_OF]


# ---------------------------------------------------------------------------
# value type


class Multivector:
    """Immutable element of Cl(1,3).

    Operators: ``+``, ``-``, ``*`` (Clifford product, or scaling by a real),
    ``^`` (exterior product) and ``~`` (reversion).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        if coeffs is None:
            arr = np.zeros(NBLADES)
        else:
            arr = np.array(coeffs, dtype=np.float64)
            if arr.shape != (NBLADES,):
                raise ValueError(f"a multivector has 16 coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    def __getitem__(self, bitmask: int) -> float:
        return float(self.coeffs[bitmask])

    def grade(self, k) -> Multivector:
        return grade_project(self, k)

    def grades(self) -> list[int]:
        """Grades carrying a nonzero coefficient."""
        return sorted({int(GRADE_OF[b]) for b in np.flatnonzero(self.coeffs)})

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __add__(self, other):
        if isinstance(other, Multivector):
            return Multivector(self.coeffs + other.coeffs)
        if isinstance(other, Real):
            return self + scalar(other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Multivector):
            return Multivector(self.coeffs - other.coeffs)
        if isinstance(other, Real):
            return self - scalar(other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Multivector(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return clifford_product(self, other)
        if isinstance(other, Real):
            return Multivector(self.coeffs * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Real):
            return Multivector(float(other) * self.coeffs)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Real):
            return Multivector(self.coeffs / float(other))
        return NotImplemented

    def __xor__(self, other):
        if isinstance(other, Multivector):
            return exterior(self, other)
        return NotImplemented

    def __invert__(self):
        return reverse(self)

    def __eq__(self, other):
        if isinstance(other, Multivector):
            return bool(np.array_equal(self.coeffs, other.coeffs))
        if isinstance(other, Real):
            return self == scalar(other)
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"Multivector({format_multivector(self)})"

    def __str__(self):
        return format_multivector(self)


def basis_blade(indices) -> Multivector:
    """Unit blade theta^{i1} ... theta^{ik} for strictly ascending indices."""
    indices = list(indices)
    bitmask = 0
    prev = -1
    for i in indices:
        if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or not 0 <= i <= 3:
            raise InvalidBladeError(f"generator index out of range: {i!r}")
        if i == prev:
            raise InvalidBladeError(f"duplicate generator index {i}")
        if i < prev:
            raise InvalidBladeError(f"indices must be ascending, got {indices}")
        bitmask |= 1 << i
        prev = i
    coeffs = np.zeros(NBLADES)
    coeffs[bitmask] = 1.0
    return Multivector(coeffs)


def theta(a: int) -> Multivector:
    """Coframe 1-form theta^a."""
    return basis_blade([a])


def theta_lower(a: int) -> Multivector:
    """Reciprocal 1-form theta_a = eta_ab theta^b."""
    return theta(a) * ETA[a]


def pseudoscalar() -> Multivector:
    return basis_blade([0, 1, 2, 3])


def scalar(s: float) -> Multivector:
    coeffs = np.zeros(NBLADES)
    coeffs[0] = float(s)
    return Multivector(coeffs)


def blade_name(bitmask: int) -> str:
    if bitmask == 0:
        return "1"
    return "e" + "".join(str(i) for i in range(4) if bitmask >> i & 1)


def _format_number(x: float) -> str:
    text = repr(float(x))
    if text.endswith(".0"):
        text = text[:-2]
    return text


def format_multivector(a) -> str:
    """Debug rendering such as ``1.5 e01 - 2 e23``; terms sorted by bitmask."""
    coeffs = _as_coeffs(a)
    parts = []
    for b in np.flatnonzero(coeffs):
        c = float(coeffs[b])
        mag = _format_number(abs(c))
        term = mag if b == 0 else f"{mag} {blade_name(b)}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts) if parts else "0"
