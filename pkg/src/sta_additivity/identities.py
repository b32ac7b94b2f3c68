"""Verification suites for the algebra kernel and the energy-momentum densities.

Each check returns its maximum residual.  The exhaustive blade checks compare
against an independent oracle that multiplies generator words by explicit
transpositions; the randomized checks exercise algebraic identities on seeded
samples with coefficients uniform in [-1, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import convention
from .algebra import (ETA, GRADE_OF, NBLADES, PSEUDOSCALAR, clifford_product,
                      exterior, grade_project, hodge_star, hodge_star_inverse,
                      left_contract, product_table, reverse, right_contract,
                      scalar_product, theta)
from .energy import component_tensor, cross_density, riesz_density, check_riesz_identity

TOLERANCE = 1e-12


@dataclass(frozen=True)
class IdentityResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


# ---------------------------------------------------------------------------
# generator-word oracle


def _blade_word(mask: int) -> list[int]:
    return [i for i in range(4) if mask >> i & 1]


def word_product(u, v):
    """Multiply generator words; returns (sign, ascending word).

    Bubble-sorts the concatenation, counting transpositions, and contracts
    each adjacent repeated generator with the metric.
    """
    word = list(u) + list(v)
    sign = 1.0
    changed = True
    while changed:
        changed = False
        for k in range(len(word) - 1):
            if word[k] > word[k + 1]:
                word[k], word[k + 1] = word[k + 1], word[k]
                sign = -sign
                changed = True
            elif word[k] == word[k + 1]:
                sign *= ETA[word[k]]
                del word[k:k + 2]
                changed = True
                break
    return sign, word


def _word_mask(word) -> int:
    return sum(1 << i for i in word)


def _oracle_blade_product(i: int, j: int):
    sign, word = word_product(_blade_word(i), _blade_word(j))
    return sign, _word_mask(word)


def _basis(mask: int) -> np.ndarray:
    e = np.zeros(NBLADES)
    e[mask] = 1.0
    return e


def exhaustive_residuals() -> dict[str, float]:
    """Compare every blade pair against the word oracle (exact comparisons)."""
    table = product_table()
    worst = {"blade_product": 0.0, "blade_exterior": 0.0, "blade_left_contraction": 0.0,
             "blade_right_contraction": 0.0, "blade_scalar_product": 0.0,
             "blade_hodge": 0.0, "blade_double_hodge": 0.0, "blade_hodge_inverse": 0.0}

    def note(name, got, want):
        worst[name] = max(worst[name], float(np.max(np.abs(np.asarray(got) - want))))

    for i in range(NBLADES):
        ei = _basis(i)
        r, rev_sign = GRADE_OF[i], (-1.0) ** (GRADE_OF[i] * (GRADE_OF[i] - 1) // 2)
        for j in range(NBLADES):
            ej = _basis(j)
            s = GRADE_OF[j]
            sign, mask = _oracle_blade_product(i, j)
            want = sign * _basis(mask)
            grade = GRADE_OF[mask]
            note("blade_product", table[i, j] * _basis(i ^ j), want)
            note("blade_product", clifford_product(ei, ej), want)
            note("blade_exterior", exterior(ei, ej), want if grade == r + s else 0.0)
            note("blade_left_contraction", left_contract(ei, ej),
                 want if r <= s and grade == s - r else 0.0)
            note("blade_right_contraction", right_contract(ei, ej),
                 want if r >= s and grade == r - s else 0.0)
            # e_i . e_j = <reverse(e_i) e_j>_0 for equal grades
            sp = rev_sign * sign if (mask == 0 and r == s) else 0.0
            note("blade_scalar_product", scalar_product(ei, ej), sp)
        sign, word = word_product(_blade_word(i)[::-1], _blade_word(PSEUDOSCALAR))
        star = sign * _basis(_word_mask(word))
        note("blade_hodge", hodge_star(ei), star)
        double = -(-1.0) ** (r * (4 - r)) * ei
        note("blade_double_hodge", hodge_star(hodge_star(ei)), double)
        note("blade_hodge_inverse", hodge_star_inverse(star), ei)
    return worst


# ---------------------------------------------------------------------------
# randomized algebra identities


def _homogeneous(rng, n, k):
    return grade_project(rng.uniform(-1.0, 1.0, (n, NBLADES)), k)


def _one_forms(rng, n):
    return _homogeneous(rng, n, 1)


def _bivectors(rng, n):
    return _homogeneous(rng, n, 2)


def _max(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def algebra_residuals(rng, n: int) -> dict[str, float]:
    A, B, C = (rng.uniform(-1.0, 1.0, (n, NBLADES)) for _ in range(3))
    out = {}
    gp = clifford_product
    out["associativity"] = _max(gp(gp(A, B), C) - gp(A, gp(B, C)))
    out["distributivity"] = max(_max(gp(A, B + C) - gp(A, B) - gp(A, C)),
                                _max(gp(A + B, C) - gp(A, C) - gp(B, C)))
    out["reversion_antihomomorphism"] = _max(reverse(gp(A, B)) - gp(reverse(B), reverse(A)))
    out["grade_projection_sum"] = _max(sum(grade_project(A, k) for k in range(5)) - A)

    rev_projection = 0.0
    for r in range(5):
        lhs = grade_project(gp(A, B), r)
        rhs = (-1.0) ** (r * (r - 1) // 2) * grade_project(gp(reverse(B), reverse(A)), r)
        rev_projection = max(rev_projection, _max(lhs - rhs))
    out["projection_reversal"] = rev_projection

    a = _one_forms(rng, n)
    block = [0.0, 0.0, 0.0]
    duality = expansion = cyclic = hodge = double = scalar = 0.0
    for s in range(5):
        Bs = _homogeneous(rng, n, s)
        aB, Ba = gp(a, Bs), gp(Bs, a)
        sg = (-1.0) ** s
        block[0] = max(block[0], _max(aB - left_contract(a, Bs) - exterior(a, Bs)))
        block[1] = max(block[1], _max(left_contract(a, Bs) - 0.5 * (aB - sg * Ba)))
        block[2] = max(block[2], _max(exterior(a, Bs) - 0.5 * (aB + sg * Ba)))
        for r in range(5):
            Ar = _homogeneous(rng, n, r)
            prod = gp(Ar, Bs)
            parts = sum(grade_project(prod, abs(r - s) + 2 * k) for k in range(min(r, s) + 1)
                        if abs(r - s) + 2 * k <= 4)
            expansion = max(expansion, _max(prod - parts))
            if r <= s:
                lhs = left_contract(Ar, Bs)
                rhs = (-1.0) ** (r * (s - r)) * right_contract(Bs, Ar)
                duality = max(duality, _max(lhs - rhs))
            for t in range(5):
                Ct = _homogeneous(rng, n, t)
                eps = (r * r + s * s + t * t - r - s - t) // 2
                lhs = gp(gp(Ar, Bs), Ct)[..., 0]
                rhs = (-1.0) ** eps * gp(gp(Ct, Bs), Ar)[..., 0]
                cyclic = max(cyclic, _max(lhs - rhs))
        Ak, Bk = _homogeneous(rng, n, s), Bs
        sp = scalar_product(Ak, Bk)
        scalar = max(scalar, _max(sp - gp(reverse(Ak), Bk)[..., 0]),
                     _max(sp - gp(Ak, reverse(Bk))[..., 0]),
                     _max(sp - scalar_product(Bk, Ak)))
        lhs = sp[..., None] * np.eye(NBLADES)[PSEUDOSCALAR]
        hodge = max(hodge, _max(lhs - exterior(Bk, hodge_star(Ak))))
        double = max(double, _max(hodge_star(hodge_star(Ak)) + (-1.0) ** (s * (4 - s)) * Ak))
    out["identity_block_product"], out["identity_block_contraction"], \
        out["identity_block_exterior"] = block
    out["contraction_duality"] = duality
    out["grade_expansion"] = expansion
    out["cyclic_scalar"] = cyclic
    out["scalar_product_reversion"] = scalar
    out["hodge_duality"] = hodge
    out["double_hodge"] = double
    out["hodge_inverse"] = _max(hodge_star_inverse(hodge_star(A)) - A)
    return out


# ---------------------------------------------------------------------------
# randomized energy-momentum identities


def _riesz_upper(F) -> np.ndarray:
    """T^{ab} from the Clifford route, shape (..., 4, 4)."""
    rows = []
    for a in range(4):
        Ta = riesz_density(F, a)
        rows.append(np.stack([Ta[..., 1 << b] * ETA[b] for b in range(4)], axis=-1))
    return np.stack(rows, axis=-2)


def energy_residuals(rng, n: int) -> dict[str, float]:
    F, G = _bivectors(rng, n), _bivectors(rng, n)
    nvec = _one_forms(rng, n)
    out = {}
    out["riesz_identity"] = check_riesz_identity(nvec, F)
    T = component_tensor(F)
    out["tensor_symmetry"] = _max(T - np.swapaxes(T, -1, -2))
    out["tensor_trace"] = _max(np.einsum("...aa,a->...", T, np.array(ETA)))
    out["dual_route"] = _max(component_tensor(F, upper=True) - _riesz_upper(F))

    purity = polarization = 0.0
    for a in range(4):
        th = theta(a).coeffs
        s = (clifford_product(clifford_product(F, th), reverse(G))
             + clifford_product(clifford_product(G, th), reverse(F)))
        purity = max(purity, _max(grade_project(s, 3)), _max(grade_project(s, 1) - s))
        polarization = max(polarization, _max(
            riesz_density(F + G, a) - riesz_density(F, a) - riesz_density(G, a)
            - cross_density(F, G, a)))
    out["cross_grade_purity"] = purity
    out["polarization"] = polarization

    biv = convention.from_multivector(F)
    E, B = convention.electric(biv), convention.magnetic(biv)
    Tu = component_tensor(F, upper=True)
    energy = 0.5 * (np.sum(E * E, axis=0) + np.sum(B * B, axis=0))
    poynting = np.cross(E, B, axis=0)
    out["energy_anchor"] = _max(Tu[..., 0, 0] - energy)
    out["poynting_anchor"] = _max(np.moveaxis(Tu[..., 0, 1:], -1, 0) - poynting)
    out["dominant_energy"] = max(0.0, float(np.max(np.abs(Tu[..., 0, 1:]) - Tu[..., 0, :1])))
    return out


def run_suite(seed: int = 0, trials: int = 1000) -> list[IdentityResult]:
    """Run the exhaustive checks, plus the randomized ones when ``trials`` > 0."""
    results = [IdentityResult(k, v, 0.0) for k, v in exhaustive_residuals().items()]
    if trials > 0:
        rng = np.random.default_rng(seed)
        for k, v in algebra_residuals(rng, trials).items():
            results.append(IdentityResult(k, v, TOLERANCE))
        for k, v in energy_residuals(rng, trials).items():
            results.append(IdentityResult(k, v, TOLERANCE))
    return results
