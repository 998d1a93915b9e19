"""Twisted cochain complexes of a presentation with coefficients su(2)_{ad rho}.

Cocycles are dicts ``generator -> 3-vector``; a cocycle u is extended to words
by u(gh) = u(g) + Ad_{rho(g)} u(h). H^1 is represented concretely as
ker(d^1) intersected with the orthogonal complement of image(d^0).
"""

from dataclasses import dataclass

import numpy as np

from . import su2
from .words import Presentation, as_word, jacobian_matrix, word_jacobian, eval_word

RANK_RTOL = 1e-8
RANK_ATOL = 1e-12
CLOSED_TOL = 1e-9
ON_VARIETY_TOL = 1e-8

# Orientation sign with A_i . D_i = -1. The raw cup product gives +1 on the
# genus-1 calibration rho(A)=i, rho(D)=exp(0.3 i), u=(i, 0), v=(0, i); with this
# sign omega(z_C, v) = D_v f_C holds for the twist cocycles.
OMEGA_SIGN = -1.0

IRREDUCIBLE, ABELIAN, CENTRAL = "Z2", "U1", "SU2"


class NotOnVariety(ValueError):
    pass


class NotClosed(ValueError):
    pass


class NotIrreducible(ValueError):
    pass


@dataclass(frozen=True)
class CohomologyReport:
    dimH0: int
    dimH1: int
    stabilizer: str


def numerical_rank(m, rtol=RANK_RTOL, atol=RANK_ATOL):
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] <= atol:
        return 0
    return int(np.sum(s > rtol * s[0]))


def null_space(m, rtol=RANK_RTOL, atol=RANK_ATOL):
    """Orthonormal basis (columns) of ker m, using the relative SVD threshold."""
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(m)
    r = numerical_rank(m, rtol, atol) if s.size else 0
    return vt[r:].T


def d0_matrix(rho, generators):
    """v -> ((Ad_{rho(x_k)} - I) v)_k as a 3g x 3 matrix."""
    return np.vstack([su2.ad(rho[g]) - np.eye(3) for g in generators])


def perturbed_relator_jacobian(mu, lam, shape, rho, generators):
    """Value and right-translated Jacobian of F(lam) mu^-1."""
    lv, jl = jacobian_matrix(lam, rho, generators)
    mv, jm = jacobian_matrix(mu, rho, generators)
    fl = su2.shape_apply(shape, lv)
    value = su2.qmul(fl, su2.qinv(mv))
    jac = su2.shape_jacobian(shape, lv) @ jl - su2.ad(value) @ jm
    return value, jac


def d1_matrix(presentation, rho, perturbations=()):
    """Stacked right-translated Jacobians of the (augmented) relation map."""
    gens = presentation.generators
    rows = []
    for r in presentation.relators:
        rows.append(jacobian_matrix(r, rho, gens)[1])
    for mu, lam, shape in perturbations:
        rows.append(perturbed_relator_jacobian(as_word(mu), as_word(lam), shape, rho, gens)[1])
    if not rows:
        return np.zeros((0, 3 * len(gens)))
    return np.vstack(rows)


def relator_residual(presentation, rho, perturbations=()):
    res = 0.0
    for r in presentation.relators:
        res = max(res, np.linalg.norm(eval_word(r, rho) - su2.ONE))
    for mu, lam, shape in perturbations:
        v = su2.qmul(su2.shape_apply(shape, eval_word(lam, rho)), su2.qinv(eval_word(mu, rho)))
        res = max(res, np.linalg.norm(v - su2.ONE))
    return res


def h1_basis(presentation, rho, perturbations=(), tol=ON_VARIETY_TOL):
    """Orthonormal basis (columns, length 3g) of ker(dR_pi) intersect image(d0)^perp."""
    res = relator_residual(presentation, rho, perturbations)
    if res > tol:
        raise NotOnVariety(f"relator residual {res:.3e}")
    gens = presentation.generators
    d1 = d1_matrix(presentation, rho, perturbations)
    d0 = d0_matrix(rho, gens)
    # kernel of d1 stacked with the coboundary directions
    b1 = _column_space(d0)
    m = np.vstack([d1, b1.T]) if b1.shape[1] else d1
    return null_space(m)


def _column_space(m):
    if m.size == 0:
        return np.zeros((m.shape[0], 0))
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = numerical_rank(m)
    return u[:, :r]


def dim_h0(rho, generators):
    return 3 - numerical_rank(d0_matrix(rho, generators))


def stabilizer_class(rho, generators=None):
    """Z2 (irreducible), U1 (abelian) or SU2 (central) from the common fixed space of Ad."""
    gens = list(rho) if generators is None else generators
    h0 = dim_h0(rho, gens)
    return {0: IRREDUCIBLE, 1: ABELIAN}.get(h0, CENTRAL)


def report(presentation, rho, perturbations=()):
    h0 = dim_h0(rho, presentation.generators)
    basis = h1_basis(presentation, rho, perturbations)
    return CohomologyReport(h0, basis.shape[1], stabilizer_class(rho, presentation.generators))


def vec_to_cocycle(vec, generators):
    return {g: np.asarray(vec[3 * k:3 * k + 3], dtype=float) for k, g in enumerate(generators)}


def cocycle_to_vec(u, generators):
    return np.concatenate([np.asarray(u.get(g, np.zeros(3)), dtype=float) for g in generators])


def coboundary(v, rho, generators):
    """The cocycle d0 v."""
    return vec_to_cocycle(d0_matrix(rho, generators) @ v, generators)


def cocycle_on_word(u, rho, w):
    """Extend a 1-cochain to a word via the crossed-homomorphism rule."""
    val, blocks = word_jacobian(w, rho)
    out = np.zeros(3)
    for name, jb in blocks.items():
        out = out + jb @ np.asarray(u.get(name, np.zeros(3)))
    return out


def closedness(presentation, rho, u, perturbations=()):
    vec = cocycle_to_vec(u, presentation.generators)
    d1 = d1_matrix(presentation, rho, perturbations)
    return float(np.linalg.norm(d1 @ vec)) if d1.size else 0.0


def cup_on_relator(relator, rho, u, v):
    """Cup product u ∪ v evaluated on the 2-cell of a one-relator presentation.

    The Fox 2-chain of r = l_1...l_m is sum_j [p_{j-1} | x_j] for positive
    letters and -[p_j | x_j] for inverse letters x_j^-1 (p_j the prefixes).
    Using [p_{j-1} | x_j^-1] for inverse letters instead would add the
    symmetric term -<u(x_j), v(x_j)> and break antisymmetry.
    """
    total = 0.0
    prefix = su2.ONE
    u_prefix = np.zeros(3)
    for name, e in as_word(relator):
        q = rho[name]
        vx = np.asarray(v.get(name, np.zeros(3)), dtype=float)
        ux = np.asarray(u.get(name, np.zeros(3)), dtype=float)
        if e == 1:
            adp = su2.ad(prefix)
            total += float(np.dot(u_prefix, adp @ vx))
            u_prefix = u_prefix + adp @ ux
            prefix = su2.qmul(prefix, q)
        else:
            prefix = su2.qmul(prefix, su2.qinv(q))
            adp = su2.ad(prefix)
            u_prefix = u_prefix - adp @ ux
            total -= float(np.dot(u_prefix, adp @ vx))
    return total


def goldman_form(surface, rho, u, v, require_irreducible=True, tol=CLOSED_TOL):
    """Symplectic pairing -Re(u cup v) evaluated on the fundamental class."""
    if len(surface.relators) != 1:
        raise ValueError("goldman_form needs a one-relator surface presentation")
    for c in (u, v):
        if closedness(surface, rho, c) > tol:
            raise NotClosed(f"cocycle residual {closedness(surface, rho, c):.3e}")
    if require_irreducible and stabilizer_class(rho, surface.generators) != IRREDUCIBLE:
        raise NotIrreducible("goldman_form requires an irreducible representation")
    return OMEGA_SIGN * cup_on_relator(surface.relators[0], rho, u, v)


def goldman_matrix(surface, rho, basis, require_irreducible=True):
    """Gram matrix of omega on the columns of ``basis``."""
    gens = surface.generators
    cocycles = [vec_to_cocycle(basis[:, a], gens) for a in range(basis.shape[1])]
    k = len(cocycles)
    out = np.zeros((k, k))
    for a in range(k):
        for b in range(k):
            out[a, b] = goldman_form(surface, rho, cocycles[a], cocycles[b], require_irreducible)
    return out


def isotropy_defect(surface, rho, subspace, require_irreducible=True):
    """max |omega(u_a, u_b)| over the given cocycles (0 for fewer than two)."""
    worst = 0.0
    for a in range(len(subspace)):
        for b in range(a + 1, len(subspace)):
            val = goldman_form(surface, rho, subspace[a], subspace[b], require_irreducible)
            worst = max(worst, abs(val))
    return worst


def is_lagrangian(surface, rho, subspace, tol=1e-8):
    gens = surface.generators
    vecs = np.array([cocycle_to_vec(u, gens) for u in subspace]).T
    h1 = h1_basis(surface, rho)
    # dimension of the span modulo coboundaries
    proj = h1 @ (h1.T @ vecs) if vecs.size else vecs
    dim = numerical_rank(proj)
    return isotropy_defect(surface, rho, subspace) < tol and 2 * dim == h1.shape[1]


def pullback_cocycle(z, rho, images):
    """Push a cocycle along a homomorphism given by words: (f^* z)(E) = z(images[E])."""
    return {name: cocycle_on_word(z, rho, w) for name, w in images.items()}


def pullback_rep(rho, images):
    return {name: eval_word(w, rho) for name, w in images.items()}


def cocycle_to_json(u):
    return {g: [float(c) for c in val] for g, val in u.items()}


def cocycle_from_json(data):
    return {g: np.asarray(val, dtype=float) for g, val in data.items()}


__all__ = [
    "CohomologyReport", "NotOnVariety", "NotClosed", "NotIrreducible", "Presentation",
    "d0_matrix", "d1_matrix", "h1_basis", "stabilizer_class", "goldman_form",
    "isotropy_defect", "numerical_rank", "null_space",
]
