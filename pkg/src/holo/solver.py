"""Numerical solution of (perturbed, traceless) representation equations.

Unknowns are unit quaternions, one per generator. A step perturbs each by
left multiplication rho(x) -> exp(u_x) rho(x), so every constraint Jacobian
is assembled from the right-translated word Jacobians of :mod:`holo.words`.
"""

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import su2
from .cohomology import (NotOnVariety, d0_matrix, numerical_rank, perturbed_relator_jacobian,
                         stabilizer_class)
from .words import Presentation, UnknownGenerator, as_word, eval_word, jacobian_matrix

STEP_TOL = 1e-10
ON_VARIETY_TOL = 1e-9
DEDUP_TOL = 1e-6
MAX_ITER = 200

ANSATZE = (None, "abelian", "central")


@dataclass(frozen=True)
class ConstraintSet:
    """Equations cutting out a representation variety.

    ``gauge`` names up to two generators: the first is sent to i, the second
    has zero j-component (its k-component is made nonnegative afterwards).
    ``ansatz`` restricts to the circle through i ("abelian") or to +-1
    ("central"); it is a search aid, not part of the variety.
    """

    presentation: Presentation
    traceless_words: tuple = ()
    perturbations: tuple = ()  # (mu, lambda, ShapeFunction)
    minus_one: tuple = ()  # (x, y) with [x, y] = -1
    gauge: tuple = ()
    ansatz: str = None
    boundary_words: tuple = ()

    def __post_init__(self):
        gens = set(self.presentation.generators)
        object.__setattr__(self, "traceless_words", tuple(as_word(w) for w in self.traceless_words))
        object.__setattr__(self, "perturbations", tuple(
            (as_word(m), as_word(l), f) for m, l, f in self.perturbations))
        object.__setattr__(self, "minus_one", tuple(
            (as_word(x), as_word(y)) for x, y in self.minus_one))
        object.__setattr__(self, "gauge", tuple(self.gauge))
        object.__setattr__(self, "boundary_words", tuple(as_word(w) for w in self.boundary_words))
        if self.ansatz not in ANSATZE:
            raise ValueError(f"unknown ansatz {self.ansatz!r}")
        if len(self.gauge) > 2:
            raise ValueError("gauge names at most two generators")
        words = list(self.traceless_words) + list(self.boundary_words)
        for m, l, _ in self.perturbations:
            words += [m, l]
        for x, y in self.minus_one:
            words += [x, y]
        for w in words:
            missing = w.generators() - gens
            if missing:
                raise UnknownGenerator(f"{w} uses undeclared {sorted(missing)}")
        for g in self.gauge:
            if g not in gens:
                raise UnknownGenerator(g)

    @property
    def generators(self):
        return self.presentation.generators

    def is_empty(self):
        return not (self.presentation.relators or self.traceless_words or self.perturbations
                    or self.minus_one or self.gauge or self.ansatz)


@dataclass
class SolutionPoint:
    rep: dict
    residual: float
    stabilizer: str
    boundary_stabilizer: str
    fingerprint: np.ndarray
    local_rank: int = None

    def to_json(self):
        out = {
            "rep": {g: su2.to_json(q) for g, q in self.rep.items()},
            "residual": float(self.residual),
            "stabilizer": self.stabilizer,
            "boundary_stabilizer": self.boundary_stabilizer,
            "fingerprint": [float(v) for v in self.fingerprint],
        }
        if self.local_rank is not None:
            out["local_rank"] = int(self.local_rank)
        return out

    @classmethod
    def from_json(cls, data):
        return cls({g: su2.from_json(q) for g, q in data["rep"].items()},
                   float(data["residual"]), data["stabilizer"],
                   data.get("boundary_stabilizer", data["stabilizer"]),
                   np.asarray(data["fingerprint"], dtype=float), data.get("local_rank"))


# -- residual and Jacobian --------------------------------------------------

def _blocks(c, rho, include_gauge=True, include_ansatz=True):
    """List of (residual rows, Jacobian rows) over 3g tangent coordinates."""
    gens = c.generators
    g = len(gens)
    out = []
    for r in c.presentation.relators:
        val, jac = jacobian_matrix(r, rho, gens)
        out.append((val - su2.ONE, su2.left_mul_matrix(val) @ jac))
    for w in c.traceless_words:
        val, jac = jacobian_matrix(w, rho, gens)
        out.append((val[:1], -su2.im(val)[None, :] @ jac))
    for mu, lam, shape in c.perturbations:
        val, jac = perturbed_relator_jacobian(mu, lam, shape, rho, gens)
        out.append((val - su2.ONE, su2.left_mul_matrix(val) @ jac))
    for x, y in c.minus_one:
        for w in (x, y, x * y):
            val, jac = jacobian_matrix(w, rho, gens)
            out.append((val[:1], -su2.im(val)[None, :] @ jac))
    if include_gauge:
        for k, name in enumerate(c.gauge):
            idx = gens.index(name)
            q = rho[name]
            lm = su2.left_mul_matrix(q)
            jac = np.zeros((4, 3 * g))
            jac[:, 3 * idx:3 * idx + 3] = lm
            if k == 0:
                out.append((q - su2.I, jac))
            else:
                out.append((q[2:3], jac[2:3]))
    if include_ansatz and c.ansatz:
        keep = [2, 3] if c.ansatz == "abelian" else [1, 2, 3]
        for idx, name in enumerate(gens):
            q = rho[name]
            jac = np.zeros((4, 3 * g))
            jac[:, 3 * idx:3 * idx + 3] = su2.left_mul_matrix(q)
            out.append((q[keep], jac[keep]))
    return out


def residual_and_jacobian(c, rho, include_gauge=True, include_ansatz=True):
    blocks = _blocks(c, rho, include_gauge, include_ansatz)
    n = 3 * len(c.generators)
    if not blocks:
        return np.zeros(0), np.zeros((0, n))
    return (np.concatenate([b[0] for b in blocks]),
            np.vstack([b[1] for b in blocks]))


def residual(c, rho):
    """Concatenated constraint residuals (zero exactly on the solution set)."""
    return residual_and_jacobian(c, rho)[0]


def residual_norm(c, rho):
    r = residual(c, rho)
    return float(np.linalg.norm(r)) if r.size else 0.0


# -- Levenberg-Marquardt ----------------------------------------------------

def _retract(rho, gens, delta):
    out = {}
    for k, g in enumerate(gens):
        out[g] = su2.normalize(su2.qmul(su2.exp_im(delta[3 * k:3 * k + 3]), rho[g]))
    return out


def _fix_gauge_sign(c, rho):
    """Conjugate by i so the second gauge generator has k-component >= 0."""
    if len(c.gauge) == 2 and rho[c.gauge[1]][3] < 0:
        return {g: su2.qmul(su2.qmul(su2.I, q), su2.qinv(su2.I)) for g, q in rho.items()}
    return rho


def levenberg_marquardt(c, rho, tol=ON_VARIETY_TOL, max_iter=MAX_ITER):
    """Local descent from ``rho``; returns (rho, residual norm)."""
    gens = c.generators
    r, jac = residual_and_jacobian(c, rho)
    cost = float(r @ r)
    lam = 1e-3
    for _ in range(max_iter):
        if cost < (0.01 * tol) ** 2 or r.size == 0:
            break
        jtj = jac.T @ jac
        grad = jac.T @ r
        step_taken = False
        while lam < 1e12:
            a = jtj + lam * (np.diag(np.diag(jtj)) + 1e-12 * np.eye(jtj.shape[0]))
            delta = -np.linalg.solve(a, grad)
            trial = _retract(rho, gens, delta)
            r2, jac2 = residual_and_jacobian(c, trial)
            cost2 = float(r2 @ r2)
            if cost2 < cost:
                rho, r, jac, cost = trial, r2, jac2, cost2
                lam = max(lam / 3.0, 1e-12)
                step_taken = True
                break
            lam *= 4.0
        if not step_taken or np.linalg.norm(delta) < STEP_TOL:
            break
    rho = _fix_gauge_sign(c, rho)
    return rho, residual_norm(c, rho)


def random_start(c, rng):
    return {g: su2.random_unit(rng) for g in c.generators}


def _solve_one(args):
    c, seed, tol, max_iter = args
    rng = np.random.default_rng(seed)
    rho, res = levenberg_marquardt(c, random_start(c, rng), tol, max_iter)
    return (rho, res) if res < tol else None


def worker_count():
    try:
        return max(1, int(os.environ.get("HOLO_THREADS", "1")))
    except ValueError:
        return 1


def solve_variety(c, restarts=50, tol=ON_VARIETY_TOL, seed=0, max_iter=MAX_ITER, workers=None):
    """Converged points from ``restarts`` random starts (deterministic in ``seed``)."""
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    jobs = [(c, s, tol, max_iter) for s in seeds]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_solve_one, jobs, chunksize=max(1, restarts // (4 * workers))))
    else:
        results = [_solve_one(j) for j in jobs]
    points = [make_point(c, rho, res) for rho, res in (x for x in results if x is not None)]
    points.sort(key=_sort_key)
    return points


# -- classification ---------------------------------------------------------

def fingerprint_words(generators, depth=3):
    words = []
    for k in range(1, depth + 1):
        for combo in itertools.combinations(generators, k):
            words.append(as_word(" ".join(combo)))
    return words


def fingerprint(rho, generators=None, depth=3):
    """Re rho(w) over products of at most ``depth`` distinct generators in order."""
    gens = list(rho) if generators is None else list(generators)
    return np.array([eval_word(w, rho)[0] for w in fingerprint_words(gens, depth)])


def boundary_rep(c, rho):
    return {f"b{k}": eval_word(w, rho) for k, w in enumerate(c.boundary_words)}


def make_point(c, rho, res=None):
    res = residual_norm(c, rho) if res is None else res
    stab = stabilizer_class(rho, c.generators)
    bstab = stabilizer_class(boundary_rep(c, rho)) if c.boundary_words else stab
    return SolutionPoint(rho, res, stab, bstab, fingerprint(rho, c.generators))


def _sort_key(p):
    return tuple(np.round(p.fingerprint, 9)) + (p.residual,)


def dedup_classes(points, tol=DEDUP_TOL):
    """One representative (lowest residual) per fingerprint cluster."""
    ordered = sorted(points, key=lambda p: (p.residual, tuple(np.round(p.fingerprint, 9))))
    reps = []
    for p in ordered:
        if not any(np.max(np.abs(p.fingerprint - q.fingerprint)) < tol for q in reps):
            reps.append(p)
    reps.sort(key=_sort_key)
    return reps


def local_rank(c, p, tol=ON_VARIETY_TOL):
    """Kernel dimension of the constraint Jacobian minus the conjugation-orbit dimension."""
    rho = p.rep if isinstance(p, SolutionPoint) else p
    r, jac = residual_and_jacobian(c, rho, include_gauge=False, include_ansatz=False)
    if r.size and np.linalg.norm(r) > tol:
        raise NotOnVariety(f"residual {np.linalg.norm(r):.3e}")
    nullity = jac.shape[1] - numerical_rank(jac)
    return nullity - numerical_rank(d0_matrix(rho, c.generators))


def classify(points, c=None):
    """Counts per (stabilizer, boundary stabilizer) pair."""
    out = {}
    for p in points:
        key = (p.stabilizer, p.boundary_stabilizer)
        out[key] = out.get(key, 0) + 1
    return dict(sorted(out.items()))


def points_to_json(points):
    return {"points": [p.to_json() for p in points]}


def points_from_json(data):
    return [SolutionPoint.from_json(p) for p in data["points"]]


__all__ = [
    "ConstraintSet", "SolutionPoint", "residual", "solve_variety", "dedup_classes",
    "local_rank", "fingerprint", "classify", "levenberg_marquardt",
]
