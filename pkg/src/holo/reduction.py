"""Moment map, torus action, restriction to the punctured sphere, and charts.

The pillowcase chart puts a traceless representation of the 4-punctured
sphere into the normal form A1 = i, B1 = exp(gamma k) i, A2 = exp(theta k) i.
The remaining freedom, conjugation by i, acts as (gamma, theta) ->
(2pi - gamma, 2pi - theta), so the fundamental domain is
gamma in [0, pi], theta in [0, 2pi), with theta folded into [0, pi] on the
edges gamma = 0, pi. The four corners (gamma, theta) in {0, pi}^2 are the
abelian classes.
"""

import numpy as np

from . import su2
from .cohomology import (ABELIAN, CENTRAL, IRREDUCIBLE, h1_basis, numerical_rank,
                         stabilizer_class)
from .surface import (_rotation_between, flow_cocycle, multi_flow, surface_presentation)
from .words import eval_word

TRACELESS_TOL = 1e-8
NORMAL_FORM_TOL = 1e-8
EDGE_TOL = 1e-9
FD_STEP = 1e-6


class NormalFormFailure(ValueError):
    pass


class HypothesisViolation(ValueError):
    pass


def moment(rho, n=None):
    """(T, mu) with T_i = Re rho(A_i) and mu_i = -arcsin T_i."""
    n = n or sum(1 for g in rho if g.startswith("A"))
    t = np.array([rho[f"A{i}"][0] for i in range(1, n + 1)])
    return t, -np.arcsin(np.clip(t, -1.0, 1.0))


def trace_map(rho, n=None):
    return moment(rho, n)[0]


def torus_act(rho, t):
    """(rho . t)(D_i) = rho(D_i) exp(t_i H(rho(A_i))); A_i fixed."""
    out = dict(rho)
    for i, ti in enumerate(np.atleast_1d(t), 1):
        a = rho[f"A{i}"]
        out[f"D{i}"] = su2.qmul(rho[f"D{i}"], su2.exp_im(ti * su2.axis(a)))
    return out


def restrict_to_sphere(rho, n=None):
    n = n or sum(1 for g in rho if g.startswith("A"))
    model = surface_presentation(n)
    out = {}
    for i in range(1, n + 1):
        out[f"A{i}"] = rho[f"A{i}"]
        out[f"B{i}"] = eval_word(model.b_words[f"B{i}"], rho)
    return out


def lift_to_surface(sphere_rho, rng, n=None):
    """Some rho with T(rho) restricted as given and restrict(rho) = sphere_rho.

    D_i is any element carrying A_i to B_i by conjugation (both have the same
    real part); the surface relation then holds because [A_i, D_i] = A_i B_i^-1.
    """
    n = n or sum(1 for g in sphere_rho if g.startswith("A"))
    out = {}
    for i in range(1, n + 1):
        a, b = sphere_rho[f"A{i}"], sphere_rho[f"B{i}"]
        out[f"A{i}"] = a
        if su2.is_central(a):
            out[f"D{i}"] = su2.random_unit(rng)
            continue
        h = _rotation_between(su2.axis(a), su2.axis(b))
        spin = su2.exp_im(rng.uniform(0, 2 * np.pi) * su2.axis(a))
        out[f"D{i}"] = su2.qmul(h, spin)
    return out


def orbit_jacobian(rho, n=None):
    """Derivative of the torus action at t = 0, projected onto H^1.

    The i-th column is the class of the cocycle D_i -> Ad_{D_i} H(A_i) (zero
    elsewhere); its rank drops below n exactly when the action has a
    positive-dimensional stabilizer at rho.
    """
    n = n or sum(1 for g in rho if g.startswith("A"))
    pres = surface_presentation(n).presentation
    gens = pres.generators
    basis = h1_basis(pres, rho)
    cols = []
    for i in range(1, n + 1):
        vec = np.zeros(3 * len(gens))
        k = gens.index(f"D{i}")
        vec[3 * k:3 * k + 3] = su2.ad(rho[f"D{i}"]) @ su2.axis(rho[f"A{i}"])
        cols.append(basis.T @ vec)
    return np.array(cols).T


# -- pillowcase -------------------------------------------------------------

def _conjugate(rho, h):
    hi = su2.qinv(h)
    return {g: su2.qmul(su2.qmul(h, q), hi) for g, q in rho.items()}


def _frame(a, others):
    """Rotation (as quaternion) sending a -> i and the plane of a, v -> the i-j plane."""
    h = _rotation_between(a, np.array([1.0, 0.0, 0.0]))
    for v in others:
        w = su2.ad(h) @ v
        perp = np.array([0.0, w[1], w[2]])
        if np.linalg.norm(perp) > 1e-9:
            ang = np.arctan2(perp[2], perp[1])
            return su2.qmul(su2.exp_im(-0.5 * ang * np.array([1.0, 0, 0])), h)
    return h


def fold(gamma, theta):
    two_pi = 2 * np.pi
    g, t = gamma % two_pi, theta % two_pi
    if g > np.pi + EDGE_TOL:
        g, t = two_pi - g, (two_pi - t) % two_pi
    if abs(g) < EDGE_TOL or abs(g - np.pi) < EDGE_TOL or abs(g - two_pi) < EDGE_TOL:
        g = 0.0 if (abs(g) < EDGE_TOL or abs(g - two_pi) < EDGE_TOL) else np.pi
        if t > np.pi + EDGE_TOL:
            t = two_pi - t
    for ref in (0.0, np.pi, two_pi):
        if abs(t - ref) < EDGE_TOL:
            t = ref % two_pi
    return float(g), float(t)


def pillowcase_chart(rho, tol=TRACELESS_TOL):
    """(gamma, theta) of a traceless representation of the 4-punctured sphere."""
    names = ("A1", "B1", "A2", "B2")
    for g in names:
        if abs(rho[g][0]) > tol:
            raise ValueError(f"{g} is not traceless (Re = {rho[g][0]:.3e})")
    vecs = {g: su2.im(rho[g]) / np.linalg.norm(su2.im(rho[g])) for g in names}
    h = _frame(vecs["A1"], [vecs["B1"], vecs["A2"], vecs["B2"]])
    nf = _conjugate(rho, h)
    b1, a2 = su2.im(nf["B1"]), su2.im(nf["A2"])
    gamma = float(np.arctan2(b1[1], b1[0]))
    theta = float(np.arctan2(a2[1], a2[0]))
    # verify the normal form is attained
    target = {
        "A1": su2.I,
        "B1": su2.qmul(su2.exp_im(gamma * su2.im(su2.K)), su2.I),
        "A2": su2.qmul(su2.exp_im(theta * su2.im(su2.K)), su2.I),
    }
    err = max(np.linalg.norm(nf[g] - target[g]) for g in target)
    if err > NORMAL_FORM_TOL:
        raise NormalFormFailure(f"normal form residual {err:.3e}")
    return fold(gamma, theta)


def is_corner(point, tol=1e-6):
    return all(min(abs(c), abs(c - np.pi)) < tol for c in point)


def pillowcase_rep(gamma, theta):
    """The normal-form representation with given chart coordinates."""
    kv = su2.im(su2.K)
    a1 = su2.I.copy()
    b1 = su2.qmul(su2.exp_im(gamma * kv), su2.I)
    a2 = su2.qmul(su2.exp_im(theta * kv), su2.I)
    b2 = su2.qmul(su2.qmul(a1, su2.qinv(b1)), a2)  # from A1 B1^-1 A2 B2^-1 = 1
    return {"A1": a1, "B1": b1, "A2": a2, "B2": b2}


# -- submersion probes ------------------------------------------------------

def _check(cond, msg):
    if not cond:
        raise HypothesisViolation(msg)


def check_hypotheses(kind, rho, n, tol=TRACELESS_TOL):
    gens = surface_presentation(n).presentation.generators
    t = trace_map(rho, n)
    _check(np.max(np.abs(t)) < tol, "Re rho(A_i) must vanish")
    stab = stabilizer_class(rho, gens)
    sphere = stabilizer_class(restrict_to_sphere(rho, n))
    if kind == "abund1":
        _check(stab == IRREDUCIBLE, "rho must be irreducible")
        _check(sphere in (ABELIAN, CENTRAL), "sphere restriction must be abelian")
    elif kind == "abund2":
        _check(stab == IRREDUCIBLE, "rho must be irreducible")
        _check(sphere == IRREDUCIBLE, "sphere restriction must be irreducible")
    elif kind == "abund3":
        _check(stab in (ABELIAN, CENTRAL), "rho must be abelian")
    else:
        raise ValueError(f"unknown probe {kind!r}")


def trace_flow_jacobian(rho, curves, n, h=FD_STEP):
    """Central-difference Jacobian of t -> T(multi_flow(rho, curves, t)) at 0."""
    k = len(curves)
    jac = np.zeros((n, k))
    for col in range(k):
        e = np.zeros(k)
        e[col] = h
        plus = trace_map(multi_flow(rho, curves, e), n)
        minus = trace_map(multi_flow(rho, curves, -e), n)
        jac[:, col] = (plus - minus) / (2 * h)
    return jac


def _right_log(q_new, q_old):
    d = su2.qmul(q_new, su2.qinv(q_old))
    v = su2.im(d)
    s = np.linalg.norm(v)
    if s < 1e-300:
        return np.zeros(3)
    return np.arctan2(s, d[0]) * v / s


def flow_h1_jacobian(rho, curves, n, h=FD_STEP):
    """Central-difference derivative of multi_flow at 0, projected onto H^1."""
    pres = surface_presentation(n).presentation
    gens = pres.generators
    basis = h1_basis(pres, rho)
    k = len(curves)
    jac = np.zeros((basis.shape[1], k))
    for col in range(k):
        e = np.zeros(k)
        e[col] = h
        plus, minus = multi_flow(rho, curves, e), multi_flow(rho, curves, -e)
        vec = np.concatenate([_right_log(plus[g], minus[g]) for g in gens]) / (2 * h)
        jac[:, col] = basis.T @ vec
    return jac


def flow_h1_matrix(rho, curves, n):
    """Analytic counterpart of :func:`flow_h1_jacobian` via the flow cocycles."""
    pres = surface_presentation(n).presentation
    gens = pres.generators
    basis = h1_basis(pres, rho)
    cols = [np.concatenate([flow_cocycle(rho, c)[g] for g in gens]) for c in curves]
    return basis.T @ np.array(cols).T if cols else np.zeros((basis.shape[1], 0))


def submersion_probe(kind, rho, curves, n, check=True, rtol=1e-6):
    """Rank of the probe differential at t = 0.

    ``kind`` selects the composite: "abund2"/"abund3" use T o Phi_C (target
    R^n), "abund1" uses Phi_C followed by projection onto H^1 (target of
    dimension 6n - 6).
    """
    if check:
        check_hypotheses(kind, rho, n)
    curves = [c for c in curves if c.complete]
    if not curves:
        return 0
    if kind == "abund1":
        jac = flow_h1_jacobian(rho, curves, n)
    else:
        jac = trace_flow_jacobian(rho, curves, n)
    return numerical_rank(jac, rtol=rtol)


# -- samplers for the probe hypotheses ---------------------------------------

def sample_abund1(n, rng):
    """Irreducible rho with A_i traceless and abelian sphere restriction.

    A_i = +-P, D_i = exp(phi_i P) J_i where J_i is either 1 or a unit
    orthogonal to P; an even, nonzero number of flips keeps the relation.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    p = su2.random_traceless(rng)
    q = su2.im(p)
    perp = np.cross(q, rng.standard_normal(3))
    perp = su2.pure(perp / np.linalg.norm(perp))
    flips = np.zeros(n, dtype=bool)
    flips[:2] = True
    if n > 3 and rng.random() < 0.5:
        flips[2:4] = True
    rng.shuffle(flips)
    rho = {}
    for i in range(1, n + 1):
        rho[f"A{i}"] = p * rng.choice([1.0, -1.0])
        d = su2.exp_im(rng.uniform(0, 2 * np.pi) * q)
        rho[f"D{i}"] = su2.qmul(d, perp) if flips[i - 1] else d
    return rho


def sample_abund2(n, rng, attempts=100):
    from .surface import random_surface_rep
    for _ in range(attempts):
        rho = random_surface_rep(n, rng, traceless_a=True)
        try:
            check_hypotheses("abund2", rho, n)
            return rho
        except HypothesisViolation:
            continue
    raise HypothesisViolation("could not sample an abund2 point")


def sample_abund3(n, rng):
    from .surface import random_abelian_surface_rep
    return random_abelian_surface_rep(n, rng, traceless_a=True, axis=su2.random_traceless(rng)[1:])


# -- output -----------------------------------------------------------------

def chart_csv(rows):
    """rows: iterable of (gamma, theta, stabilizer)."""
    lines = ["gamma,theta,stabilizer"]
    for g, t, s in rows:
        lines.append(f"{g:.12f},{t:.12f},{s}")
    return "\n".join(lines) + "\n"


def fingerprint_csv(rows):
    """rows: iterable of (fingerprint vector, stabilizer)."""
    rows = list(rows)
    width = len(rows[0][0]) if rows else 0
    lines = [",".join([f"f{k}" for k in range(width)] + ["stabilizer"])]
    for fp, s in rows:
        lines.append(",".join([f"{v:.12f}" for v in fp] + [s]))
    return "\n".join(lines) + "\n"


def pillowcase_svg(points, polyline=None, size=512):
    """Deterministic SVG of the fundamental domain [0, pi] x [0, 2pi].

    ``points`` are (gamma, theta, stabilizer); corners are drawn as squares.
    """
    pad = 32
    w = size - 2 * pad

    def xy(g, t):
        return pad + w * g / np.pi, size - pad - w * t / (2 * np.pi)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="{pad}" y="{pad}" width="{w}" height="{w}" fill="none" stroke="black"/>',
    ]
    for g in (0.0, np.pi):
        for t in (0.0, np.pi):
            x, y = xy(g, t)
            out.append(f'<rect x="{x - 4:.2f}" y="{y - 4:.2f}" width="8" height="8" '
                       f'fill="none" stroke="gray"/>')
    if polyline:
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in (xy(g, t) for g, t in polyline))
        out.append(f'<polyline points="{pts}" fill="none" stroke="blue"/>')
    colors = {IRREDUCIBLE: "black", ABELIAN: "red", CENTRAL: "green"}
    for g, t, s in points:
        x, y = xy(g, t)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{colors.get(s, "black")}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
