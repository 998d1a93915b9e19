"""Genus-n surface and 2n-punctured sphere models, perturbation curves, twist flows.

The twist flow of a curve C with shape t sin(alpha) acts generator by
generator: a transverse crossing with sign s multiplies rho(E) on the left by
exp(s t Im rho(lambda)), an arc crossing conjugates rho(E) by the same element.
Note t sin(alpha) Q = t Im rho(lambda) when rho(lambda) = exp(alpha Q), which
also covers the central case.
"""

import json
import re as _re
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import su2
from .words import Presentation, Word, as_word, commutator, eval_word, word_jacobian

NONE, TRANSVERSE, ARC = "none", "transverse", "arc"
RELATION_TOL = 1e-8


class IncompleteCurveDatum(ValueError):
    pass


class UnknownCurve(KeyError):
    pass


@dataclass(frozen=True)
class SurfaceModel:
    n: int
    presentation: Presentation
    sphere: Presentation
    b_words: dict

    @property
    def relator(self):
        return self.presentation.relators[0]

    def a_names(self):
        return [f"A{i}" for i in range(1, self.n + 1)]

    def d_names(self):
        return [f"D{i}" for i in range(1, self.n + 1)]


def surface_presentation(n):
    if n < 1:
        raise ValueError("genus must be >= 1")
    gens = []
    rel = Word()
    sphere_gens = []
    sphere_rel = Word()
    b_words = {}
    for i in range(1, n + 1):
        a, d, b = f"A{i}", f"D{i}", f"B{i}"
        gens += [a, d]
        rel = rel * commutator(a, d)
        sphere_gens += [a, b]
        sphere_rel = sphere_rel * Word.parse(f"{a} {b}^-1")
        b_words[b] = Word.parse(f"{d} {a} {d}^-1")
    return SurfaceModel(
        n,
        Presentation(tuple(gens), (rel,)),
        Presentation(tuple(sphere_gens), (sphere_rel,)),
        b_words,
    )


def expand_b(w, n):
    """Replace B_l by D_l A_l D_l^-1."""
    return as_word(w).substitute(surface_presentation(n).b_words)


@dataclass(frozen=True)
class CurveDatum:
    name: str
    actions: dict  # generator -> (case, sign, longitude Word)
    curve_word: Word
    complete: bool = False

    def action(self, gen):
        return self.actions.get(gen, (NONE, 0, Word()))

    def to_json(self):
        return {
            "name": self.name,
            "actions": {g: {"case": c, "sign": s, "longitude": str(lam)}
                        for g, (c, s, lam) in self.actions.items()},
            "curve_word": str(self.curve_word),
            "complete": self.complete,
        }

    @classmethod
    def from_json(cls, data):
        actions = {g: (a["case"], int(a["sign"]), Word.parse(a["longitude"]))
                   for g, a in data["actions"].items()}
        return cls(data["name"], actions, Word.parse(data["curve_word"]),
                   bool(data.get("complete", False)))


# -- template expansion ----------------------------------------------------

_TOKEN = _re.compile(r"^(A|B|D)\{(i|j|l)\}$|^(Pij|Pin)$")


def _cyclic(start, count, n):
    return [((start - 1 + k) % n) + 1 for k in range(count)]


def _prod_ab(indices):
    w = Word()
    for l in indices:
        w = w * Word.parse(f"A{l} D{l} A{l}^-1 D{l}^-1")
    return w


def expand_template(text, n, i, j=None, l=None):
    idx = {"i": i, "j": j, "l": l}
    d = (j - i) % n if j is not None else 0
    out = Word()
    for tok in text.split():
        inv = tok.endswith("^-1")
        base = tok[:-3] if inv else tok
        m = _TOKEN.match(base)
        if not m:
            raise ValueError(f"bad template token {tok!r}")
        if m.group(3) == "Pij":
            w = _prod_ab(_cyclic(i, d + 1, n))
        elif m.group(3) == "Pin":
            w = _prod_ab(_cyclic(i + 1, d - 1, n)) if d >= 1 else Word()
        else:
            letter, which = m.group(1), m.group(2)
            k = idx[which]
            if letter == "B":
                w = Word.parse(f"D{k} A{k} D{k}^-1")
            else:
                w = Word.gen(f"{letter}{k}")
        out = out * (w.inverse() if inv else w)
    return out


def _load(name):
    return json.loads(resources.files("holo.data").joinpath(name).read_text())


def _sector_sets(n, i, j):
    """Sectors strictly between i and j counterclockwise, and the rest."""
    d = (j - i) % n
    inner = _cyclic(i + 1, d - 1, n) if d >= 1 else []
    outer = [l for l in range(1, n + 1) if l not in inner and l not in (i, j)]
    return inner, outer


def _expand_family(fam, completion, n, i, j=None):
    actions = {}
    for key, spec in fam["transverse"].items():
        gen = str(expand_template(key, n, i, j))
        actions[gen] = (TRANSVERSE, int(spec["sign"]), expand_template(spec["longitude"], n, i, j))
    comp = completion.get(fam["family"], {})
    inner, outer = _sector_sets(n, i, j) if j is not None else ([], [])
    for key, spec in comp.get("arcs", {}).items():
        sectors = {"l_in": inner, "l_out": outer}
        m = _re.match(r"^(A|D)\{(i|j|l_in|l_out)\}$", key)
        if not m:
            raise ValueError(f"bad completion key {key!r}")
        letter, which = m.groups()
        ls = sectors.get(which, [None])
        for l in ls:
            k = {"i": i, "j": j}.get(which, l)
            gen = f"{letter}{k}"
            lam = expand_template(spec["longitude"], n, i, j, l)
            actions[gen] = (ARC, int(spec["sign"]), lam)
    name = f"C_{fam['family']}({i})" if j is None else f"C_{fam['family']}({i},{j})"
    return CurveDatum(name, actions, expand_template(fam["curve_word"], n, i, j),
                      complete=fam["family"] in completion)


def builtin_curves(n, validate=False, rng=None):
    """The 8n^2 - 5n special perturbation curves on the genus-n surface."""
    if n < 2:
        raise ValueError("builtin curves need n >= 2")
    template = _load("curves_template.json")["families"]
    completion = _load("curve_completions.json")["families"]
    curves = []
    for fam in template:
        if fam["pair"]:
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    if i != j:
                        curves.append(_expand_family(fam, completion, n, i, j))
        else:
            for i in range(1, n + 1):
                curves.append(_expand_family(fam, completion, n, i))
    if validate:
        rng = rng or np.random.default_rng(0)
        curves = [c if not c.complete or validate_curve(c, n, rng) else
                  CurveDatum(c.name, c.actions, c.curve_word, False) for c in curves]
    return curves


def curve_by_name(n, name):
    for c in builtin_curves(n):
        if c.name.replace(",", "") == name.replace(",", "").replace(" ", ""):
            return c
    raise UnknownCurve(name)


# -- random representations -----------------------------------------------

def _rotation_between(a, b):
    """Unit quaternion h with h a h^-1 = b for unit imaginary a, b."""
    c = np.cross(a, b)
    s = np.linalg.norm(c)
    dot = float(np.dot(a, b))
    if s < 1e-12:
        if dot > 0:
            return su2.ONE.copy()
        perp = np.cross(a, [1.0, 0, 0])
        if np.linalg.norm(perp) < 1e-6:
            perp = np.cross(a, [0, 1.0, 0])
        return su2.pure(perp / np.linalg.norm(perp))
    angle = np.arctan2(s, dot)
    return su2.exp_im(0.5 * angle * c / s)


def solve_commutator(a, target, rng):
    """Some d with a d a^-1 d^-1 = target, provided Re(a^-1 target) = Re(a)."""
    lhs = su2.qmul(su2.qinv(a), target)  # need d a^-1 d^-1 = a^-1 target
    ainv = su2.qinv(a)
    if su2.is_central(ainv):
        return su2.random_unit(rng)
    h = _rotation_between(su2.axis(ainv), su2.axis(lhs))
    spin = su2.exp_im(rng.uniform(0, np.pi) * su2.axis(lhs))
    return su2.qmul(spin, h)


def random_surface_rep(n, rng, traceless_a=False):
    """Random representation of the genus-n surface group (relation exact to ~1e-15).

    With ``traceless_a`` every A_i is purely imaginary (T(rho) = 0).
    """
    gens = surface_presentation(n).presentation.generators
    if n == 1:
        return random_abelian_surface_rep(1, rng, traceless_a, axis=su2.random_traceless(rng)[1:])
    while True:
        rho = {}
        for i in range(2, n + 1):
            rho[f"A{i}"] = su2.random_traceless(rng) if traceless_a else su2.random_unit(rng)
            rho[f"D{i}"] = su2.random_unit(rng)
        rest = su2.ONE
        for i in range(2, n + 1):
            rest = su2.qmul(rest, eval_word(commutator(f"A{i}", f"D{i}"), rho))
        target = su2.qinv(rest)  # [A1, D1] = target
        if su2.is_central(target, 1e-9):
            continue
        beta, p = su2.log_axis(target)
        if traceless_a:
            # alpha = pi/2 forces <u, p> = 0
            u = np.cross(p, rng.standard_normal(3))
            u /= np.linalg.norm(u)
            alpha = np.pi / 2
        else:
            u = su2.random_traceless(rng)[1:]
            alpha = np.arctan2(1 - np.cos(beta), np.sin(beta) * float(np.dot(u, p)))
        rho["A1"] = su2.exp_im(alpha * u)
        rho["D1"] = solve_commutator(rho["A1"], target, rng)
        return {g: rho[g] for g in gens}


def random_abelian_surface_rep(n, rng, traceless_a=False, axis=None):
    q = np.array([1.0, 0, 0]) if axis is None else np.asarray(axis, float)
    rho = {}
    for i in range(1, n + 1):
        ta = np.pi / 2 * rng.choice([1, -1]) if traceless_a else rng.uniform(-np.pi, np.pi)
        rho[f"A{i}"] = su2.exp_im(ta * q)
        rho[f"D{i}"] = su2.exp_im(rng.uniform(-np.pi, np.pi) * q)
    return rho


def random_central_surface_rep(n, rng):
    return {g: su2.ONE * rng.choice([1.0, -1.0])
            for g in surface_presentation(n).presentation.generators}


def relation_residual(rho, n):
    return float(np.linalg.norm(eval_word(surface_presentation(n).relator, rho) - su2.ONE))


# -- flows -----------------------------------------------------------------

def _twist_element(rho, lam, sign, t):
    return su2.exp_im(sign * t * su2.im(eval_word(lam, rho)))


def twist_flow(rho, curve, t, check=False):
    """Phi_{C,t}(rho) for the shape t sin(alpha)."""
    if not curve.complete:
        raise IncompleteCurveDatum(curve.name)
    out = dict(rho)
    for gen, (case, sign, lam) in curve.actions.items():
        if case == NONE or gen not in rho:
            continue
        g = _twist_element(rho, lam, sign, t)
        if case == TRANSVERSE:
            out[gen] = su2.qmul(g, rho[gen])
        elif case == ARC:
            out[gen] = su2.qmul(su2.qmul(g, rho[gen]), su2.qinv(g))
        else:
            raise ValueError(f"unknown action case {case!r}")
    return out


def multi_flow(rho, curves, ts):
    if len(curves) != len(ts):
        raise ValueError("curves and parameters differ in length")
    for c, t in zip(curves, ts):
        rho = twist_flow(rho, c, t)
    return rho


def flow_cocycle(rho, curve):
    """z_C: derivative of the twist flow at t = 0, right-translated."""
    if not curve.complete:
        raise IncompleteCurveDatum(curve.name)
    z = {g: np.zeros(3) for g in rho}
    for gen, (case, sign, lam) in curve.actions.items():
        if gen not in rho:
            continue
        q = sign * su2.im(eval_word(lam, rho))
        if case == TRANSVERSE:
            z[gen] = q
        elif case == ARC:
            z[gen] = q - su2.ad(rho[gen]) @ q
    return z


def hamiltonian_fc(rho, curve, t=1.0):
    """f_C = psi(arccos Re rho(C)) with psi(alpha) = -t cos(alpha)."""
    w = float(np.clip(eval_word(curve.curve_word, rho)[0], -1.0, 1.0))
    return -t * np.cos(np.arccos(w))


def hamiltonian_gradient(rho, curve, generators, t=1.0):
    """Covector of D_v f_C in the cocycle coordinates (right-translated)."""
    val, blocks = word_jacobian(curve.curve_word, rho)
    grad = np.zeros(3 * len(generators))
    # d Re(exp(s w) q) = -<w, Im q>, and f = -t Re
    for k, g in enumerate(generators):
        if g in blocks:
            grad[3 * k:3 * k + 3] = t * blocks[g].T @ su2.im(val)
    return grad


def validate_curve(curve, n, rng, samples=5, n_t=20, tol=RELATION_TOL):
    """Relation preservation at random on-variety points and parameters."""
    if not curve.actions:
        return False
    for _ in range(samples):
        rho = random_surface_rep(n, rng)
        for t in rng.uniform(-1, 1, size=n_t):
            if relation_residual(twist_flow_unchecked(rho, curve, t), n) > tol:
                return False
    return True


def twist_flow_unchecked(rho, curve, t):
    return twist_flow(rho, CurveDatum(curve.name, curve.actions, curve.curve_word, True), t)


def load_curves(path):
    with open(path) as fh:
        return [CurveDatum.from_json(c) for c in json.load(fh)]


def dump_curves(curves, path):
    with open(path, "w") as fh:
        json.dump([c.to_json() for c in curves], fh, indent=1, sort_keys=True)
