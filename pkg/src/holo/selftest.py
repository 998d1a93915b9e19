"""Quick property checks behind ``holo <cmd> --selftest``.

Each suite returns a list of (name, passed) pairs; they are cheap versions of
the invariants exercised by the test suite.
"""

import numpy as np

from . import su2
from .cohomology import goldman_form, h1_basis, vec_to_cocycle
from .reduction import (pillowcase_chart, pillowcase_rep, restrict_to_sphere, sample_abund2,
                        sample_abund3, submersion_probe, torus_act)
from .solver import dedup_classes, local_rank, residual, solve_variety
from .surface import (builtin_curves, flow_cocycle, hamiltonian_fc, random_surface_rep,
                      relation_residual, surface_presentation, twist_flow)
from .tangles import EarringFamilyParams, earring_family, earring_tangle, trivial_tangle
from .words import Word, eval_word, word_jacobian


def _fd_jacobian_ok(rng):
    gens = ["x", "y", "z"]
    w = Word(tuple((gens[k], int(e)) for k, e in
                   zip(rng.integers(0, 3, 12), rng.choice([-1, 1], 12))))
    rho = {g: su2.random_unit(rng) for g in gens}
    val, blocks = word_jacobian(w, rho)
    worst = 0.0
    for g, jb in blocks.items():
        for a in range(3):
            e = np.zeros(3)
            e[a] = 1e-6
            p = dict(rho, **{g: su2.qmul(su2.exp_im(e), rho[g])})
            m = dict(rho, **{g: su2.qmul(su2.exp_im(-e), rho[g])})
            d = su2.qmul(eval_word(w, p), su2.qinv(eval_word(w, m)))
            worst = max(worst, np.linalg.norm(su2.im(d) / 2e-6 - jb[:, a]))
    return worst < 1e-6


def suite_solve(rng):
    t = trivial_tangle(2)
    c = t.constraints(ansatz="abelian", gauge=("x1",))
    classes = dedup_classes(solve_variety(c, restarts=40, seed=int(rng.integers(1 << 30))))
    ear = earring_tangle(0.1)
    r = max(np.linalg.norm(residual(ear.constraints(), earring_family(EarringFamilyParams(0.1, b))))
            for b in rng.uniform(0, 2 * np.pi, 10))
    return [("word jacobian vs finite differences", _fd_jacobian_ok(rng)),
            ("trivial 2-tangle abelian classes = 2", len(classes) == 2),
            ("earring family residual", r < 1e-12)]


def suite_classify(rng):
    t = trivial_tangle(3)
    c = t.constraints()
    pts = solve_variety(c, restarts=5, seed=int(rng.integers(1 << 30)))
    ranks = [local_rank(c, p) for p in pts if p.stabilizer == "Z2"]
    pres = surface_presentation(2).presentation
    rho = random_surface_rep(2, rng)
    return [("trivial 3-tangle local rank 3", bool(ranks) and all(r == 3 for r in ranks)),
            ("genus-2 H1 dimension 6", h1_basis(pres, rho).shape[1] == 6)]


def suite_flow(rng):
    checks = []
    for n in (2, 3):
        worst = 0.0
        for c in builtin_curves(n):
            if not c.complete:
                continue
            rho = random_surface_rep(n, rng)
            worst = max(worst, relation_residual(twist_flow(rho, c, rng.uniform(-1, 1)), n))
        checks.append((f"relation preservation n={n}", worst < 1e-8))
    pres = surface_presentation(2).presentation
    rho = random_surface_rep(2, rng)
    basis = h1_basis(pres, rho)
    c = builtin_curves(2)[0]
    z = flow_cocycle(rho, c)
    v = vec_to_cocycle(basis[:, 0], pres.generators)
    h = 1e-6
    vp = {g: su2.qmul(su2.exp_im(h * v[g]), rho[g]) for g in rho}
    vm = {g: su2.qmul(su2.exp_im(-h * v[g]), rho[g]) for g in rho}
    fd = (hamiltonian_fc(vp, c) - hamiltonian_fc(vm, c)) / (2 * h)
    checks.append(("hamiltonian identity", abs(goldman_form(pres, rho, z, v) - fd) < 1e-5))
    return checks


def suite_reduce(rng):
    g, t = rng.uniform(0.1, np.pi - 0.1), rng.uniform(0.1, 2 * np.pi - 0.1)
    rep = pillowcase_rep(g, t)
    h = su2.random_unit(rng)
    conj = {k: su2.qmul(su2.qmul(h, q), su2.qinv(h)) for k, q in rep.items()}
    a, b = pillowcase_chart(rep), pillowcase_chart(conj)
    rho = random_surface_rep(2, rng, traceless_a=True)
    s1 = restrict_to_sphere(rho)
    s2 = restrict_to_sphere(torus_act(rho, rng.uniform(-3, 3, 2)))
    inv = max(np.linalg.norm(s1[k] - s2[k]) for k in s1)
    return [("chart conjugation invariance", np.allclose(a, b, atol=1e-9)),
            ("restriction torus invariance", inv < 1e-10)]


def suite_probe(rng):
    curves = builtin_curves(2)
    return [("abund2 rank 2", submersion_probe("abund2", sample_abund2(2, rng), curves, 2) == 2),
            ("abund3 rank 2", submersion_probe("abund3", sample_abund3(2, rng), curves, 2) == 2)]


SUITES = {
    "solve": suite_solve,
    "classify": suite_classify,
    "flow": suite_flow,
    "reduce": suite_reduce,
    "plot": suite_reduce,
    "probe": suite_probe,
}


def run(name, seed=0, out=print):
    rng = np.random.default_rng(seed)
    names = list(dict.fromkeys(SUITES)) if name == "all" else [name]
    ok = True
    for n in names:
        for label, passed in SUITES[n](rng):
            out(f"{'PASS' if passed else 'FAIL'} {n}: {label}")
            ok = ok and bool(passed)
    return ok
