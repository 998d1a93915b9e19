"""Search arc-crossing completions for perturbation curve families.

Candidates conjugate both generators of a sector by exp(s t Im rho(lam))
where lam is a short conjugate of a transverse longitude. A candidate is kept
when it preserves the surface relation, is additive in t, and satisfies the
Hamiltonian identity omega(z_C, v) = D_v f_C on H^1.
"""

import itertools
import sys

import numpy as np

from holo.cohomology import h1_basis, goldman_form, vec_to_cocycle
from holo.surface import (ARC, CurveDatum, builtin_curves, flow_cocycle,
                          hamiltonian_gradient, random_surface_rep, relation_residual,
                          surface_presentation, twist_flow)
from holo.words import Word


def relation_ok(curve, n, rng, samples=3):
    for _ in range(samples):
        rho = random_surface_rep(n, rng)
        for t in rng.uniform(-1, 1, 4):
            if relation_residual(twist_flow(rho, curve, t), n) > 1e-9:
                return False
    return True


def hamiltonian_defect(curve, n, rng, samples=2):
    model = surface_presentation(n)
    gens = model.presentation.generators
    worst = 0.0
    for _ in range(samples):
        rho = random_surface_rep(n, rng)
        basis = h1_basis(model.presentation, rho)
        z = flow_cocycle(rho, curve)
        grad = hamiltonian_gradient(rho, curve, gens)
        for a in range(basis.shape[1]):
            v = vec_to_cocycle(basis[:, a], gens)
            lhs = goldman_form(model.presentation, rho, z, v)
            worst = max(worst, abs(lhs - grad @ basis[:, a]))
    return worst


def conjugators(n, i, j):
    gens = [f"A{i}", f"D{i}", f"A{j}", f"D{j}"]
    singles = [Word()] + [Word.gen(g, e) for g in gens for e in (1, -1)]
    out = list(singles)
    for a, b in itertools.product(singles[1:], repeat=2):
        w = a * b
        if len(w) == 2:
            out.append(w)
    return out


def search(family, n, i, j, seed=0):
    rng = np.random.default_rng(seed)
    base = [c for c in builtin_curves(n) if c.name == f"C_{family}({i},{j})"][0]
    lams = {str(lam): lam for (_, _, lam) in base.actions.values()}
    others = [l for l in range(1, n + 1) if l not in (i, j)]
    cands = []
    for lam in lams.values():
        for x in conjugators(n, i, j):
            cands.append(x * lam * x.inverse())
    found = []
    for choice in itertools.product(itertools.product((1, -1), cands), repeat=len(others)):
        actions = dict(base.actions)
        for l, (s, lam) in zip(others, choice):
            actions[f"A{l}"] = (ARC, s, lam)
            actions[f"D{l}"] = (ARC, s, lam)
        c = CurveDatum(base.name, actions, base.curve_word, True)
        if relation_ok(c, n, rng):
            hd = hamiltonian_defect(c, n, rng)
            found.append((hd, [(l, s, str(lam)) for l, (s, lam) in zip(others, choice)]))
    return sorted(found, key=lambda f: f[0])


if __name__ == "__main__":
    fam, n, i, j = sys.argv[1], int(sys.argv[2]), int(sys.argv[3]), int(sys.argv[4])
    res = search(fam, n, i, j)
    seen = set()
    for hd, ch in res[:40]:
        key = str(ch)
        if key not in seen:
            seen.add(key)
            print(f"{hd:.2e}", ch)
    print(len(res), "relation-preserving candidates")
