"""Search sign / longitude corrections and same-sector arcs for one curve."""

import itertools
import sys

import numpy as np

from holo.surface import ARC, CurveDatum, builtin_curves
from holo.words import Word
from search_completions import conjugators, hamiltonian_defect, relation_ok


def search(family, n, i, j, alt_longitudes=(), seed=0):
    rng = np.random.default_rng(seed)
    base = [c for c in builtin_curves(n) if c.name == f"C_{family}({i},{j})"][0]
    trans = list(base.actions.items())
    lams = [lam for (_, _, lam) in base.actions.values()]
    cands = [x * lam * x.inverse() for lam in lams[:1] for x in conjugators(n, i, j)]
    free = [g for g in (f"A{i}", f"D{i}", f"A{j}", f"D{j}") if g not in base.actions]
    options = [None] + [(s, c) for s in (1, -1) for c in cands]
    variants = [dict(base.actions)]
    for gen, lam in alt_longitudes:
        v = dict(base.actions)
        case, s, _ = v[gen]
        v[gen] = (case, s, Word.parse(lam))
        variants.append(v)
    out = []
    for vi, actions0 in enumerate(variants):
        for signs in itertools.product((1, -1), repeat=len(trans)):
            for extra in itertools.product(options, repeat=len(free)):
                actions = {g: (c, s, lam) for (g, (c, _, lam)), s in zip(actions0.items(), signs)}
                for g, e in zip(free, extra):
                    if e is not None:
                        actions[g] = (ARC, e[0], e[1])
                c = CurveDatum(base.name, actions, base.curve_word, True)
                if relation_ok(c, n, rng, samples=2):
                    out.append((hamiltonian_defect(c, n, rng, 1), vi, signs,
                                [(g, e[0], str(e[1])) for g, e in zip(free, extra) if e]))
    return sorted(out, key=lambda r: r[0])


if __name__ == "__main__":
    fam, n, i, j = sys.argv[1], int(sys.argv[2]), int(sys.argv[3]), int(sys.argv[4])
    alts = [tuple(a.split(":")) for a in sys.argv[5:]]
    for r in search(fam, n, i, j, alts)[:15]:
        print(r)
