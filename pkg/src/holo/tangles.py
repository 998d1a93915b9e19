"""Tangle data: trivial tangles, braid-generated tangles, and the earring family."""

import json
from dataclasses import dataclass

import numpy as np

from . import su2
from .solver import ConstraintSet, fingerprint
from .words import IndexOutOfRange, Presentation, Word, artin_act, as_word, strand_names

EARRING_GENERATORS = ("a", "b", "c", "d", "h", "p")


class MalformedTangle(ValueError):
    pass


@dataclass(frozen=True)
class TangleDatum:
    presentation: Presentation
    meridians: tuple
    boundaryA: tuple
    boundaryB: tuple
    perturbations: tuple = ()  # (mu, lambda, ShapeFunction)
    earring: tuple = None  # (x, y) with [x, y] = -1
    gauge: tuple = None  # default: the first two single-letter meridians

    def __post_init__(self):
        for name in ("meridians", "boundaryA", "boundaryB"):
            object.__setattr__(self, name, tuple(as_word(w) for w in getattr(self, name)))
        if len(self.boundaryA) != len(self.boundaryB):
            raise MalformedTangle("boundaryA and boundaryB differ in length")
        if any(len(m) == 0 for m in self.meridians):
            raise MalformedTangle("meridian words must be nonempty")
        object.__setattr__(self, "perturbations", tuple(
            (as_word(m), as_word(l), f) for m, l, f in self.perturbations))
        if self.earring is not None:
            object.__setattr__(self, "earring", tuple(as_word(w) for w in self.earring))

    @property
    def n(self):
        return len(self.boundaryA)

    def boundary_words(self):
        out = []
        for a, b in zip(self.boundaryA, self.boundaryB):
            out += [a, b]
        return tuple(out)

    def constraints(self, traceless=True, gauge=None, ansatz=None):
        """The solver's constraint set; gauge defaults to the first two meridians."""
        if gauge is None:
            gauge = self.gauge
        if gauge is None:
            gauge = tuple(m.letters[0][0] for m in self.meridians[:2]
                          if len(m) == 1 and m.letters[0][1] == 1)
        return ConstraintSet(
            self.presentation,
            traceless_words=self.meridians if traceless else (),
            perturbations=self.perturbations,
            minus_one=(self.earring,) if self.earring else (),
            gauge=gauge,
            ansatz=ansatz,
            boundary_words=self.boundary_words(),
        )

    def to_json(self):
        out = self.presentation.to_json()
        out["meridians"] = [str(w) for w in self.meridians]
        out["boundaryA"] = [str(w) for w in self.boundaryA]
        out["boundaryB"] = [str(w) for w in self.boundaryB]
        out["perturbations"] = [{"mu": str(m), "lambda": str(l), "shape": f.kind, "t": f.t}
                                for m, l, f in self.perturbations]
        if self.earring:
            out["earring"] = {"x": str(self.earring[0]), "y": str(self.earring[1])}
        if self.gauge is not None:
            out["gauge"] = list(self.gauge)
        return out

    @classmethod
    def from_json(cls, data):
        try:
            pres = Presentation.from_json(data)
            perts = tuple((p["mu"], p["lambda"], su2.ShapeFunction(p.get("shape", "sine"),
                                                                     float(p.get("t", 0.0))))
                          for p in data.get("perturbations", ()))
            ear = data.get("earring")
            return cls(pres, tuple(data["meridians"]), tuple(data.get("boundaryA", ())),
                       tuple(data.get("boundaryB", ())), perts,
                       (ear["x"], ear["y"]) if ear else None,
                       tuple(data["gauge"]) if "gauge" in data else None)
        except (KeyError, TypeError) as exc:
            raise MalformedTangle(f"bad tangle data: {exc}") from exc


def load_tangle(path):
    with open(path) as fh:
        return TangleDatum.from_json(json.load(fh))


def trivial_tangle(n):
    if n < 1:
        raise ValueError("n must be >= 1")
    gens = tuple(strand_names(n))
    words = tuple(Word.gen(g) for g in gens)
    return TangleDatum(Presentation(gens), words, words, words)


def braid_tangle(braid, n):
    """Trivial n-tangle with boundary words acted on by a 2n-strand braid.

    The boundary words are listed as strands (A_1..A_n, B_1..B_n); the braid
    acts on them through the Artin automorphism of the free group on 2n
    letters, which are then substituted back by the trivial boundary words.
    """
    if n < 2:
        raise IndexOutOfRange("braid tangles need n >= 2")
    base = trivial_tangle(n)
    m = 2 * n
    ys = strand_names(m, prefix="y")
    images = {ys[k]: w for k, w in enumerate(base.boundaryA + base.boundaryB)}
    out = [artin_act(braid, Word.gen(y), m, ys).substitute(images) for y in ys]
    return TangleDatum(base.presentation, base.meridians, tuple(out[:n]), tuple(out[n:]))


@dataclass(frozen=True)
class EarringFamilyParams:
    eps: float
    beta: float

    @property
    def nu(self):
        return self.eps * np.sin(self.beta)


def earring_family(p):
    """The explicit circle of representations of the earring tangle."""
    kv = su2.im(su2.K)
    b, nu = p.beta, p.nu
    return {
        "a": su2.I.copy(),
        "b": su2.qmul(su2.exp_im((b + nu) * kv), su2.J),
        "c": su2.qmul(su2.exp_im((b - nu) * kv), su2.J),
        "d": su2.qmul(su2.exp_im(-2 * nu * kv), su2.I),
        "h": su2.qmul(-su2.J, su2.exp_im(-nu * kv)),
        "p": su2.exp_im(nu * kv),
    }


def earring_tangle(eps):
    """Constraint data of the earring tangle: traceless meridians a..h,
    [a p^-1, h] = -1 and the perturbation p = F(b h) with shape eps sin.

    Boundary words are left empty: they are not expressible in a..p alone.
    """
    gens = EARRING_GENERATORS
    pres = Presentation(gens)
    meridians = tuple(Word.gen(g) for g in "abcdh")
    shape = su2.ShapeFunction("sine", eps)
    return TangleDatum(
        pres, meridians,
        boundaryA=(),
        boundaryB=(),
        perturbations=((Word.gen("p"), Word.parse("b h"), shape),),
        earring=(Word.parse("a p^-1"), Word.gen("h")),
        gauge=("a",),
    )


def earring_sweep(eps, samples=256):
    """Fingerprints along beta in [0, 2pi], endpoints included."""
    betas = np.linspace(0.0, 2 * np.pi, samples + 1)
    return betas, np.array([fingerprint(earring_family(EarringFamilyParams(eps, b)),
                                        EARRING_GENERATORS) for b in betas])


def sweep_collisions(betas, fps, tol=1e-6, min_sep=1e-3):
    """Pairs of distinct parameters (mod 2pi) whose fingerprints coincide."""
    out = []
    two_pi = 2 * np.pi
    for a in range(len(betas)):
        for b in range(a + 1, len(betas)):
            gap = abs(betas[a] - betas[b]) % two_pi
            if min(gap, two_pi - gap) < min_sep:
                continue
            if np.max(np.abs(fps[a] - fps[b])) < tol:
                out.append((float(betas[a]), float(betas[b])))
    return out
