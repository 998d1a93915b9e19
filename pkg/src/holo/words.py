"""Free-group words, presentations, and word maps SU(2)^g -> SU(2).

Word syntax is whitespace separated generator names, each optionally suffixed
with ``^-1``, e.g. ``"A1 D1 A1^-1"``. Words are freely reduced on construction.
"""

from dataclasses import dataclass, field

import numpy as np

from . import su2


class UnknownGenerator(KeyError):
    pass


class IndexOutOfRange(ValueError):
    pass


def _reduce(letters):
    out = []
    for name, e in letters:
        if out and out[-1][0] == name and out[-1][1] == -e:
            out.pop()
        else:
            out.append((name, e))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    letters: tuple = ()

    def __post_init__(self):
        for name, e in self.letters:
            if e not in (1, -1):
                raise ValueError(f"exponent of {name} must be +-1, got {e}")
        object.__setattr__(self, "letters", _reduce(tuple(self.letters)))

    @classmethod
    def parse(cls, text):
        letters = []
        for tok in str(text).split():
            if tok == "1":
                continue
            if tok.endswith("^-1"):
                letters.append((tok[:-3], -1))
            elif tok.endswith("^1"):
                letters.append((tok[:-2], 1))
            else:
                letters.append((tok, 1))
        return cls(tuple(letters))

    @classmethod
    def gen(cls, name, e=1):
        return cls(((name, e),))

    def __mul__(self, other):
        return Word(self.letters + other.letters)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = Word()
        for _ in range(n):
            out = out * self
        return out

    def inverse(self):
        return Word(tuple((name, -e) for name, e in reversed(self.letters)))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def generators(self):
        return {name for name, _ in self.letters}

    def substitute(self, images):
        """Replace each generator by a word (missing names are kept)."""
        out = Word()
        for name, e in self.letters:
            w = images.get(name, Word.gen(name))
            out = out * (w if e == 1 else w.inverse())
        return out

    def __str__(self):
        return " ".join(n if e == 1 else f"{n}^-1" for n, e in self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"


def as_word(w):
    return w if isinstance(w, Word) else Word.parse(w)


def commutator(x, y):
    x, y = as_word(x), as_word(y)
    return x * y * x.inverse() * y.inverse()


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relators: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(as_word(r) for r in self.relators))
        known = set(self.generators)
        for r in self.relators:
            missing = r.generators() - known
            if missing:
                raise UnknownGenerator(f"relator {r} uses undeclared {sorted(missing)}")

    def to_json(self):
        return {"generators": list(self.generators), "relators": [str(r) for r in self.relators]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(data["generators"]), tuple(data.get("relators", ())))


def eval_word(w, rho):
    """Product of the images of the letters of ``w`` under ``rho`` (name -> quaternion)."""
    out = su2.ONE
    for n, (name, e) in enumerate(as_word(w), 1):
        try:
            q = rho[name]
        except KeyError:
            raise UnknownGenerator(name) from None
        out = su2.qmul(out, q if e == 1 else su2.qinv(q))
        if n % su2.RENORM_EVERY == 0:
            out = su2.normalize(out)
    return out


def word_jacobian(w, rho):
    """Right-translated derivative of the word map at ``rho``.

    Returns ``(value, blocks)`` where ``blocks[name]`` is the 3x3 matrix J with
    d/ds eval(w, rho_s) eval(w, rho)^-1 = sum J_name u_name for
    rho_s(x) = exp(s u_x) rho(x). Generators not in ``w`` are absent.
    """
    blocks = {}
    prefix = su2.ONE
    for n, (name, e) in enumerate(as_word(w), 1):
        try:
            q = rho[name]
        except KeyError:
            raise UnknownGenerator(name) from None
        if e == 1:
            contrib = su2.ad(prefix)
            prefix = su2.qmul(prefix, q)
        else:
            prefix = su2.qmul(prefix, su2.qinv(q))
            contrib = -su2.ad(prefix)
        if n % su2.RENORM_EVERY == 0:
            prefix = su2.normalize(prefix)
        if name in blocks:
            blocks[name] = blocks[name] + contrib
        else:
            blocks[name] = contrib
    return prefix, blocks


def jacobian_matrix(w, rho, generators):
    """Dense 3 x 3g version of :func:`word_jacobian` in the given generator order."""
    value, blocks = word_jacobian(w, rho)
    out = np.zeros((3, 3 * len(generators)))
    for k, name in enumerate(generators):
        if name in blocks:
            out[:, 3 * k:3 * k + 3] = blocks[name]
    unknown = set(blocks) - set(generators)
    if unknown:
        raise UnknownGenerator(sorted(unknown)[0])
    return value, out


def strand_names(m, prefix="x"):
    return [f"{prefix}{k}" for k in range(1, m + 1)]


def _artin_images(s, m, names):
    k = abs(s)
    if s == 0 or k > m - 1:
        raise IndexOutOfRange(f"braid generator {s} invalid for {m} strands")
    xk, xk1 = Word.gen(names[k - 1]), Word.gen(names[k])
    if s > 0:
        return {names[k - 1]: xk * xk1 * xk.inverse(), names[k]: xk}
    return {names[k - 1]: xk1, names[k]: xk1.inverse() * xk * xk1}


def artin_act(braid, w, strands, names=None):
    """Apply the Artin automorphisms of ``braid`` (signed indices) to ``w``.

    sigma_k: x_k -> x_k x_{k+1} x_k^-1, x_{k+1} -> x_k. Letters are applied
    left to right as successive substitutions.
    """
    names = names or strand_names(strands)
    w = as_word(w)
    for s in braid:
        w = w.substitute(_artin_images(s, strands, names))
    return w
