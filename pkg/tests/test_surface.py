import numpy as np
import pytest

from holo import su2
from holo.cohomology import (closedness, goldman_form, h1_basis, stabilizer_class,
                             vec_to_cocycle)
from holo.surface import (ARC, TRANSVERSE, CurveDatum, IncompleteCurveDatum, UnknownCurve,
                          builtin_curves, curve_by_name, dump_curves, flow_cocycle,
                          hamiltonian_fc, hamiltonian_gradient, load_curves, multi_flow,
                          random_abelian_surface_rep, random_central_surface_rep,
                          random_surface_rep, relation_residual, surface_presentation,
                          twist_flow, validate_curve)
from holo.words import Word, eval_word

GENUS2 = {"A1": su2.I, "D1": su2.J, "A2": su2.J, "D2": su2.K}


def rows(n, i, j):
    """Transverse entries written out by hand, letter by letter.

    P(a, b) is the cyclic product of A_l B_l^-1 for l = a..b, with B_l = D_l A_l D_l^-1.
    """
    def cyc(a, count):
        return [((a - 1 + k) % n) + 1 for k in range(count)]

    d = (j - i) % n

    def P(inner):
        ls = cyc(i + 1, d - 1) if inner else cyc(i, d + 1)
        return " ".join(f"A{l} D{l} A{l}^-1 D{l}^-1" for l in ls)

    def Pinv(inner):
        return str(Word.parse(P(inner)).inverse())

    A, D = f"A{i}", f"D{i}"
    Aj, Dj = f"A{j}", f"D{j}"
    return {
        "IV": {D: (1, f"{Dj}^-1 {A}"), Aj: (1, f"{Dj}^-1 {A}")},
        "V": {A: (-1, f"{Dj} {D}"), Aj: (-1, f"{D} {Dj}")},
        "VI": {A: (-1, f"{A} {Aj} {A} {Dj} {A}^-1"), D: (1, f"{Aj} {A} {D}"),
               Dj: (1, f"{A} {D} {Aj}")},
        "VII": {D: (1, f"{Dj}^-1 {A} {D}"), A: (-1, f"{A} {Dj}^-1 {A} {D} {A}^-1"),
                Aj: (1, f"{Dj}^-1 {A} {D}")},
        "VIII": {D: (1, f"{P(1)} {Dj}^-1 {Pinv(0)} {A}"),
                 Aj: (1, f"{Dj}^-1 {Pinv(0)} {A} {P(1)}")},
        "IX": {D: (1, f"{P(1)} {Dj}^-1 {Pinv(0)} {A} {D}"),
               Aj: (1, f"{Dj}^-1 {Pinv(0)} {A} {D} {P(1)}"),
               A: (-1, f"{A} {P(1)} {Dj}^-1 {Pinv(0)} {A} {D} {A}^-1")},
        "X": {A: (-1, f"{P(0)} {Dj} {Pinv(1)} {D}"),
              Aj: (-1, f"{Pinv(1)} {D} {P(0)} {Dj}")},
        "XI": {D: (-1, f"{P(1)} {Aj} {Pinv(0)} {A} {D}"),
               A: (-1, f"{A} {P(1)} {Aj} {Pinv(0)} {A} {D} {A}^-1"),
               Dj: (1, f"{Pinv(0)} {A} {D} {P(1)} {Aj}")},
    }


def transverse(c):
    return {g: (s, lam) for g, (case, s, lam) in c.actions.items() if case == TRANSVERSE}


class TestPresentation:
    def test_examples(self):
        s1 = surface_presentation(1)
        assert str(s1.relator) == "A1 D1 A1^-1 D1^-1"
        s2 = surface_presentation(2)
        assert str(s2.b_words["B2"]) == "D2 A2 D2^-1"
        assert str(s2.sphere.relators[0]) == "A1 B1^-1 A2 B2^-1"
        assert s2.presentation.generators == ("A1", "D1", "A2", "D2")
        with pytest.raises(ValueError):
            surface_presentation(0)

    def test_restriction_satisfies_sphere_relation(self, rng):
        for n in (2, 3):
            s = surface_presentation(n)
            rho = random_surface_rep(n, rng)
            sphere = {}
            for i in range(1, n + 1):
                sphere[f"A{i}"] = rho[f"A{i}"]
                sphere[f"B{i}"] = eval_word(s.b_words[f"B{i}"], rho)
            assert np.linalg.norm(eval_word(s.sphere.relators[0], sphere) - su2.ONE) < 1e-12

    def test_genus2_example_relation(self):
        assert relation_residual(GENUS2, 2) < 1e-15


class TestCurveLibrary:
    def test_counts(self):
        for n, k in ((2, 22), (3, 57), (4, 108)):
            assert len(builtin_curves(n)) == k == 8 * n * n - 5 * n
        with pytest.raises(ValueError):
            builtin_curves(1)

    def test_c1_and_c4(self):
        c = curve_by_name(2, "C_I(1)")
        assert transverse(c) == {"A1": (-1, Word.parse("A1 D1 A1^-1"))}
        c = curve_by_name(3, "C_IV(1,2)")
        assert transverse(c) == {"D1": (1, Word.parse("D2^-1 A1")),
                                 "A2": (1, Word.parse("D2^-1 A1"))}

    def test_single_sector_rows(self):
        for i in (1, 2, 3):
            assert transverse(curve_by_name(3, f"C_II({i})")) == {
                f"D{i}": (1, Word.parse(f"D{i} A{i} D{i}^-1"))}
            assert transverse(curve_by_name(3, f"C_III({i})")) == {
                f"D{i}": (1, Word.parse(f"D{i} A{i}")), f"A{i}": (-1, Word.parse(f"A{i} D{i}"))}

    @pytest.mark.parametrize("n,i,j", [(2, 1, 2), (2, 2, 1), (3, 1, 3), (3, 3, 2), (4, 2, 1)])
    def test_transcription_matches_hand_expansion(self, n, i, j):
        for fam, entries in rows(n, i, j).items():
            c = curve_by_name(n, f"C_{fam}({i},{j})")
            want = {g: (s, Word.parse(lam)) for g, (s, lam) in entries.items()}
            assert transverse(c) == want, c.name

    def test_unknown_curve(self):
        with pytest.raises(UnknownCurve):
            curve_by_name(2, "C_XII(1)")

    def test_incomplete_families(self, rng):
        curves = builtin_curves(3)
        incomplete = {c.name.split("(")[0] for c in curves if not c.complete}
        assert incomplete == {"C_VI", "C_XI"}
        c = curve_by_name(3, "C_VI(1,2)")
        rho = random_surface_rep(3, rng)
        with pytest.raises(IncompleteCurveDatum):
            twist_flow(rho, c, 0.1)
        with pytest.raises(IncompleteCurveDatum):
            flow_cocycle(rho, curve_by_name(3, "C_XI(2,1)"))

    def test_completed_curves_validate(self, rng):
        for n in (2, 3):
            for c in builtin_curves(n):
                if c.complete:
                    assert validate_curve(c, n, rng, samples=2, n_t=5), c.name

    def test_validator_rejects_transverse_only_iv(self, rng):
        c = curve_by_name(3, "C_IV(1,3)")
        bare = CurveDatum(c.name, {g: a for g, a in c.actions.items() if a[0] != ARC},
                          c.curve_word, True)
        assert len(bare.actions) < len(c.actions)
        assert not validate_curve(bare, 3, rng)

    def test_json_roundtrip(self, tmp_path):
        curves = builtin_curves(2)
        path = tmp_path / "curves.json"
        dump_curves(curves, path)
        assert load_curves(path) == curves


class TestFlows:
    def test_genus2_example(self):
        c = curve_by_name(2, "C_I(1)")
        out = twist_flow(GENUS2, c, 0.7)
        assert np.allclose(out["A1"], su2.qmul(su2.exp_im([0, 0.7, 0]), su2.I))
        assert np.allclose(out["A1"], [0, np.cos(0.7), 0, -np.sin(0.7)])
        for g in ("D1", "A2", "D2"):
            assert np.array_equal(out[g], GENUS2[g])

    def test_genus2_cocycle_and_fd(self):
        c = curve_by_name(2, "C_I(1)")
        z = flow_cocycle(GENUS2, c)
        assert np.allclose(z["A1"], [0, 1, 0])
        h = 1e-6
        for g, q in GENUS2.items():
            p = twist_flow(GENUS2, c, h)[g]
            m = twist_flow(GENUS2, c, -h)[g]
            fd = su2.im(su2.qmul(p, su2.qinv(m))) / (2 * h)
            assert np.allclose(fd, z[g], atol=1e-8)

    def test_t_zero_is_identity(self, rng):
        rho = random_surface_rep(3, rng)
        for c in builtin_curves(3):
            if c.complete:
                out = twist_flow(rho, c, 0.0)
                assert all(np.allclose(out[g], rho[g]) for g in rho)
        assert multi_flow(rho, [], []) == rho
        with pytest.raises(ValueError):
            multi_flow(rho, [c], [0.1, 0.2])

    def test_central_longitudes_fix_rep(self, rng):
        rho = random_central_surface_rep(2, rng)
        for c in builtin_curves(2):
            if c.complete:
                out = twist_flow(rho, c, 0.9)
                assert all(np.allclose(out[g], rho[g]) for g in rho)
                assert all(np.allclose(v, 0) for v in flow_cocycle(rho, c).values())

    def test_non_commuting_pair(self):
        # found by random search over pairs; frozen values
        c1, c2 = curve_by_name(2, "C_I(1)"), curve_by_name(2, "C_II(1)")
        ab = multi_flow(GENUS2, [c1, c2], [0.5, 0.5])
        ba = multi_flow(GENUS2, [c2, c1], [0.5, 0.5])
        assert np.allclose(ab["A1"], [0, .877583, 0, -.479426], atol=1e-6)
        assert np.allclose(ab["D1"], [0, -.229849, .877583, -.420735], atol=1e-6)
        assert np.allclose(ba["A1"], [0, .877583, -.229849, -.420735], atol=1e-6)
        assert np.allclose(ba["D1"], [0, 0, .877583, -.479426], atol=1e-6)
        assert np.linalg.norm(ab["A1"] - ba["A1"]) > 0.1

    def test_single_curve_multi_flow(self, rng):
        rho = random_surface_rep(2, rng)
        c = curve_by_name(2, "C_III(2)")
        a, b = multi_flow(rho, [c], [0.3]), twist_flow(rho, c, 0.3)
        assert all(np.array_equal(a[g], b[g]) for g in rho)

    def test_arc_commuting_gives_zero(self):
        # D2 commutes with the C_V(1,2) arc longitude value when everything lies on one axis
        rho = {g: su2.exp_im([a, 0, 0]) for g, a in zip(("A1", "D1", "A2", "D2"), (.3, .5, .7, .2))}
        for c in builtin_curves(2):
            if c.complete:
                z = flow_cocycle(rho, c)
                for g, (case, _, _) in c.actions.items():
                    if case == ARC:
                        assert np.allclose(z[g], 0)


def strata(n, rng):
    yield "irreducible", random_surface_rep(n, rng)
    axis = rng.standard_normal(3)
    yield "abelian", random_abelian_surface_rep(n, rng, axis=axis / np.linalg.norm(axis))
    yield "central", random_central_surface_rep(n, rng)


class TestFlowProperties:
    @pytest.mark.parametrize("n", [2, 3])
    def test_relation_flow_property_conservation(self, n, rng):
        curves = [c for c in builtin_curves(n) if c.complete]
        worst = {"relation": 0.0, "additive": 0.0, "conserved": 0.0}
        for _, rho in strata(n, rng):
            stab = stabilizer_class(rho)
            for c in curves:
                s, t = rng.uniform(-1, 1, 2)
                one = twist_flow(rho, c, t)
                two = twist_flow(twist_flow(rho, c, s), c, t)
                both = twist_flow(rho, c, s + t)
                worst["relation"] = max(worst["relation"], relation_residual(one, n))
                worst["additive"] = max(worst["additive"],
                                        max(np.linalg.norm(two[g] - both[g]) for g in rho))
                worst["conserved"] = max(worst["conserved"], abs(
                    eval_word(c.curve_word, one)[0] - eval_word(c.curve_word, rho)[0]))
                assert stabilizer_class(one) == stab
        assert worst["relation"] < 1e-8
        assert worst["additive"] < 1e-8
        assert worst["conserved"] < 1e-9

    def test_hamiltonian_examples(self):
        c = curve_by_name(2, "C_I(1)")
        # C_I(1) word is A1 D1 A1^-1, traceless on the genus-2 fixture
        assert hamiltonian_fc(GENUS2, c, 2.0) == pytest.approx(0.0, abs=1e-15)
        ones = {g: su2.ONE for g in GENUS2}
        assert hamiltonian_fc(ones, c, 0.4) == pytest.approx(-0.4)

    def test_hamiltonian_conserved(self, rng):
        rho = random_surface_rep(3, rng)
        for c in builtin_curves(3):
            if c.complete:
                f0 = hamiltonian_fc(rho, c)
                for s in rng.uniform(-1, 1, 3):
                    assert hamiltonian_fc(twist_flow(rho, c, s), c) == pytest.approx(f0, abs=1e-9)

    @pytest.mark.parametrize("n", [2, 3])
    def test_hamiltonian_identity(self, n, rng):
        """omega(z_C, v) = D_v f_C, with D_v taken by finite differences."""
        pres = surface_presentation(n).presentation
        gens = pres.generators
        h = 1e-6
        worst = 0.0
        for _ in range(2):
            rho = random_surface_rep(n, rng)
            basis = h1_basis(pres, rho)
            for c in builtin_curves(n):
                if not c.complete:
                    continue
                z = flow_cocycle(rho, c)
                assert closedness(pres, rho, z) < 1e-9
                vec = basis @ rng.standard_normal(basis.shape[1])
                v = vec_to_cocycle(vec, gens)
                plus = {g: su2.qmul(su2.exp_im(h * v[g]), rho[g]) for g in gens}
                minus = {g: su2.qmul(su2.exp_im(-h * v[g]), rho[g]) for g in gens}
                fd = (hamiltonian_fc(plus, c) - hamiltonian_fc(minus, c)) / (2 * h)
                assert hamiltonian_gradient(rho, c, gens) @ vec == pytest.approx(fd, abs=1e-6)
                worst = max(worst, abs(goldman_form(pres, rho, z, v) - fd))
        assert worst < 1e-5
