import json

import numpy as np
import pytest

from holo import su2
from holo.cli import sphere_tangle, surface_tangle
from holo.cohomology import ABELIAN, CENTRAL, IRREDUCIBLE, NotOnVariety, numerical_rank, d0_matrix
from holo.solver import (ConstraintSet, SolutionPoint, classify, dedup_classes, fingerprint,
                         levenberg_marquardt, local_rank, make_point, points_from_json,
                         points_to_json, residual, residual_and_jacobian, residual_norm,
                         solve_variety)
from holo.tangles import EarringFamilyParams, earring_family, earring_tangle, trivial_tangle
from holo.words import Presentation, UnknownGenerator
from conftest import conj


def fd_jacobian(c, rho, h=1e-6):
    """Finite-difference Jacobian of the ungauged residual in left-translated coordinates."""
    gens = c.generators
    base = residual_and_jacobian(c, rho, include_gauge=False, include_ansatz=False)[0]
    cols = []
    for k, g in enumerate(gens):
        for a in range(3):
            e = np.zeros(3)
            e[a] = h
            p = dict(rho, **{g: su2.qmul(su2.exp_im(e), rho[g])})
            m = dict(rho, **{g: su2.qmul(su2.exp_im(-e), rho[g])})
            rp = residual_and_jacobian(c, p, include_gauge=False, include_ansatz=False)[0]
            rm = residual_and_jacobian(c, m, include_gauge=False, include_ansatz=False)[0]
            cols.append((rp - rm) / (2 * h))
    return base, np.array(cols).T


def fd_local_rank(c, rho):
    _, jac = fd_jacobian(c, rho)
    s = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(s > 1e-6 * max(s[0], 1.0)))
    return jac.shape[1] - rank - numerical_rank(d0_matrix(rho, c.generators))


class TestConstraintSet:
    def test_unknown_generator(self):
        with pytest.raises(UnknownGenerator):
            ConstraintSet(Presentation(("x",)), traceless_words=("y",))
        with pytest.raises(UnknownGenerator):
            ConstraintSet(Presentation(("x",)), gauge=("y",))
        with pytest.raises(ValueError):
            ConstraintSet(Presentation(("x",)), ansatz="nonabelian")

    def test_empty(self):
        assert ConstraintSet(Presentation(("x",))).is_empty()
        assert not trivial_tangle(2).constraints().is_empty()


class TestResidual:
    def test_trivial_tangle_on_i(self):
        c = trivial_tangle(3).constraints()
        rho = {g: su2.I for g in c.generators}
        assert np.array_equal(residual(c, rho), np.zeros_like(residual(c, rho)))

    def test_commutator_relator(self):
        c = ConstraintSet(Presentation(("x", "y"), ("x y x^-1 y^-1",)))
        r = residual(c, {"x": su2.I, "y": su2.J})
        assert np.allclose(r[:4], [-2, 0, 0, 0])

    def test_earring_point(self):
        c = earring_tangle(0.1).constraints()
        rho = earring_family(EarringFamilyParams(0.1, 0.0))
        assert residual_norm(c, rho) < 1e-12

    def test_earring_family_random(self, rng):
        for _ in range(20):
            eps, beta = rng.uniform(-0.5, 0.5), rng.uniform(0, 2 * np.pi)
            c = earring_tangle(eps).constraints()
            assert residual_norm(c, earring_family(EarringFamilyParams(eps, beta))) < 1e-12

    def test_analytic_jacobian_matches_fd(self, rng):
        for c in (sphere_tangle(2).constraints(), earring_tangle(0.3).constraints(),
                  surface_tangle(2).constraints()):
            rho = {g: su2.random_unit(rng) for g in c.generators}
            _, jac = residual_and_jacobian(c, rho, include_gauge=False, include_ansatz=False)
            _, fd = fd_jacobian(c, rho)
            assert np.allclose(jac, fd, atol=1e-6)


class TestSolve:
    def test_empty_constraints_every_start_converges(self):
        c = ConstraintSet(Presentation(("x",)))
        pts = solve_variety(c, restarts=10, seed=1)
        assert len(pts) == 10 and all(p.residual == 0.0 for p in pts)

    def test_trivial_2_tangle_arc(self):
        c = trivial_tangle(2).constraints()
        pts = solve_variety(c, restarts=40, seed=3)
        assert len(pts) == 40
        for p in pts:
            assert p.residual < 1e-9
            x1, x2 = p.rep["x1"], p.rep["x2"]
            assert np.allclose(x1, su2.I, atol=1e-8)
            assert abs(x2[0]) < 1e-8 and abs(x2[2]) < 1e-8 and x2[3] >= -1e-12
            ends = min(np.linalg.norm(x2 - su2.I), np.linalg.norm(x2 + su2.I)) < 1e-6
            assert p.stabilizer == (ABELIAN if ends else IRREDUCIBLE)
        # interior points spread along the arc
        angles = sorted(np.arctan2(p.rep["x2"][3], p.rep["x2"][1]) for p in pts)
        assert angles[-1] - angles[0] > 2.0

    def test_trivial_2_tangle_endpoints(self):
        c = trivial_tangle(2).constraints(ansatz="abelian")
        pts = dedup_classes(solve_variety(c, restarts=20, seed=0))
        assert len(pts) == 2 and {p.stabilizer for p in pts} == {ABELIAN}

    def test_sphere_abelian_ansatz_four_points(self):
        c = sphere_tangle(2).constraints(ansatz="abelian")
        pts = dedup_classes(solve_variety(c, restarts=60, seed=0))
        assert len(pts) == 4
        for p in pts:
            assert all(np.allclose(np.abs(q), [0, 1, 0, 0], atol=1e-8) for q in p.rep.values())

    @pytest.mark.parametrize("n", [2, 3])
    def test_trivial_abelian_classes(self, n):
        c = trivial_tangle(n).constraints(ansatz="abelian")
        pts = dedup_classes(solve_variety(c, restarts=40 * n, seed=0))
        assert len(pts) == 2 ** (n - 1)

    @pytest.mark.parametrize("n", [1, 2])
    def test_central_surface_classes(self, n):
        c = surface_tangle(n).constraints(ansatz="central")
        pts = dedup_classes(solve_variety(c, restarts=200, seed=0))
        assert len(pts) == 2 ** (2 * n)
        assert classify(pts) == {(CENTRAL, CENTRAL): 2 ** (2 * n)}

    def test_reproducible_and_pool_matches_serial(self):
        c = sphere_tangle(2).constraints()
        a = solve_variety(c, restarts=12, seed=5, workers=1)
        b = solve_variety(c, restarts=12, seed=5, workers=1)
        pool = solve_variety(c, restarts=12, seed=5, workers=2)
        for x, y, z in zip(a, b, pool):
            assert np.array_equal(x.fingerprint, y.fingerprint)
            assert np.array_equal(x.fingerprint, z.fingerprint)
        assert len(a) == len(b) == len(pool)

    def test_stored_residual_is_honest(self):
        c = sphere_tangle(2).constraints()
        for p in solve_variety(c, restarts=10, seed=2):
            assert p.residual == pytest.approx(residual_norm(c, p.rep), abs=1e-15)
            assert p.residual < 1e-9

    def test_lm_fixed_point(self):
        c = sphere_tangle(2).constraints()
        p = solve_variety(c, restarts=3, seed=4)[0]
        rho, res = levenberg_marquardt(c, p.rep)
        assert all(np.allclose(rho[g], p.rep[g], atol=1e-9) for g in rho)

    def test_bad_restarts(self):
        with pytest.raises(ValueError):
            solve_variety(trivial_tangle(2).constraints(), restarts=0)


class TestDedup:
    def test_conjugates_collapse(self, rng):
        c = sphere_tangle(2).constraints()
        p = solve_variety(c, restarts=2, seed=0)[0]
        q = make_point(c, conj(p.rep, su2.random_unit(rng)))
        assert np.allclose(p.fingerprint, q.fingerprint, atol=1e-12)
        assert len(dedup_classes([p, q])) == 1

    def test_empty(self):
        assert dedup_classes([]) == []

    def test_idempotent_and_order_free(self, rng):
        c = sphere_tangle(2).constraints(ansatz="abelian")
        pts = solve_variety(c, restarts=40, seed=0)
        once = dedup_classes(pts)
        twice = dedup_classes(once)
        shuffled = dedup_classes([pts[k] for k in rng.permutation(len(pts))])
        key = [tuple(p.fingerprint) for p in once]
        assert [tuple(p.fingerprint) for p in twice] == key
        assert [tuple(p.fingerprint) for p in shuffled] == key

    def test_fingerprint_invariant(self, rng):
        rho = {g: su2.random_unit(rng) for g in ("a", "b", "c")}
        assert len(fingerprint(rho)) == 7
        assert np.allclose(fingerprint(rho), fingerprint(conj(rho, su2.random_unit(rng))))


class TestLocalRank:
    def test_sphere_irreducible(self):
        c = sphere_tangle(2).constraints()
        pts = [p for p in solve_variety(c, restarts=5, seed=0) if p.stabilizer == IRREDUCIBLE]
        assert pts and all(local_rank(c, p) == 2 for p in pts)
        assert fd_local_rank(c, pts[0].rep) == 2

    @pytest.mark.parametrize("n,want", [(2, 1), (3, 3), (4, 5)])
    def test_trivial_irreducible(self, n, want):
        c = trivial_tangle(n).constraints()
        p = next(p for p in solve_variety(c, restarts=5, seed=0) if p.stabilizer == IRREDUCIBLE)
        assert local_rank(c, p) == want == 2 * n - 3

    @pytest.mark.parametrize("n", [2, 3])
    def test_trivial_abelian_point(self, n):
        c = trivial_tangle(n).constraints()
        rho = {g: su2.I for g in c.generators}
        assert local_rank(c, make_point(c, rho)) == 2 * n - 2
        assert fd_local_rank(c, rho) == 2 * n - 2

    def test_off_variety(self, rng):
        c = sphere_tangle(2).constraints()
        rho = {g: su2.random_unit(rng) for g in c.generators}
        with pytest.raises(NotOnVariety):
            local_rank(c, make_point(c, rho))


class TestJson:
    def test_roundtrip(self):
        c = sphere_tangle(2).constraints()
        pts = solve_variety(c, restarts=4, seed=0)
        for p in pts:
            p.local_rank = local_rank(c, p)
        data = json.loads(json.dumps(points_to_json(pts)))
        back = points_from_json(data)
        for p, q in zip(pts, back):
            assert isinstance(q, SolutionPoint)
            assert np.allclose(p.fingerprint, q.fingerprint)
            assert (p.stabilizer, p.local_rank) == (q.stabilizer, q.local_rank)
            assert all(np.allclose(p.rep[g], q.rep[g]) for g in p.rep)
