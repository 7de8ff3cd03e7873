import itertools
import math

import numpy as np
import pytest

from sigmap import sigma
from sigmap.constructions import (
    column_set,
    complete_bipartite,
    diagonal,
    path,
    projective_plane_incidence,
    quadrilaterals,
    random_tree,
    row_set,
    star,
)
from sigmap.errors import DomainError, TheoremViolation
from sigmap.graph import COL, from_edge_list, has_circuit, rudin_sup
from sigmap.schatten import BlockMatrix, schatten_norm_even_trace
from sigmap.sigma import (
    circuit_bound,
    circuit_check,
    density_bound,
    density_check,
    erdos_check,
    pisier_check,
    pisier_trail_bound,
    proven_constant,
    ratio_constant_estimate,
    ratio_of,
    sign_pattern_classes,
    sign_ratio_of,
    sign_unconditionality_estimate,
    trail_abundance_check,
    trail_abundance_threshold,
)

FAST = dict(restarts=6, iterations=150)


def random_graph(rng, max_side=5, density=None):
    nr, nc = rng.integers(1, max_side + 1, size=2)
    a = rng.uniform(0.2, 0.7) if density is None else density
    edges = [(r, c) for r in range(nr) for c in range(nc) if rng.random() < a]
    return from_edge_list(edges or [(0, 0)], range(nr), range(nc))


# --- closed-form bounds ----------------------------------------------------


def test_pisier_bound_examples():
    assert pisier_trail_bound(0, 4) == pytest.approx(9 * math.pi / 2)
    assert pisier_trail_bound(1, 4) == pytest.approx(9 * math.pi / 2)
    assert pisier_trail_bound(10**12, 4) == pytest.approx(4e12**0.25)
    assert pisier_trail_bound(10**12, 4) == pytest.approx(1414.21, abs=0.01)
    for bad in (3, 2, 5):
        with pytest.raises(DomainError):
            pisier_trail_bound(1, bad)


def test_circuit_bound_examples():
    assert circuit_bound(4) == pytest.approx(6 * math.pi)
    assert circuit_bound(6) == pytest.approx(9 * math.pi)
    assert circuit_bound(8) == pytest.approx(12 * math.pi)


def test_density_bound_examples():
    assert density_bound(1, 1, 4, 1) == pytest.approx((4.0, 4.0))
    assert density_bound(16, 16, 4, 1)[1] == pytest.approx(256.0)
    # (100^(1/4) + 10)^2; the value is 173.25
    assert density_bound(100, 1, 4, 1)[0] == pytest.approx((100**0.25 + 10) ** 2)
    with pytest.raises(DomainError):
        density_bound(0, 1, 4, 1)
    with pytest.raises(DomainError):
        density_bound(1, 1, 4, 0.5)


def test_density_exact_never_exceeds_relaxed(rng):
    for _ in range(200):
        m, n = rng.integers(1, 500, size=2)
        p = float(rng.uniform(2.01, 12))
        D = float(rng.uniform(1, 5))
        exact, relaxed = density_bound(int(m), int(n), p, D)
        assert exact <= relaxed * (1 + 1e-12)


def test_proven_constant_is_min_over_bounds():
    # 9 pi p / 8 < 3 pi p / 2, so small trail counts give the tighter bound
    assert proven_constant(star(4), 4) == pytest.approx(9 * math.pi / 2)
    assert proven_constant(quadrilaterals(2), 4) == pytest.approx(pisier_trail_bound(2, 4))
    assert proven_constant(complete_bipartite(3, 3), 6) <= circuit_bound(6)


# --- density checker -------------------------------------------------------


def test_density_row_set_never_violates(rng):
    R = row_set([(0, [0, 1, 2]), (1, [3, 4]), (2, [5])])
    for p in (3, 4, 6):
        rep = density_check(R, p, 1.0, samples=50, seed=1)
        assert rep.holds and rep.checked


def test_density_full_square_threshold():
    for m, violated in ((16, False), (17, True)):
        K = complete_bipartite(m, m)
        rep = density_check(K, 4, 1.0, subsets=[(range(m), range(m))])
        assert (not rep.holds) == violated


def test_density_empty_graph():
    rep = density_check(from_edge_list([]), 4, 1.0)
    assert rep.holds and rep.checked == []


def test_density_sampling_is_seeded():
    K = complete_bipartite(5, 6)
    a = density_check(K, 4, 1.0, samples=20, seed=3)
    b = density_check(K, 4, 1.0, samples=20, seed=3)
    assert a.checked == b.checked


# --- Erdos and trail abundance ---------------------------------------------


def test_erdos_examples():
    assert not erdos_check(quadrilaterals(1), 4).applicable
    res = erdos_check(star(5), 4)
    assert res.holds
    assert res.value == pytest.approx(5 / (9 * math.pi**2 * 16 * 5))
    assert res.value == pytest.approx(7.04e-4, rel=1e-3)
    fano = erdos_check(projective_plane_incidence(2), 4)
    assert fano.holds
    assert fano.parameters["edges"] == 21
    assert fano.value == pytest.approx(21 / (9 * math.pi**2 * 16 * 7**0.5 * 7))


def test_erdos_rejects_bad_p():
    with pytest.raises(DomainError):
        erdos_check(star(3), 5)


def test_trail_abundance_inapplicable():
    D = 9 * math.pi / 2 + 0.01
    assert not trail_abundance_check(complete_bipartite(10, 10), 2, D).applicable
    assert not trail_abundance_check(from_edge_list([]), 2, D).applicable
    with pytest.raises(DomainError):
        trail_abundance_check(star(3), 2, 9 * math.pi / 2)


def test_trail_abundance_search_on_complete_graph():
    # c_2 between two distinct columns of K_{n,n} equals n
    v0, vs, count = sigma._find_abundant_pair(complete_bipartite(5, 5), 2, 4.0)
    assert count == 5 and v0 != vs


def test_trail_abundance_reports_success(monkeypatch):
    monkeypatch.setattr(sigma, "trail_abundance_threshold", lambda *a: 0.0)
    D = 9 * math.pi / 2 + 0.01
    n = math.ceil(D**4 / 4) + 1
    # a K_{2,n} has c_2 = n between its two columns
    G = complete_bipartite(n, 2)
    res = trail_abundance_check(G, 2, D)
    assert res.holds and res.value == n


def test_trail_abundance_violation_raises(monkeypatch):
    monkeypatch.setattr(sigma, "trail_abundance_threshold", lambda *a: 0.0)
    with pytest.raises(TheoremViolation) as err:
        trail_abundance_check(quadrilaterals(2), 2, 9 * math.pi / 2 + 0.01)
    assert err.value.record["holds"] is False


def test_trail_abundance_threshold_formula():
    assert trail_abundance_threshold(4, 9, 2, 1.0) == pytest.approx(4 * 2 * 9)


# --- ratio estimator -------------------------------------------------------


def test_ratio_examples():
    row = row_set([(0, [0, 1, 2, 3])])
    assert ratio_constant_estimate(row, 4, **FAST).value == pytest.approx(1.0, abs=1e-6)
    full = complete_bipartite(2, 2)
    assert ratio_constant_estimate(full, 4, **FAST).value >= 2**0.25 - 1e-6
    single = from_edge_list([(0, 0)])
    for p in (4, 6, 8):
        assert ratio_constant_estimate(single, p, **FAST).value == pytest.approx(1.0)


def test_ratio_errors():
    with pytest.raises(DomainError):
        ratio_constant_estimate(from_edge_list([]), 4)
    with pytest.raises(DomainError):
        ratio_constant_estimate(star(2), 5)
    with pytest.raises(DomainError):
        ratio_constant_estimate(star(2), 2)


def test_ratio_is_deterministic_and_recomputable(rng):
    G = random_graph(rng)
    a = ratio_constant_estimate(G, 4, seed=7, **FAST)
    b = ratio_constant_estimate(G, 4, seed=7, **FAST)
    assert a.value == b.value
    np.testing.assert_array_equal(a.witness_x, b.witness_x)
    assert abs(a.recompute() - a.value) <= 1e-9
    assert a.value >= 1 - 1e-9


def test_ratio_witness_is_supported():
    G = from_edge_list([(0, 0), (0, 2), (1, 1), (2, 0), (2, 2)])
    est = ratio_constant_estimate(G, 6, **FAST)
    x = np.asarray(est.witness_x)
    for r, c in np.argwhere(np.abs(x) > 0):
        assert (int(r), int(c)) in G


@pytest.mark.parametrize("p", [4, 6])
def test_one_unconditional_families(p):
    for I in (row_set([(1, [0, 2, 3])]), column_set([(0, [0, 1, 4])]), diagonal(5)):
        assert ratio_constant_estimate(I, p, **FAST).value == pytest.approx(1.0, abs=1e-6)


def test_full_square_estimates_grow():
    vals = [ratio_constant_estimate(complete_bipartite(m, m), 4, **FAST).value for m in (2, 3, 4)]
    assert vals[0] >= 2**0.25 - 1e-6
    assert vals[0] < vals[1] < vals[2]


def test_transpose_symmetry(rng):
    for _ in range(4):
        G = random_graph(rng)
        a = ratio_constant_estimate(G, 4, seed=2, **FAST)
        b = ratio_constant_estimate(G.transpose(), 4, seed=2, **FAST)
        assert a.value == pytest.approx(b.value, abs=1e-12)
        assert abs(b.recompute() - b.value) <= 1e-9


def test_monotone_under_adding_edges_with_injection(rng):
    for _ in range(4):
        G = random_graph(rng)
        extra = (int(rng.integers(0, 5)), int(rng.integers(0, 5)))
        H = G.add_edges([extra])
        small = ratio_constant_estimate(G, 4, seed=1, **FAST)
        big = ratio_constant_estimate(H, 4, seed=1, init=[small.witness_x], **FAST)
        assert big.value >= small.value - 1e-9


def test_union_never_below_parts_with_injection(rng):
    G1, G2 = random_graph(rng), random_graph(rng)
    U = G1.union(G2)
    e1 = ratio_constant_estimate(G1, 4, seed=4, **FAST)
    e2 = ratio_constant_estimate(G2, 4, seed=4, **FAST)
    eu = ratio_constant_estimate(U, 4, seed=4, init=[e1.witness_x, e2.witness_x], **FAST)
    assert eu.value >= max(e1.value, e2.value) - 1e-9


def test_block_dimension_one_matches_scalar_and_two_dominates():
    G = from_edge_list([(0, 0), (0, 1), (1, 0), (1, 1), (2, 1)])
    scalar = ratio_constant_estimate(G, 4, seed=3, **FAST)
    again = ratio_constant_estimate(G, 4, seed=3, block_dim=1, **FAST)
    assert again.value == scalar.value
    x = np.asarray(scalar.witness_x)
    lifted = BlockMatrix(x[:, :, None, None] * np.eye(2)[None, None])
    assert ratio_of(lifted, 4) == pytest.approx(scalar.value, rel=1e-10)
    blocks = ratio_constant_estimate(G, 4, seed=3, block_dim=2, init=[lifted], restarts=2, iterations=100)
    assert blocks.value >= scalar.value - 1e-9
    assert abs(blocks.recompute() - blocks.value) <= 1e-9


def test_pisier_and_circuit_consistency(rng):
    for _ in range(8):
        G = random_graph(rng, max_side=6)
        for p in (4, 6):
            est = ratio_constant_estimate(G, p, restarts=3, iterations=100, seed=0)
            assert pisier_check(G, p, est).holds
            res = circuit_check(G, p, est)
            assert res.holds is None or res.holds
            assert est.value <= pisier_trail_bound(rudin_sup(G, p // 2, COL).sup, p) + 1e-6


def test_circuit_free_families_respect_circuit_bound():
    for G in (star(6), path(7), random_tree(9, seed=5), projective_plane_incidence(2)):
        assert not has_circuit(G, 4)
        est = ratio_constant_estimate(G, 4, restarts=3, iterations=100)
        assert circuit_check(G, 4, est).holds


# --- sign estimator --------------------------------------------------------


def test_identity_pattern_ratio_is_one(rng):
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert sign_ratio_of(x, np.ones((3, 3)), 4) == pytest.approx(1.0)


def test_product_pattern_is_an_isometry(rng):
    G = complete_bipartite(3, 3)
    eps, dlt = [1, -1, 1], [-1, -1, 1]
    theta = {(r, c): eps[r] * dlt[c] for r, c in G.edge_list}
    est = sign_unconditionality_estimate(G, 4, patterns=[theta], restarts=3, iterations=80)
    assert est.value == pytest.approx(1.0, abs=1e-9)
    x = rng.standard_normal((3, 3))
    tm = np.array([[eps[r] * dlt[c] for c in range(3)] for r in range(3)])
    assert sign_ratio_of(x, tm, 6) == pytest.approx(1.0)


def test_sign_estimate_on_trivial_sets():
    assert sign_unconditionality_estimate(row_set([(0, [0, 1, 2])]), 4).value == pytest.approx(1.0)
    assert sign_unconditionality_estimate(star(3), 4, mode="complex", max_patterns=4).value == pytest.approx(1.0)
    with pytest.raises(DomainError):
        sign_unconditionality_estimate(star(3), 4, mode="quaternion")


def _grid_oracle(p=4, points=10):
    """Brute-force max of ||T x|| / ||x|| over a 10^4-point mesh of real 2x2 x."""
    axis = np.linspace(-1, 1, points)
    theta = np.array([[1, 1], [1, -1]])
    best = 1.0
    for a, b, c, d in itertools.product(axis, repeat=4):
        x = np.array([[a, b], [c, d]])
        den = schatten_norm_even_trace(x, p // 2)
        if den > 1e-12:
            best = max(best, schatten_norm_even_trace(theta * x, p // 2) / den)
    return best


def test_sign_estimate_beats_grid_oracle():
    est = sign_unconditionality_estimate(complete_bipartite(2, 2), 4, mode="real")
    assert est.value > 1
    assert est.value >= _grid_oracle() - 1e-3
    assert abs(est.recompute() - est.value) <= 1e-9


def test_sign_estimate_transpose_symmetry():
    G = from_edge_list([(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)])
    a = sign_unconditionality_estimate(G, 4, restarts=2, iterations=80)
    b = sign_unconditionality_estimate(G.transpose(), 4, restarts=2, iterations=80)
    assert a.value == pytest.approx(b.value, abs=1e-12)


def test_orbit_count(rng):
    for _ in range(10):
        G = random_graph(rng, max_side=4)
        parent = {}

        def find(v):
            while parent.setdefault(v, v) != v:
                v = parent[v]
            return v

        for r, c in G.edge_list:
            parent[find(("r", r))] = find(("c", c))
        verts = {("r", r) for r in G.rows} | {("c", c) for c in G.cols}
        comps = len({find(v) for v in verts})
        expected = 2 ** (len(G) - len(verts) + comps)
        patterns = list(sign_pattern_classes(G))
        assert len(patterns) == expected
        assert patterns[0] == {q: 1 for q in G.edge_list}
        assert all(set(t) == set(G.edges) for t in patterns)
