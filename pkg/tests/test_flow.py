import pytest

from coarsecover.angles import (
    SmallnessOracle,
    all_angles,
    angle_set_from_triples,
    enumerate_small_geodesics,
    k_fold_sum,
    theta3,
    trivial_only,
)
from coarsecover.corpus import (
    cycle_graph,
    path_graph,
    random_tree,
    spider,
    wedge_of_cycles,
)
from coarsecover.covers import Cover, CoverMember
from coarsecover.flow import (
    ball_closed_targets,
    build_cf_hyp,
    build_cf_theta,
    cf_doubling_report,
    cf_pair_space,
    cover_cf,
    eligible_targets,
    pullback_cover,
    theta_for_wideness,
    wideness_scan,
)
from coarsecover.graphs import (
    GeodesicIndex,
    barycentric_subdivision,
)
from coarsecover.symmetry import close_group, stabilizer, subdivided_group, \
    trivial_group


class TestHyperbolicCase:
    def test_tree_fibers_are_geodesics(self):
        g = random_tree(10, seed=5)
        idx = GeodesicIndex(g)
        triples = build_cf_hyp(g, 0, idx)
        for p in g.vertices:
            for q in g.vertices:
                fiber = {x for (x, a, b) in triples if (a, b) == (p, q)}
                assert fiber == set(idx.geodesic_vertex_set(p, q))

    def test_c6_antipodal_fiber_is_everything(self):
        triples = build_cf_hyp(cycle_graph(6), 0)
        fiber = {x for (x, a, b) in triples if (a, b) == (0, 3)}
        assert fiber == set(range(6))

    def test_equal_endpoints_give_ball(self):
        g = cycle_graph(6)
        triples = build_cf_hyp(g, 1)
        fiber = {x for (x, a, b) in triples if (a, b) == (2, 2)}
        assert fiber == {1, 2, 3}


def tree_cf(n=12, seed=None):
    g = path_graph(n) if seed is None else random_tree(n, seed=seed)
    sub = barycentric_subdivision(g)
    theta = all_angles(g)
    return g, sub, build_cf_theta(sub, theta, sub.ve_vertices())


class TestBuildCfTheta:
    def test_tree_fiber_is_metric_band(self):
        g, sub, cf = tree_cf(10, seed=2)
        idx = cf.index
        for (xm, xp), fiber in cf.fibers.items():
            geo_mids = [w for w in idx.geodesic_vertex_set(xm, xp)
                        if sub.is_midpoint(w)]
            band = {v for v in sub.ve_vertices()
                    if min(cf.metric.d(v, w) for w in geo_mids)
                    <= cf.delta_prime}
            assert fiber == band

    def test_empty_endpoint_set(self):
        g = path_graph(5)
        sub = barycentric_subdivision(g)
        cf = build_cf_theta(sub, all_angles(g), ())
        assert cf.triples == frozenset()

    def test_blocked_direction_gives_empty_fiber(self):
        g = spider(3, 3)
        sub = barycentric_subdivision(g)
        # only the angles at the center are small; legs force large turns
        center_angles = [(1, 0, 4), (1, 0, 7), (4, 0, 7)]
        theta = angle_set_from_triples(g, center_angles)
        tips = [sub.midpoint_of_edge[(2, 3)], sub.midpoint_of_edge[(5, 6)]]
        cf = build_cf_theta(sub, theta, tips)
        assert all(not f for f in cf.fibers.values())

    def test_theta_hypothesis_checked(self):
        g = cycle_graph(4)  # every angle is a corner angle here
        sub = barycentric_subdivision(g)
        with pytest.raises(ValueError, match="corner size"):
            build_cf_theta(sub, trivial_only(g), sub.ve_vertices())

    def test_non_midpoint_endpoint_rejected(self):
        g = path_graph(4)
        sub = barycentric_subdivision(g)
        with pytest.raises(ValueError, match="midpoint"):
            build_cf_theta(sub, all_angles(g), (0,))

    def test_equivariance_of_fibers(self):
        g = cycle_graph(12)
        G = close_group(g, [tuple((i + 3) % 12 for i in range(12))])
        sub = barycentric_subdivision(g)
        cf = build_cf_theta(sub, all_angles(g), sub.ve_vertices(), group=G)
        for p in cf.group.elements:
            for (v, xm, xp) in cf.triples:
                assert (p[v], p[xm], p[xp]) in cf.triples

    def test_fiber_hugs_one_small_geodesic(self):
        # every fiber vertex sits within 2 delta' + 1 of the midpoints of a
        # single small geodesic between the endpoints
        g = wedge_of_cycles(2, 4)
        sub = barycentric_subdivision(g)
        t3 = theta3(sub)
        theta = k_fold_sum(t3, 2).union(all_angles(g))
        cf = build_cf_theta(sub, theta, sub.ve_vertices())
        oracle = SmallnessOracle(sub, theta)
        for (xm, xp), fiber in cf.fibers.items():
            if not fiber:
                continue
            smalls = enumerate_small_geodesics(cf.index.dag(xm, xp), oracle,
                                               500)
            assert smalls
            bound = 2 * cf.delta_prime + 1
            best = max(
                min(min(cf.metric.d(v, w) for w in c if sub.is_midpoint(w))
                    for c in smalls)
                for v in fiber)
            assert best <= bound

    def test_fiber_stabilizers_respect_pair_stabilizers(self):
        g = cycle_graph(12)
        G = close_group(g, [tuple((i + 3) % 12 for i in range(12))])
        sub = barycentric_subdivision(g)
        cf = build_cf_theta(sub, all_angles(g), sub.ve_vertices(), group=G)
        for (xm, xp), fiber in list(cf.fibers.items())[:20]:
            stab = stabilizer(cf.group, (xm, xp), "pairs")
            for p in stab:
                assert frozenset(p[v] for v in fiber) == fiber


class TestDoubling:
    def test_tree_passes_d5(self):
        g, sub, cf = tree_cf(30)
        rep = cf_doubling_report(cf)
        assert rep["ok"]
        assert rep["R"] == 24 * cf.delta_prime + 12

    def test_tightest_constants(self):
        g, sub, cf = tree_cf(12)
        rep = cf_doubling_report(cf, compute_tightest=True)
        assert rep["ok"] and rep["tightest_D"] <= 5
        assert rep["tightest_R"] <= rep["R"]

    def test_single_point_fiber(self):
        g = path_graph(3)
        sub = barycentric_subdivision(g)
        cf = build_cf_theta(sub, all_angles(g), sub.ve_vertices())
        rep = cf_doubling_report(cf)
        assert rep["ok"]


class TestCoverCf:
    def test_diameter_cover_partitions(self):
        g, sub, cf = tree_cf(9)
        diam = cf.metric.diameter()
        cov = cover_cf(cf, diam)
        assert cov.order == 0
        sets = cov.member_sets()
        for z in sorted(cf.fibers):
            for v in cf.fibers[z]:
                assert sum(1 for m in sets if (v, z) in m) == 1

    def test_c6_cover_verified(self):
        g = cycle_graph(6)
        sub = barycentric_subdivision(g)
        cf = build_cf_theta(sub, all_angles(g), sub.ve_vertices())
        cov = cover_cf(cf, 1)
        from coarsecover.covers import verify_cover
        from coarsecover.symmetry import ALL_SUBGROUPS
        rep = verify_cover(cov, cf_pair_space(cf), 1, ALL_SUBGROUPS)
        assert rep.ok
        assert cov.order <= 4

    def test_empty_flow_space(self):
        g = path_graph(4)
        sub = barycentric_subdivision(g)
        cf = build_cf_theta(sub, all_angles(g), ())
        cov = cover_cf(cf, 1)
        assert len(cov) == 0


class TestPullback:
    def test_everything_member_pulls_to_all_eligible(self):
        g, sub, cf = tree_cf(8)
        v0 = sub.midpoint_of_edge[min(sub.midpoint_of_edge)]
        targets = eligible_targets(cf, v0)
        member = CoverMember(frozenset((v, z) for (v, *z_) in []) |
                             frozenset((v, (a, b)) for (v, a, b) in cf.triples),
                             frozenset([cf.group.identity]), True)
        cov = Cover((member,), 1, 0)
        pull = pullback_cover(cf, cov, 0, targets, v0)
        assert pull.member_sets() == [frozenset(targets)]

    def test_tree_tau_zero_is_evaluation_at_base(self):
        g, sub, cf = tree_cf(8)
        v0 = sub.midpoint_of_edge[min(sub.midpoint_of_edge)]
        targets = eligible_targets(cf, v0)
        cov = cover_cf(cf, 2)
        pull = pullback_cover(cf, cov, 0, targets, v0)
        sets = cov.member_sets()
        for i, m in enumerate(sets):
            pulled = {(gg, xi) for (gg, xi) in targets
                      if (gg[v0], (gg[v0], xi)) in m}
            assert pulled in ([p.points for p in pull.members] + [set()]) \
                or not pulled

    def test_universal_quantifier_over_flow_lines(self):
        # two small geodesics, a member holding only one tau-vertex
        g = cycle_graph(6)
        sub = barycentric_subdivision(g)
        cf = build_cf_theta(sub, all_angles(g), sub.ve_vertices())
        v0 = sub.midpoint_of_edge[(0, 1)]
        xi = sub.midpoint_of_edge[(3, 4)]  # antipodal midpoint: two flow lines
        e = cf.group.identity
        dag = cf.index.dag(v0, xi)
        layer1 = [v for v in dag.layer
                  if dag.layer[v] == 2 and sub.is_midpoint(v)]
        assert len(layer1) == 2
        taken = layer1[0]
        member = CoverMember(
            frozenset((v, (a, b)) for (v, a, b) in cf.triples
                      if v != layer1[1]),
            frozenset([e]), True)
        pull = pullback_cover(cf, Cover((member,), 1, 0), 1, [(e, xi)], v0)
        assert all((e, xi) not in m for m in pull.member_sets())

    def test_short_flow_lines_excluded(self):
        g, sub, cf = tree_cf(6)
        v0 = sub.midpoint_of_edge[min(sub.midpoint_of_edge)]
        targets = eligible_targets(cf, v0)
        full = CoverMember(frozenset((v, (a, b)) for (v, a, b) in cf.triples),
                           frozenset([cf.group.identity]), True)
        big_tau = 1 + max(cf.index.d(g_[v0], xi) // 2 for (g_, xi) in targets)
        pull = pullback_cover(cf, Cover((full,), 1, 0), big_tau, targets, v0)
        assert not pull.members

    def test_bad_tau_rejected(self):
        g, sub, cf = tree_cf(6)
        v0 = sub.midpoint_of_edge[min(sub.midpoint_of_edge)]
        with pytest.raises(ValueError, match="tau"):
            pullback_cover(cf, Cover((), 1, -1), 0.5,
                           eligible_targets(cf, v0), v0)

    def test_order_never_grows(self):
        for seed in (1, 4):
            g, sub, cf = tree_cf(10, seed=seed)
            v0 = sub.midpoint_of_edge[min(sub.midpoint_of_edge)]
            targets = eligible_targets(cf, v0)
            cov = cover_cf(cf, 3)
            for tau in (0, 1, 2):
                pull = pullback_cover(cf, cov, tau, targets, v0)
                assert pull.order <= cov.order


class TestWidenessScan:
    def test_trivial_group_passes_at_zero(self):
        g, sub, cf = tree_cf(10, seed=7)
        v0 = sub.midpoint_of_edge[min(sub.midpoint_of_edge)]
        targets = ball_closed_targets(cf, v0, 0)
        cov = cover_cf(cf, 2)
        scan = wideness_scan(cf, cov, 0, targets, range(0, 3), v0)
        assert scan.passing_tau == 0

    def test_shrunk_cover_reports_exhaustion(self):
        g, sub, cf = tree_cf(10)
        v0 = sub.midpoint_of_edge[min(sub.midpoint_of_edge)]
        targets = ball_closed_targets(cf, v0, 0)
        empty = Cover((), 2, -1)
        scan = wideness_scan(cf, empty, 0, targets, range(0, 2), v0)
        assert not scan.ok and scan.witness

    def test_equivariant_cycle_scan(self):
        g = cycle_graph(12)
        G = close_group(g, [tuple((i + 3) % 12 for i in range(12))])
        sub = barycentric_subdivision(g)
        idx = GeodesicIndex(sub.graph)
        Gs = subdivided_group(G, sub)
        v0 = sub.midpoint_of_edge[(0, 1)]
        theta = all_angles(g)
        orbit = {p[v0] for p in Gs.elements}
        endpoints = tuple(sorted(set(sub.ve_vertices())))
        cf = build_cf_theta(sub, theta, endpoints, group=G, index=idx)
        boundary = tuple(v for v in sub.ve_vertices() if v not in orbit)
        targets = ball_closed_targets(cf, v0, 1, boundary)
        assert targets
        cov = cover_cf(cf, 8)
        scan = wideness_scan(cf, cov, 1, targets, range(0, 6), v0)
        assert scan.ok


class TestThetaForWideness:
    def test_ball_translate_geodesics_become_small(self):
        g = cycle_graph(12)
        G = close_group(g, [tuple((i + 3) % 12 for i in range(12))])
        sub = barycentric_subdivision(g)
        idx = GeodesicIndex(sub.graph)
        Gs = subdivided_group(G, sub)
        v0 = sub.midpoint_of_edge[(0, 1)]
        t3 = theta3(sub, index=idx)
        theta0 = k_fold_sum(t3, 1)
        theta = theta_for_wideness(sub, G, v0, 1, theta0, theta3_set=t3,
                                   index=idx)
        assert k_fold_sum(t3, 2) <= theta
        oracle = SmallnessOracle(sub, theta)
        ball = [p for p in Gs.elements if Gs.word_length[p] <= 1]
        from coarsecover.angles import exists_small_geodesic
        for xi in sub.ve_vertices():
            for p in ball:
                a = p[v0]
                if a == xi:
                    continue
                # geodesics between ball translates and endpoints stay small
                # whenever the base translate flows small (theta0 = corner
                # size makes every cycle geodesic qualify)
                assert exists_small_geodesic(idx.dag(a, xi), oracle)


class TestEqualEndpoints:
    def test_constant_flow_line_fiber_is_ball(self):
        g = path_graph(8)
        sub = barycentric_subdivision(g)
        xi = sub.ve_vertices()[3]
        cf = build_cf_theta(sub, all_angles(g), (xi,), allow_equal=True)
        assert cf.fiber(xi, xi) == cf.metric.ball(xi, cf.delta_prime)

    def test_tightest_constants_reported(self):
        g = path_graph(20)
        sub = barycentric_subdivision(g)
        ve = sub.ve_vertices()
        cf = build_cf_theta(sub, all_angles(g), (ve[0], ve[-1]))
        rep = cf_doubling_report(cf, compute_tightest=True)
        assert rep["ok"]
        assert 1 <= rep["tightest_D"] <= 5
        assert rep["tightest_R"] <= rep["R"]
