"""Coarse flow spaces on barycentric subdivisions and their covers.

A flow-space point is a triple (v, xi-, xi+): a midpoint vertex v together
with an ordered pair of endpoint surrogates, admitted when v lies within
chain-metric distance delta' = delta + 1 of a midpoint on some small
geodesic between the endpoints.  Endpoint surrogates are midpoint vertices
standing in for ideal points; distances between midpoints are integers in
original units, so every bound here is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .angles import (
    AngleSet,
    SmallnessOracle,
    ThetaMetric,
    angle_sum,
    d_theta,
    k_fold_sum,
    theta3,
    trivial_only,
    vertices_on_small_geodesics,
    _angle_from_edges,
)
from .covers import (
    Cover,
    CoverMember,
    PairSpace,
    cover_order,
    doubling_check,
    fiber_basis,
    greedy_cover,
    minimal_doubling_constant,
    pair_space,
)
from .graphs import INF, GeodesicIndex, Graph, Subdivision, slimness_constant
from .symmetry import GroupModel, subdivided_group, trivial_group


def build_cf_hyp(g: Graph, delta: int, index: GeodesicIndex = None):
    """Coarse flow triples for a plain graph: (x, xi-, xi+) whenever some
    geodesic between the endpoints passes within delta of x."""
    if not g.is_connected():
        raise ValueError("graph must be connected")
    if index is None:
        index = GeodesicIndex(g)
    triples = set()
    for p in g.vertices:
        for q in g.vertices:
            geo = index.geodesic_vertex_set(p, q)
            fiber = {x for x in g.vertices
                     if min(index.d(x, w) for w in geo) <= delta}
            for x in fiber:
                triples.add((x, p, q))
    return frozenset(triples)


@dataclass(frozen=True)
class CoarseFlowSpace:
    sub: Subdivision
    theta: AngleSet
    delta: int
    delta_prime: int
    endpoints: tuple
    fibers: dict
    metric: ThetaMetric
    group: GroupModel
    triples: frozenset
    index: GeodesicIndex

    def fiber(self, xi_minus, xi_plus):
        return self.fibers.get((xi_minus, xi_plus), frozenset())

    @property
    def _line_cache(self):
        cache = getattr(self, "_line_cache_store", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_line_cache_store", cache)
        return cache


def build_cf_theta(sub: Subdivision, theta: AngleSet, endpoint_set,
                   group: GroupModel = None, delta: int = None,
                   index: GeodesicIndex = None,
                   theta3_set: AngleSet = None,
                   allow_equal: bool = False) -> CoarseFlowSpace:
    """Materialize the coarse flow space over ordered endpoint pairs.

    Requires theta to contain the doubled triangle-corner size of the
    subdivision; the endpoint set is saturated under the group so that the
    triple set is invariant.  Equal endpoint pairs mean constant flow lines
    and are excluded unless allow_equal is set, in which case their fiber
    is the chain-metric ball around the endpoint.
    """
    g = sub.graph
    if not g.is_connected():
        raise ValueError("subdivided graph must be connected")
    if index is None:
        index = GeodesicIndex(g)
    if theta3_set is None:
        theta3_set = theta3(sub, index=index)
    if not k_fold_sum(theta3_set, 2) <= theta:
        raise ValueError("theta must contain the doubled corner size")
    if delta is None:
        delta = slimness_constant(sub.original).delta
    delta_prime = delta + 1
    if group is None:
        sub_group = trivial_group(g)
    else:
        sub_group = group if group.graph == g else subdivided_group(group, sub)
    endpoints = set(endpoint_set)
    for v in endpoint_set:
        if not sub.is_midpoint(v):
            raise ValueError("endpoint %r is not a midpoint vertex" % (v,))
        for p in sub_group.elements:
            endpoints.add(p[v])
    endpoints = tuple(sorted(endpoints))

    metric = d_theta(sub, theta)
    oracle = SmallnessOracle(sub, theta)
    balls = {v: metric.ball(v, delta_prime) for v in sub.ve_vertices()}
    fibers = {}
    triples = set()
    for xm in endpoints:
        for xp in endpoints:
            if xm == xp:
                if allow_equal:
                    fiber = balls[xm]
                    fibers[(xm, xm)] = frozenset(fiber)
                    for v in fiber:
                        triples.add((v, xm, xm))
                continue
            if index.d(xm, xp) is INF:
                continue
            dag = index.dag(xm, xp)
            carriers = [v for v in vertices_on_small_geodesics(dag, oracle)
                        if sub.is_midpoint(v)]
            fiber = set()
            for v in carriers:
                fiber |= balls[v]
            fibers[(xm, xp)] = frozenset(fiber)
            for v in fiber:
                triples.add((v, xm, xp))
    return CoarseFlowSpace(sub, theta, delta, delta_prime, endpoints,
                           fibers, metric, sub_group, frozenset(triples), index)


def cf_doubling_report(cf: CoarseFlowSpace, compute_tightest=False) -> dict:
    """Doubling certificates for every fiber in the chain metric.

    The required constants are D = 5 and R = 24 * delta' + 12.  With
    compute_tightest, the report also carries the tightest (D, R) actually
    realized across fibers, at the price of a scan per fiber.
    """
    from .covers import minimal_doubling_radius
    R = 24 * cf.delta_prime + 12
    failures = []
    tightest_d = 0
    tightest_r = 0
    for key in sorted(cf.fibers):
        fiber = sorted(cf.fibers[key])
        rep = doubling_check(fiber, cf.metric.d, 5, R)
        if not rep.ok:
            failures.append((key, rep.witness))
        if compute_tightest and fiber:
            tightest_d = max(tightest_d,
                             minimal_doubling_constant(fiber, cf.metric.d, R))
            tightest_r = max(tightest_r,
                             minimal_doubling_radius(fiber, cf.metric.d, 5))
    return {
        "ok": not failures,
        "D": 5,
        "R": R,
        "fibers": len(cf.fibers),
        "tightest_D": tightest_d if compute_tightest else None,
        "tightest_R": tightest_r if compute_tightest else None,
        "failures": failures,
    }


def cf_pair_space(cf: CoarseFlowSpace) -> PairSpace:
    ve = cf.sub.ve_vertices()
    zs = tuple(sorted(cf.fibers))
    dist = {v: {w: cf.metric.d(v, w) for w in ve} for v in ve}
    act_v = {p: {v: p[v] for v in ve} for p in cf.group.elements}
    act_z = {p: {z: (p[z[0]], p[z[1]]) for z in zs} for p in cf.group.elements}
    pairs = frozenset((v, (xm, xp)) for (v, xm, xp) in cf.triples)
    return pair_space(ve, zs, pairs, dist, group=cf.group,
                      act_v=act_v, act_z=act_z)


def cover_cf(cf: CoarseFlowSpace, alpha_prime, basis=None) -> Cover:
    """Long thin cover of the flow space, alpha'-long in the chain metric."""
    space = cf_pair_space(cf)
    if basis is None:
        basis = fiber_basis(space, alpha_prime)
    return greedy_cover(space, alpha_prime, basis)


# ---------------------------------------------------------------------------
# Pullback to pairs (group element, endpoint)
# ---------------------------------------------------------------------------


def _flow_line_data(cf: CoarseFlowSpace, gv0, xi):
    """Layer map and small-carrier set of the geodesic DAG gv0 -> xi."""
    cached = cf._line_cache.get((gv0, xi))
    if cached is not None:
        return cached
    dag = cf.index.dag(gv0, xi)
    oracle = SmallnessOracle(cf.sub, cf.theta)
    carriers = vertices_on_small_geodesics(dag, oracle)
    cf._line_cache[(gv0, xi)] = (dag, carriers)
    return dag, carriers


def eligible_targets(cf: CoarseFlowSpace, v0, xi_set=None):
    """Pairs (g, xi) admitting a nonconstant small geodesic from g v0 to xi."""
    xi_set = cf.endpoints if xi_set is None else tuple(xi_set)
    out = []
    for g in cf.group.elements:
        gv0 = g[v0]
        for xi in xi_set:
            if gv0 == xi or cf.index.d(gv0, xi) is INF:
                continue
            _, carriers = _flow_line_data(cf, gv0, xi)
            if gv0 in carriers:
                out.append((g, xi))
    return tuple(out)


def ball_closed_targets(cf: CoarseFlowSpace, v0, alpha, xi_set=None):
    """Eligible pairs whose whole word-metric ball stays eligible.

    Ideal endpoints of the infinite picture are never orbit points of the
    base vertex, so their finite surrogates must keep clear of the ball
    translates; pairs violating that are dropped here rather than silently
    failing every scan.
    """
    eligible = set(eligible_targets(cf, v0, xi_set))
    G = cf.group
    out = []
    for (g, xi) in sorted(eligible, key=lambda t: (t[1], t[0])):
        if all((h, xi) in eligible for h in G.ball(alpha, center=g)):
            out.append((g, xi))
    return tuple(out)


def pullback_cover(cf: CoarseFlowSpace, cover: Cover, tau, targets, v0) -> Cover:
    """Pull a flow-space cover back through time-tau flow lines.

    A pair (g, xi) lands in the pullback of W when every small geodesic c
    from g v0 to xi has its midpoint vertex at distance tau in W's slice
    over (g v0, xi).  Pairs with flow lines shorter than tau are excluded
    from every pullback member.  Intersections commute with the operation,
    so the order never grows.
    """
    if tau != int(tau) or tau < 0:
        raise ValueError("tau must be a nonnegative integer in original units")
    tau = int(tau)
    if not cf.sub.is_midpoint(v0):
        raise ValueError("base vertex must be a midpoint vertex")
    # layer 2*tau in the subdivision is distance tau in original units
    tau_sets = {}
    for (g, xi) in targets:
        gv0 = g[v0]
        if gv0 == xi:
            raise ValueError("target (%r, %r) has a constant flow line" % (g, xi))
        dag, carriers = _flow_line_data(cf, gv0, xi)
        if gv0 not in carriers:
            raise ValueError("target pair admits no small geodesic")
        if dag.length() < 2 * tau:
            tau_sets[(g, xi)] = None  # too short: excluded everywhere
        else:
            tau_sets[(g, xi)] = frozenset(
                v for v in carriers if dag.layer[v] == 2 * tau)
    members = []
    seen = set()
    for m in cover.members:
        pts = set()
        for (g, xi) in targets:
            tv = tau_sets[(g, xi)]
            if tv is None:
                continue
            z = (g[v0], xi)
            if all((v, z) in m.points for v in tv):
                pts.add((g, xi))
        pts = frozenset(pts)
        if not pts or pts in seen:
            continue
        seen.add(pts)
        members.append(CoverMember(pts, m.stabilizer, m.orbit_rep))
    order = cover_order([m.points for m in members], targets)
    return Cover(tuple(members), cover.alpha, order)


@dataclass(frozen=True)
class ScanReport:
    passing_tau: int
    checked: tuple
    witness: tuple  # failing (tau, pair) samples on exhaustion

    @property
    def ok(self):
        return self.passing_tau is not None


def wideness_scan(cf: CoarseFlowSpace, cover: Cover, alpha, targets,
                  tau_range, v0) -> ScanReport:
    """Find the smallest tau making the pulled-back cover alpha-wide.

    For each tau: every target pair must have one pulled-back member
    containing its whole word-metric ball slice.  On finite models the
    scan may exhaust; that outcome is reported, not asserted away.
    """
    G = cf.group
    target_set = set(targets)
    balls = {g: G.ball(alpha, center=g) for g in G.elements}
    failures = []
    for (g, xi) in targets:
        if not {(h, xi) for h in balls[g]} <= target_set:
            failures.append((None, (g, xi), "ball leaves eligible pairs"))
    if failures:
        return ScanReport(None, tuple(tau_range), tuple(failures[:8]))
    for tau in tau_range:
        pull = pullback_cover(cf, cover, tau, targets, v0)
        sets = pull.member_sets()
        ok = True
        for (g, xi) in targets:
            need = {(h, xi) for h in balls[g]}
            if not any(need <= m for m in sets):
                ok = False
                failures.append((tau, (g, xi), "no wide member"))
                break
        if ok:
            return ScanReport(tau, tuple(tau_range), ())
    return ScanReport(None, tuple(tau_range), tuple(failures[:8]))


# ---------------------------------------------------------------------------
# Producing a size for angles that survives word-ball wobble
# ---------------------------------------------------------------------------


def _dag_internal_angles(sub, dag, oracle: SmallnessOracle):
    out = set()
    pred = dag.pred()
    for w in dag.layer:
        if w in (dag.source, dag.target) or not oracle.is_checked(w):
            continue
        for p in pred[w]:
            for s in dag.succ[w]:
                e1 = oracle.step_edge(p, w)
                e2 = oracle.step_edge(w, s)
                if e1 != e2:
                    out.add(_angle_from_edges(e1, e2))
    return out


def theta_for_wideness(sub: Subdivision, group: GroupModel, v0, alpha,
                       theta0: AngleSet, theta3_set: AngleSet = None,
                       index: GeodesicIndex = None) -> AngleSet:
    """Enlarge theta0 so geodesics from word-ball translates of the base
    point to a common endpoint stay small, as do geodesics between them.

    Realized as a search: saturate all angles on geodesics among ball
    translates of the base vertex, then pad with composition room.  The
    result also contains the doubled corner size, so it is ready for the
    flow space hypothesis.  Its fitness is checked extensionally by the
    wideness scan, never assumed.
    """
    g = sub.graph
    if index is None:
        index = GeodesicIndex(g)
    if theta3_set is None:
        theta3_set = theta3(sub, index=index)
    sub_group = group if group.graph == g else subdivided_group(group, sub)
    oracle = SmallnessOracle(sub, trivial_only(sub.original))
    ball = [p[v0] for p in sub_group.elements
            if sub_group.word_length[p] <= alpha]
    angles = set()
    for a in ball:
        for b in ball:
            if a == b or index.d(a, b) is INF:
                continue
            angles |= _dag_internal_angles(sub, index.dag(a, b), oracle)
    theta1 = AngleSet(sub.original, frozenset(angles)).saturate(sub_group_base(sub_group, sub))
    t3_3 = k_fold_sum(theta3_set, 3)
    x = angle_sum(theta0.union(theta1), t3_3)
    out = angle_sum(theta1, angle_sum(x, x))
    out = out.union(angle_sum(theta0, x))
    out = out.union(angle_sum(theta0, k_fold_sum(theta3_set, 2)))
    out = out.union(k_fold_sum(theta3_set, 2))
    return out


def sub_group_base(sub_group: GroupModel, sub: Subdivision) -> GroupModel:
    """Restrict a subdivided group to the original vertex set."""
    n = sub.original.vertex_count
    elements = tuple(sorted({p[:n] for p in sub_group.elements}))
    word = {}
    for p in sub_group.elements:
        q = p[:n]
        w = sub_group.word_length[p]
        if q not in word or w < word[q]:
            word[q] = w
    gens = tuple(p[:n] for p in sub_group.generators)
    return GroupModel(sub.original, elements, gens,
                      sub_group.identity[:n], word)
