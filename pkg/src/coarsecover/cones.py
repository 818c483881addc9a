"""Cone-point covers around original vertices and the covering dichotomy.

A pair (g, xi) belongs to the cone set of an apex vertex v at size theta
when every geodesic from g v0 to v is theta-small and, for xi != v, some
geodesic from g v0 to xi turns theta-large at v.  Distinct apexes give
disjoint cone sets at the same size, so the three-layer collection built
here has order at most 2.  On finite targets every set is open; the
interior certificates track the sufficient condition for interiorness
separately instead of inventing a topology.
"""

from __future__ import annotations

from dataclasses import dataclass

from .angles import AngleSet, SmallnessOracle, angle_sum, exists_small_geodesic, \
    k_fold_sum, theta3, _angle_from_edges
from .covers import Cover, CoverMember, cover_order
from .graphs import INF, GeodesicIndex, Subdivision
from .symmetry import GroupModel, subdivided_group


def _turn_pairs(dag, apex, oracle: SmallnessOracle):
    """All (in-edge, out-edge) original-edge pairs realized at apex."""
    if apex not in dag.layer or apex in (dag.source, dag.target):
        return []
    pred = [p for p, outs in dag.succ.items() if apex in outs]
    out = []
    for p in pred:
        e1 = oracle.step_edge(p, apex)
        for s in dag.succ[apex]:
            e2 = oracle.step_edge(apex, s)
            if e1 != e2:
                out.append((e1, e2))
    return out


def _all_geodesics_small_at(dag, oracle: SmallnessOracle, theta: AngleSet):
    """True when no geodesic of the DAG turns theta-large anywhere."""
    for w in dag.layer:
        if w in (dag.source, dag.target) or not oracle.is_checked(w):
            continue
        for (e1, e2) in _turn_pairs(dag, w, oracle):
            if not theta.contains_edges(e1, e2):
                return False
    return True


def vplus_membership(group: GroupModel, g, xi, apex, theta: AngleSet,
                     sub: Subdivision, v0, index: GeodesicIndex) -> bool:
    """Both clauses of the cone-set definition, by geodesic DAG scans."""
    gv0 = g[v0]
    if index.d(gv0, apex) is INF:
        return False
    oracle = SmallnessOracle(sub, theta)
    dag_to_apex = index.dag(gv0, apex)
    if not _all_geodesics_small_at(dag_to_apex, oracle, theta):
        return False
    if xi == apex:
        return True
    if index.d(gv0, xi) is INF:
        return False
    dag = index.dag(gv0, xi)
    for (e1, e2) in _turn_pairs(dag, apex, oracle):
        if not theta.contains_edges(e1, e2):
            return True
    return False


def _dag_reaches(dag, a, b):
    if a == b:
        return True
    stack = [a]
    seen = {a}
    while stack:
        u = stack.pop()
        for w in dag.succ[u]:
            if w == b:
                return True
            if w not in seen and dag.layer[w] <= dag.layer[b]:
                seen.add(w)
                stack.append(w)
    return False


def interior_certificate(group: GroupModel, g, xi, apex, theta: AngleSet,
                         sub: Subdivision, v0, theta3_set: AngleSet,
                         index: GeodesicIndex, _sums=None) -> bool:
    """Sufficient condition for the pair to sit in the cone set's interior.

    Either some geodesic to xi turns (theta + doubled corner size)-large at
    the apex, or a single geodesic turns theta-large at the apex and twice-
    corner-large at a strictly later internal vertex.
    """
    gv0 = g[v0]
    if xi == apex or index.d(gv0, xi) is INF:
        return False
    oracle = SmallnessOracle(sub, theta)
    if _sums is None:
        t3_2 = k_fold_sum(theta3_set, 2)
        big = angle_sum(theta, t3_2)
    else:
        t3_2, big = _sums
    dag = index.dag(gv0, xi)
    pred = dag.pred()
    apex_turns = _turn_pairs(dag, apex, oracle)
    for (e1, e2) in apex_turns:
        if not big.contains_edges(e1, e2):
            return True
    large_apex_exits = set()
    for p in pred[apex] if apex in pred else ():
        e1 = oracle.step_edge(p, apex)
        for s in dag.succ[apex]:
            e2 = oracle.step_edge(apex, s)
            if e1 != e2 and not theta.contains_edges(e1, e2):
                large_apex_exits.add(s)
    if not large_apex_exits:
        return False
    for w in dag.layer:
        if w in (dag.source, dag.target) or not oracle.is_checked(w):
            continue
        if dag.layer[w] <= dag.layer.get(apex, INF):
            continue
        for p in pred[w]:
            e1 = oracle.step_edge(p, w)
            for s in dag.succ[w]:
                e2 = oracle.step_edge(w, s)
                if e1 == e2 or t3_2.contains_edges(e1, e2):
                    continue
                for exit_v in large_apex_exits:
                    if _dag_reaches(dag, exit_v, p) or exit_v == p:
                        return True
    return False


@dataclass(frozen=True)
class ConeSet:
    apex: int
    layer: int
    members: frozenset
    certified_interior: frozenset


def seed_theta0(sub: Subdivision, group: GroupModel, v0, alpha,
                index: GeodesicIndex = None) -> AngleSet:
    """All angles on geodesics from a ball translate of the base point to a
    vertex on a geodesic between two other ball translates, saturated."""
    g = sub.graph
    if index is None:
        index = GeodesicIndex(g)
    sub_group = group if group.graph == g else subdivided_group(group, sub)
    from .angles import trivial_only
    oracle = SmallnessOracle(sub, trivial_only(sub.original))
    ball = sorted({p[v0] for p in sub_group.elements
                   if sub_group.word_length[p] <= alpha})
    angles = set()
    mids = set()
    for a in ball:
        for b in ball:
            if index.d(a, b) is INF:
                continue
            mids.update(index.geodesic_vertex_set(a, b))
    for a in ball:
        for w in mids:
            if a == w or index.d(a, w) is INF:
                continue
            dag = index.dag(a, w)
            pred = dag.pred()
            for u in dag.layer:
                if u in (a, w) or not oracle.is_checked(u):
                    continue
                for p in pred[u]:
                    e1 = oracle.step_edge(p, u)
                    for s in dag.succ[u]:
                        e2 = oracle.step_edge(u, s)
                        if e1 != e2:
                            angles.add(_angle_from_edges(e1, e2))
    from .flow import sub_group_base
    base = AngleSet(sub.original, frozenset(angles))
    return base.saturate(sub_group_base(sub_group, sub))


def cone_cover(sub: Subdivision, group: GroupModel, theta0: AngleSet,
               alpha, v0, xi_set, theta3_set: AngleSet = None,
               index: GeodesicIndex = None):
    """Three layers of cone sets over all original apexes.

    Layers use sizes 2X, 5X and 6X where X pads theta0 with three corner
    summands; the returned companion size is 6X.  Each layer has order 0,
    so the collection has order at most 2.
    """
    g = sub.graph
    sub.original.require_cone_separation()
    if index is None:
        index = GeodesicIndex(g)
    if theta3_set is None:
        theta3_set = theta3(sub, index=index)
    sub_group = group if group.graph == g else subdivided_group(group, sub)
    x = angle_sum(theta0, k_fold_sum(theta3_set, 3))
    powers = {1: x}
    for k in (2, 3, 4, 5, 6):
        powers[k] = angle_sum(powers[k - 1], x)
    layer_sizes = {1: powers[2], 2: powers[5], 3: powers[6]}
    theta_out = powers[6]
    t3_2 = k_fold_sum(theta3_set, 2)
    sums = {layer: (t3_2, angle_sum(size, t3_2))
            for layer, size in layer_sizes.items()}
    cones = []
    for apex in sub.v_vertices():
        for layer, size in sorted(layer_sizes.items()):
            oracle = SmallnessOracle(sub, size)
            members = set()
            certified = set()
            for ge in sub_group.elements:
                gv0 = ge[v0]
                if index.d(gv0, apex) is INF:
                    continue
                # clause one is shared by every endpoint of this element
                if not _all_geodesics_small_at(index.dag(gv0, apex),
                                               oracle, size):
                    continue
                for xi in xi_set:
                    if xi == apex:
                        members.add((ge, xi))
                        continue
                    if index.d(gv0, xi) is INF:
                        continue
                    dag = index.dag(gv0, xi)
                    if any(not size.contains_edges(e1, e2)
                           for (e1, e2) in _turn_pairs(dag, apex, oracle)):
                        members.add((ge, xi))
                        if interior_certificate(sub_group, ge, xi, apex, size,
                                                sub, v0, theta3_set, index,
                                                _sums=sums[layer]):
                            certified.add((ge, xi))
            if members:
                cones.append(ConeSet(apex, layer, frozenset(members),
                                     frozenset(certified)))
    return cones, theta_out


def dichotomy_check(sub: Subdivision, group: GroupModel, theta_out: AngleSet,
                    alpha, v0, cones, xi_set,
                    index: GeodesicIndex = None) -> dict:
    """Every eligible pair is widely cone-covered or flows small.

    Vertex endpoints are tried under the covering clause first; the report
    records which clause fired for each pair.
    """
    g = sub.graph
    if index is None:
        index = GeodesicIndex(g)
    sub_group = group if group.graph == g else subdivided_group(group, sub)
    oracle = SmallnessOracle(sub, theta_out)
    member_sets = [c.members for c in cones]
    balls = {ge: sub_group.ball(alpha, center=ge) for ge in sub_group.elements}
    failures = []
    clause_counts = {"cone": 0, "small-geodesic": 0}
    for ge in sub_group.elements:
        gv0 = ge[v0]
        for xi in xi_set:
            if index.d(gv0, xi) is INF:
                continue
            need = {(h, xi) for h in balls[ge]}
            if any(need <= m for m in member_sets):
                clause_counts["cone"] += 1
                continue
            if gv0 == xi or exists_small_geodesic(index.dag(gv0, xi), oracle):
                clause_counts["small-geodesic"] += 1
                continue
            failures.append((sub_group.index_of(ge), xi))
    return {
        "ok": not failures,
        "clauses": clause_counts,
        "pairs_checked": clause_counts["cone"] + clause_counts["small-geodesic"]
        + len(failures),
        "failures": failures,
    }


def cone_sets_as_cover(cones, sub_group: GroupModel, domain) -> Cover:
    members = []
    for c in cones:
        stab = frozenset(p for p in sub_group.elements if p[c.apex] == c.apex)
        members.append(CoverMember(c.members, stab, True))
    order = cover_order([m.points for m in members], domain)
    return Cover(tuple(members), None, order)


def combined_cover(cone_cover_obj: Cover, flow_pullback: Cover, domain,
                   cone_params=None, flow_params=None) -> Cover:
    """Union of the cone collection and the pulled-back flow cover.

    The cone side contributes at most three members at any point, so the
    order is bounded by the flow order plus three.  Both sides must be
    built over the same group, base vertex and word scale; pass the
    parameter triples to have that checked.
    """
    if cone_params is not None and flow_params is not None \
            and cone_params != flow_params:
        raise ValueError("cone and flow covers built over different "
                         "parameters: %r vs %r" % (cone_params, flow_params))
    members = tuple(cone_cover_obj.members) + tuple(flow_pullback.members)
    order = cover_order([m.points for m in members], domain)
    return Cover(members, flow_pullback.alpha, order)
