"""End-to-end chain: subdivision, sizes, cones, flow space, covers, checks.

The covering is assembled from two branches: cone layers handle pairs
against marked cone vertices and peripheral directions, the coarse flow
space covers pairs flowing to far endpoint surrogates along small
geodesics, and the union must be wide at the requested word-metric scale
with order at most the flow order plus three.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .angles import theta3
from .cones import cone_cover, cone_sets_as_cover, combined_cover, \
    dichotomy_check, seed_theta0
from .covers import Cover, verify_cover
from .flow import (
    ball_closed_targets,
    build_cf_theta,
    cf_doubling_report,
    cf_pair_space,
    cover_cf,
    pullback_cover,
    wideness_scan,
)
from .graphs import GeodesicIndex, Graph, INF, barycentric_subdivision, \
    slimness_constant
from .symmetry import ALL_SUBGROUPS, GroupModel, close_group, \
    subdivided_group, trivial_group


class PipelineError(RuntimeError):
    def __init__(self, stage, message):
        super().__init__("stage %s: %s" % (stage, message))
        self.stage = stage


@dataclass
class PipelineResult:
    ok: bool
    stages: dict
    artifacts: dict = field(default_factory=dict)

    def summary(self):
        return {"ok": self.ok, "stages": self.stages}


def default_base_vertex(sub):
    return sub.midpoint_of_edge[min(sub.midpoint_of_edge)]


def boundary_surrogates(sub, sub_group, v0):
    """Midpoint vertices outside the orbit of the base point.

    Finite stand-ins for ideal endpoints must never collide with an orbit
    translate of the base vertex, or flow lines degenerate to points.
    """
    orbit = {p[v0] for p in sub_group.elements}
    return tuple(v for v in sub.ve_vertices() if v not in orbit)


def run_pipeline(g: Graph, generators=(), alpha=1, tau_max=8,
                 boundary_set=None, group: GroupModel = None,
                 theta0_mode="seed") -> PipelineResult:
    stages = {}
    artifacts = {}
    if not g.is_connected():
        raise PipelineError("load", "graph is disconnected")
    g.require_cone_separation()
    if group is None:
        group = close_group(g, generators) if generators else trivial_group(g)
    sub = barycentric_subdivision(g)
    index = GeodesicIndex(sub.graph)
    sub_group = subdivided_group(group, sub)
    delta = slimness_constant(g).delta
    delta_prime = delta + 1
    v0 = default_base_vertex(sub)
    stages["setup"] = {
        "vertices": g.vertex_count, "edges": len(g.edges),
        "group_order": len(group), "delta": delta, "base_vertex": v0,
    }

    t3 = theta3(sub, index=index)
    stages["theta3"] = {"nontrivial": len(t3)}

    theta0 = seed_theta0(sub, group, v0, alpha, index=index)
    if theta0_mode == "all":
        # any size containing the seed is legal; the saturated choice routes
        # every boundary direction through the flow branch
        from .angles import all_angles
        theta0 = theta0.union(all_angles(g))
    elif theta0_mode != "seed":
        raise ValueError("theta0_mode must be 'seed' or 'all'")
    if boundary_set is None:
        boundary_set = boundary_surrogates(sub, sub_group, v0)
    xi_cone = tuple(sorted(set(g.cone_vertices) | set(boundary_set)))
    cones, theta_out = cone_cover(sub, group, theta0, alpha, v0, xi_cone,
                                  theta3_set=t3, index=index)
    stages["cone"] = {"cone_sets": len(cones), "theta_out": len(theta_out),
                      "theta0": len(theta0)}

    dich = dichotomy_check(sub, group, theta_out, alpha, v0, cones, xi_cone,
                           index=index)
    stages["dichotomy"] = {"ok": dich["ok"], "clauses": dich["clauses"],
                           "failures": dich["failures"][:4]}
    if not dich["ok"]:
        return PipelineResult(False, stages, artifacts)

    from .flow import theta_for_wideness
    theta_cf = theta_for_wideness(sub, group, v0, alpha, theta_out,
                                  theta3_set=t3, index=index)
    # pullback slices sit over pairs (g v0, xi), so the endpoint set must
    # carry the orbit of the base vertex alongside the boundary surrogates
    cf_endpoints = tuple(sorted(set(boundary_set)
                                | {p[v0] for p in sub_group.elements}))
    cf = build_cf_theta(sub, theta_cf, cf_endpoints, group=group,
                        delta=delta, index=index, theta3_set=t3)
    stages["flow_space"] = {"fibers": len(cf.fibers),
                            "triples": len(cf.triples),
                            "theta_cf": len(theta_cf)}
    artifacts["cf"] = cf

    doubling = cf_doubling_report(cf, compute_tightest=False)
    stages["flow_doubling"] = {"ok": doubling["ok"], "R": doubling["R"]}
    if not doubling["ok"]:
        return PipelineResult(False, stages, artifacts)

    ball = [p for p in sub_group.elements
            if sub_group.word_length[p] <= alpha]
    reach = max(index.d(v0, p[v0]) for p in ball) // 2
    alpha_prime = reach + 2 * delta_prime
    flow_cover = cover_cf(cf, alpha_prime)
    space = cf_pair_space(cf)
    flow_report = verify_cover(flow_cover, space, alpha_prime, ALL_SUBGROUPS)
    stages["flow_cover"] = {
        "alpha_prime": alpha_prime, "members": len(flow_cover),
        "order": flow_cover.order, "verified": flow_report.ok,
    }
    artifacts["flow_cover"] = flow_cover
    if not flow_report.ok:
        return PipelineResult(False, stages, artifacts)

    targets = ball_closed_targets(cf, v0, alpha, boundary_set)
    if targets:
        scan = wideness_scan(cf, flow_cover, alpha, targets,
                             range(0, tau_max + 1), v0)
        stages["wideness_scan"] = {"targets": len(targets),
                                   "tau": scan.passing_tau,
                                   "witness": scan.witness[:2]}
        if not scan.ok:
            return PipelineResult(False, stages, artifacts)
        pull = pullback_cover(cf, flow_cover, scan.passing_tau, targets, v0)
    else:
        stages["wideness_scan"] = {"targets": 0, "tau": None, "witness": ()}
        pull = Cover((), alpha_prime, -1)
    artifacts["pullback"] = pull

    domain = [(ge, xi) for ge in sub_group.elements for xi in xi_cone
              if index.d(ge[v0], xi) is not INF]
    cone_cov = cone_sets_as_cover(cones, sub_group, domain)
    params = (len(sub_group), v0, alpha)
    combined = combined_cover(cone_cov, pull, domain,
                              cone_params=params, flow_params=params)
    artifacts["combined"] = combined
    order_ok = combined.order <= pull.order + 3

    # final wideness: every eligible pair is fully ball-covered by a member
    balls = {ge: sub_group.ball(alpha, center=ge)
             for ge in sub_group.elements}
    member_sets = combined.member_sets()
    wide_failures = []
    for ge in sub_group.elements:
        gv0 = ge[v0]
        for xi in xi_cone:
            if index.d(gv0, xi) is INF:
                continue
            need = {(h, xi) for h in balls[ge]}
            if not any(need <= m for m in member_sets):
                wide_failures.append((sub_group.index_of(ge), xi))
    stages["combined"] = {
        "members": len(combined), "order": combined.order,
        "flow_order": pull.order, "order_ok": order_ok,
        "wide_failures": wide_failures[:4],
    }
    ok = order_ok and not wide_failures
    return PipelineResult(ok, stages, artifacts)


# ---------------------------------------------------------------------------
# Artifact serialization
# ---------------------------------------------------------------------------


def cover_to_document(cover: Cover, group: GroupModel) -> dict:
    def enc(x):
        if isinstance(x, tuple) and x in group.word_length:
            return ["g", group.index_of(x)]
        if isinstance(x, tuple):
            return list(x)
        return x

    members = []
    for m in cover.members:
        members.append({
            "points": sorted([enc(a), enc(b)] for (a, b) in m.points),
            "stabilizer": sorted(group.index_of(p) for p in m.stabilizer),
            "orbit_rep": m.orbit_rep,
        })
    return {"alpha": cover.alpha, "order": cover.order, "members": members}


def report_json(data) -> str:
    def default(x):
        if isinstance(x, frozenset):
            return sorted(x, key=repr)
        if x is INF:
            return "inf"
        return repr(x)

    return json.dumps(data, indent=2, sort_keys=True, default=default)
