"""Command line front end.

Exit codes: 0 all verifications pass, 1 a verification failed, 2 usage or
parse errors.  Reports are JSON on stdout; artifacts go to files under
--out when given.  Identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .angles import (
    all_angles,
    angleset_to_document,
    k_fold_sum,
    lemma_battery,
    load_angleset,
    theta3,
    theta3_circuit_bound_check,
    trivial_only,
)
from .cones import cone_cover, dichotomy_check, seed_theta0
from .flow import (
    ball_closed_targets,
    build_cf_theta,
    cf_doubling_report,
    cover_cf,
    pullback_cover,
    wideness_scan,
)
from .graphs import (
    GeodesicIndex,
    GraphFormatError,
    barycentric_subdivision,
    dag_to_dot,
    fineness_profile,
    geodesic_dag,
    graph_to_dot,
    load_graph,
    slimness_constant,
)
from .pipeline import boundary_surrogates, cover_to_document, \
    default_base_vertex, report_json, run_pipeline
from .rips import build_rips, complex_stats, contract_subcomplex, \
    homology_oracle
from .symmetry import close_group, subdivided_group, trivial_group


from dataclasses import dataclass, field


@dataclass
class RunConfig:
    """File-backed configuration for the pipeline command."""

    graph_path: str
    action_path: str = None
    action_name: str = None
    theta_path: str = None
    alpha: int = 1
    d: int = 4
    tau_max: int = 8
    theta0_mode: str = "seed"
    caps: dict = field(default_factory=dict)
    seed: int = 0

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            doc = json.load(fh)
        cfg = cls(**doc)
        cfg.validate()
        return cfg

    def validate(self):
        for p in (self.graph_path, self.action_path, self.theta_path):
            if p is not None and not os.path.exists(p):
                raise GraphFormatError("missing file %r" % p)
        for name, cap in self.caps.items():
            if cap <= 0:
                raise GraphFormatError("cap %r must be positive" % name)


def _read_graph(args):
    with open(args.graph) as fh:
        return load_graph(fh.read(), cone_threshold=args.cone_threshold)


def _read_group(g, args):
    if not getattr(args, "action", None):
        return trivial_group(g)
    with open(args.action) as fh:
        doc = json.load(fh)
    name = getattr(args, "action_name", None)
    if name is None:
        # the graph document may reference the generator list by name
        with open(args.graph) as fh:
            name = json.load(fh).get("action")
    if name is None:
        name = sorted(doc)[0]
    perms = [tuple(p) for p in doc[name]]
    return close_group(g, perms)


def _theta_for(g, spec_text, index=None):
    if spec_text == "all":
        return all_angles(g)
    if spec_text == "trivial":
        return trivial_only(g)
    if spec_text.startswith("tfold:"):
        k = int(spec_text.split(":", 1)[1])
        return k_fold_sum(theta3(g, index=index), k)
    if spec_text.startswith("file:"):
        with open(spec_text.split(":", 1)[1]) as fh:
            return load_angleset(fh.read(), g)
    raise GraphFormatError("unknown theta spec %r" % spec_text)


def _emit(args, name, data):
    text = report_json(data)
    if getattr(args, "out", None):
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, name + ".json"), "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_analyze(args):
    g = _read_graph(args)
    index = GeodesicIndex(g)
    report = {
        "vertices": g.vertex_count,
        "edges": len(g.edges),
        "cone_vertices": sorted(g.cone_vertices),
        "connected": g.is_connected(),
    }
    if g.is_connected():
        rep = slimness_constant(g, index.dist)
        t3 = theta3(g, index=index)
        circ = theta3_circuit_bound_check(g, t3, rep.delta)
        report.update({
            "delta": rep.delta,
            "witness_triangle": list(rep.witness_triangle),
            "fineness": fineness_profile(g, min(16 * max(1, rep.delta), 12)),
            "theta3_nontrivial": len(t3),
            "theta3_circuit_bound": {
                "ok": circ["ok"], "bound": circ["bound"],
                "max_needed": circ["max_circuit_needed"],
            },
        })
    print(report_json(report))
    return 0


def cmd_pipeline(args):
    if args.config:
        cfg = RunConfig.from_file(args.config)
        args.graph = cfg.graph_path
        args.action = cfg.action_path
        args.action_name = cfg.action_name
        args.alpha = cfg.alpha
        args.tau_max = cfg.tau_max
        args.theta0_mode = cfg.theta0_mode
    g = _read_graph(args)
    group = _read_group(g, args)
    res = run_pipeline(g, group=group, alpha=args.alpha, tau_max=args.tau_max,
                       theta0_mode=args.theta0_mode)
    _emit(args, "pipeline_summary", res.summary())
    if args.out:
        sub_group = subdivided_group(group, barycentric_subdivision(g))
        for key in ("flow_cover", "pullback", "combined"):
            if key in res.artifacts:
                doc = cover_to_document(res.artifacts[key], sub_group)
                with open(os.path.join(args.out, key + ".json"), "w") as fh:
                    fh.write(report_json(doc) + "\n")
        if "cf" in res.artifacts:
            cf = res.artifacts["cf"]
            doc = {"delta": cf.delta, "delta_prime": cf.delta_prime,
                   "endpoints": list(cf.endpoints),
                   "triples": sorted(list(t) for t in cf.triples)}
            with open(os.path.join(args.out, "cf.json"), "w") as fh:
                fh.write(report_json(doc) + "\n")
        print(report_json({"ok": res.ok, "out": args.out}))
    return 0 if res.ok else 1


def _deep_tuple(x):
    return tuple(_deep_tuple(y) for y in x) if isinstance(x, list) else x


def _cover_nerve_dot(doc) -> str:
    """Members as nodes, intersections as edges."""
    sets = [frozenset(_deep_tuple(p) for p in m["points"])
            for m in doc["members"]]
    lines = ["graph nerve {"]
    for i, s in enumerate(sets):
        lines.append('  m%d [label="m%d (%d)"];' % (i, i, len(s)))
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j]:
                lines.append("  m%d -- m%d;" % (i, j))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _trace_dot(doc) -> str:
    lines = ["digraph trace {"]
    for i, m in enumerate(doc["moves"]):
        lines.append('  s%d [label="%s -> %s (%s)"];'
                     % (i, m["vertex"], m["replacement"], m["case"]))
        if i:
            lines.append("  s%d -> s%d;" % (i - 1, i))
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(args):
    if args.cover:
        with open(args.cover) as fh:
            sys.stdout.write(_cover_nerve_dot(json.load(fh)))
        return 0
    if args.trace:
        with open(args.trace) as fh:
            sys.stdout.write(_trace_dot(json.load(fh)))
        return 0
    if not args.graph:
        raise GraphFormatError("export-dot needs --graph, --cover or --trace")
    g = _read_graph(args)
    if args.dag:
        u, v = map(int, args.dag.split(","))
        sys.stdout.write(dag_to_dot(geodesic_dag(g, u, v)))
    else:
        sys.stdout.write(graph_to_dot(g))
    return 0


def _cf_setup(args):
    g = _read_graph(args)
    group = _read_group(g, args)
    sub = barycentric_subdivision(g)
    index = GeodesicIndex(sub.graph)
    sub_group = subdivided_group(group, sub)
    theta = _theta_for(g, args.theta, index=index)
    v0 = default_base_vertex(sub)
    boundary = boundary_surrogates(sub, sub_group, v0)
    endpoints = tuple(sorted(set(boundary)
                             | {p[v0] for p in sub_group.elements}))
    cf = build_cf_theta(sub, theta, endpoints, group=group, index=index)
    return g, group, sub, sub_group, index, cf, v0, boundary


def cmd_cf(args):
    g, group, sub, sub_group, index, cf, v0, boundary = _cf_setup(args)
    if args.cf_cmd == "build":
        data = {
            "delta": cf.delta, "delta_prime": cf.delta_prime,
            "endpoints": list(cf.endpoints),
            "triples": sorted(list(t) for t in cf.triples),
        }
        _emit(args, "cf", data)
        return 0
    if args.cf_cmd == "doubling":
        rep = cf_doubling_report(cf, compute_tightest=True)
        _emit(args, "cf_doubling", rep)
        return 0 if rep["ok"] else 1
    cover = cover_cf(cf, args.alpha)
    if args.cf_cmd == "cover":
        _emit(args, "cf_cover", cover_to_document(cover, sub_group))
        return 0
    targets = ball_closed_targets(cf, v0, args.alpha, boundary)
    if args.cf_cmd == "pullback":
        pull = pullback_cover(cf, cover, args.tau, targets, v0)
        _emit(args, "cf_pullback", cover_to_document(pull, sub_group))
        return 0
    if args.cf_cmd == "scan":
        scan = wideness_scan(cf, cover, args.alpha, targets,
                             range(0, args.tau_max + 1), v0)
        _emit(args, "cf_scan", {"tau": scan.passing_tau,
                                "targets": len(targets),
                                "witness": list(scan.witness)})
        return 0 if scan.ok else 1
    raise GraphFormatError("unknown cf subcommand")


def cmd_cone(args):
    g = _read_graph(args)
    group = _read_group(g, args)
    sub = barycentric_subdivision(g)
    index = GeodesicIndex(sub.graph)
    sub_group = subdivided_group(group, sub)
    v0 = default_base_vertex(sub)
    boundary = boundary_surrogates(sub, sub_group, v0)
    xi = tuple(sorted(set(g.cone_vertices) | set(boundary)))
    theta0 = seed_theta0(sub, group, v0, args.alpha, index=index)
    if args.theta0_mode == "all":
        theta0 = theta0.union(all_angles(g))
    cones, theta_out = cone_cover(sub, group, theta0, args.alpha, v0, xi,
                                  index=index)
    if args.cone_cmd == "build":
        data = [{
            "apex": c.apex, "layer": c.layer,
            "members": sorted([sub_group.index_of(ge), x]
                              for (ge, x) in c.members),
            "certified_interior": sorted([sub_group.index_of(ge), x]
                                         for (ge, x) in c.certified_interior),
        } for c in cones]
        _emit(args, "cones", {"theta_out": angleset_to_document(theta_out),
                              "cone_sets": data})
        return 0
    rep = dichotomy_check(sub, group, theta_out, args.alpha, v0, cones, xi,
                          index=index)
    _emit(args, "dichotomy", rep)
    return 0 if rep["ok"] else 1


def cmd_cover_combine(args):
    args.theta0_mode = getattr(args, "theta0_mode", "seed")
    g = _read_graph(args)
    group = _read_group(g, args)
    res = run_pipeline(g, group=group, alpha=args.alpha, tau_max=args.tau_max,
                       theta0_mode=args.theta0_mode)
    _emit(args, "combined_summary", res.summary())
    if args.out and "combined" in res.artifacts:
        sub_group = subdivided_group(group, barycentric_subdivision(g))
        doc = cover_to_document(res.artifacts["combined"], sub_group)
        with open(os.path.join(args.out, "combined.json"), "w") as fh:
            fh.write(report_json(doc) + "\n")
    return 0 if res.ok else 1


def cmd_rips(args):
    g = _read_graph(args)
    index = GeodesicIndex(g)
    theta = _theta_for(g, args.theta, index=index)
    if args.rips_cmd == "build":
        P = build_rips(g, args.d, theta, index=index)
        _emit(args, "rips", {
            "vertices": list(P.vertices),
            "maximal_simplices": sorted(sorted(s) for s in P.maximal_simplices),
            "stats": complex_stats(P),
        })
        return 0
    if args.rips_cmd == "homology":
        P = build_rips(g, args.d, theta, index=index)
        betti = homology_oracle(P, max_dim=args.max_dim)
        _emit(args, "homology", {"betti": list(betti)})
        return 0
    if args.rips_cmd == "contract":
        delta = slimness_constant(g).delta
        trace = contract_subcomplex(sorted(g.vertices), g, args.d, theta,
                                    delta, index=index)
        _emit(args, "trace", {
            "basepoint": trace.basepoint,
            "final_vertex": trace.final_vertex,
            "moves": [{"vertex": m.vertex, "replacement": m.replacement,
                       "case": m.case,
                       "measure_before": list(m.measure_before),
                       "measure_after": list(m.measure_after)}
                      for m in trace.moves],
        })
        return 0
    raise GraphFormatError("unknown rips subcommand")


def cmd_battery(args):
    g = _read_graph(args)
    group = trivial_group(g)
    theta0 = _theta_for(g, args.theta)
    rep = lemma_battery(g, group, theta0, args.trials, args.seed)
    _emit(args, "battery", {"ok": rep.ok, "total": rep.total_checked,
                            "lemmas": rep.summary()})
    return 0 if rep.ok else 1


def build_parser():
    ap = argparse.ArgumentParser(
        prog="coarsecover",
        description="long thin covers, coarse flow spaces and relative Rips "
                    "complexes on finite graph models")
    ap.add_argument("--cone-threshold", type=int, default=8,
                    help="valency threshold marking cone vertices when the "
                         "graph file does not list them")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, action=True):
        p.add_argument("--graph", required=True)
        p.add_argument("--out")
        if action:
            p.add_argument("--action", help="JSON file of named generator lists")
            p.add_argument("--action-name")

    p = sub.add_parser("analyze", help="distances, slimness, fineness, corner sizes")
    common(p, action=False)

    p = sub.add_parser("pipeline", help="full covering chain with verification")
    common(p)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--tau-max", type=int, default=8)
    p.add_argument("--theta0-mode", choices=("seed", "all"), default="seed")
    p.add_argument("--config", help="JSON run configuration overriding flags")

    p = sub.add_parser("export-dot", help="graph, DAG, cover nerve or trace")
    p.add_argument("--graph")
    p.add_argument("--out")
    p.add_argument("--dag", help="u,v for the geodesic DAG between u and v")
    p.add_argument("--cover", help="cover artifact file; emits its nerve")
    p.add_argument("--trace", help="contraction trace file")

    p = sub.add_parser("cf", help="coarse flow space operations")
    p.add_argument("cf_cmd", choices=("build", "doubling", "cover",
                                      "pullback", "scan"))
    common(p)
    p.add_argument("--theta", default="all")
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--tau", type=int, default=0)
    p.add_argument("--tau-max", type=int, default=8)

    p = sub.add_parser("cone", help="cone cover operations")
    p.add_argument("cone_cmd", choices=("build", "dichotomy"))
    common(p)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--theta0-mode", choices=("seed", "all"), default="seed")

    p = sub.add_parser("cover", help="combined cover")
    p.add_argument("cover_cmd", choices=("combine",))
    common(p)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--tau-max", type=int, default=8)
    p.add_argument("--theta0-mode", choices=("seed", "all"), default="seed")

    p = sub.add_parser("rips", help="relative Rips complex operations")
    p.add_argument("rips_cmd", choices=("build", "contract", "homology"))
    common(p, action=False)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--theta", default="tfold:7")
    p.add_argument("--max-dim", type=int, default=3)

    p = sub.add_parser("battery", help="large-angle lemma property battery")
    common(p, action=False)
    p.add_argument("--theta", default="trivial")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    handlers = {
        "analyze": cmd_analyze,
        "pipeline": cmd_pipeline,
        "export-dot": cmd_export_dot,
        "cf": cmd_cf,
        "cone": cmd_cone,
        "cover": cmd_cover_combine,
        "rips": cmd_rips,
        "battery": cmd_battery,
    }
    try:
        return handlers[args.cmd](args)
    except (OSError, json.JSONDecodeError, GraphFormatError, ValueError) as e:
        print(report_json({"error": str(e)}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
