import pytest

from coarsecover.corpus import (
    cycle_graph,
    path_graph,
    random_tree,
    spider,
    spider_rotation,
)
from coarsecover.graphs import make_graph
from coarsecover.pipeline import PipelineError, run_pipeline


class TestPipeline:
    def test_tree_flow_dominated(self):
        res = run_pipeline(path_graph(12), alpha=1, tau_max=4,
                           theta0_mode="all")
        assert res.ok
        assert res.stages["wideness_scan"]["targets"] > 0
        assert res.stages["combined"]["order"] <= \
            res.stages["combined"]["flow_order"] + 3

    def test_spider_cone_dominated(self):
        res = run_pipeline(spider(3, 5), [spider_rotation(3, 5)], alpha=1,
                           tau_max=4)
        assert res.ok
        assert res.stages["dichotomy"]["clauses"]["cone"] > 0

    def test_equivariant_cycle(self):
        res = run_pipeline(cycle_graph(12),
                           [tuple((i + 3) % 12 for i in range(12))],
                           alpha=1, tau_max=6)
        assert res.ok
        assert res.stages["setup"]["group_order"] == 4
        assert res.stages["wideness_scan"]["targets"] > 0

    def test_marked_cone_vertex(self):
        g = make_graph(9, spider(2, 4).edges, cone_vertices=[0])
        res = run_pipeline(g, alpha=1, tau_max=4, theta0_mode="all")
        assert res.ok
        assert res.stages["dichotomy"]["clauses"]["cone"] > 0

    def test_disconnected_rejected(self):
        g = make_graph(4, [(0, 1), (2, 3)])
        with pytest.raises(PipelineError, match="disconnected"):
            run_pipeline(g)

    def test_bad_theta0_mode(self):
        with pytest.raises(ValueError, match="theta0_mode"):
            run_pipeline(path_graph(4), theta0_mode="bogus")

    def test_stage_reports_are_complete(self):
        res = run_pipeline(random_tree(10, seed=4), theta0_mode="all",
                           tau_max=3)
        assert res.ok
        for key in ("setup", "theta3", "cone", "dichotomy", "flow_space",
                    "flow_doubling", "flow_cover", "wideness_scan",
                    "combined"):
            assert key in res.stages
