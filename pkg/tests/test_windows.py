"""Window grid experiment over the fixture repository."""

import pytest

from cochange.evaluation import window_experiment
from cochange.evaluation.windows import DEFAULT_TEST_DAYS, DEFAULT_TRAIN_DAYS
from cochange.models import ForestConfig, TrainConfig

FAST_MODEL = TrainConfig(model_type="random-forest", rng_seed=3, forest=ForestConfig(num_trees=10))


@pytest.fixture(scope="module")
def grid(artifacts):
    return window_experiment(artifacts, FAST_MODEL)


class TestGrid:
    def test_default_grid_attempts_exactly_30_cells(self, grid):
        assert len(grid.cells) == 30
        assert len(DEFAULT_TRAIN_DAYS) * len(DEFAULT_TEST_DAYS) == 30
        seen = {(c.train_days, c.test_days) for c in grid.cells}
        assert len(seen) == 30

    def test_infeasible_cells_skipped_never_zero(self, grid):
        # fixture spans 450 days: cells needing more are skipped with a reason
        for cell in grid.cells:
            if cell.train_days + cell.test_days >= 450:
                assert cell.status == "skipped"
                assert cell.reason
                assert cell.report is None

    def test_every_skip_class_appears_on_the_fixture(self, grid):
        reasons = [c.reason for c in grid.cells if c.status == "skipped"]
        assert any("insufficient history" in r for r in reasons)
        assert any("no training data" in r for r in reasons)
        assert any("no test data" in r for r in reasons)

    def test_ok_cells_have_reports_with_bounded_ndcg(self, grid):
        ok = [c for c in grid.cells if c.status == "ok"]
        assert ok, "fixture must complete at least one cell"
        for cell in ok:
            for q in cell.report.per_query:
                for v in q["ndcg"].values():
                    assert 0.0 <= v <= 1.0

    def test_comparisons_are_paired_by_query(self, grid):
        for comp in grid.comparisons:
            assert comp["n_pairs"] >= 1
            assert 0.0 <= comp["p_value"] <= 1.0

    def test_as_dict_serializes(self, grid):
        import json

        payload = grid.as_dict()
        text = json.dumps(payload)
        assert '"cells"' in text and '"comparisons"' in text

    def test_custom_small_grid(self, artifacts):
        grid = window_experiment(artifacts, FAST_MODEL, train_days=(150,), test_days=(100,))
        assert len(grid.cells) == 1
        cell = grid.cells[0]
        assert cell.status == "ok"
        assert cell.train_lists == 2 and cell.test_lists == 2
