import re

import pytest

from trustsim.experiments import CellStats, GridResult
from trustsim.heatmap import render_heatmap


def grid_from_values(values):
    """values: dict (c, prior_mean-ish prior tuple) -> metric value"""
    cells = {}
    for (c, prior), val in values.items():
        cells[("aware", c, prior)] = CellStats(
            n_runs=5,
            means={"org_utility": val, "fairness": val, "avg_trust": val},
            stderrs={m: 0.0 for m in ("org_utility", "fairness", "avg_trust")})
    return GridResult(cells=cells)


def full_grid(value=0.5):
    c_values = (0.0, 0.25, 0.5, 0.75, 1.0)
    priors = ((2, 8), (2, 6), (2, 4), (2, 2), (4, 2), (6, 2), (8, 2))
    return grid_from_values({(c, p): value for c in c_values for p in priors})


def test_five_by_seven_grid_has_35_cells():
    svg = render_heatmap(full_grid(), "org_utility")
    assert svg.count('class="cell"') == 35


def test_all_zero_grid_uniform_color():
    svg = render_heatmap(full_grid(0.0), "fairness")
    fills = re.findall(r'fill="(rgb\([\d,]+\))"', svg)
    assert len(set(fills)) == 1


def test_value_text_three_decimals():
    grid = grid_from_values({(0.0, (2, 8)): 0.123456, (1.0, (8, 2)): 0.9})
    svg = render_heatmap(grid, "avg_trust")
    assert ">0.123<" in svg
    assert ">0.900<" in svg


def test_diverging_palette_for_negative_values():
    grid = grid_from_values({(0.0, (2, 8)): -0.5, (1.0, (8, 2)): 0.5})
    svg = render_heatmap(grid, "org_utility")
    fills = re.findall(r'fill="(rgb\([\d,]+\))"', svg)
    assert len(set(fills)) == 2  # pink side vs green side


def test_unknown_metric_rejected():
    with pytest.raises(ValueError, match="unknown metric"):
        render_heatmap(full_grid(), "happiness")


def test_axis_labels_present():
    svg = render_heatmap(full_grid(), "org_utility")
    assert "c=0.25" in svg
    assert "0.20" in svg  # prior mean of Beta(2,8)
    assert "0.80" in svg  # prior mean of Beta(8,2)
