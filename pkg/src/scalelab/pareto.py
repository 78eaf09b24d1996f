"""Pareto frontier of (compute, loss) points."""

from dataclasses import dataclass
from typing import Any

from .errors import DataValueError, EmptyInput


@dataclass(frozen=True)
class CostLossPoint:
    cost: float
    loss: float
    source_run: Any = None

    def __post_init__(self):
        if not self.cost > 0 or not self.loss > 0:
            raise DataValueError(f"cost and loss must be > 0, got ({self.cost}, {self.loss})")


def pareto_frontier(points):
    """Points not weakly dominated by any other point, sorted by cost.

    ``q`` dominates ``p`` when it is no more expensive and strictly better,
    or strictly cheaper and no worse. Exact duplicates keep the first
    occurrence. Frontier losses are strictly decreasing.
    """
    points = list(points)
    if not points:
        raise EmptyInput("pareto_frontier needs at least one point")
    order = sorted(range(len(points)), key=lambda i: (points[i].cost, points[i].loss, i))
    frontier = []
    best = float("inf")
    for i in order:
        if points[i].loss < best:
            frontier.append(points[i])
            best = points[i].loss
    return frontier


def frontier_mask(costs, losses):
    """Boolean mask over the inputs marking frontier members."""
    pts = [CostLossPoint(c, y, i) for i, (c, y) in enumerate(zip(costs, losses))]
    keep = {p.source_run for p in pareto_frontier(pts)}
    return [i in keep for i in range(len(pts))]
