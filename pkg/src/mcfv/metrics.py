"""Error norms and grid-refinement bookkeeping.

The expectation is judged by its relative L1 error, the variance by its
absolute L1 error. Refinement studies compare either against a closed-form
reference (time problem) or against the finest computed grid restricted by
cell averaging (space problem, where no closed form exists).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import GridFunction


@dataclass(frozen=True)
class ErrorReport:
    eps_mean: float
    delta_var: float
    cells: int
    samples: int

    def __post_init__(self):
        if self.eps_mean < 0.0 or self.delta_var < 0.0:
            raise ValueError("error norms are nonnegative")


def _check_match(est: GridFunction, ref: GridFunction) -> None:
    if est.ncells != ref.ncells:
        raise ValueError(
            f"grid mismatch: estimate has {est.ncells} cells, "
            f"reference has {ref.ncells}"
        )


def rel_l1_error(est: GridFunction, ref: GridFunction) -> float:
    """dx * sum|est - ref| over dx * sum|ref| (relative L1)."""
    _check_match(est, ref)
    denom = float(np.sum(np.abs(ref.values)))
    if denom == 0.0:
        raise ValueError("reference is identically zero; relative error undefined")
    return float(np.sum(np.abs(est.values - ref.values))) / denom


def abs_l1_error(est: GridFunction, ref: GridFunction) -> float:
    """dx * sum|est - ref| (absolute L1 on the unit domain)."""
    _check_match(est, ref)
    return est.dx * float(np.sum(np.abs(est.values - ref.values)))


def restrict(fine: GridFunction, factor: int) -> GridFunction:
    """Conservative coarsening: each coarse cell averages ``factor`` fine cells."""
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    if fine.ncells % factor:
        raise ValueError(
            f"{fine.ncells} cells not divisible by coarsening factor {factor}"
        )
    if factor == 1:
        return fine
    coarse = fine.values.reshape(-1, factor).mean(axis=1)
    return GridFunction(coarse, kind=fine.kind)


@dataclass(frozen=True)
class ConvergenceRow:
    cells: int
    eps_mean: float
    delta_var: float
    order_mean: float  # nan on the first row
    order_var: float


def convergence_table(
    runs: Sequence[tuple[GridFunction, GridFunction]],
    reference: tuple[GridFunction, GridFunction] | str = "finest",
) -> list[ConvergenceRow]:
    """Per-grid errors and observed orders for a nested refinement sweep.

    ``runs`` holds (mean, variance) pairs ordered by increasing resolution,
    each grid dividing the next. ``reference`` is either a (mean, variance)
    pair on a grid at least as fine as every run, or "finest" to use the
    last run itself (whose own row is then omitted). Observed order between
    consecutive rows is log(e_coarse/e_fine) / log(I_fine/I_coarse).
    """
    if len(runs) < 2:
        raise ValueError("need at least two grid levels")
    sizes = [m.ncells for m, _ in runs]
    for coarse, fine in zip(sizes, sizes[1:]):
        if fine <= coarse or fine % coarse:
            raise ValueError(f"grids must be nested and increasing, got {sizes}")
    if reference == "finest":
        ref_mean, ref_var = runs[-1]
        rows_src = runs[:-1]
    else:
        ref_mean, ref_var = reference
        rows_src = list(runs)
    for m, _ in rows_src:
        if ref_mean.ncells % m.ncells:
            raise ValueError(
                f"reference grid {ref_mean.ncells} does not nest {m.ncells}"
            )

    rows: list[ConvergenceRow] = []
    prev: ConvergenceRow | None = None
    for mean_gf, var_gf in rows_src:
        factor = ref_mean.ncells // mean_gf.ncells
        eps = rel_l1_error(mean_gf, restrict(ref_mean, factor))
        delta = abs_l1_error(var_gf, restrict(ref_var, factor))
        order_m = order_v = math.nan
        if prev is not None:
            ratio = math.log(mean_gf.ncells / prev.cells)
            if prev.eps_mean > 0.0 and eps > 0.0:
                order_m = math.log(prev.eps_mean / eps) / ratio
            if prev.delta_var > 0.0 and delta > 0.0:
                order_v = math.log(prev.delta_var / delta) / ratio
        prev = ConvergenceRow(mean_gf.ncells, eps, delta, order_m, order_v)
        rows.append(prev)
    return rows


def table_csv(rows: Sequence[ConvergenceRow]) -> str:
    lines = ["I,eps_mean,delta_var,order_mean,order_var"]
    for r in rows:
        lines.append(
            f"{r.cells},{r.eps_mean:.17g},{r.delta_var:.17g},"
            f"{r.order_mean:.17g},{r.order_var:.17g}"
        )
    return "\n".join(lines) + "\n"
