"""Bilinear Dirichlet-type energies of piecewise-linear functions.

All integrals are exact cell sums: for PL functions the derivative is
constant per cell, so no quadrature is involved.  Pairs of functions are
brought to a common grid by node union before integrating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .gridfn import (
    SUBSPACE_TOL,
    GridFunction,
    cell_in_g,
    is_in_subspace,
    require_adapted,
    vanishes_on_f,
)
from .intervals import IntervalSet

FORM_TAGS = (
    "full",
    "subspace",
    "part",
    "trace",
    "trace_subspace",
    "trace_complement",
    "darned",
)


@dataclass(frozen=True)
class EnergyReport:
    """Energy value with its per-cell breakdown; value == sum(contributions)."""

    form: str
    value: float
    breakdown: tuple[tuple[float, float, float], ...]  # (x0, x1, contribution)

    def to_dict(self) -> dict:
        return {
            "form": self.form,
            "value": self.value,
            "breakdown": [list(row) for row in self.breakdown],
        }


def _report(form: str, cells: np.ndarray, contribs: np.ndarray) -> EnergyReport:
    breakdown = tuple(
        (float(x0), float(x1), float(c)) for (x0, x1), c in zip(cells, contribs)
    )
    return EnergyReport(form=form, value=float(contribs.sum()), breakdown=breakdown)


def common_grid(u: GridFunction, v: GridFunction) -> tuple[GridFunction, GridFunction]:
    if u.span != v.span:
        raise PreconditionError(
            f"incompatible windows: spans {u.span} and {v.span} differ"
        )
    grid = np.union1d(u.grid, v.grid)
    return u.refine(grid), v.refine(grid)


def dirichlet_energy(u: GridFunction, v: GridFunction | None = None,
                     form: str = "full") -> EnergyReport:
    """(1/2) integral of u'v' over the common span."""
    v = u if v is None else v
    ru, rv = common_grid(u, v)
    contribs = 0.5 * ru.slopes * rv.slopes * ru.cell_lengths
    cells = np.column_stack([ru.grid[:-1], ru.grid[1:]])
    return _report(form, cells, contribs)


def subspace_energy(u: GridFunction, v: GridFunction | None = None, *,
                    iset: IntervalSet, tol: float = SUBSPACE_TOL) -> EnergyReport:
    """(1/2) integral of u'v' restricted to G; both arguments must be flat on F."""
    v = u if v is None else v
    for name, w in (("first", u), ("second", v)):
        if not is_in_subspace(w, iset, tol):
            raise PreconditionError(
                f"{name} argument is not a subspace member: its derivative does "
                "not vanish on F within tolerance"
            )
    ru, rv = common_grid(u, v)
    in_g = cell_in_g(ru, iset)
    contribs = np.where(in_g, 0.5 * ru.slopes * rv.slopes * ru.cell_lengths, 0.0)
    cells = np.column_stack([ru.grid[:-1], ru.grid[1:]])
    return _report("subspace", cells, contribs)


def part_energy(u: GridFunction, v: GridFunction | None = None, *,
                iset: IntervalSet, tol: float = SUBSPACE_TOL) -> EnergyReport:
    """(1/2) integral of u'v' over G for functions vanishing on F.

    For such functions this coincides with the full energy; the agreement is
    checked and a violation raises, since it signals inconsistent inputs.
    """
    v = u if v is None else v
    for name, w in (("first", u), ("second", v)):
        if not vanishes_on_f(w, iset, tol):
            raise PreconditionError(
                f"{name} argument does not vanish on F within tolerance"
            )
    ru, rv = common_grid(u, v)
    in_g = cell_in_g(ru, iset)
    contribs = np.where(in_g, 0.5 * ru.slopes * rv.slopes * ru.cell_lengths, 0.0)
    cells = np.column_stack([ru.grid[:-1], ru.grid[1:]])
    report = _report("part", cells, contribs)
    full = float((0.5 * ru.slopes * rv.slopes * ru.cell_lengths).sum())
    if abs(full - report.value) > 1e-9 * max(1.0, abs(full)):
        raise PreconditionError(
            "part energy disagrees with the full energy for F-vanishing inputs; "
            "inputs are inconsistent with the declared set"
        )
    return report


def energy_measure(u: GridFunction, interval: tuple[float, float], *,
                   iset: IntervalSet | None = None, subspace: bool = False) -> float:
    """Integral of u'(x)^2 over the interval (the energy measure of u).

    With ``subspace=True`` only the G-portion of each cell counts, matching
    the subspace form whose energy measure never charges F.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if lo > hi:
        raise PreconditionError(f"interval has lo {lo} > hi {hi}")
    span = u.span
    lo, hi = max(lo, span[0]), min(hi, span[1])
    if hi <= lo:
        return 0.0
    if subspace:
        if iset is None:
            raise PreconditionError("subspace energy measure needs the interval set")
        require_adapted(u, iset)
    total = 0.0
    gmask = cell_in_g(u, iset) if subspace else None
    for k in range(u.grid.size - 1):
        x0, x1 = float(u.grid[k]), float(u.grid[k + 1])
        left, right = max(x0, lo), min(x1, hi)
        if right <= left:
            continue
        if subspace and not gmask[k]:
            continue
        total += float(u.slopes[k]) ** 2 * (right - left)
    return total


def unit_contraction(u: GridFunction) -> GridFunction:
    """Clip u to [0, 1], inserting nodes where u crosses either level so the
    result is exactly piecewise linear on its grid."""
    nodes = list(map(float, u.grid))
    for k in range(u.grid.size - 1):
        x0, x1 = float(u.grid[k]), float(u.grid[k + 1])
        v0, v1 = float(u.values[k]), float(u.values[k + 1])
        if v0 == v1:
            continue
        for level in (0.0, 1.0):
            if (v0 - level) * (v1 - level) < 0:
                nodes.append(x0 + (level - v0) / (v1 - v0) * (x1 - x0))
    refined = u.refine(np.asarray(nodes))
    return GridFunction(refined.grid, np.clip(refined.values, 0.0, 1.0))
