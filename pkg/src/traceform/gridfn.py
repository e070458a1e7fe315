"""Piecewise-linear functions on sorted node grids.

A ``GridFunction`` is the computational stand-in for a finite-energy function
on the window: linear between nodes, with the node set required to contain
every component endpoint whenever an operation needs to tell G-cells from
F-cells.  Membership tests, the darning transport of functions, and CSV
serialization live here.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import PreconditionError, ValidationError
from .intervals import IntervalSet, Real
from .transforms import DarningMap

SUBSPACE_TOL = 1e-9


@dataclass(frozen=True)
class GridFunction:
    """Continuous piecewise-linear function given by nodes and values."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or values.ndim != 1:
            raise ValidationError("grid and values must be one-dimensional")
        if grid.size != values.size:
            raise ValidationError(
                f"grid has {grid.size} nodes but values has {values.size} entries"
            )
        if grid.size < 2:
            raise ValidationError("a grid function needs at least two nodes")
        if not np.all(np.diff(grid) > 0):
            raise ValidationError("grid nodes must be strictly increasing")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise ValidationError("grid nodes and values must be finite")

    @property
    def span(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    @cached_property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.grid)

    @cached_property
    def cell_lengths(self) -> np.ndarray:
        return np.diff(self.grid)

    def __call__(self, x) -> np.ndarray | float:
        xs = np.asarray(x, dtype=float)
        lo, hi = self.span
        # points within float slack of the span count as boundary hits
        slack = 1e-12 * max(1.0, abs(hi - lo))
        if np.any(xs < lo - slack) or np.any(xs > hi + slack):
            raise PreconditionError(
                f"evaluation point outside the span [{lo}, {hi}]"
            )
        out = np.interp(xs, self.grid, self.values)
        return float(out) if np.isscalar(x) else out

    def refine(self, nodes: Iterable[float]) -> "GridFunction":
        """Same function on the union grid; evaluation is exact for PL data.

        Nodes within float slack of the span are snapped to the boundary so
        exact rational endpoints and their rounded images interoperate.
        """
        extra = np.asarray(list(nodes), dtype=float)
        lo, hi = self.span
        if extra.size:
            slack = 1e-12 * max(1.0, abs(hi - lo))
            if extra.min() < lo - slack or extra.max() > hi + slack:
                raise PreconditionError("refinement nodes must stay inside the span")
            extra = np.clip(extra, lo, hi)
        grid = np.union1d(self.grid, extra)
        return GridFunction(grid, np.interp(grid, self.grid, self.values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "value"])
        for x, v in zip(self.grid, self.values):
            writer.writerow([repr(float(x)), repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, iset: IntervalSet | None = None) -> "GridFunction":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["x", "value"]:
            raise ValidationError('grid function CSV must start with header "x,value"')
        xs, vs = [], []
        for row in reader:
            if not row:
                continue
            try:
                xs.append(float(row[0]))
                vs.append(float(row[1]))
            except (IndexError, ValueError) as exc:
                raise ValidationError(f"bad CSV row {row!r}: {exc}") from exc
        u = cls(np.asarray(xs), np.asarray(vs))
        if iset is not None:
            require_adapted(u, iset)
        return u


def adapted_grid(iset: IntervalSet, extra: Sequence[float] = ()) -> np.ndarray:
    """Window-spanning grid containing every component endpoint."""
    w0, w1 = iset.window
    pts = {float(w0), float(w1)}
    pts.update(float(p) for p in iset.endpoints if w0 <= p <= w1)
    pts.update(float(x) for x in extra)
    arr = np.array(sorted(pts))
    if arr[0] < float(w0) or arr[-1] > float(w1):
        raise PreconditionError("extra nodes must lie inside the window")
    return arr


def from_callable(fn: Callable[[np.ndarray], np.ndarray], iset: IntervalSet,
                  extra: Sequence[float] = ()) -> GridFunction:
    grid = adapted_grid(iset, extra)
    return GridFunction(grid, np.asarray(fn(grid), dtype=float))


def is_adapted(u: GridFunction, iset: IntervalSet) -> bool:
    w0, w1 = (float(x) for x in iset.window)
    if u.span != (w0, w1):
        return False
    nodes = set(u.grid.tolist())
    return all(float(p) in nodes for p in iset.endpoints if w0 <= p <= w1)


def require_adapted(u: GridFunction, iset: IntervalSet) -> None:
    if not is_adapted(u, iset):
        raise PreconditionError(
            "grid is not adapted to the set: it must span the window and "
            "contain every component endpoint; refine the grid explicitly"
        )


def cell_in_g(u: GridFunction, iset: IntervalSet) -> np.ndarray:
    """Boolean per cell: True when the cell lies in a G-component.

    Requires an adapted grid, so each cell sits entirely inside one
    G-component or one F-component and the midpoint decides which.
    """
    require_adapted(u, iset)
    mids = (u.grid[:-1] + u.grid[1:]) / 2
    return np.array([iset.component_index(m) is not None for m in mids])


def is_in_subspace(u: GridFunction, iset: IntervalSet, tol: float = SUBSPACE_TOL) -> bool:
    """Whether u is flat (within tol) on every cell meeting F in positive measure."""
    in_g = cell_in_g(u, iset)
    f_slopes = u.slopes[~in_g]
    return bool(np.all(np.abs(f_slopes) <= tol))


def vanishes_on_f(u: GridFunction, iset: IntervalSet, tol: float = SUBSPACE_TOL) -> bool:
    """Whether u is zero (within tol) at every node lying in F."""
    require_adapted(u, iset)
    on_f = np.array([iset.component_index(x) is None for x in u.grid])
    return bool(np.all(np.abs(u.values[on_f]) <= tol))


def component_values(u: GridFunction, iset: IntervalSet) -> list[np.ndarray]:
    """Node values of u inside each closed component, in component order."""
    require_adapted(u, iset)
    out = []
    for a, b in iset.components:
        mask = (u.grid >= float(a)) & (u.grid <= float(b))
        out.append(u.values[mask])
    return out


def darn_function(u: GridFunction, dm: DarningMap, tol: float = SUBSPACE_TOL) -> GridFunction:
    """Transport u through the darning map: nodes inside each component
    closure collapse to one image node.  u must be constant (within tol) on
    each closed component."""
    iset = dm.base
    require_adapted(u, iset)
    for i, vals in enumerate(component_values(u, iset)):
        if vals.size and float(vals.max() - vals.min()) > tol:
            a, b = iset.components[i]
            raise PreconditionError(
                f"function is not constant on component {i} = ({a}, {b}); "
                f"value spread {float(vals.max() - vals.min()):.3e} exceeds tol {tol}"
            )
    new_grid = []
    new_vals = []
    for x, v in zip(u.grid, u.values):
        y = float(dm(float(x)))
        if new_grid and y <= new_grid[-1]:
            continue  # collapsed duplicate inside a component closure
        new_grid.append(y)
        new_vals.append(float(v))
    return GridFunction(np.asarray(new_grid), np.asarray(new_vals))


def undarn_function(uh: GridFunction, dm: DarningMap, match_tol: float = 1e-12) -> GridFunction:
    """Pull a function on the darning image back to the window: u = uh o j.

    The result's grid contains every component endpoint plus the preimage of
    every node of uh; a node at a collapsed point contributes both endpoints
    of its component.
    """
    iset = dm.base
    img = dm.image()
    lo, hi = float(img.lo), float(img.hi)
    slack = 1e-12 * max(1.0, hi - lo)
    if abs(uh.span[0] - lo) > slack or abs(uh.span[1] - hi) > slack:
        raise PreconditionError(
            f"function span {uh.span} does not match the darning image [{lo}, {hi}]"
        )
    w0, w1 = (float(x) for x in iset.window)
    nodes = {w0, w1}
    nodes.update(float(p) for p in iset.endpoints if w0 <= p <= w1)
    collapsed = [(float(c.position), iset.components[c.index]) for c in dm.collapsed_points]
    for y in uh.grid:
        y = float(y)
        hit = next((pos for pos, _ in collapsed if abs(y - pos) <= match_tol), None)
        if hit is None:
            xlo, xhi = dm.inverse(y)
            nodes.add(float(xlo))
    grid = np.array(sorted(nodes))
    jvals = np.array([float(dm(float(x))) for x in grid])
    return GridFunction(grid, uh(jvals))
