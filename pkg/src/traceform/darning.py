"""Energies on the darned image and the representation-equivalence report.

Functions constant on each component closure factor through the darning map:
u = uh o j.  The factorization preserves sup norms, L2 norms against the
pushforward measure, and Dirichlet energies, because j is an isometry from F
(with the gaps collapsed) onto its image.  ``equivalence_report`` checks all
three pairings on a sample of complement members, plus the agreement of the
line-side and trace-side transports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import EnergyReport, dirichlet_energy
from .errors import PreconditionError
from .gridfn import SUBSPACE_TOL, GridFunction, component_values, darn_function
from .intervals import Tail
from .trace import TraceFunction, restrict_to_f
from .transforms import DarningMap, SpeedMeasure, pushforward_speed


def darned_energy(uh: GridFunction, vh: GridFunction | None = None) -> EnergyReport:
    """(1/2) integral of uh' vh' over the darned carrier."""
    return dirichlet_energy(uh, vh, form="darned")


def _l2_against_lebesgue(u: GridFunction) -> float:
    # exact integral of a squared PL function: per cell (L/3)(a^2 + a b + b^2)
    a = u.values[:-1]
    b = u.values[1:]
    return float(np.sum(u.cell_lengths * (a * a + a * b + b * b) / 3))


def line_l2(u: GridFunction, dm: DarningMap, tol: float = SUBSPACE_TOL) -> float:
    """L2 norm squared of u against Lebesgue measure on the window; infinite
    when u fails to vanish at the finite endpoint of an unbounded component
    (the constant tail would have infinite mass)."""
    iset = dm.base
    w0, w1 = (float(x) for x in iset.window)
    if iset.tail_left is Tail.ALL_G and abs(u(w0)) > tol:
        return math.inf
    if iset.tail_right is Tail.ALL_G and abs(u(w1)) > tol:
        return math.inf
    return _l2_against_lebesgue(u)


def darned_l2(uh: GridFunction, speed: SpeedMeasure, tol: float = SUBSPACE_TOL) -> float:
    """L2 norm squared of uh against the speed measure: density part plus
    mass * value^2 per atom.  An infinite atom forces value zero there; a
    nonzero value makes the norm infinite."""
    total = 0.0
    for x0, x1, c in speed.density_pieces:
        piece = uh.refine([float(x0), float(x1)])
        mask = (piece.grid[:-1] >= float(x0) - 1e-15) & (piece.grid[1:] <= float(x1) + 1e-15)
        a = piece.values[:-1][mask]
        b = piece.values[1:][mask]
        lens = piece.cell_lengths[mask]
        total += float(c) * float(np.sum(lens * (a * a + a * b + b * b) / 3))
    for p, m in speed.atoms:
        v = uh(float(p))
        if isinstance(m, float) and math.isinf(m):
            if abs(v) > tol:
                return math.inf
            continue
        total += float(m) * v * v
    return total


@dataclass(frozen=True)
class SampleEquivalence:
    """Metric pairs for one sample function before and after darning."""

    sup_line: float
    sup_darned: float
    l2_line: float
    l2_darned: float
    energy_line: float
    energy_darned: float
    trace_match: float  # max node-wise gap between line-side and trace-side darning

    def to_dict(self) -> dict:
        def enc(v):
            return "inf" if math.isinf(v) else v

        return {
            "sup": [self.sup_line, self.sup_darned],
            "l2": [enc(self.l2_line), enc(self.l2_darned)],
            "energy": [self.energy_line, self.energy_darned],
            "trace_match": self.trace_match,
        }


@dataclass(frozen=True)
class DarnedSpaceReport:
    samples: tuple[SampleEquivalence, ...]
    tolerance: float

    @property
    def ok(self) -> bool:
        def close(a, b):
            if math.isinf(a) or math.isinf(b):
                return a == b
            return abs(a - b) <= self.tolerance * max(1.0, abs(a), abs(b))

        return all(
            close(s.sup_line, s.sup_darned)
            and close(s.l2_line, s.l2_darned)
            and close(s.energy_line, s.energy_darned)
            and s.trace_match <= self.tolerance
            for s in self.samples
        )

    def to_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "ok": self.ok,
            "samples": [s.to_dict() for s in self.samples],
        }


def darn_trace(phi: TraceFunction, dm: DarningMap, tol: float = SUBSPACE_TOL) -> GridFunction:
    """Trace-side transport: map the F-nodes of phi through the darning map,
    collapsing gap endpoint pairs (their values must agree within tol)."""
    ext = phi.extension
    for i, (a, b) in enumerate(phi.iset.components):
        if abs(ext(float(a)) - ext(float(b))) > tol:
            raise PreconditionError(
                f"trace values differ across gap {i} = ({a}, {b}); the trace "
                "does not factor through the darning map"
            )
    grid, vals = [], []
    for x, v in zip(phi.nodes, phi.values):
        y = float(dm(float(x)))
        if grid and y <= grid[-1]:
            continue
        grid.append(y)
        vals.append(float(v))
    return GridFunction(np.asarray(grid), np.asarray(vals))


def equivalence_report(samples: list[GridFunction], dm: DarningMap,
                       tol: float = 1e-12) -> DarnedSpaceReport:
    """Check that darning preserves sup norm, L2 norm, and energy for each
    sample, and that line-side and trace-side transports agree node-wise.

    Samples must be constant on each component closure (complement members in
    the infinite-mass cases); ``darn_function`` raises otherwise.
    """
    speed = pushforward_speed(dm, "lebesgue")
    rows = []
    for u in samples:
        uh = darn_function(u, dm)
        phih = darn_trace(restrict_to_f(u, dm.base), dm)
        common = np.union1d(uh.grid, phih.grid)
        trace_match = float(np.max(np.abs(uh.refine(common).values - phih.refine(common).values)))
        rows.append(
            SampleEquivalence(
                sup_line=float(np.max(np.abs(u.values))),
                sup_darned=float(np.max(np.abs(uh.values))),
                l2_line=line_l2(u, dm),
                l2_darned=darned_l2(uh, speed),
                energy_line=dirichlet_energy(u).value,
                energy_darned=darned_energy(uh).value,
                trace_match=trace_match,
            )
        )
    return DarnedSpaceReport(samples=tuple(rows), tolerance=tol)
