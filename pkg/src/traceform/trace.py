"""Trace energies on F, harmonic extensions across G, and gap hitting kernels.

A ``TraceFunction`` carries values on the closed set F only.  Its harmonic
extension bridges every gap (a, b) linearly, which makes the full energy of
the extension split into a local part (1/2) int_F phi'^2 dx plus a jump sum
(1/2) sum (phi(a) - phi(b))^2 / (b - a) over the finite gaps.  Restrictions
of subspace members are flat on F, so their trace energy is the jump sum
alone; restrictions of complement members match at gap endpoints and keep
only the local part.

Resolvent hitting kernels sinh(c (b-x)) / sinh(c d) with c = sqrt(2 alpha)
are evaluated in an exp-shifted form that stays finite for c d far beyond
the naive overflow point.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .energy import EnergyReport, _report
from .errors import PreconditionError, ValidationError
from .gridfn import SUBSPACE_TOL, GridFunction
from .intervals import IntervalSet, Real, Tail, _encode
from .transforms import DarningMap, SpeedMeasure, pushforward_speed


@dataclass(frozen=True)
class TraceFunction:
    """Values on F inside the window: sorted nodes, all lying in F, containing
    every component endpoint and both window edges."""

    iset: IntervalSet
    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if nodes.size != values.size:
            raise ValidationError("nodes and values must have equal length")
        if nodes.size < 2:
            raise ValidationError("a trace function needs at least two nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValidationError("trace nodes must be strictly increasing")
        w0, w1 = (float(x) for x in self.iset.window)
        required = {w0, w1}
        required.update(float(p) for p in self.iset.endpoints if w0 <= p <= w1)
        have = set(nodes.tolist())
        missing = sorted(required - have)
        if missing:
            raise ValidationError(f"trace nodes must include {missing}")
        for x in nodes:
            if _gap_interior(self.iset, float(x)) is not None:
                raise ValidationError(f"trace node {x} lies inside a gap, not in F")

    @cached_property
    def extension(self) -> GridFunction:
        """Harmonic extension across every gap: since no node is interior to a
        gap, linear interpolation between consecutive nodes is exactly the
        bridge phi(a) (b-x)/(b-a) + phi(b) (x-a)/(b-a)."""
        return GridFunction(self.nodes, self.values)

    @cached_property
    def _cell_in_f(self) -> np.ndarray:
        mids = (self.nodes[:-1] + self.nodes[1:]) / 2
        return np.array([self.iset.component_index(m) is None for m in mids])


def harmonic_extension(phi: TraceFunction) -> GridFunction:
    return phi.extension


def _gap_interior(iset: IntervalSet, x: float) -> int | None:
    """Component index when x sits strictly inside a gap beyond float slack.

    Endpoints arrive as rounded floats; a point one ulp inside the gap is
    the endpoint itself, not interior data.
    """
    i = iset.component_index(x)
    if i is None:
        return None
    a, b = (float(e) for e in iset.components[i])
    slack = 1e-12 * max(1.0, abs(a), abs(b))
    return i if min(x - a, b - x) > slack else None


def restrict_to_f(u: GridFunction, iset: IntervalSet) -> TraceFunction:
    """Trace of a grid function: keep only the nodes lying in F."""
    keep = [k for k in range(u.grid.size) if _gap_interior(iset, float(u.grid[k])) is None]
    return TraceFunction(iset, u.grid[keep], u.values[keep])


def _sinh_ratio(a: float, b: float) -> float:
    """sinh(a)/sinh(b) for 0 <= a <= b, stable for arbitrarily large b."""
    if b == 0:
        raise PreconditionError("sinh ratio needs b > 0")
    num = -math.expm1(-2 * a)
    den = -math.expm1(-2 * b)
    return math.exp(a - b) * num / den


def alpha_hitting(iset: IntervalSet, n: int, alpha: float, x: float) -> tuple[float, float]:
    """Resolvent hitting kernels (p, q) of gap n at x: p weights the left
    endpoint, q the right, p + q <= 1 with deficit the killing mass."""
    if alpha <= 0:
        raise PreconditionError(f"alpha must be positive, got {alpha}")
    w0, w1 = iset.window
    if x < w0 and iset.tail_left is Tail.ALL_G or x > w1 and iset.tail_right is Tail.ALL_G:
        raise PreconditionError(
            "point lies in an unbounded G-component: hitting kernels are not "
            "defined there (the gap weight vanishes instead)"
        )
    if not 0 <= n < len(iset.components):
        raise PreconditionError(f"no component with index {n}")
    a, b = (float(v) for v in iset.components[n])
    if not a <= x <= b:
        raise PreconditionError(f"point {x} is not in component {n} = ({a}, {b})")
    c = math.sqrt(2 * alpha)
    d = b - a
    p = _sinh_ratio(c * (b - x), c * d)
    q = _sinh_ratio(c * (x - a), c * d)
    return p, q


def feller_weight(width: float) -> float:
    """Limit gap weight 1/(2 d); zero for an infinite gap."""
    if isinstance(width, float) and math.isinf(width):
        return 0.0
    if not width > 0:
        raise PreconditionError(f"gap width must be positive, got {width}")
    return 1 / (2 * width)


def feller_numeric(width: float, alpha: float) -> float:
    """Finite-alpha gap weight alpha * int_a^b p(x) (1 - (b-x)/d) dx.

    Closed antiderivative: 1/(2 d) - alpha / (c sinh(c d)) with c = sqrt(2 alpha),
    evaluated through exp(-c d) so large c d underflows gracefully to the limit.
    """
    if not width > 0 or (isinstance(width, float) and math.isinf(width)):
        raise PreconditionError(f"gap width must be positive and finite, got {width}")
    if alpha <= 0:
        raise PreconditionError(f"alpha must be positive, got {alpha}")
    c = math.sqrt(2 * alpha)
    cd = c * width
    inv_sinh = 2 * math.exp(-cd) / (-math.expm1(-2 * cd))
    return 1 / (2 * width) - alpha / c * inv_sinh


def trace_energy(phi: TraceFunction) -> EnergyReport:
    """Full trace energy: local F-part plus the jump sum over finite gaps.

    Coincides cell-for-cell with the Dirichlet energy of the harmonic
    extension, since each gap cell of the extension contributes exactly its
    jump term.
    """
    ext = phi.extension
    contribs = 0.5 * ext.slopes * ext.slopes * ext.cell_lengths
    cells = np.column_stack([ext.grid[:-1], ext.grid[1:]])
    return _report("trace", cells, contribs)


def trace_local_energy(phi: TraceFunction) -> float:
    ext = phi.extension
    local = 0.5 * ext.slopes**2 * ext.cell_lengths
    return float(local[phi._cell_in_f].sum())


def trace_jump_energy(phi: TraceFunction) -> float:
    total = 0.0
    ext = phi.extension
    for a, b in phi.iset.components:
        va, vb = ext(float(a)), ext(float(b))
        total += 0.5 * (va - vb) ** 2 / float(b - a)
    return total


def trace_subspace_energy(phi: TraceFunction, tol: float = SUBSPACE_TOL) -> EnergyReport:
    """Trace energy of a subspace restriction: the jump sum alone.

    Requires phi' = 0 on the interior of F, which characterizes restrictions
    of subspace members; a nonzero local slope raises.
    """
    ext = phi.extension
    f_slopes = ext.slopes[phi._cell_in_f]
    if f_slopes.size and float(np.max(np.abs(f_slopes))) > tol:
        raise PreconditionError(
            "trace is not flat on F within tolerance: not the restriction of "
            "a subspace member"
        )
    rows = []
    contribs = []
    for a, b in phi.iset.components:
        va, vb = ext(float(a)), ext(float(b))
        rows.append((float(a), float(b)))
        contribs.append(0.5 * (va - vb) ** 2 / float(b - a))
    return _report("trace_subspace", np.array(rows).reshape(-1, 2), np.asarray(contribs))


def trace_complement_energy(phi: TraceFunction, psi: TraceFunction | None = None,
                            tol: float = SUBSPACE_TOL) -> EnergyReport:
    """Trace energy of complement restrictions: the local part alone.

    Requires matching values at the two endpoints of every finite gap, which
    characterizes restrictions of complement members (their jump terms vanish).
    """
    psi = phi if psi is None else psi
    if psi.iset is not phi.iset and psi.iset != phi.iset:
        raise PreconditionError("trace functions live on different sets")
    for name, t in (("first", phi), ("second", psi)):
        ext = t.extension
        for i, (a, b) in enumerate(t.iset.components):
            if abs(ext(float(a)) - ext(float(b))) > tol:
                raise PreconditionError(
                    f"{name} argument jumps across gap {i} = ({a}, {b}): not the "
                    "restriction of a complement member"
                )
    e1, e2 = phi.extension, psi.extension
    grid = np.union1d(e1.grid, e2.grid)
    r1 = e1.refine(grid)
    r2 = e2.refine(grid)
    mids = (grid[:-1] + grid[1:]) / 2
    in_f = np.array([phi.iset.component_index(m) is None for m in mids])
    contribs = np.where(in_f, 0.5 * r1.slopes * r2.slopes * r1.cell_lengths, 0.0)
    cells = np.column_stack([grid[:-1], grid[1:]])
    return _report("trace_complement", cells, contribs)


@dataclass(frozen=True)
class TraceMeasure:
    """Measure 1_F dx plus half-width atoms at both endpoints of every finite
    gap; the finite endpoint of an unbounded gap carries an infinite atom."""

    iset: IntervalSet
    atoms: tuple[tuple[Real, float], ...]

    def to_dict(self) -> dict:
        def enc(m):
            return "inf" if isinstance(m, float) and math.isinf(m) else _encode(m)

        return {
            "density": "indicator_F",
            "f_components": [[_encode(a), _encode(b)] for a, b in self.iset.f_components],
            "atoms": [[_encode(p), enc(m)] for p, m in self.atoms],
        }

    def pushforward(self, dm: DarningMap) -> SpeedMeasure:
        return pushforward_speed(dm, "trace")

    def line_speed(self) -> SpeedMeasure:
        """The measure itself as a SpeedMeasure on the window (for simulation)."""
        w0, w1 = self.iset.window
        pieces = tuple((lo, hi, 1) for lo, hi in self.iset.f_components)
        return SpeedMeasure((w0, w1), pieces, tuple(self.atoms))


def trace_measure(iset: IntervalSet) -> TraceMeasure:
    atoms: list[tuple[Real, float]] = []
    for a, b in iset.components:
        half = (b - a) / 2
        atoms.append((a, half))
        atoms.append((b, half))
    if iset.tail_left is Tail.ALL_G:
        atoms.append((iset.window[0], math.inf))
    if iset.tail_right is Tail.ALL_G:
        atoms.append((iset.window[1], math.inf))
    atoms.sort(key=lambda t: t[0])
    merged: list[tuple[Real, float]] = []
    for p, m in atoms:
        if merged and merged[-1][0] == p:
            merged[-1] = (p, merged[-1][1] + m)
        else:
            merged.append((p, m))
    return TraceMeasure(iset=iset, atoms=tuple(merged))


def jump_table(iset: IntervalSet) -> list[tuple[float, float, float, float]]:
    """Rows (a, b, width, weight) for every finite gap, weight = 1/(2 width)."""
    rows = []
    for a, b in iset.components:
        d = float(b - a)
        rows.append((float(a), float(b), d, feller_weight(d)))
    return rows


def jump_table_csv(iset: IntervalSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["a_n", "b_n", "d_n", "weight"])
    for row in jump_table(iset):
        writer.writerow([repr(v) for v in row])
    return buf.getvalue()
