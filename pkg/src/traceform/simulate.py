"""Monte Carlo engines: discretized Brownian exit laws and speed-measure walks.

Two kinds of randomness live here.  ``bm_paths`` and the exit estimators
discretize Brownian motion itself (variance dt per step).  ``walk_paths`` and
its relatives simulate the nearest-neighbor walk that approximates a
diffusion in natural scale with a given speed measure: steps of size h with
equal probabilities, holding time at node y with mean

    integral of (h - |xi - y|)+ against the speed measure,

so a density c contributes c h^2 at an interior node and an atom of mass w at
y contributes h w.  Infinite atoms absorb.  Reflecting ends are realized by
folding an unconstrained walk, absorbing ends by cutting at the first visit.

Seeding contract: path-level streams use one generator per path seeded with
seed XOR path-index; the batched estimators use one generator per fixed-size
chunk of paths seeded with seed XOR chunk-index.  Either way the result is a
pure function of (inputs, seed), independent of scheduling and worker count:
chunks are reduced in index order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import PreconditionError, ValidationError
from .intervals import IntervalSet
from .transforms import ScaleFunction, SpeedMeasure, scale_pushforward_speed

# mean overshoot of a Gaussian random walk over a level, in units of sqrt(dt);
# equals -zeta(1/2)/sqrt(2 pi)
OVERSHOOT = 0.5825971579390107

EXIT_CHUNK = 1 << 14
DEFAULT_GAP_FRACTION = 50  # sqrt(dt) <= gap / 50


@dataclass(frozen=True)
class PathSample:
    """Recorded trajectory: arrival times, states, and per-sample flags.

    Flags: 0 regular point, 1 collapsed F-component (state is its midpoint),
    2 absorbed (this and later samples sit at the absorption point).  The last
    sample always closes the path at t = horizon.
    """

    times: np.ndarray
    states: np.ndarray
    flags: np.ndarray
    seed: int
    horizon: float
    absorbed_at: float | None = None
    absorbed_time: float | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        flags = np.asarray(self.flags, dtype=np.int8)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "flags", flags)
        if not (times.size == states.size == flags.size):
            raise ValidationError("times, states, and flags must have equal length")
        if times.size == 0:
            raise ValidationError("a path needs at least one sample")
        if np.any(np.diff(times) <= 0):
            raise ValidationError("sample times must be strictly increasing")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "x", "flag"])
        for t, x, f in zip(self.times, self.states, self.flags):
            writer.writerow([repr(float(t)), repr(float(x)), int(f)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, seed: int = 0) -> "PathSample":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["t", "x", "flag"]:
            raise ValidationError('path CSV must start with header "t,x,flag"')
        ts, xs, fs = [], [], []
        for row in reader:
            if not row:
                continue
            try:
                ts.append(float(row[0]))
                xs.append(float(row[1]))
                fs.append(int(row[2]))
            except (IndexError, ValueError) as exc:
                raise ValidationError(f"bad CSV row {row!r}: {exc}") from exc
        times = np.asarray(ts)
        states = np.asarray(xs)
        flags = np.asarray(fs, dtype=np.int8)
        absorbed_at = absorbed_time = None
        hit = np.nonzero(flags == 2)[0]
        if hit.size:
            absorbed_at = float(states[hit[0]])
            absorbed_time = float(times[hit[0]])
        return cls(times, states, flags, seed=seed,
                   horizon=float(times[-1]) if times.size else 0.0,
                   absorbed_at=absorbed_at, absorbed_time=absorbed_time)


@dataclass(frozen=True)
class EstimatorResult:
    """Point estimate with standard error = sample std / sqrt(n)."""

    estimate: float
    stderr: float
    n: int
    target: str
    warning: str | None = None

    def to_dict(self) -> dict:
        d = {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "n": self.n,
            "target": self.target,
        }
        if self.warning:
            d["warning"] = self.warning
        return d


def _result_from_samples(samples: np.ndarray, target: str) -> EstimatorResult:
    n = samples.size
    std = float(np.std(samples, ddof=1)) if n > 1 else 0.0
    return EstimatorResult(
        estimate=float(samples.mean()), stderr=std / math.sqrt(n), n=n, target=target
    )


# -- Brownian paths and exit estimators -----------------------------------


def bm_paths(n: int, dt: float, horizon: float, x0: float, seed: int) -> Iterator[PathSample]:
    """Stream of n discretized Brownian paths; path i uses seed XOR i."""
    if n < 1:
        raise PreconditionError("need at least one path")
    if dt <= 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    if horizon < 0:
        raise PreconditionError(f"horizon must be nonnegative, got {horizon}")
    steps = int(math.floor(horizon / dt + 1e-12))
    scale = math.sqrt(dt)
    for i in range(n):
        rng = np.random.default_rng(seed ^ i)
        if steps == 0:
            yield PathSample(np.array([0.0]), np.array([float(x0)]),
                             np.zeros(1, dtype=np.int8), seed=seed ^ i, horizon=horizon)
            continue
        incs = scale * rng.standard_normal(steps)
        times = dt * np.arange(steps + 1)
        states = np.concatenate([[x0], x0 + np.cumsum(incs)])
        yield PathSample(times, states, np.zeros(steps + 1, dtype=np.int8),
                         seed=seed ^ i, horizon=horizon)


def _exit_chunk(a: float, b: float, x0: float, m: int, dt: float, rng,
                shift: float, step_block: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """Exit side and exit time for m discretized paths in the gap (a, b).

    Steps are drawn in blocks of step_block per surviving path; the first
    boundary crossing inside a block ends that path at the crossing step.
    With a nonzero shift the effective boundaries move inward, compensating
    the mean overshoot of the discrete walk past a continuum level.
    """
    lo = a + shift
    hi = b - shift
    scale = math.sqrt(dt)
    pos = np.full(m, float(x0))
    idx = np.arange(m)
    left = np.zeros(m, dtype=bool)
    tau = np.zeros(m)
    base = 0
    max_steps = max(10_000, int(200 * (b - a) ** 2 / dt))
    while idx.size:
        if base > max_steps:
            raise RuntimeError("exit walk exceeded its step cap; dt is inconsistent with the gap")
        traj = pos[:, None] + scale * np.cumsum(
            rng.standard_normal((idx.size, step_block)), axis=1)
        out = (traj <= lo) | (traj >= hi)
        hit = out.any(axis=1)
        if hit.any():
            cols = np.argmax(out[hit], axis=1)
            rows = idx[hit]
            left[rows] = traj[hit, cols] <= lo
            tau[rows] = (base + cols + 1) * dt
        keep = ~hit
        pos = traj[keep, -1]
        idx = idx[keep]
        base += step_block
    return left, tau


def _exit_samples(a: float, b: float, x0: float, n: int, dt: float, seed: int,
                  correct: bool, workers: int) -> tuple[np.ndarray, np.ndarray]:
    shift = OVERSHOOT * math.sqrt(dt) if correct else 0.0
    if not a + shift < x0 < b - shift:
        raise PreconditionError(
            f"start point {x0} is not interior to the effective gap "
            f"({a + shift}, {b - shift})"
        )
    chunks = [(c, min(EXIT_CHUNK, n - c * EXIT_CHUNK))
              for c in range((n + EXIT_CHUNK - 1) // EXIT_CHUNK)]

    def run(chunk):
        c, m = chunk
        rng = np.random.default_rng(seed ^ c)
        return _exit_chunk(a, b, x0, m, dt, rng, shift)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(chunk) for chunk in chunks]
    left = np.concatenate([p[0] for p in parts])
    tau = np.concatenate([p[1] for p in parts])
    return left, tau


def _gap_of(iset: IntervalSet, x0: float) -> tuple[float, float]:
    i = iset.component_index(x0)
    if i is None:
        raise PreconditionError(
            f"start point {x0} lies in F; exit estimation needs a point "
            "interior to a finite G-component"
        )
    a, b = iset.components[i]
    return float(a), float(b)


def default_exit_dt(gap: float) -> float:
    return (gap / DEFAULT_GAP_FRACTION) ** 2


def estimate_hitting(iset: IntervalSet, x0: float, n: int, seed: int,
                     dt: float | None = None, correct: bool = False,
                     workers: int = 1) -> tuple[EstimatorResult, EstimatorResult]:
    """Exit-side probabilities of the gap containing x0, one result per endpoint.

    The closed form (b - x0) / (b - a) for the left endpoint is never used
    here; it is the oracle the estimate is tested against.  ``correct``
    enables the overshoot boundary correction (off by default).
    """
    a, b = _gap_of(iset, x0)
    if dt is None:
        dt = default_exit_dt(b - a)
    left, _ = _exit_samples(a, b, x0, n, dt, seed, correct, workers)
    res_left = _result_from_samples(left.astype(float), f"exit at {a} (left endpoint)")
    res_right = _result_from_samples((~left).astype(float), f"exit at {b} (right endpoint)")
    return res_left, res_right


def estimate_laplace(iset: IntervalSet, x0: float, alpha: float, n: int, seed: int,
                     dt: float | None = None, correct: bool = False,
                     workers: int = 1) -> tuple[EstimatorResult, EstimatorResult]:
    """Means of exp(-alpha * exit_time) on each exit side; alpha = 0 recovers
    the plain hitting probabilities."""
    if alpha < 0:
        raise PreconditionError(f"alpha must be nonnegative, got {alpha}")
    a, b = _gap_of(iset, x0)
    if dt is None:
        dt = default_exit_dt(b - a)
    left, tau = _exit_samples(a, b, x0, n, dt, seed, correct, workers)
    damp = np.exp(-alpha * tau)
    res_left = _result_from_samples(
        np.where(left, damp, 0.0), f"exp(-{alpha} tau) on exit at {a} (left endpoint)"
    )
    res_right = _result_from_samples(
        np.where(left, 0.0, damp), f"exp(-{alpha} tau) on exit at {b} (right endpoint)"
    )
    return res_left, res_right


# -- speed-measure walks ----------------------------------------------------


@dataclass(frozen=True)
class WalkChain:
    """Embedded chain of the h-grid walk: node coordinates, mean holds per
    visit, and which nodes absorb."""

    lo: float
    h: float
    nodes: np.ndarray
    holds: np.ndarray
    absorbing: np.ndarray
    atom_nodes: tuple[int, ...]


def build_chain(speed: SpeedMeasure, h: float,
                boundary: tuple[str, str] = ("reflect", "reflect")) -> WalkChain:
    """Grid nodes and holding means for the walk driven by ``speed``.

    h must divide the carrier length; atoms are snapped to the nearest node
    and must not collide.  Infinite atoms absorb; an "absorb" boundary makes
    the corresponding end node absorbing as well.
    """
    lo, hi = (float(x) for x in speed.carrier)
    if h <= 0:
        raise PreconditionError(f"step h must be positive, got {h}")
    ratio = (hi - lo) / h
    n_cells = round(ratio)
    if n_cells < 1 or abs(ratio - n_cells) > 1e-9 * max(1.0, abs(ratio)):
        raise PreconditionError(
            f"step h = {h} must divide the carrier length {hi - lo}"
        )
    for side in boundary:
        if side not in ("reflect", "absorb"):
            raise PreconditionError(f"boundary must be 'reflect' or 'absorb', got {side!r}")
    nodes = lo + h * np.arange(n_cells + 1)
    atom_positions = sorted(speed.atoms, key=lambda t: t[0])
    if len(atom_positions) > 1:
        min_spacing = min(
            float(q[0] - p[0]) for p, q in zip(atom_positions, atom_positions[1:])
        )
        if h > min_spacing:
            raise PreconditionError(
                f"step h = {h} exceeds the smallest atom spacing {min_spacing}; "
                "snapped atoms would collide"
            )
    snapped: dict[int, float] = {}
    for p, m in speed.atoms:
        k = round((float(p) - lo) / h)
        k = min(max(k, 0), n_cells)
        if k in snapped:
            raise PreconditionError(
                f"two atoms snap to the same grid node {nodes[k]}; decrease h"
            )
        snapped[k] = float(m)
    density_only = SpeedMeasure(speed.carrier, speed.density_pieces, ())
    holds = np.array([density_only.tent_integral(float(y), h) for y in nodes])
    absorbing = np.zeros(nodes.size, dtype=bool)
    for k, m in snapped.items():
        if math.isinf(m):
            absorbing[k] = True
            holds[k] = math.inf
        else:
            holds[k] += h * m
    if boundary[0] == "absorb":
        absorbing[0] = True
    if boundary[1] == "absorb":
        absorbing[-1] = True
    # A reflecting end folds the speed measure across the boundary: the Green
    # function of reflected BM on [0, h) is 2(h - xi), so the end hold is twice
    # the one-sided tent integral.  Lebesgue then holds h^2 at every node,
    # reflecting ends included, and an end atom keeps its full stationary weight.
    if boundary[0] == "reflect" and not absorbing[0]:
        holds[0] *= 2
    if boundary[1] == "reflect" and not absorbing[-1]:
        holds[-1] *= 2
    return WalkChain(lo=lo, h=h, nodes=nodes, holds=holds, absorbing=absorbing,
                     atom_nodes=tuple(sorted(snapped)))


def _visit_blocks(chain: WalkChain, k0: int, horizon: float, rng,
                  holding: str, block: int = 1 << 20) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield (positions, arrivals, dwells) blocks of the walk until the clock
    reaches the horizon or an absorbing node is entered.  The final dwell is
    clipped so that total time equals the horizon exactly."""
    if holding not in ("exponential", "deterministic"):
        raise PreconditionError(f"holding must be 'exponential' or 'deterministic', got {holding!r}")
    n_top = chain.nodes.size - 1
    if n_top < 1:
        raise PreconditionError("walk needs at least two grid nodes")
    exp_holds = holding == "exponential"
    t = 0.0
    ku = k0  # unfolded coordinate; reflection = folding into [0, n_top]
    first = np.array([k0])
    pending: np.ndarray | None = first
    while True:
        if pending is not None:
            pos = pending
            pending = None
        else:
            steps = 2 * rng.integers(0, 2, size=block, dtype=np.int64) - 1
            unfolded = ku + np.cumsum(steps)
            ku = int(unfolded[-1])
            m = unfolded % (2 * n_top)
            pos = np.minimum(m, 2 * n_top - m)
        absorbed = chain.absorbing[pos]
        cut = None
        if np.any(absorbed):
            cut = int(np.argmax(absorbed))
            pos = pos[: cut + 1]
        dwell = chain.holds[pos].copy()
        if cut is not None:
            dwell[-1] = 0.0  # placeholder, set below from remaining time
        if exp_holds:
            finite = np.isfinite(dwell)
            draws = rng.standard_exponential(pos.size)
            dwell[finite] = dwell[finite] * draws[finite]
        arr = t + np.concatenate([[0.0], np.cumsum(dwell[:-1])])
        if cut is not None:
            if arr[-1] >= horizon:
                cut = None  # horizon hit first; fall through to time cut
            else:
                dwell[-1] = horizon - arr[-1]
                yield pos, arr, dwell
                return
        end_time = arr[-1] + dwell[-1]
        if end_time >= horizon:
            j = int(np.argmax(arr + dwell >= horizon))
            pos = pos[: j + 1]
            arr = arr[: j + 1]
            dwell = dwell[: j + 1]
            dwell[-1] = horizon - arr[-1]
            yield pos, arr, dwell
            return
        t = end_time
        yield pos, arr, dwell


def _snap_start(chain: WalkChain, x0: float) -> int:
    lo = chain.lo
    hi = float(chain.nodes[-1])
    if not lo <= x0 <= hi:
        raise PreconditionError(f"start point {x0} is outside the carrier [{lo}, {hi}]")
    return int(round((x0 - lo) / chain.h))


def walk_paths(speed: SpeedMeasure, h: float, x0: float, horizon: float, seed: int,
               boundary: tuple[str, str] = ("reflect", "reflect"),
               holding: str = "exponential") -> PathSample:
    """One trajectory of the speed-measure walk, recorded where time passes.

    Visits with zero dwell (nodes the speed measure does not charge) are
    instantaneous and are not recorded; the final sample closes the path at
    the horizon.  Entering an absorbing node freezes the path there.
    """
    if horizon <= 0:
        raise PreconditionError(f"horizon must be positive, got {horizon}")
    chain = build_chain(speed, h, boundary)
    k0 = _snap_start(chain, x0)
    rng = np.random.default_rng(seed)
    times: list[np.ndarray] = []
    states: list[np.ndarray] = []
    absorbed_at = absorbed_time = None
    last_state = float(chain.nodes[k0])
    for pos, arr, dwell in _visit_blocks(chain, k0, horizon, rng, holding):
        keep = dwell > 0
        if chain.absorbing[pos[-1]] and absorbed_at is None:
            absorbed_at = float(chain.nodes[pos[-1]])
            absorbed_time = float(arr[-1])
            keep[-1] = True
        if np.any(keep):
            times.append(arr[keep])
            states.append(chain.nodes[pos[keep]])
            last_state = float(states[-1][-1])
    if times:
        t_all = np.concatenate(times)
        x_all = np.concatenate(states)
    else:
        t_all = np.array([0.0])
        x_all = np.array([float(chain.nodes[k0])])
    # close the path at the horizon
    if t_all[-1] < horizon:
        t_all = np.append(t_all, horizon)
        x_all = np.append(x_all, last_state)
    flags = np.zeros(t_all.size, dtype=np.int8)
    if absorbed_time is not None:
        flags[t_all >= absorbed_time] = 2
    return PathSample(t_all, x_all, flags, seed=seed, horizon=horizon,
                      absorbed_at=absorbed_at, absorbed_time=absorbed_time)


def simulate_xs(sf: ScaleFunction, h: float, x0: float, horizon: float, seed: int,
                boundary: tuple[str, str] = ("reflect", "reflect"),
                holding: str = "exponential") -> PathSample:
    """Walk approximation of the subspace diffusion: run the speed-measure
    walk in scale coordinates (speed = pushforward of Lebesgue measure under
    the scale function) and map states back to the line.  States inside a
    collapsed F-component are reported as its midpoint with flag 1."""
    speed = scale_pushforward_speed(sf)
    chain = build_chain(speed, h, boundary)
    y0 = float(sf(x0))
    path = walk_paths(speed, h, y0, horizon, seed, boundary, holding)
    # map each node back through the scale inverse once
    plateau_vals = [(float(v), (float(flo) + float(fhi)) / 2) for v, flo, fhi in sf._plateaus]
    img_lo, img_hi = (float(v) for v in speed.carrier)
    xs = np.empty(chain.nodes.size)
    flags = np.zeros(chain.nodes.size, dtype=np.int8)
    for k, y in enumerate(chain.nodes):
        hit = next((mid for v, mid in plateau_vals if abs(y - v) <= h / 4), None)
        if hit is not None:
            xs[k] = hit
            flags[k] = 1
        else:
            lo_x, _ = sf.inverse(min(max(float(y), img_lo), img_hi))
            xs[k] = float(lo_x)
    idx = np.rint((path.states - chain.lo) / h).astype(int)
    mapped_flags = flags[idx]
    mapped_flags[path.flags == 2] = 2
    absorbed_at = None
    if path.absorbed_at is not None:
        absorbed_at = float(xs[int(round((path.absorbed_at - chain.lo) / h))])
    return PathSample(path.times, xs[idx], mapped_flags, seed=seed, horizon=horizon,
                      absorbed_at=absorbed_at, absorbed_time=path.absorbed_time)


# -- occupation statistics --------------------------------------------------


Target = Sequence[float] | float


def _target_label(tg: Target) -> str:
    if isinstance(tg, (int, float)):
        return f"point {float(tg)}"
    lo, hi = tg
    return f"interval [{float(lo)}, {float(hi)}]"


def _membership(states: np.ndarray, tg: Target, point_tol: float) -> np.ndarray:
    if isinstance(tg, (int, float)):
        return np.abs(states - float(tg)) <= point_tol
    lo, hi = (float(v) for v in tg)
    return (states >= lo) & (states <= hi)


def occupation_fractions(path: PathSample, targets: Sequence[Target],
                         burn_in: float = 0.0, batches: int = 20,
                         point_tol: float = 1e-9) -> list[EstimatorResult]:
    """Time-weighted occupation fraction of each target with batch-means
    standard errors over equal time slices of (burn_in, horizon]."""
    if batches < 2:
        raise PreconditionError("batch means need at least two batches")
    if burn_in < 0 or burn_in >= path.horizon:
        raise PreconditionError("burn-in must lie in [0, horizon)")
    warning = None
    if path.horizon < 10 * burn_in:
        warning = "horizon shorter than 10x burn-in; estimates may be biased"
    arr = path.times[:-1]
    dwell = np.diff(path.times)
    states = path.states[:-1]
    eff_start = np.maximum(arr, burn_in)
    eff_dwell = np.minimum(arr + dwell, path.horizon) - eff_start
    keep = eff_dwell > 0
    eff_start, eff_dwell, states = eff_start[keep], eff_dwell[keep], states[keep]
    batch_len = (path.horizon - burn_in) / batches
    bidx = np.clip(((eff_start - burn_in) / batch_len).astype(int), 0, batches - 1)
    totals = np.bincount(bidx, weights=eff_dwell, minlength=batches)
    if np.any(totals <= 0):
        raise PreconditionError("a batch received no occupation time; use fewer batches")
    results = []
    for tg in targets:
        member = _membership(states, tg, point_tol)
        occ = np.bincount(bidx[member], weights=eff_dwell[member], minlength=batches)
        fractions = occ / totals
        res = _result_from_samples(fractions, f"occupation of {_target_label(tg)}")
        if warning:
            res = EstimatorResult(res.estimate, res.stderr, res.n, res.target, warning)
        results.append(res)
    return results


def walk_occupation(speed: SpeedMeasure, h: float, x0: float, horizon: float,
                    seed: int, targets: Sequence[Target],
                    boundary: tuple[str, str] = ("reflect", "reflect"),
                    holding: str = "exponential", burn_in: float = 0.0,
                    batches: int = 20, point_tol: float = 1e-9) -> list[EstimatorResult]:
    """Streaming version of ``walk_paths`` followed by ``occupation_fractions``:
    occupation time is accumulated per batch without recording the trajectory,
    so arbitrarily long horizons stay in constant memory.  Dwells are assigned
    to the batch containing their start."""
    if batches < 2:
        raise PreconditionError("batch means need at least two batches")
    if burn_in < 0 or burn_in >= horizon:
        raise PreconditionError("burn-in must lie in [0, horizon)")
    chain = build_chain(speed, h, boundary)
    k0 = _snap_start(chain, x0)
    rng = np.random.default_rng(seed)
    member = np.stack([_membership(chain.nodes, tg, point_tol) for tg in targets])
    batch_len = (horizon - burn_in) / batches
    occ = np.zeros((len(targets), batches))
    totals = np.zeros(batches)
    for pos, arr, dwell in _visit_blocks(chain, k0, horizon, rng, holding):
        eff_start = np.maximum(arr, burn_in)
        eff_dwell = np.minimum(arr + dwell, horizon) - eff_start
        keep = eff_dwell > 0
        if not np.any(keep):
            continue
        pos_k = pos[keep]
        start_k = eff_start[keep]
        dwell_k = eff_dwell[keep]
        bidx = np.clip(((start_k - burn_in) / batch_len).astype(int), 0, batches - 1)
        totals += np.bincount(bidx, weights=dwell_k, minlength=batches)
        for j in range(len(targets)):
            sel = member[j][pos_k]
            if np.any(sel):
                occ[j] += np.bincount(bidx[sel], weights=dwell_k[sel], minlength=batches)
    if np.any(totals <= 0):
        raise PreconditionError("a batch received no occupation time; use fewer batches")
    warning = None
    if horizon < 10 * burn_in:
        warning = "horizon shorter than 10x burn-in; estimates may be biased"
    results = []
    for j, tg in enumerate(targets):
        res = _result_from_samples(occ[j] / totals, f"occupation of {_target_label(tg)}")
        if warning:
            res = EstimatorResult(res.estimate, res.stderr, res.n, res.target, warning)
        results.append(res)
    return results
