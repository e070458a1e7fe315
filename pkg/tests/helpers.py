"""Shared oracles and randomized generators for the test suite.

Everything here is an independent re-derivation: the density scan works
from the raw component list, the Feller integrand goes through adaptive
quadrature, and chain stationarity is solved by brute-force linear
algebra on the generator. None of it calls back into the code paths it
is used to check.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import integrate

import traceform as tf
from traceform import Tail


def window_f_components(iset):
    """F-components inside the window, derived from the raw component list."""
    pts = [iset.window[0]]
    for a, b in iset.components:
        pts.extend((a, b))
    pts.append(iset.window[1])
    out = []
    for lo, hi in zip(pts[::2], pts[1::2]):
        if hi > lo:
            out.append((lo, hi))
    return out


def scan_delta_dense(iset, delta):
    """Every window subinterval of length >= delta must carry G-mass.

    A subinterval misses G (in measure) exactly when it fits inside a
    single F-component, so the scan reduces to component lengths.
    """
    return all(hi - lo < delta for lo, hi in window_f_components(iset))


def stable_p(x, d, alpha):
    # sinh(c(d-x))/sinh(cd) without overflow, c = sqrt(2 alpha)
    c = math.sqrt(2.0 * alpha)
    return math.exp(-c * x) * (-math.expm1(-2.0 * c * (d - x))) / (-math.expm1(-2.0 * c * d))


def quad_feller(d, alpha):
    """alpha * integral_0^d (y/d) p_alpha(y) dy by adaptive quadrature.

    Resolvent identity: the harmonic kernels satisfy
    (1/2)(p_0 - p_alpha)'' = -alpha p_alpha with zero boundary data, so
    p_0 - p_alpha = alpha int G_0(., y) p_alpha(y) dy and taking half the
    flux at the far endpoint turns the Green kernel into q_0(y) = y/d.
    The left side's flux drop is exactly the killing weight 1/(2d) -
    c/(2 sinh(cd)).
    """
    c = math.sqrt(2.0 * alpha)

    def integrand(y):
        return alpha * (y / d) * stable_p(y, d, alpha)

    # p_alpha decays like exp(-cy): mass sits in a layer at the near end
    layer = min(30.0 / c, d / 2.0)
    val, _ = integrate.quad(
        integrand, 0.0, d, points=[layer], limit=400,
        epsabs=1e-14, epsrel=1e-12,
    )
    return val


def chain_stationary(chain):
    """Stationary law of the walk chain, solved from global balance.

    Builds the CTMC generator of the embedded symmetric walk with the
    chain's holding means and solves pi Q = 0 directly.
    """
    holds = np.asarray(chain.holds, dtype=float)
    k = holds.size
    assert not np.asarray(chain.absorbing).any(), "oracle covers reflecting chains only"
    P = np.zeros((k, k))
    P[0, 1] = 1.0
    P[k - 1, k - 2] = 1.0
    for i in range(1, k - 1):
        P[i, i - 1] = 0.5
        P[i, i + 1] = 0.5
    Q = P / holds[:, None]
    Q[np.diag_indices(k)] = -1.0 / holds
    A = np.vstack([Q.T, np.ones(k)])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    return pi


# ---------------------------------------------------------------------------
# randomized object generators

TAILS_BY_CASE = {
    "I": ((Tail.ALL_G, Tail.ALL_G),),
    "II": ((Tail.ALL_F, Tail.ALL_G), (Tail.ALL_G, Tail.ALL_F)),
    "III": ((Tail.ALL_F, Tail.ALL_F),),
}


def random_iset(rng, case=None, periodic_ok=True):
    """A random valid interval set, optionally pinned to a boundary case."""
    if case == "I" and periodic_ok and rng.random() < 0.4:
        return tf.periodic_fat_cantor(int(rng.integers(1, 4)), 2)
    if case is None:
        opts = (Tail.ALL_F, Tail.ALL_G)
        tails = (opts[rng.integers(0, 2)], opts[rng.integers(0, 2)])
    else:
        choices = TAILS_BY_CASE[case]
        tails = choices[int(rng.integers(0, len(choices)))]
    if rng.random() < 0.5:
        return tf.svc_complement(int(rng.integers(1, 5)), tails=tails)
    den = 240
    m = int(rng.integers(1, 4))
    pts = np.sort(rng.choice(np.arange(12, 229), size=2 * m, replace=False))
    comps = [
        (Fraction(int(pts[2 * i]), den), Fraction(int(pts[2 * i + 1]), den))
        for i in range(m)
    ]
    return tf.build_interval_set(comps, (0, 1), tails=tails)


def _gap_cells(iset):
    w0, w1 = (float(x) for x in iset.window)
    return [
        (max(float(a), w0), min(float(b), w1))
        for a, b in iset.components
    ]


def _merge_nodes(pairs):
    """pairs of (node, value) -> strictly increasing arrays, last write wins."""
    by_node = {}
    for x, v in pairs:
        by_node[float(x)] = float(v)
    grid = np.array(sorted(by_node))
    vals = np.array([by_node[x] for x in sorted(by_node)])
    return grid, vals


def random_gridfn(rng, iset, scale=1.0):
    """Arbitrary piecewise-linear function on an H-adapted grid."""
    w0, w1 = (float(x) for x in iset.window)
    k = int(rng.integers(0, 5))
    extra = rng.uniform(w0 + 1e-3, w1 - 1e-3, size=k)
    grid = tf.adapted_grid(iset, extra=extra)
    return tf.GridFunction(grid, rng.normal(0.0, scale, size=grid.size))


def random_subspace_member(rng, iset):
    """Constant on every F-component, free in the gaps."""
    pairs = []
    for lo, hi in window_f_components(iset):
        c = float(rng.normal())
        pairs.append((lo, c))
        pairs.append((hi, c))
    w0, w1 = (float(x) for x in iset.window)
    covered = {float(p) for p, _ in pairs}
    for edge in (w0, w1):
        if edge not in covered:
            pairs.append((edge, float(rng.normal())))
    for a, b in _gap_cells(iset):
        for x in rng.uniform(a + 1e-4, b - 1e-4, size=int(rng.integers(0, 3))):
            pairs.append((x, float(rng.normal())))
    return tf.GridFunction(*_merge_nodes(pairs))


def random_complement_member(rng, sf, flat=False):
    """Slope 0 on G (constant C in Case III), free slopes on F-cells.

    flat=True forces slope 0 on G in every case: the class that
    contraction stability and darning both operate on.
    """
    iset = sf.base
    case = tf.classify_case(iset)
    C = float(rng.normal()) if case is tf.Case.III and not flat else 0.0
    nodes = [float(x) for x in tf.adapted_grid(iset)]
    vals = [float(rng.normal())]
    for lo, hi in zip(nodes, nodes[1:]):
        mid = 0.5 * (lo + hi)
        slope = C if iset.in_g(mid) else float(rng.normal())
        vals.append(vals[-1] + slope * (hi - lo))
    return tf.GridFunction(np.array(nodes), np.array(vals))


def random_vanishing(rng, iset):
    """Zero on F, random bumps strictly inside the gaps."""
    pairs = []
    for lo, hi in window_f_components(iset):
        pairs.append((lo, 0.0))
        pairs.append((hi, 0.0))
    w0, w1 = (float(x) for x in iset.window)
    covered = {float(p) for p, _ in pairs}
    for edge in (w0, w1):
        if edge not in covered:
            pairs.append((edge, 0.0))
    for a, b in _gap_cells(iset):
        for x in rng.uniform(a + 1e-4, b - 1e-4, size=int(rng.integers(1, 3))):
            pairs.append((x, float(rng.normal())))
    return tf.GridFunction(*_merge_nodes(pairs))


def required_trace_nodes(iset):
    req = {float(e) for e in iset.endpoints}
    for lo, hi in window_f_components(iset):
        req.add(float(lo))
        req.add(float(hi))
    return sorted(req)


def random_trace_fn(rng, iset):
    """Random node data on F including every required endpoint."""
    nodes = set(required_trace_nodes(iset))
    for lo, hi in window_f_components(iset):
        lo_f, hi_f = float(lo), float(hi)
        if hi_f - lo_f > 1e-3:
            for x in rng.uniform(lo_f + 1e-4, hi_f - 1e-4, size=int(rng.integers(0, 3))):
                nodes.add(float(x))
    grid = np.array(sorted(nodes))
    return tf.TraceFunction(iset, grid, rng.normal(size=grid.size))
