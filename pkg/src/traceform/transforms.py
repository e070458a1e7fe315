"""Scale functions, darning maps, and speed measures built from an interval set.

The scale function accumulates G-mass, so it is affine with slope one across
each G-component and flat across F.  The darning map does the opposite: it
accumulates F-mass, collapsing the closure of each G-component to a single
point of the image.  Pushforwards of Lebesgue measure under either map are
piecewise-constant densities plus atoms, represented by ``SpeedMeasure``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Union

from .errors import PreconditionError, ValidationError
from .intervals import IntervalSet, Real, Tail, _decode, _encode


class Case(Enum):
    """Range of the scale function: infinite on both sides, one side, or neither.

    CaseI and CaseII are exactly the sets whose G has infinite total mass; the
    associated diffusion is recurrent in CaseI and transient otherwise.
    """

    I = "CaseI"
    II = "CaseII"
    III = "CaseIII"


def classify_case(obj) -> Case:
    """Classify an ``IntervalSet`` (or anything exposing ``.base``)."""
    iset = obj.base if hasattr(obj, "base") else obj
    left = iset.side_mass_infinite("left")
    right = iset.side_mass_infinite("right")
    if left and right:
        return Case.I
    if left or right:
        return Case.II
    return Case.III


class ScaleFunction:
    """s(x) = signed G-mass between the anchor and x; s(anchor) = 0."""

    def __init__(self, base: IntervalSet, anchor: Real = 0):
        self.base = base
        self.anchor = anchor

    def __call__(self, x: Real) -> Real:
        if x >= self.anchor:
            return self.base.lebesgue(self.anchor, x, "G")
        return -self.base.lebesgue(x, self.anchor, "G")

    @cached_property
    def _plateaus(self) -> tuple[tuple[Real, Real, Real], ...]:
        # (value, lo, hi) for every flat stretch of s inside the window
        return tuple((self(lo), lo, hi) for lo, hi in self.base.f_components)

    def window_image(self) -> tuple[Real, Real]:
        w0, w1 = self.base.window
        return self(w0), self(w1)

    def inverse(self, y: Real) -> tuple[Real, Real]:
        """Full preimage of y, clipped to the window.

        Returns (lo, hi); lo == hi when y is hit inside a G-component, and the
        closed F-component on which s plateaus at y otherwise.  Values never
        attained by s raise ``PreconditionError``.
        """
        iset = self.base
        w0, w1 = iset.window
        s0, s1 = self.window_image()
        if y < s0:
            if iset.tail_left is Tail.ALL_G:
                x = w0 - (s0 - y)
                return x, x
            if iset.tail_left is Tail.ALL_F or iset.g_mass_window == 0:
                raise PreconditionError(f"value {y} is below the range of the scale function")
            per_mass = iset.g_mass_window
            k = math.ceil((s0 - y) / per_mass)
            lo, hi = self.inverse(y + k * per_mass)
            p = iset.period
            return lo - k * p, hi - k * p
        if y > s1:
            if iset.tail_right is Tail.ALL_G:
                x = w1 + (y - s1)
                return x, x
            if iset.tail_right is Tail.ALL_F or iset.g_mass_window == 0:
                raise PreconditionError(f"value {y} is above the range of the scale function")
            per_mass = iset.g_mass_window
            k = math.ceil((y - s1) / per_mass)
            lo, hi = self.inverse(y - k * per_mass)
            p = iset.period
            return lo + k * p, hi + k * p
        for value, lo, hi in self._plateaus:
            if y == value:
                return lo, hi
        # y is strictly inside the image of some G-component; walk components
        acc = s0
        prev = w0
        for a, b in iset.components:
            if a > prev:
                prev = a  # flat across the gap, value unchanged
            nxt = acc + (b - a)
            if acc <= y <= nxt:
                x = a + (y - acc)
                return x, x
            acc = nxt
            prev = b
        raise PreconditionError(f"value {y} is not attained by the scale function")


@dataclass(frozen=True)
class CollapsedPoint:
    """Image point of one collapsed G-component closure."""

    index: int
    position: Real
    width: Real


@dataclass(frozen=True)
class DarningImage:
    """Description of the darning map's image of the window."""

    lo: Real
    hi: Real
    bounded_left: bool
    bounded_right: bool
    collapsed: tuple[CollapsedPoint, ...]

    def to_dict(self) -> dict:
        return {
            "lo": _encode(self.lo),
            "hi": _encode(self.hi),
            "bounded_left": self.bounded_left,
            "bounded_right": self.bounded_right,
            "collapsed": [
                {"index": c.index, "position": _encode(c.position), "width": _encode(c.width)}
                for c in self.collapsed
            ],
        }


class DarningMap:
    """j(x) = signed F-mass between the anchor z and x; constant on each
    closed G-component, strictly increasing across F.

    The anchor must lie in F but not at a component endpoint.  When omitted it
    is chosen deterministically: the left end of the first positive-length
    F-component if that end is not a component endpoint, else that
    component's midpoint.
    """

    def __init__(self, base: IntervalSet, z: Real | None = None):
        self.base = base
        if z is None:
            z = self._default_anchor(base)
        self._check_anchor(z)
        self.z = z

    @staticmethod
    def _default_anchor(iset: IntervalSet) -> Real:
        endpoints = set(iset.endpoints)
        for lo, hi in iset.f_components:
            if lo not in endpoints:
                return lo
            return (lo + hi) / 2
        raise PreconditionError(
            "no valid darning anchor: F has no positive-length part in the window"
        )

    def _check_anchor(self, z: Real) -> None:
        if self.base.in_g(z):
            raise PreconditionError(f"darning anchor {z} lies in G")
        if z in set(self.base.endpoints):
            raise PreconditionError(
                f"darning anchor {z} is a component endpoint; it must be interior to F"
            )

    def __call__(self, x: Real) -> Real:
        if x >= self.z:
            return self.base.lebesgue(self.z, x, "F")
        return -self.base.lebesgue(x, self.z, "F")

    @cached_property
    def collapsed_points(self) -> tuple[CollapsedPoint, ...]:
        return tuple(
            CollapsedPoint(index=i, position=self(a), width=b - a)
            for i, (a, b) in enumerate(self.base.components)
        )

    def image(self) -> DarningImage:
        w0, w1 = self.base.window
        return DarningImage(
            lo=self(w0),
            hi=self(w1),
            bounded_left=self.base.tail_left is Tail.ALL_G,
            bounded_right=self.base.tail_right is Tail.ALL_G,
            collapsed=self.collapsed_points,
        )

    @cached_property
    def _f_spans(self) -> tuple[tuple[Real, Real, Real, Real], ...]:
        # (j_lo, j_hi, x_lo, x_hi) image span of each F-component
        return tuple(
            (self(lo), self(hi), lo, hi) for lo, hi in self.base.f_components
        )

    def inverse(self, y: Real) -> tuple[Real, Real]:
        """Full preimage of y within the window: a point of F, or the closed
        component interval when y is a collapsed point."""
        img = self.image()
        if y < img.lo or y > img.hi:
            # float inputs that went through the forward map can land one
            # ulp outside the exact rational image; clamp those, reject more
            slack = 1e-12 * max(1.0, abs(float(img.hi - img.lo)))
            if img.lo - slack <= y <= img.hi + slack:
                y = img.lo if y < img.lo else img.hi
            else:
                raise PreconditionError(
                    f"value {y} is outside the window image [{img.lo}, {img.hi}] of the darning map"
                )
        for c in self.collapsed_points:
            if y == c.position:
                return self.base.components[c.index]
        for j_lo, j_hi, x_lo, x_hi in self._f_spans:
            if j_lo <= y <= j_hi:
                x = x_lo + (y - j_lo)
                return x, x
        # window edge inside a component closure cannot happen: edges are in F
        raise PreconditionError(f"value {y} is not attained by the darning map on the window")


@dataclass(frozen=True)
class SpeedMeasure:
    """Piecewise-constant density plus point atoms on a finite carrier.

    Atom masses live in (0, inf]; an infinite atom marks an absorbing point.
    """

    carrier: tuple[Real, Real]
    density_pieces: tuple[tuple[Real, Real, Real], ...] = ()
    atoms: tuple[tuple[Real, Real], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "carrier", tuple(self.carrier))
        object.__setattr__(self, "density_pieces", tuple(tuple(p) for p in self.density_pieces))
        object.__setattr__(self, "atoms", tuple(tuple(a) for a in self.atoms))
        lo, hi = self.carrier
        if not lo < hi:
            raise ValidationError(f"carrier must satisfy lo < hi, got ({lo}, {hi})")
        prev = None
        for x0, x1, c in self.density_pieces:
            if not x0 < x1:
                raise ValidationError(f"density piece ({x0}, {x1}) has nonpositive length")
            if x0 < lo or x1 > hi:
                raise ValidationError(f"density piece ({x0}, {x1}) leaves the carrier")
            if c < 0:
                raise ValidationError(f"density {c} is negative")
            if prev is not None and x0 < prev:
                raise ValidationError("density pieces overlap")
            prev = x1
        seen = set()
        for p, m in self.atoms:
            if p < lo or p > hi:
                raise ValidationError(f"atom at {p} leaves the carrier")
            if not m > 0:
                raise ValidationError(f"atom mass {m} must be positive")
            if p in seen:
                raise ValidationError(f"duplicate atom at {p}")
            seen.add(p)

    def mass(self, lo: Real, hi: Real, include_atoms: bool = True, skip_infinite: bool = False) -> Real:
        """Total mass of [lo, hi].  Infinite atoms make the result inf unless
        ``skip_infinite`` excludes them."""
        if lo > hi:
            raise PreconditionError(f"query interval has lo {lo} > hi {hi}")
        total: Real = 0
        for x0, x1, c in self.density_pieces:
            left = x0 if x0 > lo else lo
            right = x1 if x1 < hi else hi
            if right > left:
                total = total + c * (right - left)
        if include_atoms:
            for p, m in self.atoms:
                if lo <= p <= hi:
                    if math.isinf(m):
                        if skip_infinite:
                            continue
                        return math.inf
                    total = total + m
        return total

    def tent_integral(self, y: Real, h: Real) -> float:
        """Integral of the tent kernel (h - |xi - y|)+ against the measure.

        This is the expected holding produced by an h-step walk at node y:
        density c contributes c*h*h on an interior node, an atom of mass w at
        y contributes h*w, and an infinite atom makes the node absorbing.
        """
        total = 0.0
        ylo, yhi = y - h, y + h

        def prim(t: float) -> float:
            # antiderivative of (h - |tau|) on [-h, h], clamped outside
            t = min(max(t, -h), h)
            return h * t - math.copysign(t * t, t) / 2

        for x0, x1, c in self.density_pieces:
            left = max(x0, ylo)
            right = min(x1, yhi)
            if right > left:
                total += c * (prim(right - y) - prim(left - y))
        for p, m in self.atoms:
            k = h - abs(p - y)
            if k > 0:
                if math.isinf(m):
                    return math.inf
                total += k * m
        return float(total)

    def to_dict(self) -> dict:
        def enc_mass(m):
            return "inf" if isinstance(m, float) and math.isinf(m) else _encode(m)

        return {
            "carrier": [_encode(self.carrier[0]), _encode(self.carrier[1])],
            "density_pieces": [[_encode(a), _encode(b), _encode(c)] for a, b, c in self.density_pieces],
            "atoms": [[_encode(p), enc_mass(m)] for p, m in self.atoms],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpeedMeasure":
        def dec_mass(m):
            return math.inf if m == "inf" else _decode(m)

        try:
            carrier = tuple(_decode(x) for x in d["carrier"])
            pieces = tuple(tuple(_decode(x) for x in p) for p in d["density_pieces"])
            atoms = tuple((_decode(p), dec_mass(m)) for p, m in d["atoms"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"malformed speed measure description: {exc}") from exc
        return cls(carrier, pieces, atoms)


PUSHFORWARD_SOURCES = ("lebesgue", "f_indicator", "trace")


def pushforward_speed(dm: DarningMap, source: str = "lebesgue") -> SpeedMeasure:
    """Pushforward of a reference measure under the darning map.

    Sources: "lebesgue" pushes dx (each collapsed component becomes an atom of
    mass equal to its width), "f_indicator" pushes 1_F dx (plain Lebesgue on
    the image, no atoms), "trace" pushes 1_F dx plus half-width atoms at both
    endpoints of every component (the halves merge at the collapsed point, so
    the result coincides with the "lebesgue" pushforward).  All-G tails add an
    infinite atom at the corresponding image boundary.
    """
    if source not in PUSHFORWARD_SOURCES:
        raise PreconditionError(f"unknown pushforward source {source!r}")
    img = dm.image()
    lo, hi = img.lo, img.hi
    if not lo < hi:
        raise PreconditionError(
            "darning image is a single point: F has no mass in the window"
        )
    atoms: list[tuple[Real, Real]] = []
    if source in ("lebesgue", "trace"):
        atoms.extend((c.position, c.width) for c in dm.collapsed_points)
        if img.bounded_left:
            atoms.append((lo, math.inf))
        if img.bounded_right:
            atoms.append((hi, math.inf))
    atoms.sort(key=lambda a: a[0])
    return SpeedMeasure((lo, hi), ((lo, hi, 1),), tuple(atoms))


def scale_pushforward_speed(sf: ScaleFunction) -> SpeedMeasure:
    """Pushforward of Lebesgue measure on the window under the scale function:
    density one on the image of G, an atom of mass m(F-component) at each
    collapsed F-component value."""
    iset = sf.base
    lo, hi = sf.window_image()
    if not lo < hi:
        raise PreconditionError(
            "scale image of the window is a single point: G has no mass there "
            "(the whole window collapses)"
        )
    atoms = tuple(
        (value, f_hi - f_lo) for value, f_lo, f_hi in sf._plateaus
    )
    return SpeedMeasure((lo, hi), ((lo, hi, 1),), atoms)
