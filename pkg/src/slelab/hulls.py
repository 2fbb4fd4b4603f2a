"""Normalized conformal maps removing compact hulls from the half-plane.

For a compact A with 0 outside A and H \\ A simply connected, Phi is the
unique conformal map of H \\ A onto H fixing 0 and infinity with derivative
1 at infinity.  Vertical slits [x, x+ih] have the closed form

    Phi(z) = sqrt((z-x)^2 + h^2) + sign(x) * sqrt(x^2 + h^2),

whose boundary derivative at the origin is |x| / sqrt(x^2 + h^2).  General
polyline hulls are encoded as a chain of vertical-slit Loewner steps that
absorb the polyline vertex by vertex (a coarse forward zipper); the chain's
composite, recentred to fix 0, approximates Phi and the derivative at 0 is
taken by centered finite difference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .loewner import ConformalChain


@dataclass(frozen=True)
class HullMapResult:
    """Normalized hull-removing map with its key scalars."""

    derivative_at_zero: float
    capacity: float
    evaluate: Callable[[complex], complex]


def _slit_sqrt(zeta: np.ndarray, shift: float) -> np.ndarray:
    """sqrt(zeta^2 + shift) with the two-sided slit branch."""
    zeta = np.asarray(zeta, dtype=complex)
    v = zeta * zeta + shift
    s = np.where(zeta.real >= 0, 1.0, -1.0)
    return s * np.sqrt(v)


def slit_map(x: float, h: float) -> HullMapResult:
    """Closed-form normalized map removing the vertical slit [x, x+ih]."""
    if x == 0:
        raise ValueError("slit rooted at the origin swallows 0")
    if h < 0:
        raise ValueError("slit height must be nonnegative")
    c = float(np.sign(x) * np.sqrt(x * x + h * h))

    def evaluate(z):
        return _slit_sqrt(np.asarray(z, dtype=complex) - x, h * h) + c

    deriv = abs(x) / np.sqrt(x * x + h * h)
    return HullMapResult(derivative_at_zero=float(deriv),
                         capacity=h * h / 2.0, evaluate=evaluate)


def _encode_polyline(points: np.ndarray, max_step: float) -> ConformalChain:
    """Absorb a polyline hull into a chain of vertical-slit steps.

    Each refined vertex is pushed through the current chain; the step that
    absorbs its image w removes the slit rooted at Re(w) with capacity
    Im(w)^2 / 2, i.e. dt = Im(w)^2 / 4.
    """
    refined = [points[0]]
    for a, b in zip(points[:-1], points[1:]):
        seg = b - a
        m = max(1, int(np.ceil(abs(seg) / max_step)))
        for i in range(1, m + 1):
            refined.append(a + seg * (i / m))
    roots, dts = [], []
    for p in refined:
        w = complex(p)
        for r, cap in zip(roots, dts):
            w = r + complex(_slit_sqrt(np.array([w - r]), 4.0 * cap)[0])
        if w.imag <= 1e-12:
            continue  # already absorbed within tolerance
        roots.append(w.real)
        dts.append(w.imag ** 2 / 4.0)
    if not roots:
        raise ValueError("polyline hull is degenerate (no capacity)")
    return ConformalChain(roots=np.array(roots), dts=np.array(dts))


def hull_map(hull, max_step: float = 0.02) -> HullMapResult:
    """Normalized map Phi removing a hull from the upper half-plane.

    ``hull`` is either ``("segment", x, h)`` for the vertical slit
    [x, x+ih] (closed form) or a sequence of complex points describing a
    polyline attached to the real axis at its first point (encoded as a
    backward-Loewner slit chain; Phi'(0) then comes from a centered finite
    difference of radius 1e-6).

    Raises ValueError for hulls that contain or swallow the origin.
    """
    if isinstance(hull, tuple) and len(hull) == 3 and hull[0] == "segment":
        return slit_map(float(hull[1]), float(hull[2]))

    points = np.asarray(list(hull), dtype=complex)
    if points.size < 2:
        raise ValueError("polyline hull needs at least two points")
    if abs(points[0].imag) > 1e-9:
        raise ValueError("polyline hull must start on the real axis")
    if np.any(np.abs(points) < 1e-9):
        raise ValueError("hull contains the origin")
    chain = _encode_polyline(points, max_step)

    shift = float(chain.apply(np.array([0.0 + 0.0j]))[0].real)
    if not np.isfinite(shift):
        raise ValueError("hull swallows the origin")

    def evaluate(z):
        return chain.apply(np.asarray(z, dtype=complex)) - shift

    # origin swallowed -> the two one-sided images straddle a slit root
    delta = 1e-6
    lo, hi = evaluate(np.array([-delta, delta], dtype=complex))
    deriv = float((hi - lo).real / (2 * delta))
    if deriv <= 0 or not np.isfinite(deriv):
        raise ValueError("hull contains or swallows the origin")
    capacity = 2.0 * float(np.sum(chain.dts))
    return HullMapResult(derivative_at_zero=min(deriv, 1.0),
                         capacity=capacity, evaluate=evaluate)
