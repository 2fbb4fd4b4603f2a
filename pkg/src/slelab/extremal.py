"""Discrete-harmonic pi-extremal distance between two boundary arcs.

A conformal rectangle with arcs on the vertical sides maps onto
[0, L] x [0, pi]; L is recovered variationally: solve the Laplace problem
with u = 0 on one arc, u = 1 on the other and no-flux elsewhere, then

    L = pi / (Dirichlet energy of u).

The polygon is rasterized on a square grid (cells inside if their center
is inside); the energy functional sums (u_i - u_j)^2 over grid edges
weighted by half the number of flanking inside cells, which is exact for
axis-aligned rectangles and O(1/resolution) accurate in general.  Nodes
within half a cell of an arc carry the Dirichlet data; minimizing the
energy gives the discrete harmonic solution with natural (no-flux)
conditions on the free boundary.
"""

from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve


def _point_in_polygon(px: np.ndarray, py: np.ndarray,
                      poly: np.ndarray) -> np.ndarray:
    """Even-odd rule, vectorized over query points."""
    inside = np.zeros(px.shape, dtype=bool)
    n = len(poly)
    for k in range(n):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % n]
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < xint)
    return inside


def _dist_to_segment(px, py, a, b) -> np.ndarray:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0:
        return np.hypot(px - ax, py - ay)
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / denom, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _arc_segments(poly: np.ndarray, arc: Tuple[int, int]):
    """Vertex-index arc (start, stop) -> list of boundary segments."""
    n = len(poly)
    i, j = arc
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ValueError(f"invalid arc {arc} for a {n}-gon")
    segs = []
    k = i
    while k != j:
        segs.append((poly[k], poly[(k + 1) % n]))
        k = (k + 1) % n
    return segs


def pi_extremal_distance(polygon: Sequence, arc1: Tuple[int, int],
                         arc2: Tuple[int, int], resolution: int = 256) -> float:
    """Length L of the conformal rectangle [0,L] x [0,pi] between two arcs.

    Parameters
    ----------
    polygon : sequence of vertices (complex, or (x, y) pairs) in order.
    arc1, arc2 : (start_index, stop_index) pairs selecting the boundary
        path from one vertex to another in polygon order.  The arcs must
        be disjoint and nondegenerate.
    resolution : grid cells across the polygon diameter.

    The result is conformally invariant: rescaling the polygon leaves L
    unchanged (exactly, for exact binary scale factors).
    """
    poly = np.array([(z.real, z.imag) if isinstance(z, complex) else tuple(z)
                     for z in polygon], dtype=float)
    if len(poly) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    segs1 = _arc_segments(poly, arc1)
    segs2 = _arc_segments(poly, arc2)
    # disjointness: arcs may not share any boundary edge or interior vertex
    idx1 = set(range(arc1[0], arc1[0] + len(segs1)))
    idx2 = set(range(arc2[0], arc2[0] + len(segs2)))
    n = len(poly)
    if {i % n for i in idx1} & {i % n for i in idx2}:
        raise ValueError("arcs overlap")

    span = poly.max(axis=0) - poly.min(axis=0)
    diam = float(np.hypot(*span))
    delta = diam / resolution
    # node grid aligned with the bounding box, so axis-aligned boundary
    # walls pass through node lines (kills the O(delta) wall offset)
    x0, y0 = poly.min(axis=0)
    nx = int(np.ceil(span[0] / delta)) + 2
    ny = int(np.ceil(span[1] / delta)) + 2

    # cell (i, j) spans [x0+i*delta, x0+(i+1)*delta] x [...]; inside by center
    ci, cj = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), indexing="ij")
    cx = x0 + (ci + 0.5) * delta
    cy = y0 + (cj + 0.5) * delta
    cell_in = _point_in_polygon(cx, cy, poly)

    # nodes are cell corners; active if touching an inside cell
    pad = np.zeros((nx + 1, ny + 1), dtype=int)
    pad[1:-1, 1:-1] = cell_in
    corner_count = (pad[:-1, :-1] + pad[1:, :-1] + pad[:-1, 1:] + pad[1:, 1:])
    active = corner_count[:nx, :ny] > 0
    node_id = -np.ones((nx, ny), dtype=int)
    ids = np.nonzero(active)
    node_id[ids] = np.arange(len(ids[0]))
    n_nodes = len(ids[0])
    nodex = x0 + ids[0] * delta
    nodey = y0 + ids[1] * delta

    def near_arc(segs):
        d = np.full(n_nodes, np.inf)
        for a, b in segs:
            d = np.minimum(d, _dist_to_segment(nodex, nodey, a, b))
        return d <= 0.5 * delta + 1e-12 * diam

    fixed0 = near_arc(segs1)
    fixed1 = near_arc(segs2) & ~fixed0
    if not fixed0.any() or not fixed1.any():
        raise ValueError("an arc captured no grid nodes; raise the resolution")

    # edges between active nodes, weighted by half the flanking inside cells
    rows, cols, wts = [], [], []
    for axis in (0, 1):
        if axis == 0:
            a_idx = node_id[:-1, :]
            b_idx = node_id[1:, :]
            flank = np.zeros((nx - 1, ny), dtype=float)
            flank[:, 1:] += cell_in
            flank[:, :-1] += cell_in
        else:
            a_idx = node_id[:, :-1]
            b_idx = node_id[:, 1:]
            flank = np.zeros((nx, ny - 1), dtype=float)
            flank[1:, :] += cell_in
            flank[:-1, :] += cell_in
        mask = (a_idx >= 0) & (b_idx >= 0) & (flank > 0)
        rows.append(a_idx[mask])
        cols.append(b_idx[mask])
        wts.append(0.5 * flank[mask])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    wts = np.concatenate(wts)

    # weighted graph Laplacian
    i_all = np.concatenate([rows, cols, rows, cols])
    j_all = np.concatenate([cols, rows, rows, cols])
    v_all = np.concatenate([-wts, -wts, wts, wts])
    lap = coo_matrix((v_all, (i_all, j_all)), shape=(n_nodes, n_nodes)).tocsr()

    u = np.zeros(n_nodes)
    u[fixed1] = 1.0
    free = ~(fixed0 | fixed1)
    if free.any():
        f_idx = np.nonzero(free)[0]
        rhs = -lap[f_idx][:, np.nonzero(fixed1)[0]].sum(axis=1).A1
        u[f_idx] = spsolve(lap[f_idx][:, f_idx].tocsc(), rhs)

    energy = float(np.sum(wts * (u[rows] - u[cols]) ** 2))
    if energy <= 0:
        raise ValueError("arcs are not connected through the domain")
    return float(np.pi / energy)
