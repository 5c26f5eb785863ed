"""Phase portraits of planar constrained systems as static SVG and CSV."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numerics import Box2, Trajectory, thread_count
from .reduction import ConstrainedSystem, integrate_constrained

__all__ = ["PortraitCurve", "sample_portrait", "zero_contour", "render_svg", "portrait_csv"]

_SIZE = 600.0
_MARGIN = 1.1    # trajectories stop once they leave the box enlarged by this factor


@dataclass(frozen=True)
class PortraitCurve:
    seed_id: int
    direction: str    # "forward" or "backward"
    trajectory: Trajectory


def grid_seeds(box: Box2, grid: tuple[int, int]) -> list[tuple[float, float]]:
    """Cell centres of an ``N x M`` grid over the box, row by row."""
    n, m = grid
    xs = box.x_lo + (np.arange(n) + 0.5) * (box.x_hi - box.x_lo) / n
    ys = box.y_lo + (np.arange(m) + 0.5) * (box.y_hi - box.y_lo) / m
    return [(float(x), float(y)) for y in ys for x in xs]


def sample_portrait(cs: ConstrainedSystem, box: Box2, grid: tuple[int, int] = (5, 5),
                    t_end: float = 10.0, threads: int | None = None) -> list[PortraitCurve]:
    """Constrained orbits through grid seeds, integrated in both time directions.

    Each run stops at the impasse band, on leaving the (slightly enlarged)
    box, or at ``|t| = t_end``.  Output order is seed index, then forward
    before backward, independent of the thread count.
    """
    cx, cy = 0.5 * (box.x_lo + box.x_hi), 0.5 * (box.y_lo + box.y_hi)
    hx, hy = 0.5 * (box.x_hi - box.x_lo), 0.5 * (box.y_hi - box.y_lo)

    def inside(v):
        return _MARGIN - max(abs(v[0] - cx) / hx, abs(v[1] - cy) / hy)

    jobs = [(k, d, s) for k, s in enumerate(grid_seeds(box, grid)) for d in ("forward", "backward")]

    def run(job):
        k, d, s = job
        T = t_end if d == "forward" else -t_end
        return PortraitCurve(k, d, integrate_constrained(cs, s, T, events=[inside]))

    threads = threads or thread_count()
    if threads == 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, jobs))


def zero_contour(fn: Callable, box: Box2, n: int = 200) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Line segments approximating ``fn = 0`` by marching squares.

    ``fn`` must broadcast over numpy arrays.  Only sign changes are seen, so
    zero curves of even multiplicity are missed.
    """
    xs = np.linspace(box.x_lo, box.x_hi, n + 1)
    ys = np.linspace(box.y_lo, box.y_hi, n + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    V = np.asarray(fn(X, Y), dtype=float) * np.ones_like(X)
    pos = V >= 0
    segments = []

    def cross(p, q, vp, vq):
        t = vp / (vp - vq)
        return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))

    for i in range(n):
        for j in range(n):
            corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            signs = [pos[c] for c in corners]
            if all(signs) or not any(signs):
                continue
            pts = []
            for a in range(4):
                c0, c1 = corners[a], corners[(a + 1) % 4]
                if pos[c0] != pos[c1]:
                    p0 = (xs[c0[0]], ys[c0[1]])
                    p1 = (xs[c1[0]], ys[c1[1]])
                    pts.append(cross(p0, p1, V[c0], V[c1]))
            if len(pts) == 2:
                segments.append((pts[0], pts[1]))
            elif len(pts) == 4:
                centre = np.mean([V[c] for c in corners])
                if (centre >= 0) == signs[0]:
                    segments += [(pts[0], pts[3]), (pts[1], pts[2])]
                else:
                    segments += [(pts[0], pts[1]), (pts[2], pts[3])]
    return segments


def _mapper(box: Box2):
    sx = _SIZE / (box.x_hi - box.x_lo)
    sy = _SIZE / (box.y_hi - box.y_lo)

    def to_px(x, y):
        return (x - box.x_lo) * sx, _SIZE - (y - box.y_lo) * sy

    return to_px


def render_svg(box: Box2, curves: Sequence[PortraitCurve],
               impasse: Sequence[tuple[tuple[float, float], tuple[float, float]]],
               equilibria: Sequence[tuple[tuple[float, float], bool]] = (),
               title: str = "", banner: str = "") -> str:
    """Static SVG: trajectories, impasse locus and equilibrium markers.

    ``equilibria`` holds ``(point, on_impasse)`` pairs; points on the impasse
    are drawn filled.
    """
    to_px = _mapper(box)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_SIZE:g} {_SIZE:g}" '
           f'width="{_SIZE:g}" height="{_SIZE:g}">']
    if banner:
        out.append(f"<!-- {banner} -->")
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    out.append(f'<defs><clipPath id="frame"><rect x="0" y="0" width="{_SIZE:g}" '
               f'height="{_SIZE:g}"/></clipPath></defs>')
    out.append(f'<rect x="0" y="0" width="{_SIZE:g}" height="{_SIZE:g}" fill="white" stroke="black"/>')
    out.append('<g clip-path="url(#frame)">')
    if box.x_lo < 0 < box.x_hi:
        x0, _ = to_px(0, box.y_lo)
        out.append(f'<line x1="{x0:.3f}" y1="0" x2="{x0:.3f}" y2="{_SIZE:g}" stroke="#cccccc"/>')
    if box.y_lo < 0 < box.y_hi:
        _, y0 = to_px(box.x_lo, 0)
        out.append(f'<line x1="0" y1="{y0:.3f}" x2="{_SIZE:g}" y2="{y0:.3f}" stroke="#cccccc"/>')
    for c in curves:
        pts = " ".join(f"{px:.3f},{py:.3f}" for px, py in (to_px(x, y) for x, y in c.trajectory.states))
        colour = "#1f4e9c" if c.direction == "forward" else "#5a8fd6"
        out.append(f'<polyline class="{c.direction}" data-seed="{c.seed_id}" points="{pts}" '
                   f'fill="none" stroke="{colour}" stroke-width="1"/>')
    for (a, b) in impasse:
        (x1, y1), (x2, y2) = to_px(*a), to_px(*b)
        out.append(f'<line class="impasse" x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                   f'stroke="#c0392b" stroke-width="2.5"/>')
    for (q, on_impasse) in equilibria:
        px, py = to_px(*q)
        fill = "black" if on_impasse else "white"
        out.append(f'<circle class="equilibrium" cx="{px:.3f}" cy="{py:.3f}" r="4" '
                   f'fill="{fill}" stroke="black"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def portrait_csv(curves: Sequence[PortraitCurve]) -> str:
    """One row per sample: ``seed_id, direction, t, x, y``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["seed_id", "direction", "t", "x", "y"])
    for c in curves:
        for t, (x, y) in zip(c.trajectory.t, c.trajectory.states):
            w.writerow([c.seed_id, c.direction, format(float(t), ".17g"),
                        format(float(x), ".17g"), format(float(y), ".17g")])
    return buf.getvalue()
