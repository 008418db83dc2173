"""
SVG rendering of initial piles and packing sequences.

Figures are drawn with matplotlib's object API and written by its SVG
backend with a fixed hash salt and no date, so the same input always
produces the same bytes. Every box is drawn as patches with
``gid="box-<id>"`` and a colour from ``tab20`` keyed by its id. 3D boxes are
drawn as three visible faces of an isometric projection.
"""

import io
import logging
import math
import os
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure
from matplotlib.patches import Patch, Polygon, Rectangle

from ..core.geometry import PlacedBox
from ..core.instance import ProblemInstance, Solution
from ..utils.helpers import atomic_write

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

SVG_RC = {"svg.hashsalt": "tapkit", "svg.fonttype": "none"}
_COS30 = math.cos(math.pi / 6)
_SIN30 = 0.5


def box_color(box_id: int) -> Tuple[float, float, float, float]:
    """Deterministic colour of a box."""
    return matplotlib.colormaps["tab20"](box_id % 20)


# ============================================================================
# Patches
# ============================================================================


def _iso(x: float, y: float, z: float) -> Tuple[float, float]:
    return ((x - z) * _COS30, y + (x + z) * _SIN30)


def box_patches(box: PlacedBox) -> List[Patch]:
    """
    Patches of one placed box in data coordinates.

    2D boxes give one rectangle at ``(x, y)``; 3D boxes give their top,
    front (``z`` min) and right (``x`` max) faces projected isometrically.
    """
    color = box_color(box.box_id)
    gid = f"box-{box.box_id}"
    if box.dims_mode == 2:
        rect = Rectangle(
            (box.x, box.y), box.width, box.height, facecolor=color, edgecolor="black", lw=0.8
        )
        rect.set_gid(gid)
        return [rect]

    x0, y0, z0 = box.x, box.y, box.z
    x1, y1, z1 = box.right, box.top, box.back
    faces = {
        "front": [(x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0)],
        "right": [(x1, y0, z0), (x1, y0, z1), (x1, y1, z1), (x1, y1, z0)],
        "top": [(x0, y1, z0), (x1, y1, z0), (x1, y1, z1), (x0, y1, z1)],
    }
    shade = {"front": 1.0, "right": 0.8, "top": 0.9}
    patches: List[Patch] = []
    for name, corners in faces.items():
        rgb = tuple(c * shade[name] for c in color[:3])
        poly = Polygon(
            [_iso(*c) for c in corners], closed=True, facecolor=rgb, edgecolor="black", lw=0.6
        )
        poly.set_gid(gid)
        patches.append(poly)
    return patches


def _draw_order(boxes: Sequence[PlacedBox]) -> List[PlacedBox]:
    # Painter's order for the isometric view: far and low boxes first.
    return sorted(boxes, key=lambda b: (b.x + b.y + b.z, -b.z, b.x, b.box_id))


def _draw_container(
    ax, boxes: Sequence[PlacedBox], width: int, depth: int, dims_mode: int, title: str
) -> None:
    for box in _draw_order(boxes) if dims_mode == 3 else boxes:
        for patch in box_patches(box):
            ax.add_patch(patch)
    top = max((b.top for b in boxes), default=1)
    if dims_mode == 2:
        ax.plot([0, 0, width, width], [top + 1, 0, 0, top + 1], color="black", lw=1.5)
        ax.set_xlim(-0.5, width + 0.5)
        ax.set_ylim(-0.5, top + 1.5)
    else:
        floor = [_iso(0, 0, 0), _iso(width, 0, 0), _iso(width, 0, depth), _iso(0, 0, depth)]
        ax.add_patch(Polygon(floor, closed=True, fill=False, edgecolor="grey", lw=1.0))
        xs = [_iso(x, y, z)[0] for x in (0, width) for y in (0, top) for z in (0, depth)]
        ys = [_iso(x, y, z)[1] for x in (0, width) for y in (0, top) for z in (0, depth)]
        ax.set_xlim(min(xs) - 0.5, max(xs) + 0.5)
        ax.set_ylim(min(ys) - 0.5, max(ys) + 0.5)
    ax.set_aspect("equal")
    ax.set_title(title, fontsize=8)
    ax.set_xticks([])
    ax.set_yticks([])


# ============================================================================
# Figures
# ============================================================================


def _figure(panels: int) -> Figure:
    fig = Figure(figsize=(3.0 * panels, 3.0))
    FigureCanvasSVG(fig)
    return fig


def figure_to_svg(fig: Figure) -> str:
    """Serialize a figure to SVG text without timestamps."""
    buffer = io.StringIO()
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def pile_figure(inst: ProblemInstance) -> Figure:
    """The initial pile."""
    fig = _figure(1)
    ax = fig.add_subplot(1, 1, 1)
    _draw_container(
        ax, inst.initial_placements, inst.init_width, inst.init_depth, inst.dims_mode, "pile"
    )
    return fig


def packing_figure(inst: ProblemInstance, steps: Sequence[PlacedBox], title: str) -> Figure:
    """Every target container after ``steps`` have been packed."""
    k = inst.container_count
    fig = _figure(k)
    for c in range(k):
        ax = fig.add_subplot(1, k, c + 1)
        boxes = [s for s in steps if s.container_idx == c]
        label = title if k == 1 else f"{title} / container {c}"
        _draw_container(ax, boxes, inst.target_width, inst.target_depth, inst.dims_mode, label)
    return fig


def _save(fig: Figure, path: PathLike) -> Path:
    with atomic_write(path) as handle:
        handle.write(figure_to_svg(fig))
    return Path(path)


def render_instance(inst: ProblemInstance, path: PathLike) -> Path:
    """Write the initial pile as one SVG file."""
    return _save(pile_figure(inst), path)


def render_solution(inst: ProblemInstance, solution: Solution, directory: PathLike) -> List[Path]:
    """
    Write ``len(solution) + 1`` frames: the pile, then the containers after each step.

    Frames are named ``frame_000.svg``, ``frame_001.svg``, ...
    """
    root = Path(directory)
    frames = [_save(pile_figure(inst), root / "frame_000.svg")]
    for t in range(1, len(solution) + 1):
        fig = packing_figure(inst, solution.steps[:t], f"step {t}")
        frames.append(_save(fig, root / f"frame_{t:03d}.svg"))
    logger.info("Rendered %d frames to %s", len(frames), root)
    return frames


def render_svg(inst: ProblemInstance, out: PathLike, solution: Solution = None) -> List[Path]:
    """Render a pile (file ``out``) or a packing sequence (directory ``out``)."""
    if solution is None:
        return [render_instance(inst, out)]
    return render_solution(inst, solution, out)
