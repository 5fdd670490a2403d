"""SVG rendering of cylinder footprints and 3D generation point clouds."""

from __future__ import annotations

from pathlib import Path

from .errors import CapacityError
from .maps import Parameters, rect_ranges, _f_closure
from .symbolic import enumerate_words


def cylinder_footprint(word, params: Parameters):
    """Exact (x-interval, y-interval) of a cylinder in its leading plane.

    Intervals are computed by composing the monotone inverse-branch
    coordinate maps over the full ranges of the last rectangle.
    """
    word = tuple(word)
    (xlo, xhi), (ylo, yhi) = rect_ranges(word[-1], params)
    for source in reversed(word[:-1]):
        if source in (1, 3):
            xlo, xhi = params.rho * xlo, params.rho * xhi
            ylo, yhi = _f_closure(ylo), _f_closure(yhi)
        else:
            xlo, xhi = 0.75 - params.rho * xhi, 0.75 - params.rho * xlo
            ylo, yhi = params.sigma * (1.0 - yhi), params.sigma * (1.0 - ylo)
    return (xlo, xhi), (ylo, yhi)


def _fmt(x: float) -> str:
    return format(x, ".9g")


def render_generation_svg(n: int, params: Parameters, path: str | Path) -> int:
    """Write the depth-n cylinder footprints as a two-panel SVG.

    Left panel: plane P0 (rectangles R1, R2); right panel: plane P1 (R3).
    Returns the number of rectangles drawn.
    """
    if n > 8:
        raise CapacityError(f"render depth capped at 8, got {n}")
    scale = 400.0
    gap = 40.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(2 * scale + 3 * gap)}" '
        f'height="{_fmt(scale + 2 * gap)}" viewBox="0 0 {_fmt(2 * scale + 3 * gap)} '
        f'{_fmt(scale + 2 * gap)}">',
        f'<rect x="{_fmt(gap)}" y="{_fmt(gap)}" width="{_fmt(scale)}" height="{_fmt(scale)}" '
        'fill="none" stroke="#999" stroke-width="1"/>',
        f'<rect x="{_fmt(2 * gap + scale)}" y="{_fmt(gap)}" width="{_fmt(scale)}" '
        f'height="{_fmt(scale)}" fill="none" stroke="#999" stroke-width="1"/>',
    ]
    count = 0
    for word in enumerate_words(n):
        (xlo, xhi), (ylo, yhi) = cylinder_footprint(word, params)
        panel_x = gap if word[0] != 3 else 2 * gap + scale
        px = panel_x + xlo * scale
        py = gap + (1.0 - yhi) * scale
        w = (xhi - xlo) * scale
        h = (yhi - ylo) * scale
        fill = {1: "#4878cf", 2: "#d65f5f", 3: "#6acc65"}[word[0]]
        parts.append(
            f'<rect x="{_fmt(px)}" y="{_fmt(py)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'fill="{fill}" fill-opacity="0.55" stroke="#222" stroke-width="0.5"/>'
        )
        count += 1
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
    return count


def generation_point_cloud(n_max: int, params: Parameters, per_generation: int = 200, seed: int = 0):
    """(x, y, z, generation) rows tracing lifted cylinder samples per depth."""
    import numpy as np

    from .lift3d import Section, _branch_of_symbol
    from .maps import apply_F_inverse, cylinder_sample

    rng = np.random.default_rng(seed)
    section = Section()
    rows = []
    for g in range(1, n_max + 1):
        words = enumerate_words(g)
        take = min(per_generation, len(words))
        picks = rng.choice(len(words), size=take, replace=False)
        for i in sorted(int(j) for j in picks):
            word = words[i]
            p = cylinder_sample(word, params)
            y = section.lift(p)
            for j in range(g - 1):
                y = apply_F_inverse(y, _branch_of_symbol(word[j]), params)
            rows.append((y.x, y.y, y.z, g))
    return rows
