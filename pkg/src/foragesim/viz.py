"""Text and matplotlib views of a world, used by the demo scripts."""

from __future__ import annotations

from .lattice import EMPTY, FOOD
from . import compression as cp
from . import spiral as sp

_COMPRESSION_GLYPHS = {cp.D: "o", cp.C: "c", cp.C_G: "g", cp.C_F: "f",
                       cp.C_GF: "G", cp.DT: "x"}


def _glyph(world, algo, idx):
    o = world.occ[idx]
    if o == EMPTY:
        return "."
    if o == FOOD:
        return "@"
    s = world.states[o]
    if algo == "compression":
        return _COMPRESSION_GLYPHS[s]
    if s == sp.DISPERSION:
        return "o"
    b = sp.base_of(s)
    return "ABCDEF"[b] if sp.is_verified(s) else str(b)


def render_ascii(world, algo="compression"):
    """Sheared text rendering: rows are constant-x lines of the triangular
    lattice, successive rows offset by half a cell.  Legend: '@' food,
    compression o/c/g/f/G/x = D/C/C_G/C_F/C_GF/DT; spiral digits 0-6
    (A-F when verified), 'o' dispersion."""
    L = world.side
    lat = world.lattice
    lines = []
    for x in range(L):
        row = " " * x
        row += " ".join(_glyph(world, algo, lat.index((x, y))) for y in range(L))
        lines.append(row)
    return "\n".join(lines)


def scatter_plot(world, algo="compression", ax=None):
    """Matplotlib scatter in the standard triangular embedding; returns the
    axes (requires matplotlib)."""
    import matplotlib.pyplot as plt
    import math

    if ax is None:
        _, ax = plt.subplots(figsize=(6, 6))
    lat = world.lattice
    sq3 = math.sqrt(3) / 2

    def xy(idx):
        x, y = lat.coord(idx)
        return (x * sq3, y - x / 2)

    palette_c = {cp.D: "#e6c200", cp.C: "#2b6cb0", cp.C_G: "#c53030",
                 cp.C_F: "#2b6cb0", cp.C_GF: "#c53030", cp.DT: "#6b46c1"}
    for p in range(world.n_particles):
        px, py = xy(world.pos[p])
        if algo == "compression":
            color = palette_c[world.states[p]]
        else:
            s = world.states[p]
            color = "#e6c200" if s == sp.DISPERSION else (
                "#c53030" if sp.is_verified(s) else "#2b6cb0")
        ax.scatter(px, py, s=24, c=color)
    for f in world.food:
        fx, fy = xy(f)
        ax.scatter(fx, fy, s=80, c="#2f855a", marker="h")
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    return ax
