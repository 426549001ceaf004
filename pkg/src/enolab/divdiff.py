"""Divided-difference tables of cell averages (or point values).

For cell averages the level-``l`` entry starting at cell ``i`` is

    D[l][i] = (D[l-1][i+1] - D[l-1][i]) / (x_{i+l+1/2} - x_{i-1/2}),

which coincides with the ``(l+1)``-th Newton divided difference of the
primitive function over the interfaces ``x_{i-1/2}, ..., x_{i+l+1/2}``.
For point values the usual recursion over the nodes (cell centers) is used.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from enolab.errors import InvalidRangeError, SemanticsMismatchError
from enolab.mesh import GridFunction, Mesh, extend_interfaces, extend_values, primitive_trace

MAX_LEVEL = 9


def divided_difference_levels(values: np.ndarray, nodes: np.ndarray, max_level: int, average: bool = True) -> list:
    """All levels ``0..max_level`` of the table, batched over leading axes.

    ``values`` has ``N`` entries on its last axis. For cell averages ``nodes``
    are the ``N + 1`` interfaces; for point values the ``N`` node positions.
    Level ``l`` has ``N - l`` entries.
    """
    v = np.asarray(values, dtype=np.float64)
    z = np.asarray(nodes, dtype=np.float64)
    shift = 1 if average else 0
    levels = [v]
    d = v
    N = v.shape[-1]
    for lvl in range(1, max_level + 1):
        denom = z[..., lvl + shift:N + shift] - z[..., : N - lvl]
        d = (d[..., 1:] - d[..., :-1]) / denom
        levels.append(d)
    return levels


@dataclass(frozen=True, eq=False)
class DividedDifferenceTable:
    """Full table over the ghost-extended index window ``[-ghost, n + ghost)``.

    ``levels[l][e]`` is the entry starting at extended index ``e``, i.e. at
    cell ``i = e - ghost``; use :meth:`entry` for cell-indexed access.
    """

    mesh: Mesh
    levels: tuple
    ghost: int
    kind: str
    periodic: bool
    nodes: np.ndarray

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    def entry(self, level: int, i: int) -> float:
        return float(self.levels[level][i + self.ghost])

    def __getitem__(self, key) -> float:
        level, i = key
        return self.entry(level, i)

    def level(self, level: int) -> np.ndarray:
        """Entries of ``level`` starting at cells ``0..n-1``."""
        g = self.ghost
        return self.levels[level][g : g + self.mesh.n]

    def rows(self):
        for lvl in range(self.max_level + 1):
            for i, val in enumerate(self.level(lvl)):
                yield lvl, i, float(val)

    def to_csv(self, path, levels=None) -> None:
        keep = set(range(self.max_level + 1) if levels is None else levels)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["level", "i", "value"])
            for lvl, i, val in self.rows():
                if lvl in keep:
                    w.writerow([lvl, i, f"{val:.17g}"])


def build_table(u: GridFunction, max_level: int, ghost: int | None = None) -> DividedDifferenceTable:
    if max_level < 0 or max_level > MAX_LEVEL:
        raise InvalidRangeError(f"max_level must lie in [0, {MAX_LEVEL}]")
    g = max_level + 2 if ghost is None else ghost
    vals = extend_values(u.values, g, u.periodic)
    if u.is_average:
        nodes = extend_interfaces(u.mesh.interfaces, g, u.periodic)
    else:
        nodes = _extend_centers(u.mesh, g, u.periodic)
    levels = divided_difference_levels(vals, nodes, max_level, average=u.is_average)
    for lv in levels:
        lv.setflags(write=False)
    return DividedDifferenceTable(u.mesh, tuple(levels), g, u.kind, u.periodic, nodes)


def _extend_centers(mesh: Mesh, ghost: int, periodic: bool) -> np.ndarray:
    x = extend_interfaces(mesh.interfaces, ghost, periodic)
    return 0.5 * (x[1:] + x[:-1])


def newton_table(x, y) -> list:
    """Classical Newton divided differences: ``out[j][i] = y[x_i, ..., x_{i+j}]``."""
    x = np.asarray(x, dtype=np.float64)
    out = [np.asarray(y, dtype=np.float64)]
    for j in range(1, x.size):
        prev = out[-1]
        out.append((prev[1:] - prev[:-1]) / (x[j:] - x[:-j]))
    return out


def table_equals_primitive_oracle(u: GridFunction, max_level: int = 8, rtol: float = 1e-12) -> bool:
    """Compare the cell-average table against Newton differences of the primitive.

    Both tables are taken on the real cells only (no ghosts). Each level is
    compared with tolerance ``rtol`` relative to the largest entry magnitude of
    that level (floor ``1e-300``), since individual entries can vanish by
    cancellation.
    """
    if not u.is_average:
        raise SemanticsMismatchError("the primitive oracle applies to cell averages")
    max_level = min(max_level, u.n - 1)
    V = primitive_trace(u).values
    ref = newton_table(u.mesh.interfaces, V)
    got = divided_difference_levels(u.values, u.mesh.interfaces, max_level)
    for lvl in range(max_level + 1):
        a, b = got[lvl], ref[lvl + 1]
        scale = max(np.abs(b).max(), np.abs(a).max(), 1e-300)
        if np.any(np.abs(a - b) > rtol * scale):
            return False
    return True
