"""One-dimensional meshes and the grid functions that live on them.

A :class:`Mesh` is described by its interface coordinates
``x[0] < x[1] < ... < x[n]``; cell ``i`` is ``[x[i], x[i+1])``, i.e. the
interface ``x_{i-1/2}`` of cell ``i`` sits at array position ``i``.

Indices outside ``[0, n)`` are resolved through the boundary policy of a
:class:`GridFunction`: ``"periodic"`` wraps, ``"constant"`` repeats the edge
value and the edge cell width.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from enolab.errors import InvalidRangeError, SemanticsMismatchError

AVERAGE = "average"
POINT = "point"
PERIODIC = "periodic"
CONSTANT = "constant"

_KINDS = (AVERAGE, POINT)
_BOUNDARIES = (PERIODIC, CONSTANT)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    interfaces: np.ndarray

    def __post_init__(self):
        x = _frozen(self.interfaces)
        if x.ndim != 1 or x.size < 2:
            raise InvalidRangeError("a mesh needs at least two interfaces")
        if not np.all(np.isfinite(x)) or np.any(np.diff(x) <= 0):
            raise InvalidRangeError("interfaces must be finite and strictly increasing")
        object.__setattr__(self, "interfaces", x)

    @property
    def n(self) -> int:
        return self.interfaces.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.interfaces)

    @property
    def centers(self) -> np.ndarray:
        x = self.interfaces
        return 0.5 * (x[1:] + x[:-1])

    @property
    def dx_max(self) -> float:
        return float(self.widths.max())

    @property
    def dx_min(self) -> float:
        return float(self.widths.min())

    @property
    def a(self) -> float:
        return float(self.interfaces[0])

    @property
    def b(self) -> float:
        return float(self.interfaces[-1])

    @property
    def length(self) -> float:
        return self.b - self.a

    def is_uniform(self, rtol: float = 1e-12) -> bool:
        w = self.widths
        return bool(np.all(np.abs(w - w.mean()) <= rtol * w.mean()))

    def mapped(self, shift: float, scale: float) -> "Mesh":
        """Image of the mesh under ``x -> shift + scale * x`` (``scale > 0``)."""
        if scale <= 0:
            raise InvalidRangeError("scale must be positive")
        return Mesh(shift + scale * self.interfaces)


def build_uniform_mesh(a: float, b: float, n: int) -> Mesh:
    """Uniform partition of ``[a, b]`` into ``n`` cells."""
    if not (a < b) or n < 1 or int(n) != n:
        raise InvalidRangeError(f"invalid mesh range a={a}, b={b}, n={n}")
    n = int(n)
    h = (b - a) / n
    x = a + h * np.arange(n + 1)
    x[-1] = b
    return Mesh(x)


def random_interfaces(a: float, b: float, n: int, rng: np.random.Generator, ratio: float = 2.0, size=None):
    """Interface arrays of random partitions of ``[a, b]``.

    All cell widths lie within a factor ``ratio`` of each other, so
    neighbouring ratios (periodic wrap included) are in ``[1/ratio, ratio]``.
    ``size`` adds a leading batch axis.
    """
    if not (a < b) or n < 1:
        raise InvalidRangeError(f"invalid mesh range a={a}, b={b}, n={n}")
    shape = (n,) if size is None else (size, n)
    w = rng.uniform(1.0, ratio, size=shape)
    x = np.cumsum(w, axis=-1)
    x = np.concatenate([np.zeros(shape[:-1] + (1,)), x], axis=-1)
    x = a + (b - a) * x / x[..., -1:]
    x[..., -1] = b
    return x


def random_mesh(a: float, b: float, n: int, rng: np.random.Generator, ratio: float = 2.0) -> Mesh:
    return Mesh(random_interfaces(a, b, n, rng, ratio))


def extend_interfaces(interfaces: np.ndarray, ghost: int, periodic: bool) -> np.ndarray:
    """Interface coordinates padded with ``ghost`` cells on each side.

    Works on the last axis, so ``interfaces`` may carry leading batch axes.
    """
    x = np.asarray(interfaces, dtype=np.float64)
    n = x.shape[-1] - 1
    if ghost == 0:
        return x
    m = np.arange(-ghost, n + ghost + 1)
    if periodic:
        q, r = np.divmod(m, n)
        length = x[..., -1:] - x[..., :1]
        return x[..., r] + q * length
    left = x[..., :1] + (x[..., 1:2] - x[..., :1]) * m[:ghost]
    right = x[..., -1:] + (x[..., -1:] - x[..., -2:-1]) * (m[-ghost:] - n)
    return np.concatenate([left, x, right], axis=-1)


def extend_values(values: np.ndarray, ghost: int, periodic: bool) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    n = v.shape[-1]
    idx = np.arange(-ghost, n + ghost)
    idx = np.mod(idx, n) if periodic else np.clip(idx, 0, n - 1)
    return v[..., idx]


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values attached to a mesh: cell averages or point values at cell centers."""

    mesh: Mesh
    values: np.ndarray
    kind: str = AVERAGE
    boundary: str = PERIODIC

    def __post_init__(self):
        v = _frozen(self.values)
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.boundary not in _BOUNDARIES:
            raise ValueError(f"unknown boundary policy {self.boundary!r}")
        if v.shape != (self.mesh.n,):
            raise InvalidRangeError(f"expected {self.mesh.n} values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.mesh.n

    @property
    def periodic(self) -> bool:
        return self.boundary == PERIODIC

    @property
    def is_average(self) -> bool:
        return self.kind == AVERAGE

    def value(self, i: int) -> float:
        """Value at any integer index, ghosts resolved by the boundary policy."""
        n = self.n
        j = i % n if self.periodic else min(max(i, 0), n - 1)
        return float(self.values[j])

    def nodes(self) -> np.ndarray:
        """Positions the values are attached to."""
        return self.mesh.centers

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.mesh, values, self.kind, self.boundary)

    def total_variation(self) -> float:
        v = self.values
        if self.periodic:
            return float(np.abs(np.diff(np.append(v, v[0]))).sum())
        return float(np.abs(np.diff(v)).sum())

    def to_csv(self, path) -> None:
        write_grid_csv(path, self.nodes(), self.values)


@dataclass(frozen=True, eq=False)
class PrimitiveTrace:
    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))


def sample_averages(
    f: Callable[[np.ndarray], np.ndarray],
    mesh: Mesh,
    quadrature_degree: int = 9,
    *,
    breakpoints=(),
    boundary: str = PERIODIC,
) -> GridFunction:
    """Cell averages of ``f`` by Gauss-Legendre quadrature.

    The rule has ``ceil((quadrature_degree + 1) / 2)`` nodes per cell, so it is
    exact for polynomials up to ``quadrature_degree`` (default 5 nodes).
    Cells containing one of ``breakpoints`` are split there before
    integrating, which keeps averages of piecewise-smooth data exact.
    """
    npts = max(1, -(-(quadrature_degree + 1) // 2))
    xi, wi = np.polynomial.legendre.leggauss(npts)
    x = mesh.interfaces
    avg = np.empty(mesh.n)
    bps = np.sort(np.asarray(breakpoints, dtype=np.float64))
    for i in range(mesh.n):
        lo, hi = x[i], x[i + 1]
        edges = np.concatenate([[lo], bps[(bps > lo) & (bps < hi)], [hi]])
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            pts = 0.5 * (a + b) + 0.5 * (b - a) * xi
            total += 0.5 * (b - a) * np.dot(wi, np.asarray(f(pts), dtype=np.float64))
        avg[i] = total / (hi - lo)
    return GridFunction(mesh, avg, AVERAGE, boundary)


def sample_points(f: Callable[[np.ndarray], np.ndarray], mesh: Mesh, *, boundary: str = PERIODIC) -> GridFunction:
    return GridFunction(mesh, np.asarray(f(mesh.centers), dtype=np.float64), POINT, boundary)


def primitive_trace(u: GridFunction) -> PrimitiveTrace:
    """Primitive function at every interface, normalized to 0 at the left end."""
    if not u.is_average:
        raise SemanticsMismatchError("primitive_trace needs cell averages")
    V = np.concatenate([[0.0], np.cumsum(u.mesh.widths * u.values)])
    return PrimitiveTrace(u.mesh, V)


def write_grid_csv(path, x, values) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x_center", "value"])
        for xc, v in zip(x, values):
            w.writerow([f"{xc:.17g}", f"{v:.17g}"])


def read_grid_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]
