"""ENO stencil selection and reconstruction.

The work is done by :func:`eno_batch`, which handles a whole batch of data
vectors at once (leading axis) so that randomized verification suites and the
finite-volume solver can avoid per-cell Python loops. :func:`reconstruct`
wraps it for a single :class:`~enolab.mesh.GridFunction` and returns
per-cell polynomial objects.

Polynomials are stored as monomial coefficients in the local variable
``x - x_i`` (``x_i`` the cell center), lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from enolab.divdiff import DividedDifferenceTable, build_table, divided_difference_levels
from enolab.errors import NonuniformUnsupportedError, OrderUnsupportedError, SemanticsMismatchError
from enolab.mesh import GridFunction, extend_interfaces, extend_values

MAX_ORDER = 8


def _check_order(k: int) -> None:
    if int(k) != k or k < 1 or k > MAX_ORDER:
        raise OrderUnsupportedError(f"order k={k} not in [1, {MAX_ORDER}]")


def _take(a: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return np.take_along_axis(a, idx, axis=-1)


def _poly_from_roots(roots: np.ndarray) -> np.ndarray:
    """Monomial coefficients of prod_m (x - roots[..., m]), lowest first."""
    shape = roots.shape[:-1]
    c = np.zeros(shape + (roots.shape[-1] + 1,))
    c[..., 0] = 1.0
    for m in range(roots.shape[-1]):
        t = roots[..., m : m + 1]
        shifted = np.zeros_like(c)
        shifted[..., 1:] = c[..., :-1]
        c = shifted - t * c
    return c


def horner(coeffs: np.ndarray, x) -> np.ndarray:
    """Evaluate polynomials with coefficients on the last axis (lowest first)."""
    out = np.zeros(np.broadcast_shapes(coeffs.shape[:-1], np.shape(x)))
    for j in range(coeffs.shape[-1] - 1, -1, -1):
        out = out * x + coeffs[..., j]
    return out


class EnoBatch(NamedTuple):
    """Raw arrays produced by :func:`eno_batch`.

    Cell-indexed arrays cover cells ``-1..n`` (``n + 2`` entries, position
    ``j`` is cell ``j - 1``). Interface arrays cover ``x_{i+1/2}`` for
    ``i = -1..n-1`` (``n + 1`` entries). Stencil indices are cell indices.
    """

    k: int
    ghost: int
    levels: list
    nodes: np.ndarray
    history: np.ndarray
    coeffs: np.ndarray
    centers: np.ndarray
    widths: np.ndarray
    v_minus: np.ndarray
    v_plus: np.ndarray
    avg_jump: np.ndarray
    avg_mean: np.ndarray
    avg_left: np.ndarray
    avg_right: np.ndarray

    @property
    def stencil(self) -> np.ndarray:
        return self.history[..., -1]

    @property
    def recon_jump(self) -> np.ndarray:
        return self.v_plus - self.v_minus


def eno_batch(values, interfaces, k: int, periodic: bool = True, average: bool = True) -> EnoBatch:
    """ENO reconstruction of a batch of data vectors.

    ``values`` has shape ``(B, n)`` (or ``(n,)``); ``interfaces`` has shape
    ``(n + 1,)`` (shared mesh) or ``(B, n + 1)`` (one mesh per row).
    """
    _check_order(k)
    v = np.atleast_2d(np.asarray(values, dtype=np.float64))
    B, n = v.shape
    x = np.asarray(interfaces, dtype=np.float64)
    x = np.broadcast_to(x if x.ndim == 2 else x[None, :], (B, n + 1))
    g = k + 1

    ve = extend_values(v, g, periodic)
    xe = extend_interfaces(x, g, periodic)
    ce = 0.5 * (xe[:, 1:] + xe[:, :-1])
    nodes = xe if average else ce
    levels = divided_difference_levels(ve, nodes, k, average=average)

    # cells -1..n in extended indexing
    e = np.arange(g - 1, g + n + 1)
    M = e.size
    s = np.broadcast_to(e, (B, M)).copy()
    hist = np.empty((B, M, k), dtype=np.int64)
    hist[..., 0] = s
    for lvl in range(1, k):
        d = levels[lvl]
        left = np.abs(_take(d, s - 1))
        right = np.abs(_take(d, s))
        s = np.where(left < right, s - 1, s)
        hist[..., lvl] = s

    xc = ce[:, e]
    # Newton form in the local variable x - x_i: the term for level l uses
    # the nodes of the previous stencil s^{l-1} (s^0 = i).
    nf_extra = 0 if average else -1
    deg = k if average else k - 1
    P = np.zeros((B, M, deg + 1))
    prev = np.broadcast_to(e, (B, M))
    for lvl in range(1, k + 1):
        cur = hist[..., lvl - 1]
        coef = _take(levels[lvl - 1], cur)
        nf = lvl + nf_extra
        if nf > 0:
            idx = prev[..., None] + np.arange(nf)
            roots = np.take_along_axis(nodes[:, None, :], idx, axis=-1) - xc[..., None]
            prod = _poly_from_roots(roots)
        else:
            prod = np.ones((B, M, 1))
        P[..., : prod.shape[-1]] += coef[..., None] * prod
        prev = cur
    coeffs = P[..., 1:] * np.arange(1, deg + 1) if average else P

    w = np.diff(xe, axis=-1)[:, e]
    vm = horner(coeffs[:, :-1], 0.5 * w[:, :-1])
    vp = horner(coeffs[:, 1:], -0.5 * w[:, 1:])
    vb = ve[:, e]
    return EnoBatch(
        k=k,
        ghost=g,
        levels=levels,
        nodes=nodes,
        history=hist - g,
        coeffs=coeffs,
        centers=xc,
        widths=w,
        v_minus=vm,
        v_plus=vp,
        avg_jump=vb[:, 1:] - vb[:, :-1],
        avg_mean=0.5 * (vb[:, 1:] + vb[:, :-1]),
        avg_left=vb[:, :-1],
        avg_right=vb[:, 1:],
    )


def jump_terms(batch: EnoBatch):
    """Summands of the closed-form interface jump, per interface and candidate.

    Returns ``(s, dk, X, mask)`` with shape ``(B, n + 1, k)``: candidate start
    cells ``s = i - k + 1 .. i`` for interface ``x_{i+1/2}``, the level-``k``
    divided difference ``[v_s, ..., v_{s+k}]``, the geometric weight
    ``X_{i,s}``, and the mask ``s_i <= s < s_{i+1}`` of summands that count.
    Cell-average data only.
    """
    k, g = batch.k, batch.ghost
    z = batch.nodes
    B = z.shape[0]
    n1 = batch.v_minus.shape[-1]
    i = np.arange(-1, n1 - 1)
    s = i[:, None] - k + 1 + np.arange(k)[None, :]
    se = np.broadcast_to(s + g, (B, n1, k))
    st = batch.stencil
    lo = st[:, :-1, None]
    hi = st[:, 1:, None]
    mask = (s[None] >= lo) & (s[None] < hi)
    dk = np.take_along_axis(batch.levels[k][:, None, :], se, axis=-1)
    zt = lambda idx: np.take_along_axis(z[:, None, :], idx, axis=-1)  # noqa: E731
    X = zt(se + k + 1) - zt(se)
    xi = zt(np.broadcast_to((i + g + 1)[:, None], (B, n1, 1)))
    for m in range(k):
        factor = xi - zt(se + m + 1)
        X = X * np.where((i[:, None] - s) == m, 1.0, factor)
    return np.broadcast_to(s, (B, n1, k)), dk, X, mask


def jump_formula_batch(batch: EnoBatch) -> np.ndarray:
    _, dk, X, mask = jump_terms(batch)
    return np.where(mask, dk * X, 0.0).sum(axis=-1)


# {{{ single-grid-function API


@dataclass(frozen=True, eq=False)
class StencilSelection:
    """Stencil history of every cell; ``history[i, l-1]`` is ``s_i^l``.

    ``history`` covers cells ``0..n-1``; ``boundary_stencils`` holds the final
    stencils of the neighbouring cells ``-1`` and ``n``.
    """

    k: int
    history: np.ndarray
    boundary_stencils: tuple

    @property
    def stencils(self) -> np.ndarray:
        return self.history[:, -1]

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(self.history.shape[0]) - self.stencils

    def stencil(self, i: int) -> int:
        n = self.history.shape[0]
        if i == -1:
            return self.boundary_stencils[0]
        if i == n:
            return self.boundary_stencils[1]
        return int(self.history[i, -1])


@dataclass(frozen=True, eq=False)
class CellPolynomial:
    """Reconstruction polynomial of one cell.

    ``newton_coeffs[l-1]`` is the divided difference multiplying the level-``l``
    Newton term and ``newton_nodes[l-1]`` the nodes of that term.
    """

    i: int
    center: float
    interval: tuple
    coeffs: np.ndarray
    newton_coeffs: np.ndarray
    newton_nodes: tuple
    average: bool = True

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return horner(self.coeffs, np.asarray(x, dtype=np.float64) - self.center)

    def derivative(self, x):
        c = self.coeffs
        if c.size == 1:
            return np.zeros(np.shape(x))
        dc = c[1:] * np.arange(1, c.size)
        return horner(dc, np.asarray(x, dtype=np.float64) - self.center)

    def newton_eval(self, x):
        """Evaluate directly from the Newton form (no monomial conversion)."""
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros(x.shape)
        for c, nodes in zip(self.newton_coeffs, self.newton_nodes):
            if self.average:
                # derivative of prod_m (x - z_m)
                acc = np.zeros(x.shape)
                for skip in range(len(nodes)):
                    term = np.ones(x.shape)
                    for m, z in enumerate(nodes):
                        if m != skip:
                            term = term * (x - z)
                    acc = acc + term
            else:
                acc = np.ones(x.shape)
                for z in nodes:
                    acc = acc * (x - z)
            out = out + c * acc
        return out

    def average_over(self, a: float, b: float) -> float:
        """Exact mean of the polynomial over ``[a, b]``."""
        c = self.coeffs
        anti = np.concatenate([[0.0], c / np.arange(1, c.size + 1)])
        ta, tb = a - self.center, b - self.center
        return float((horner(anti, tb) - horner(anti, ta)) / (b - a))


@dataclass(frozen=True, eq=False)
class InterfaceTrace:
    """Interface values at ``x_{i+1/2}`` for ``i`` in ``index``.

    Periodic data report ``i = 0..n-1``; constant extension additionally
    reports the left boundary interface ``i = -1``.
    """

    index: np.ndarray
    v_minus: np.ndarray
    v_plus: np.ndarray
    recon_jump: np.ndarray
    avg_jump: np.ndarray
    avg_mean: np.ndarray
    avg_left: np.ndarray
    avg_right: np.ndarray

    def position(self, i: int) -> int:
        return int(np.searchsorted(self.index, i))


class Reconstruction(NamedTuple):
    selection: StencilSelection
    polynomials: list
    trace: InterfaceTrace
    table: DividedDifferenceTable


def select_stencils(table: DividedDifferenceTable, k: int) -> StencilSelection:
    """Stencil selection on a precomputed table (strict ``<``: ties keep)."""
    _check_order(k)
    if table.max_level < k - 1:
        raise OrderUnsupportedError(f"table has levels up to {table.max_level}, order {k} needs {k - 1}")
    n, g = table.mesh.n, table.ghost
    if g < k + 1:
        raise OrderUnsupportedError("table ghost window too small for this order")
    cells = np.arange(-1, n + 1)
    s = cells + g
    hist = [s.copy()]
    for lvl in range(1, k):
        d = table.levels[lvl]
        s = np.where(np.abs(d[s - 1]) < np.abs(d[s]), s - 1, s)
        hist.append(s)
    h = np.stack(hist, axis=-1) - g
    h.setflags(write=False)
    return StencilSelection(k, h[1:-1], (int(h[0, -1]), int(h[-1, -1])))


def reconstruct(u: GridFunction, k: int) -> Reconstruction:
    """ENO reconstruction of order ``k`` (polynomials of degree ``k - 1``)."""
    _check_order(k)
    table = build_table(u, k, ghost=k + 1)
    b = eno_batch(u.values, u.mesh.interfaces, k, periodic=u.periodic, average=u.is_average)
    n = u.n
    hist = b.history[0]
    selection = StencilSelection(k, hist[1:-1].copy(), (int(hist[0, -1]), int(hist[-1, -1])))
    g = b.ghost
    z = b.nodes[0]
    x = u.mesh.interfaces
    polys = []
    for j in range(1, n + 1):
        i = j - 1
        h = hist[j]
        prev = np.concatenate([[i], h[:-1]])
        ncoef = np.array([table.levels[lvl - 1][h[lvl - 1] + g] for lvl in range(1, k + 1)])
        nf = (lambda lvl: lvl) if u.is_average else (lambda lvl: lvl - 1)
        nodes = tuple(tuple(float(z[prev[lvl - 1] + g + m]) for m in range(nf(lvl))) for lvl in range(1, k + 1))
        coeffs = b.coeffs[0, j].copy()
        coeffs.setflags(write=False)
        polys.append(
            CellPolynomial(i, float(b.centers[0, j]), (float(x[i]), float(x[i + 1])), coeffs, ncoef, nodes, u.is_average)
        )
    sl = slice(1, None) if u.periodic else slice(None)
    idx = np.arange(-1, n)[sl]
    arrs = [a[0, sl].copy() for a in (b.v_minus, b.v_plus, b.recon_jump, b.avg_jump, b.avg_mean, b.avg_left, b.avg_right)]
    for a in arrs:
        a.setflags(write=False)
    trace = InterfaceTrace(idx, *arrs)
    return Reconstruction(selection, polys, trace, table)


def jump_formula(table: DividedDifferenceTable, selection: StencilSelection, interface: int) -> float:
    """Interface jump at ``x_{interface+1/2}`` from the level-``k`` divided
    differences alone. Zero when both neighbours share a stencil."""
    if table.kind != "average":
        raise SemanticsMismatchError("the jump formula is stated for cell averages")
    k = selection.k
    i = interface
    lo, hi = selection.stencil(i), selection.stencil(i + 1)
    g = table.ghost
    z = table.nodes
    dk = table.levels[k]
    total = 0.0
    for s in range(lo, hi):
        X = z[s + k + 1 + g] - z[s + g]
        for m in range(k):
            if m != i - s:
                X *= z[i + 1 + g] - z[s + m + 1 + g]
        total += dk[s + g] * X
    return float(total)


def eno_limiter(theta):
    """Slope limiter equivalent to second-order ENO."""
    theta = np.asarray(theta, dtype=np.float64)
    return np.where(np.abs(theta) < 1.0, theta, 1.0)


def limiter_form(u: GridFunction) -> np.ndarray:
    """Per-cell slopes ``dp_i/dx`` of second-order ENO in slope-limited form.

    Uniform meshes only. Where the forward jump vanishes the ratio is not
    formed: the stencil selection keeps the forward pair, whose slope is 0.
    """
    if not u.is_average:
        raise SemanticsMismatchError("limiter form is defined for cell averages")
    if not u.mesh.is_uniform():
        raise NonuniformUnsupportedError("limiter form needs a uniform mesh")
    v = extend_values(u.values, 1, u.periodic)
    back = v[1:-1] - v[:-2]
    fwd = v[2:] - v[1:-1]
    h = u.mesh.widths[0]
    zero = fwd == 0.0
    theta = np.divide(back, fwd, out=np.zeros_like(back), where=~zero)
    return np.where(zero, 0.0, eno_limiter(theta) * fwd) / h


# }}}
