"""Checkers for the stability properties of ENO reconstruction.

Every checker returns a :class:`PropertyReport`. The randomized suites work on
batches of random cell-average vectors through :func:`enolab.eno.eno_batch`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from enolab.eno import eno_batch, horner, jump_terms, reconstruct
from enolab.errors import (
    DegenerateInputError,
    InvalidRangeError,
    MeshTooSmallError,
    NonuniformUnsupportedError,
)
from enolab.mesh import CONSTANT, PERIODIC, GridFunction, build_uniform_mesh, random_interfaces, sample_averages

# Sharp upper bounds on recon_jump / avg_jump for a uniform mesh, k = 1..6.
UPPER_BOUNDS = {
    1: Fraction(1),
    2: Fraction(2),
    3: Fraction(10, 3),
    4: Fraction(16, 3),
    5: Fraction(128, 15),
    6: Fraction(208, 15),
}

MAX_RECORDS = 100


@dataclass
class PropertyReport:
    """Outcome of one property check.

    ``violations`` keeps at most ``MAX_RECORDS`` entries; ``violation_count``
    counts all of them.
    """

    name: str
    trials: int = 0
    violations: list = field(default_factory=list)
    violation_count: int = 0
    max_stat: float = float("nan")
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def record(self, **violation) -> None:
        self.violation_count += 1
        if len(self.violations) < MAX_RECORDS:
            self.violations.append(violation)

    def update_max(self, value: float) -> None:
        if np.isfinite(value) and not (value <= self.max_stat):
            self.max_stat = float(value)

    def merge(self, other: "PropertyReport") -> "PropertyReport":
        self.trials += other.trials
        self.violation_count += other.violation_count
        room = MAX_RECORDS - len(self.violations)
        self.violations.extend(other.violations[: max(room, 0)])
        self.update_max(other.max_stat)
        return self

    def summary_row(self) -> dict:
        return {
            "property": self.name,
            "trials": self.trials,
            "violations": self.violation_count,
            "max_stat": f"{self.max_stat:.17g}",
            "pass": int(self.passed),
        }

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: trials={self.trials} violations={self.violation_count} max={self.max_stat:.6g}"


def default_zero_tol(values) -> float:
    return 1e-12 * (float(np.max(np.abs(values), initial=0.0)) + 1.0)


# {{{ batch helpers


def _record_rows(report, bad, values, interfaces, lhs, rhs, first=0):
    """Record violations; column ``c`` of ``bad`` is interface ``x_{c+first+1/2}``."""
    rows, cols = np.nonzero(bad)
    for r, c in zip(rows[:MAX_RECORDS], cols[:MAX_RECORDS]):
        x = interfaces if interfaces.ndim == 1 else interfaces[r]
        report.violations.append(
            dict(values=values[r].tolist(), interfaces=x.tolist(), interface=int(c) + first,
                 lhs=float(lhs[r, c]), rhs=float(rhs[r, c]))
        )
    report.violations = report.violations[:MAX_RECORDS]
    report.violation_count += int(bad.sum())


def _interface_window(periodic: bool, n: int) -> slice:
    # interface arrays from eno_batch cover x_{i+1/2}, i = -1..n-1
    return slice(1, None) if periodic else slice(None)


def sign_violations(batch, zero_tol, k: int):
    """Boolean mask of interfaces violating the sign trichotomy."""
    aj, rj = batch.avg_jump, batch.recon_jump
    tol = np.asarray(zero_tol)[..., None] if np.ndim(zero_tol) else zero_tol
    pos = aj > tol
    neg = aj < -tol
    zer = ~(pos | neg)
    return (pos & (rj < -tol)) | (neg & (rj > tol)) | (zer & (np.abs(rj) > k * tol))


def jump_ratio(batch) -> np.ndarray:
    aj = batch.avg_jump
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(aj != 0, batch.recon_jump / aj, np.nan)


# }}}


# {{{ sign property, upper bound, jump formula


def check_sign_property(u: GridFunction, k: int, zero_tol: float | None = None) -> PropertyReport:
    tol = default_zero_tol(u.values) if zero_tol is None else zero_tol
    b = eno_batch(u.values, u.mesh.interfaces, k, periodic=u.periodic, average=u.is_average)
    w = _interface_window(u.periodic, u.n)
    rep = PropertyReport(f"sign_k{k}", trials=1)
    aj, rj = b.avg_jump[:, w], b.recon_jump[:, w]
    bad = sign_violations(b, tol, k)[:, w]
    _record_rows(rep, bad, np.atleast_2d(u.values), u.mesh.interfaces, aj, rj, first=w.start - 1 if w.start else -1)
    # largest amount by which a product of jumps goes negative
    rep.max_stat = float(max(-(aj * rj).min(), 0.0)) if aj.size else 0.0
    return rep


def check_upper_bound(u: GridFunction, k: int, compare_table: bool = True, rtol: float = 1e-10) -> PropertyReport:
    """Largest ``recon_jump / avg_jump`` over interfaces with ``avg_jump != 0``.

    On uniform meshes the ratio is compared with the sharp constant for
    ``k <= 6``; off uniform meshes only the maximum is recorded.
    """
    uniform = u.mesh.is_uniform()
    if compare_table and not uniform:
        raise NonuniformUnsupportedError("tabulated bounds hold for uniform meshes only")
    b = eno_batch(u.values, u.mesh.interfaces, k, periodic=u.periodic)
    w = _interface_window(u.periodic, u.n)
    ratio = jump_ratio(b)[:, w]
    rep = PropertyReport(f"upper_bound_k{k}", trials=1)
    rep.max_stat = float(np.nanmax(ratio)) if np.any(np.isfinite(ratio)) else float("nan")
    if compare_table and k in UPPER_BOUNDS:
        bound = float(UPPER_BOUNDS[k])
        bad = np.nan_to_num(ratio, nan=0.0) > bound * (1 + rtol)
        _record_rows(rep, bad, np.atleast_2d(u.values), u.mesh.interfaces, ratio, np.full_like(ratio, bound),
                     first=0 if u.periodic else -1)
        rep.details["bound"] = bound
    return rep


def random_suite(
    k: int,
    trials: int,
    n: int = 32,
    seed: int = 0,
    mesh: str = "uniform",
    batch_size: int = 2000,
    rtol_jump: float = 1e-9,
    atol_jump: float = 1e-12,
) -> dict:
    """Sign property, upper bound, jump formula and per-term signs on random data.

    Cell averages are uniform on ``[-1, 1]``, periodic on ``[0, 1]``.
    ``mesh="random"`` draws a fresh mesh per trial with all widths within a
    factor two of each other.
    """
    reports = {
        "sign": PropertyReport(f"sign_k{k}_{mesh}"),
        "upper_bound": PropertyReport(f"upper_bound_k{k}_{mesh}"),
        "jump_formula": PropertyReport(f"jump_formula_k{k}_{mesh}"),
        "term_sign": PropertyReport(f"term_sign_k{k}_{mesh}"),
        "x_sign": PropertyReport(f"x_sign_k{k}_{mesh}"),
    }
    bound = float(UPPER_BOUNDS[k]) if (mesh == "uniform" and k in UPPER_BOUNDS) else None
    done = 0
    chunk = 0
    while done < trials:
        B = min(batch_size, trials - done)
        rng = np.random.default_rng([seed, chunk])
        v = rng.uniform(-1.0, 1.0, size=(B, n))
        if mesh == "uniform":
            x = build_uniform_mesh(0.0, 1.0, n).interfaces
        else:
            x = random_interfaces(0.0, 1.0, n, rng, size=B)
        b = eno_batch(v, x, k, periodic=True)
        w = slice(1, None)
        tol = 1e-12 * (np.abs(v).max(axis=1) + 1.0)
        aj, rj = b.avg_jump[:, w], b.recon_jump[:, w]

        sub = b._replace(v_minus=b.v_minus[:, w], v_plus=b.v_plus[:, w], avg_jump=aj)
        bad = sign_violations(sub, tol, k)
        _record_rows(reports["sign"], bad, v, x, aj, rj)
        reports["sign"].update_max(float(max(-(aj * rj).min(), 0.0)))

        ratio = jump_ratio(sub)
        reports["upper_bound"].update_max(float(np.nanmax(ratio)))
        if bound is not None:
            bad = np.nan_to_num(ratio, nan=0.0) > bound * (1 + 1e-10)
            _record_rows(reports["upper_bound"], bad, v, x, ratio, np.full_like(ratio, bound))

        s, dk, X, mask = jump_terms(b)
        jf = np.where(mask, dk * X, 0.0).sum(axis=-1)[:, w]
        err = np.abs(jf - rj)
        allowed = np.maximum(rtol_jump * np.abs(rj), atol_jump)
        _record_rows(reports["jump_formula"], err > allowed, v, x, jf, rj)
        reports["jump_formula"].update_max(float(np.max(err / np.maximum(np.abs(rj), atol_jump / rtol_jump))))

        # each counted summand carries the sign of the average jump
        terms = (dk * X)[:, w]
        m = mask[:, w]
        sgn_bad = m & (aj[..., None] * terms < -(tol[:, None, None] * np.abs(terms).max(initial=1.0)))
        _record_rows(reports["term_sign"], sgn_bad.any(axis=-1), v, x, aj, rj)
        # sign of X_{i,s} is (-1)^(s+k+1+i)
        i = np.arange(-1, n)[w]
        expect = np.where((s[:, w] + k + 1 + i[None, :, None]) % 2 == 0, 1.0, -1.0)
        xs_bad = np.sign(X[:, w]) != expect
        _record_rows(reports["x_sign"], xs_bad.any(axis=-1), v, x, X[:, w, 0], expect[..., 0])

        for r in reports.values():
            r.trials += B
        done += B
        chunk += 1
    if bound is not None:
        reports["upper_bound"].details["bound"] = bound
    return reports


# }}}


# {{{ worst case


@dataclass(frozen=True, eq=False)
class WorstCaseFamily:
    """Data attaining the sharp jump bound as ``eps -> 0``.

    ``index[j]`` is the pattern index carried by mesh cell ``j``: 0 for odd
    indices, 1 for even indices ``<= 4`` and ``1 - eps`` for even indices
    ``> 4``. The pattern is laid out right-to-left (decreasing index), the
    orientation in which the strict tie rule of the stencil selection lets
    the bound be attained.
    """

    k: int
    eps: float
    index: np.ndarray
    values: np.ndarray

    @staticmethod
    def pattern(i, eps: float) -> np.ndarray:
        i = np.asarray(i)
        return np.where(i % 2 != 0, 0.0, np.where(i <= 4, 1.0, 1.0 - eps))


def worst_case(k: int, eps: float, half_width: int | None = None):
    """Build the worst-case family and return ``(family, max interface ratio)``.

    Only interfaces whose whole dependency window lies inside the generated
    cells are inspected, so the boundary treatment cannot affect the result.
    """
    if eps <= 0:
        raise InvalidRangeError("eps must be positive")
    need = 2 * k + 2
    L = 3 * k + 4 if half_width is None else half_width
    if L < need:
        raise MeshTooSmallError(f"half_width={L} too small for k={k}; need >= {need}")
    idx = np.arange(4 + L, 4 - L - 1, -1)
    vals = WorstCaseFamily.pattern(idx, eps)
    n = idx.size
    b = eno_batch(vals, np.arange(n + 1, dtype=np.float64), k, periodic=False)
    iface = np.arange(-1, n)
    ok = (iface >= k + 1) & (iface <= n - k - 3)
    ratio = jump_ratio(b)[0][ok]
    return WorstCaseFamily(k, eps, idx, vals), float(np.nanmax(ratio))


# }}}


# {{{ k = 2 conjecture chain


def _conjecture_chain_arrays(v: np.ndarray, h: float = 1.0):
    """Per-vector quantities of the k=2 chain on uniform periodic data."""
    B, n = v.shape
    x = h * np.arange(n + 1, dtype=np.float64)
    b = eno_batch(v, x, 2, periodic=True)
    d1 = np.roll(v, -1, axis=1) - v  # d1[:, j] = v_{j+1} - v_j
    d2 = np.roll(d1, -1, axis=1) - d1
    st = b.stencil  # cells -1..n
    # iota from the selection: j in [s_i, s_{i+1}) -> iota_j = i, i = 0..n-1
    iota = np.full((B, n), -1, dtype=np.int64)
    lo, hi = st[:, 1:-1], st[:, 2:]
    cells = np.broadcast_to(np.arange(n), (B, n))
    rows = np.broadcast_to(np.arange(B)[:, None], (B, n))
    for off in range(3):
        j = lo + off
        ok = j < hi
        iota[rows[ok], np.mod(j[ok], n)] = cells[ok]
    a_next = np.abs(np.roll(d1, -1, axis=1))
    a_cur = np.abs(d1)
    jj = np.arange(n)
    formula = np.where(a_cur > a_next, jj, jj + 1) % n
    tie = a_cur == a_next
    d1_iota = np.take_along_axis(np.abs(d1), np.mod(iota, n), axis=1)

    s, dk, X, mask = jump_terms(b)
    w = slice(1, None)
    rj = b.recon_jump[:, w]
    # |term| = a_{i,s} |Delta^2 v_s| with a_{i,s} = |X_{i,s}| / (6 h^2)
    a_coef = np.where(mask, np.abs(X) / (6.0 * h * h), np.inf)[:, w]
    a_min = float(a_coef.min()) if np.isfinite(a_coef).any() else 0.5
    window = np.zeros((B, n))
    for off in range(3):
        j = lo + off
        ok = j < hi
        window += np.where(ok, np.take_along_axis(np.abs(d2), np.mod(j, n), axis=1), 0.0)
    return dict(
        iota=iota, formula=formula, tie=tie, d1=d1, d2=d2, d1_iota=d1_iota,
        lhs_c=np.sum(np.abs(d1) ** 3, axis=1),
        rhs_c=2.0 * np.abs(v).max(axis=1) * np.sum(np.abs(d2) * d1_iota, axis=1),
        lhs_d=np.sum(d1 * rj, axis=1),
        window=np.sum(np.abs(d1) * window, axis=1),
        a=a_min,
    )


def _conjecture_chain_report(v: np.ndarray, reports: dict, rtol: float = 1e-12) -> None:
    q = _conjecture_chain_arrays(v)
    scale = np.abs(v).max(axis=1) + 1.0
    # (a) the selection's iota agrees with the closed form; on exact ties the
    # strict rule keeps the stencil, giving iota_j = j.
    jj = np.arange(v.shape[1])
    ok_a = (q["iota"] == q["formula"]) | (q["tie"] & (q["iota"] == jj))
    bad_a = ~ok_a
    # (b)
    mx = np.maximum(np.abs(q["d1"]), np.abs(np.roll(q["d1"], -1, axis=1)))
    bad_b = q["d1_iota"] != mx
    # (c)
    slack_c = rtol * (q["rhs_c"] + scale**3)
    bad_c = q["lhs_c"] > q["rhs_c"] + slack_c
    # (d)
    rhs_d = q["a"] * q["window"]
    bad_d = q["lhs_d"] < rhs_d - rtol * (np.abs(rhs_d) + scale**3)
    for key, bad in (("a", bad_a), ("b", bad_b)):
        rep = reports[key]
        rep.trials += v.shape[0]
        for r in np.nonzero(bad.any(axis=1))[0]:
            rep.record(values=v[r].tolist(), index=int(np.argmax(bad[r])))
    for key, bad, lhs, rhs in (("c", bad_c, q["lhs_c"], q["rhs_c"]), ("d", bad_d, q["lhs_d"], rhs_d)):
        rep = reports[key]
        rep.trials += v.shape[0]
        for r in np.nonzero(bad)[0]:
            rep.record(values=v[r].tolist(), lhs=float(lhs[r]), rhs=float(rhs[r]))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(rhs > 0, lhs / rhs, np.nan) if key == "c" else np.where(lhs > 0, rhs / lhs, np.nan)
        if np.any(np.isfinite(ratio)):
            rep.update_max(float(np.nanmax(ratio)))
    reports["a"].details["ties"] = reports["a"].details.get("ties", 0) + int(q["tie"].sum())
    reports["d"].details["a"] = min(reports["d"].details.get("a", np.inf), q["a"])


def _chain_reports() -> dict:
    return {
        "a": PropertyReport("k2_chain_a_iota"),
        "b": PropertyReport("k2_chain_b_max"),
        "c": PropertyReport("k2_chain_c_cubic"),
        "d": PropertyReport("k2_chain_d_diffusion"),
    }


def conjecture_chain_k2(u: GridFunction) -> PropertyReport:
    """Check the steps of the k=2 proof on one uniform, periodic vector.

    The returned report aggregates (a)-(d); the individual reports are in
    ``details["steps"]``.
    """
    if not u.mesh.is_uniform():
        raise NonuniformUnsupportedError("the k=2 chain is stated on uniform meshes")
    if not u.periodic:
        raise InvalidRangeError("the k=2 chain uses periodic sums")
    reports = _chain_reports()
    _conjecture_chain_report(np.atleast_2d(u.values), reports)
    out = PropertyReport("k2_chain", trials=1)
    for r in reports.values():
        out.violation_count += r.violation_count
        out.violations.extend(r.violations)
    out.max_stat = reports["c"].max_stat
    out.details["steps"] = reports
    return out


def conjecture_chain_suite(trials: int, n: int = 64, seed: int = 0, batch_size: int = 2000) -> dict:
    reports = _chain_reports()
    done = chunk = 0
    while done < trials:
        B = min(batch_size, trials - done)
        rng = np.random.default_rng([seed, chunk])
        _conjecture_chain_report(rng.uniform(-1.0, 1.0, size=(B, n)), reports)
        done += B
        chunk += 1
    return reports


def conjecture_ratio(v: np.ndarray, k: int, x=None) -> np.ndarray:
    """``sum |[v]|^{k+1} / (||v||^{k-1} sum [v][[v]])`` per row (periodic data).

    Rows whose denominator is ``<= 1e-14`` give ``nan``.
    """
    v = np.atleast_2d(v)
    n = v.shape[1]
    x = np.arange(n + 1, dtype=np.float64) if x is None else x
    b = eno_batch(v, x, k, periodic=True)
    aj, rj = b.avg_jump[:, 1:], b.recon_jump[:, 1:]
    num = np.sum(np.abs(aj) ** (k + 1), axis=1)
    den = np.abs(v).max(axis=1) ** (k - 1) * np.sum(aj * rj, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 1e-14, num / den, np.nan)


def conjecture_probe(k: int, trials: int, n: int = 32, seed: int = 0, batch_size: int = 2000):
    """Empirical smallest admissible constant for the TV conjecture.

    Returns ``(max ratio, attaining vector)``. No pass/fail: the inequality
    is only proven for ``k = 2``.
    """
    if k < 1:
        raise InvalidRangeError("k must be >= 1")
    best, worst = -np.inf, None
    done = chunk = 0
    while done < trials:
        B = min(batch_size, trials - done)
        rng = np.random.default_rng([seed, chunk])
        v = rng.uniform(-1.0, 1.0, size=(B, n))
        R = conjecture_ratio(v, k)
        if np.any(np.isfinite(R)):
            j = int(np.nanargmax(R))
            if R[j] > best:
                best, worst = float(R[j]), v[j].copy()
        done += B
        chunk += 1
    return best, worst


# }}}


# {{{ mesh-dependent properties


def _chebyshev(a: float, b: float, m: int) -> np.ndarray:
    t = np.cos((2 * np.arange(m) + 1) * np.pi / (2 * m))
    return 0.5 * (a + b) + 0.5 * (b - a) * t


def shocked_cell_is_monotone(poly, direction: float, k: int) -> bool:
    """Strict monotonicity of one cell polynomial in ``direction`` (+1/-1).

    The derivative must be positive (times ``direction``) at ``4k`` Chebyshev
    points and must not change sign on a 1000-point grid.
    """
    a, b = poly.interval
    if poly.degree == 0:
        return True
    dc = direction * poly.derivative(_chebyshev(a, b, 4 * k))
    if np.any(dc <= 0):
        return False
    grid = direction * poly.derivative(np.linspace(a, b, 1000))
    return bool(np.all(grid >= 0))


def check_shock_monotonicity(
    w: Callable,
    shock_location: float,
    shock_size: float,
    k: int,
    ns: Sequence[int],
    domain: tuple = (-1.0, 1.0),
    require_from: int | None = None,
) -> PropertyReport:
    """Monotonicity of the reconstruction in the cell containing a jump.

    Samples ``w + shock_size * H(x - shock_location)`` on uniform meshes with
    ``n`` in ``ns`` (constant extension at the ends). ``details["n0"]`` is the
    coarsest ``n`` from which every finer mesh tested is monotone. Meshes with
    ``n >= require_from`` (default: the finest) must be monotone.
    """
    if shock_size == 0:
        raise DegenerateInputError("shock_size must be nonzero")
    ns = sorted(ns)
    req = ns[-1] if require_from is None else require_from
    rep = PropertyReport(f"shock_monotonicity_k{k}")
    direction = math.copysign(1.0, shock_size)
    f = lambda x: w(x) + shock_size * (x > shock_location)  # noqa: E731
    status = {}
    for n in ns:
        mesh = build_uniform_mesh(domain[0], domain[1], n)
        xi = mesh.interfaces
        if np.any(np.isclose(xi, shock_location, rtol=0.0, atol=1e-12 * mesh.length)):
            raise DegenerateInputError(f"shock at {shock_location} lies on an interface for n={n}")
        cell = int(np.searchsorted(xi, shock_location) - 1)
        u = sample_averages(f, mesh, breakpoints=(shock_location,), boundary=CONSTANT)
        poly = reconstruct(u, k).polynomials[cell]
        ok = shocked_cell_is_monotone(poly, direction, k)
        status[n] = ok
        rep.trials += 1
        if not ok and n >= req:
            rep.record(n=n, cell=cell)
    n0 = None
    for n in reversed(ns):
        if not status[n]:
            break
        n0 = n
    rep.details["status"] = status
    rep.details["n0"] = n0
    rep.max_stat = float("nan") if n0 is None else float(n0)
    return rep


@dataclass(frozen=True)
class PiecewiseSmooth:
    """Function with finitely many jumps and closed-form total variation."""

    f: Callable
    breakpoints: tuple
    domain: tuple
    total_variation: float
    periodic: bool = True


def sine_wave() -> PiecewiseSmooth:
    return PiecewiseSmooth(np.sin, (), (0.0, 2 * np.pi), 4.0)


def box_plus_sine(left: float = 1.0, right: float = 4.0, height: float = 1.0) -> PiecewiseSmooth:
    """``sin(x)`` plus a box of ``height`` on ``(left, right)``, periodic on ``[0, 2pi)``."""
    f = lambda x: np.sin(x) + height * ((x > left) & (x < right))  # noqa: E731
    return PiecewiseSmooth(f, (left, right), (0.0, 2 * np.pi), 4.0 + 2 * abs(height))


def unit_step(x0: float = 0.1234) -> PiecewiseSmooth:
    f = lambda x: np.where(x > x0, 1.0, 0.0)  # noqa: E731
    return PiecewiseSmooth(f, (x0,), (-1.0, 1.0), 1.0, periodic=False)


def constant_function(c: float = 0.7) -> PiecewiseSmooth:
    return PiecewiseSmooth(lambda x: np.full(np.shape(x), c), (), (0.0, 1.0), 0.0)


def polynomial_total_variation(coeffs: np.ndarray, a: float, b: float, center: float) -> float:
    """Exact variation of a polynomial on ``[a, b]`` via its critical points."""
    pts = [a, b]
    if coeffs.size > 2:
        dc = coeffs[1:] * np.arange(1, coeffs.size)
        while dc.size > 1 and dc[-1] == 0:
            dc = dc[:-1]
        if dc.size > 1:
            r = np.roots(dc[::-1])
            r = r[np.abs(r.imag) <= 1e-12 * (1 + np.abs(r.real))].real + center
            pts.extend(r[(r > a) & (r < b)])
    pts = np.sort(np.asarray(pts))
    return float(np.abs(np.diff(horner(coeffs, pts - center))).sum())


def reconstruction_total_variation(u: GridFunction, k: int) -> float:
    """Total variation of the piecewise polynomial, interface jumps included."""
    r = reconstruct(u, k)
    tv = sum(polynomial_total_variation(p.coeffs, *p.interval, p.center) for p in r.polynomials)
    jumps = r.trace.recon_jump if u.periodic else r.trace.recon_jump[1:]
    return tv + float(np.abs(jumps).sum())


def fit_order(h: Sequence[float], err: Sequence[float]) -> float:
    """Least-squares slope of ``log err`` against ``log h``."""
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


def check_eno_tv(v: PiecewiseSmooth, k: int, ns: Sequence[int], floor: float = 1e-11) -> PropertyReport:
    """``TV(p) - TV(v)`` against ``dx^k`` over a mesh sequence.

    Passes when the fitted decay order of ``|TV(p) - TV(v)|`` is at least
    ``k - 0.5``; values below ``floor`` are roundoff and left out of the fit
    (if fewer than two remain the excess is considered zero).
    ``max_stat`` is ``max excess / dx^k``.
    """
    rep = PropertyReport(f"eno_tv_k{k}")
    boundary = PERIODIC if v.periodic else CONSTANT
    hs, ex = [], []
    for n in ns:
        mesh = build_uniform_mesh(v.domain[0], v.domain[1], n)
        u = sample_averages(v.f, mesh, breakpoints=v.breakpoints, boundary=boundary)
        hs.append(mesh.dx_max)
        ex.append(reconstruction_total_variation(u, k) - v.total_variation)
        rep.trials += 1
    hs, ex = np.array(hs), np.array(ex)
    rep.details.update(dx=hs.tolist(), excess=ex.tolist())
    rep.max_stat = float(np.max(ex / hs**k))
    keep = np.abs(ex) > floor
    if keep.sum() >= 2:
        order = fit_order(hs[keep], np.abs(ex[keep]))
        rep.details["order"] = order
        if order < k - 0.5:
            rep.record(order=order, required=k - 0.5)
    else:
        rep.details["order"] = float("inf")
    return rep


# }}}


def check_sweby(phi: Callable, theta1, theta2, tol: float = 1e-12) -> PropertyReport:
    """``|phi(t1) - phi(t2)/t2| <= 2`` over the product grid ``theta1 x theta2``."""
    t1 = np.asarray(theta1, dtype=np.float64)
    t2 = np.asarray(theta2, dtype=np.float64)
    t2 = t2[t2 != 0]
    p1 = np.asarray(phi(t1), dtype=np.float64)
    q2 = np.asarray(phi(t2), dtype=np.float64) / t2
    rep = PropertyReport("sweby", trials=t1.size * t2.size)
    lhs = np.abs(p1[:, None] - q2[None, :])
    rep.max_stat = float(lhs.max()) if lhs.size else 0.0
    bad = lhs > 2.0 + tol
    rep.violation_count = int(bad.sum())
    for a, c in zip(*np.nonzero(bad)):
        if len(rep.violations) >= MAX_RECORDS:
            break
        rep.violations.append(dict(theta1=float(t1[a]), theta2=float(t2[c]), lhs=float(lhs[a, c]), rhs=2.0))
    return rep
