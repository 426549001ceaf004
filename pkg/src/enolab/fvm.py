"""Finite-volume solvers for scalar conservation laws ``u_t + f(u)_x = 0``.

The semi-discrete scheme is

    d/dt v_i = -(F_{i+1/2} - F_{i-1/2}) / dx_i,

with interface fluxes built either from a two-point monotone flux applied to
reconstructed traces ``F(v^-_{i+1/2}, v^+_{i+1/2})`` or from the entropy
stable form ``F = F*(v_i, v_{i+1}) - c [[v]]`` (TECNO), where ``F*`` is
entropy conservative for the square entropy and ``[[v]]`` is the jump of the
ENO reconstruction. Time integration is explicit (forward Euler, SSP
Runge-Kutta of order 2 or 3, classical RK4).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from enolab.eno import MAX_ORDER, eno_batch
from enolab.errors import CFLViolationError, InvalidRangeError, UnknownKindError
from enolab.mesh import GridFunction

MONOTONE_FLUXES = ("godunov", "rusanov", "engquist-osher")
FLUXES = MONOTONE_FLUXES + ("tecno",)
INTEGRATORS = ("forward-euler", "ssp-rk2", "ssp-rk3", "rk4")
RECONSTRUCTIONS = ("eno", "none")
DIAGNOSTIC_COLUMNS = ("step", "t", "tv", "linf", "l2sq", "entropy_residual_max", "diffusion_sum")


@dataclass(frozen=True)
class FluxLaw:
    """A scalar flux together with the data the schemes need.

    ``critical_points`` lists every zero of ``df`` (sorted); Godunov and
    Engquist-Osher fluxes are exact given them. ``q`` is the entropy flux of
    the square entropy, ``q' = 2 u f'``. ``ec_flux`` is a closed-form entropy
    conservative two-point flux; when absent the arithmetic mean of ``f`` is
    used and the entropy identity no longer holds exactly.
    """

    name: str
    f: Callable
    df: Callable
    q: Optional[Callable] = None
    critical_points: tuple = ()
    ec_flux: Optional[Callable] = None

    def psi(self, u):
        """Entropy potential ``2 u f(u) - q(u)``."""
        if self.q is None:
            return np.full_like(np.asarray(u, dtype=np.float64), np.nan)
        return 2.0 * u * self.f(u) - self.q(u)

    def fd_check(self, u, h: float = 1e-5, tol: float = 1e-6) -> bool:
        u = np.asarray(u, dtype=np.float64)
        fd = (self.f(u + h) - self.f(u - h)) / (2 * h)
        return bool(np.all(np.abs(fd - self.df(u)) <= tol * np.maximum(1.0, np.abs(self.df(u)))))


def burgers() -> FluxLaw:
    return FluxLaw(
        name="burgers",
        f=lambda u: 0.5 * u * u,
        df=lambda u: u,
        q=lambda u: 2.0 * u**3 / 3.0,
        critical_points=(0.0,),
        ec_flux=lambda a, b: (a * a + a * b + b * b) / 6.0,
    )


def linear_advection(speed: float = 1.0) -> FluxLaw:
    s = float(speed)
    return FluxLaw(
        name="linear-advection",
        f=lambda u: s * u,
        df=lambda u: np.full_like(np.asarray(u, dtype=np.float64), s),
        q=lambda u: s * u * u,
        critical_points=(),
        ec_flux=lambda a, b: 0.5 * s * (a + b),
    )


LAWS = {"burgers": burgers, "linear-advection": linear_advection}


def _candidates(a, b, law):
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    pts = [lo] + [np.clip(c, lo, hi) for c in law.critical_points] + [hi]
    return pts


def monotone_flux(kind: str, a, b, law: FluxLaw):
    """Two-point monotone flux ``F(a, b)``; works elementwise on arrays."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if kind == "godunov":
        vals = np.stack([law.f(p) for p in _candidates(a, b, law)])
        return np.where(a <= b, vals.min(axis=0), vals.max(axis=0))
    if kind == "rusanov":
        speed = np.maximum(np.abs(law.df(a)), np.abs(law.df(b)))
        return 0.5 * (law.f(a) + law.f(b)) - 0.5 * speed * (b - a)
    if kind == "engquist-osher":
        # f' has one sign between consecutive critical points, so the
        # negative part of its integral is a sum of clipped increments.
        pts = _candidates(a, b, law)
        fv = [law.f(p) for p in pts]
        neg = sum(np.minimum(0.0, f1 - f0) for f0, f1 in zip(fv[:-1], fv[1:]))
        return law.f(a) + np.where(a <= b, neg, -neg)
    raise UnknownKindError(f"unknown monotone flux {kind!r}; expected one of {MONOTONE_FLUXES}")


def entropy_conservative_flux(a, b, law: FluxLaw):
    if law.ec_flux is not None:
        return law.ec_flux(a, b)
    return 0.5 * (law.f(a) + law.f(b))


def _tecno(a, b, recon_jump, law, c_min, c_max):
    fstar = entropy_conservative_flux(a, b, law)
    c = np.clip(0.5 * np.maximum(np.abs(law.df(a)), np.abs(law.df(b))), c_min, c_max)
    qstar = (a + b) * fstar - 0.5 * (law.psi(a) + law.psi(b))
    F = fstar - c * recon_jump
    Q = qstar - c * (a + b) * recon_jump
    return F, c, Q, qstar


def tecno_flux(trace, law: FluxLaw, c_min: float = 1e-3, c_max: float = 1e3):
    """Entropy stable flux at the interfaces of a trace.

    Returns ``(F, c, Q, Q*)`` as arrays over the trace's interfaces.
    """
    return _tecno(
        np.asarray(trace.avg_left), np.asarray(trace.avg_right), np.asarray(trace.recon_jump), law, c_min, c_max
    )


@dataclass(frozen=True)
class SchemeConfig:
    order: int = 2
    reconstruction: str = "eno"
    flux: str = "godunov"
    integrator: str = "forward-euler"
    cfl: Optional[float] = None
    c_min: float = 1e-3
    c_max: float = 1e3
    t_end: float = 1.0
    max_steps: Optional[int] = None
    snapshot_times: tuple = ()

    def __post_init__(self):
        if not 1 <= self.order <= MAX_ORDER:
            raise InvalidRangeError(f"order must lie in [1, {MAX_ORDER}]")
        if self.reconstruction not in RECONSTRUCTIONS:
            raise UnknownKindError(f"unknown reconstruction {self.reconstruction!r}")
        if self.flux not in FLUXES:
            raise UnknownKindError(f"unknown flux {self.flux!r}; expected one of {FLUXES}")
        if self.integrator not in INTEGRATORS:
            raise UnknownKindError(f"unknown integrator {self.integrator!r}; expected one of {INTEGRATORS}")
        if self.cfl is not None and not 0.0 < self.cfl <= 1.0:
            raise InvalidRangeError("CFL number must lie in (0, 1]")
        if not 0.0 < self.c_min <= self.c_max:
            raise InvalidRangeError("need 0 < c_min <= c_max")
        if not self.t_end >= 0.0:
            raise InvalidRangeError("t_end must be non-negative")
        if self.max_steps is not None and self.max_steps < 0:
            raise InvalidRangeError("max_steps must be non-negative")

    @property
    def k(self) -> int:
        return 1 if self.reconstruction == "none" else self.order

    @property
    def cfl_number(self) -> float:
        if self.cfl is not None:
            return self.cfl
        if self.k <= 2 and self.integrator in ("forward-euler", "ssp-rk2"):
            return 0.5
        return 0.4


class FluxData(dict):
    """Interface quantities from one right-hand-side evaluation."""


def _rhs(values, interfaces, periodic: bool, config: SchemeConfig, law: FluxLaw):
    """Batched right-hand side. ``values`` has shape ``(B, n)``.

    Interface arrays in the returned data cover ``x_{i-1/2}`` for
    ``i = 0..n`` (``n + 1`` entries).
    """
    v = np.atleast_2d(values)
    k = config.k
    b = eno_batch(v, interfaces, k, periodic=periodic)
    if config.flux == "tecno":
        F, c, Q, qstar = _tecno(b.avg_left, b.avg_right, b.recon_jump, law, config.c_min, config.c_max)
    else:
        F = monotone_flux(config.flux, b.v_minus, b.v_plus, law)
        c = Q = qstar = None
    if periodic:
        # both ends are the same interface; reuse one value so the update
        # telescopes exactly
        F = F.copy()
        F[:, 0] = F[:, -1]
        if Q is not None:
            Q = Q.copy()
            Q[:, 0] = Q[:, -1]
    w = np.diff(np.broadcast_to(interfaces, (v.shape[0], v.shape[1] + 1)), axis=-1)
    rhs = -(F[:, 1:] - F[:, :-1]) / w
    data = FluxData(
        F=F,
        c=c,
        Q=Q,
        Qstar=qstar,
        recon_jump=b.recon_jump,
        avg_jump=b.avg_jump,
        widths=w,
        traces=(b.v_minus, b.v_plus),
    )
    return rhs, data


def _entropy_residual(values, rhs, data):
    if data["Q"] is None:
        return None
    Q = data["Q"]
    return 2.0 * values * rhs + (Q[:, 1:] - Q[:, :-1]) / data["widths"]


def semi_discrete_rhs(u: GridFunction, config: SchemeConfig, law: FluxLaw) -> np.ndarray:
    rhs, _ = _rhs(u.values, u.mesh.interfaces, u.periodic, config, law)
    return rhs[0]


def entropy_residual(u: GridFunction, config: SchemeConfig, law: FluxLaw) -> np.ndarray:
    """Cellwise ``d/dt v_i^2 + (Q_{i+1/2} - Q_{i-1/2}) / dx_i`` for the TECNO scheme."""
    if config.flux != "tecno":
        raise UnknownKindError("the entropy residual is defined for the tecno flux")
    rhs, data = _rhs(u.values, u.mesh.interfaces, u.periodic, config, law)
    return _entropy_residual(np.atleast_2d(u.values), rhs, data)[0]


def entropy_residual_batch(values, interfaces, config: SchemeConfig, law: FluxLaw, periodic: bool = True):
    rhs, data = _rhs(values, interfaces, periodic, config, law)
    return _entropy_residual(np.atleast_2d(values), rhs, data)


def _advance(v, x, periodic, config, law, dt, first=None):
    """One time step of the configured integrator; ``dt`` broadcasts over rows."""
    L = lambda w: _rhs(w, x, periodic, config, law)[0]  # noqa: E731
    dt = np.asarray(dt, dtype=np.float64).reshape(-1, 1)
    k1 = L(v) if first is None else first
    scheme = config.integrator
    if scheme == "forward-euler":
        return v + dt * k1
    if scheme == "ssp-rk2":
        v1 = v + dt * k1
        return 0.5 * v + 0.5 * (v1 + dt * L(v1))
    if scheme == "ssp-rk3":
        v1 = v + dt * k1
        v2 = 0.75 * v + 0.25 * (v1 + dt * L(v1))
        return v / 3.0 + 2.0 / 3.0 * (v2 + dt * L(v2))
    k2 = L(v + 0.5 * dt * k1)
    k3 = L(v + 0.5 * dt * k2)
    k4 = L(v + dt * k3)
    return v + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def stable_dt(values, widths, law: FluxLaw, cfl: float, traces=()):
    """``cfl * min dx / max |f'|`` per row; ``inf`` where the speed vanishes.

    The maximum runs over the cell averages and over any reconstructed
    interface values passed in ``traces``; high-order traces can leave the
    range of the averages, and the monotone fluxes see those speeds.
    """
    v = np.atleast_2d(values)
    speed = np.abs(law.df(v)).max(axis=-1)
    for tr in traces:
        speed = np.maximum(speed, np.abs(law.df(np.atleast_2d(tr))).max(axis=-1))
    dxmin = np.atleast_2d(widths).min(axis=-1)
    with np.errstate(divide="ignore"):
        return np.where(speed > 0, cfl * dxmin / speed, np.inf)


def step(u: GridFunction, config: SchemeConfig, law: FluxLaw, dt: float) -> GridFunction:
    v = _advance(np.atleast_2d(u.values), u.mesh.interfaces, u.periodic, config, law, dt)
    return u.with_values(v[0])


def evolve_batch(values, interfaces, config: SchemeConfig, law: FluxLaw, steps: int, periodic: bool = True):
    """Advance many initial states for a fixed number of CFL-limited steps.

    Returns ``(final, tv, linf)`` where ``tv`` and ``linf`` have shape
    ``(steps + 1, B)`` and record the state before every step and at the end.
    """
    v = np.array(np.atleast_2d(values), dtype=np.float64)
    x = np.asarray(interfaces, dtype=np.float64)
    w = np.diff(x, axis=-1)
    tv = np.empty((steps + 1, v.shape[0]))
    linf = np.empty_like(tv)
    for s in range(steps + 1):
        tv[s] = _tv(v, periodic)
        linf[s] = np.abs(v).max(axis=-1)
        if s == steps:
            break
        rhs, data = _rhs(v, x, periodic, config, law)
        dt = stable_dt(v, w, law, config.cfl_number, data["traces"])
        dt = np.where(np.isfinite(dt), dt, 0.0)
        v = _advance(v, x, periodic, config, law, dt, first=rhs)
    return v, tv, linf


def _tv(v, periodic):
    d = np.diff(v, axis=-1)
    tv = np.abs(d).sum(axis=-1)
    if periodic:
        tv = tv + np.abs(v[..., 0] - v[..., -1])
    return tv


@dataclass
class DiagnosticsSeries:
    step: list = field(default_factory=list)
    t: list = field(default_factory=list)
    tv: list = field(default_factory=list)
    linf: list = field(default_factory=list)
    l2sq: list = field(default_factory=list)
    entropy_residual_max: list = field(default_factory=list)
    diffusion_sum: list = field(default_factory=list)
    jump_power_sum: list = field(default_factory=list)

    def append(self, **row) -> None:
        for key, val in row.items():
            getattr(self, key).append(val)

    def __len__(self) -> int:
        return len(self.t)

    def array(self, name: str) -> np.ndarray:
        return np.asarray(getattr(self, name), dtype=np.float64)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(DIAGNOSTIC_COLUMNS)
            for j in range(len(self)):
                row = [self.step[j]] + [f"{getattr(self, c)[j]:.17g}" for c in DIAGNOSTIC_COLUMNS[1:]]
                w.writerow(row)


@dataclass
class SolveRun:
    initial: GridFunction
    final: GridFunction
    config: SchemeConfig
    law: FluxLaw
    series: DiagnosticsSeries
    snapshots: list  # (t, GridFunction)

    @property
    def steps(self) -> int:
        return self.series.step[-1] if len(self.series) else 0

    def write(self, out_dir) -> list:
        os.makedirs(out_dir, exist_ok=True)
        written = []
        with open(os.path.join(out_dir, "snapshots.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "t", "file"])
            for j, (t, g) in enumerate(self.snapshots):
                name = f"snapshot_{j:03d}.csv"
                g.to_csv(os.path.join(out_dir, name))
                w.writerow([j, f"{t:.17g}", name])
                written.append(name)
        self.series.to_csv(os.path.join(out_dir, "diagnostics.csv"))
        return written + ["snapshots.csv", "diagnostics.csv"]


def _record(series, step_no, t, v, widths, periodic, resid, inc_diff, inc_pow):
    series.append(
        step=step_no,
        t=t,
        tv=float(_tv(v, periodic)),
        linf=float(np.abs(v).max()),
        l2sq=float(np.sum(v * v * widths)),
        entropy_residual_max=resid,
        diffusion_sum=(series.diffusion_sum[-1] if len(series) else 0.0) + inc_diff,
        jump_power_sum=(series.jump_power_sum[-1] if len(series) else 0.0) + inc_pow,
    )


def solve(u0: GridFunction, config: SchemeConfig, law: FluxLaw, callback=None) -> SolveRun:
    """Integrate from ``t = 0`` to ``config.t_end`` (or ``config.max_steps`` steps).

    The step size is recomputed from the CFL condition every step and
    clipped so that ``t_end`` and every snapshot time are hit exactly.
    Diagnostics are recorded for the initial state and after each step; the
    entropy residual and the diffusion increments are evaluated on the state
    at the start of each step. ``callback(t, gridfunction)`` is invoked at
    every snapshot time.
    """
    if not u0.is_average:
        raise InvalidRangeError("the finite-volume solver evolves cell averages")
    x = u0.mesh.interfaces
    widths = u0.mesh.widths
    periodic = u0.periodic
    k = config.k
    T = config.t_end
    targets = sorted({float(t) for t in config.snapshot_times if 0.0 <= t <= T})
    series = DiagnosticsSeries()
    snapshots = []
    v = np.array(u0.values, dtype=np.float64)[None, :]
    t = 0.0
    n_step = 0

    def take_snapshot():
        g = u0.with_values(v[0])
        snapshots.append((t, g))
        if callback is not None:
            callback(t, g)

    pending = list(targets)
    while pending and pending[0] <= t:
        pending.pop(0)
        take_snapshot()

    rhs, data = _rhs(v, x, periodic, config, law)
    while True:
        res = _entropy_residual(v, rhs, data)
        resid = float(res.max()) if res is not None else math.nan
        jmp_v = data["recon_jump"][:, 1:] if periodic else data["recon_jump"]
        jmp_a = data["avg_jump"][:, 1:] if periodic else data["avg_jump"]
        c = data["c"][:, 1:] if (data["c"] is not None and periodic) else (data["c"] if data["c"] is not None else 1.0)
        if n_step == 0:
            _record(series, 0, 0.0, v[0], widths, periodic, resid, 0.0, 0.0)
        else:
            series.entropy_residual_max[-1] = resid
        done_steps = config.max_steps is not None and n_step >= config.max_steps
        if t >= T or done_steps:
            break
        dt = float(stable_dt(v, widths, law, config.cfl_number, data["traces"])[0])
        if not np.isfinite(dt):
            if np.any(rhs != 0.0):
                raise CFLViolationError("zero wave speed with a non-stationary right-hand side")
            dt = T - t
        t_next = min(t + dt, T, pending[0] if pending else T)
        dt = t_next - t
        v = _advance(v, x, periodic, config, law, dt, first=rhs)
        inc_diff = dt * float(np.sum(c * jmp_a * jmp_v))
        inc_pow = dt * float(np.sum(np.abs(jmp_a) ** (k + 1)))
        t = t_next if t_next < T else T
        n_step += 1
        rhs, data = _rhs(v, x, periodic, config, law)
        _record(series, n_step, t, v[0], widths, periodic, math.nan, inc_diff, inc_pow)
        while pending and pending[0] <= t:
            pending.pop(0)
            take_snapshot()
    return SolveRun(u0, u0.with_values(v[0]), config, law, series, snapshots)


def diagnostics(run: SolveRun) -> dict:
    s = run.series
    tv = s.array("tv")
    linf = s.array("linf")
    l2 = s.array("l2sq")
    res = s.array("entropy_residual_max")
    mass = [float(np.sum(g.values * g.mesh.widths)) for _, g in run.snapshots]
    return {
        "steps": run.steps,
        "t_final": float(s.t[-1]),
        "max_tv_increase": float(np.max(np.diff(tv), initial=0.0)),
        "tv_growth": float(tv.max() - tv[0]),
        "linf_growth": float(linf.max() - linf[0]),
        "l2sq": l2,
        "diffusion_sum": float(s.diffusion_sum[-1]),
        "jump_power_sum": float(s.jump_power_sum[-1]),
        "entropy_residual_max": float(np.nanmax(res)) if np.any(np.isfinite(res)) else math.nan,
        "mass_initial": float(np.sum(run.initial.values * run.initial.mesh.widths)),
        "mass_final": float(np.sum(run.final.values * run.final.mesh.widths)),
        "snapshot_mass": mass,
    }


def riemann_shock_position(u: GridFunction, left: float, right: float) -> float:
    """Location where the profile crosses the midpoint of a monotone jump.

    Linear interpolation between the cell centers that bracket the level
    ``(left + right) / 2``.
    """
    level = 0.5 * (left + right)
    v = u.values
    xc = u.mesh.centers
    s = np.sign(v - level)
    idx = np.nonzero(s[:-1] != s[1:])[0]
    if idx.size == 0:
        raise InvalidRangeError("profile does not cross the midpoint level")
    j = idx[0]
    if v[j + 1] == v[j]:
        return float(xc[j])
    return float(xc[j] + (level - v[j]) * (xc[j + 1] - xc[j]) / (v[j + 1] - v[j]))


__all__ = [
    "FluxLaw",
    "burgers",
    "linear_advection",
    "LAWS",
    "monotone_flux",
    "entropy_conservative_flux",
    "tecno_flux",
    "SchemeConfig",
    "semi_discrete_rhs",
    "entropy_residual",
    "entropy_residual_batch",
    "stable_dt",
    "step",
    "evolve_batch",
    "solve",
    "SolveRun",
    "DiagnosticsSeries",
    "diagnostics",
    "riemann_shock_position",
]
