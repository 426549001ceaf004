from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enolab.divdiff import build_table
from enolab.eno import (
    eno_batch,
    eno_limiter,
    horner,
    jump_formula,
    jump_formula_batch,
    limiter_form,
    reconstruct,
    select_stencils,
)
from enolab.errors import NonuniformUnsupportedError, OrderUnsupportedError
from enolab.mesh import (
    CONSTANT,
    POINT,
    GridFunction,
    Mesh,
    build_uniform_mesh,
    random_interfaces,
    random_mesh,
    sample_averages,
)

from oracle import eno_stencils, eno_traces


def unit(values, boundary=CONSTANT):
    n = len(values)
    return GridFunction(build_uniform_mesh(0, n, n), values, boundary=boundary)


# stencil selection


def test_smaller_left_difference_shifts_left():
    sel = select_stencils(build_table(unit([0, 0, 1]), 2), 2)
    assert sel.stencil(1) == 0


def test_linear_data_keeps_every_stencil():
    # constant ghosts bend the data at the ends, so look at interior cells
    sel = select_stencils(build_table(unit(list(range(10))), 3), 3)
    assert sel.stencils[3:7].tolist() == [3, 4, 5, 6]


def test_ties_keep_the_current_stencil():
    sel = select_stencils(build_table(unit([0, 0, 1, 0, 0]), 2), 2)
    assert sel.stencil(2) == 2


def test_unsupported_orders():
    u = unit([0.0, 1.0, 2.0])
    with pytest.raises(OrderUnsupportedError):
        reconstruct(u, 0)
    with pytest.raises(OrderUnsupportedError):
        reconstruct(u, 9)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_stencil_history_invariants(k, seed):
    rng = np.random.default_rng(seed)
    u = GridFunction(random_mesh(0, 1, 24, rng), rng.uniform(-1, 1, 24))
    sel = reconstruct(u, k).selection
    h = sel.history
    i = np.arange(24)
    assert np.array_equal(h[:, 0], i)
    assert np.all(np.isin(np.diff(h, axis=1), (-1, 0)))
    assert np.all((sel.offsets >= 0) & (sel.offsets <= k - 1))


def test_stencils_match_exact_arithmetic():
    rng = np.random.default_rng(8)
    for k in (2, 3, 4):
        for _ in range(10):
            xs = [Fraction(0)]
            for _ in range(10):
                xs.append(xs[-1] + Fraction(int(rng.integers(2, 5)), 3))
            vs = [Fraction(int(a), 16) for a in rng.integers(-64, 64, 10)]
            u = GridFunction(Mesh([float(x) for x in xs]), [float(v) for v in vs])
            assert reconstruct(u, k).selection.stencils.tolist() == eno_stencils(vs, xs, k)


# reconstruction


def test_first_order_is_piecewise_constant():
    rng = np.random.default_rng(0)
    u = GridFunction(random_mesh(0, 1, 10, rng), rng.normal(size=10))
    r = reconstruct(u, 1)
    for p, v in zip(r.polynomials, u.values):
        assert p.degree == 0 and p(p.center) == v
    assert np.array_equal(r.trace.recon_jump, r.trace.avg_jump)


def test_linear_data_is_reproduced():
    u = unit([0.5, 1.5, 2.5, 3.5, 4.5, 5.5])  # averages of f(x) = x on unit cells
    r = reconstruct(u, 2)
    for p in r.polynomials[1:-1]:
        xs = np.linspace(*p.interval, 5)
        assert np.allclose(p(xs), xs, atol=1e-14)
    inner = (r.trace.index >= 1) & (r.trace.index <= 3)
    assert np.allclose(r.trace.recon_jump[inner], 0.0, atol=1e-14)


def test_spike_traces():
    r = reconstruct(unit([0, 0, 1, 0, 0]), 2)
    j = r.trace.position(1)
    assert r.trace.v_minus[j] == 0.0
    assert r.trace.v_plus[j] == 1.5
    assert r.trace.recon_jump[j] == 1.5


def test_traces_match_exact_lagrange_oracle():
    rng = np.random.default_rng(21)
    for k in (1, 2, 3, 4, 5):
        for _ in range(5):
            xs = [Fraction(0)]
            for _ in range(9):
                xs.append(xs[-1] + Fraction(int(rng.integers(1, 4)), 2))
            vs = [Fraction(int(a), 8) for a in rng.integers(-40, 40, 9)]
            u = GridFunction(Mesh([float(x) for x in xs]), [float(v) for v in vs])
            r = reconstruct(u, k)
            vm, vp = eno_traces(vs, xs, k)
            assert np.allclose(r.trace.v_minus, [float(a) for a in vm], rtol=1e-11, atol=1e-11)
            assert np.allclose(r.trace.v_plus, [float(a) for a in vp], rtol=1e-11, atol=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_mass_conservation_over_the_stencil(k, seed):
    rng = np.random.default_rng(seed)
    u = GridFunction(random_mesh(0, 1, 16, rng), rng.uniform(-1, 1, 16))
    r = reconstruct(u, k)
    x = u.mesh.interfaces
    L = u.mesh.length
    for i, p in enumerate(r.polynomials):
        s = r.selection.stencil(i)
        for j in range(s, s + k):
            shift = L * (j // 16)
            a, b = x[j % 16] + shift, x[j % 16 + 1] + shift
            assert p.average_over(a, b) == pytest.approx(u.values[j % 16], rel=1e-11, abs=1e-11)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_newton_and_monomial_forms_agree(k, seed):
    rng = np.random.default_rng(seed)
    u = GridFunction(random_mesh(0, 1, 12, rng), rng.uniform(-1, 1, 12))
    for p in reconstruct(u, k).polynomials:
        xs = np.linspace(*p.interval, 7)
        a, b = p(xs), p.newton_eval(xs)
        assert np.allclose(a, b, rtol=1e-10, atol=1e-10 * (np.abs(a).max() + 1))


@settings(max_examples=30, deadline=None)
@given(
    st.integers(1, 6),
    st.integers(0, 2**32 - 1),
    st.floats(-5, 5).filter(lambda a: abs(a) > 1e-2),
    st.floats(-5, 5),
)
def test_affine_equivariance(k, seed, alpha, beta):
    rng = np.random.default_rng(seed)
    mesh = random_mesh(0, 1, 14, rng)
    v = rng.uniform(-1, 1, 14)
    r1 = reconstruct(GridFunction(mesh, v), k)
    r2 = reconstruct(GridFunction(mesh, alpha * v + beta), k)
    # random data have no exact ties, so scaling cannot change the selection
    assert np.array_equal(r1.selection.history, r2.selection.history)
    for p, q in zip(r1.polynomials, r2.polynomials):
        xs = np.linspace(*p.interval, 5)
        ref = alpha * p(xs) + beta
        assert np.allclose(q(xs), ref, rtol=1e-12, atol=1e-12 * (abs(alpha) + abs(beta)) * 10)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(0.1, 10))
def test_mesh_map_equivariance(k, seed, a, b):
    rng = np.random.default_rng(seed)
    mesh = random_mesh(0, 1, 14, rng)
    v = rng.uniform(-1, 1, 14)
    r1 = reconstruct(GridFunction(mesh, v), k)
    r2 = reconstruct(GridFunction(mesh.mapped(a, b), v), k)
    for p, q in zip(r1.polynomials, r2.polynomials):
        xs = np.linspace(*p.interval, 5)
        ref = p(xs)
        got = q(a + b * xs)
        assert np.allclose(got, ref, rtol=1e-9, atol=1e-9 * (np.abs(ref).max() + 1))


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_accuracy_order_on_smooth_data(k):
    errs, hs = [], []
    for n in (32, 64, 128, 256, 512):
        m = build_uniform_mesh(0, 2 * np.pi, n)
        u = sample_averages(np.sin, m)
        b = eno_batch(u.values, m.interfaces, k)
        t = np.linspace(0, 1, 5)
        pts = m.interfaces[:-1, None] + m.widths[:, None] * t
        vals = horner(b.coeffs[0, 1:-1, None, :], pts - m.centers[:, None])
        errs.append(np.abs(vals - np.sin(pts)).max())
        hs.append(m.dx_max)
    order = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert order >= k - 0.3


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_stencil_cannot_stay_fixed_over_more_than_k_cells(k):
    rng = np.random.default_rng(k)
    for _ in range(50):
        u = GridFunction(build_uniform_mesh(0, 1, 40), rng.uniform(-1, 1, 40))
        st_ = reconstruct(u, k).selection.stencils
        run = longest = 1
        for a, b in zip(st_[:-1], st_[1:]):
            run = run + 1 if a == b else 1
            longest = max(longest, run)
        assert longest <= k


def test_point_value_reconstruction_interpolates_nodes():
    rng = np.random.default_rng(3)
    mesh = random_mesh(0, 1, 12, rng)
    u = GridFunction(mesh, np.cos(3 * mesh.centers), kind=POINT)
    k = 3
    r = reconstruct(u, k)
    xc = mesh.centers
    L = mesh.length
    for i, p in enumerate(r.polynomials):
        assert p.degree == k - 1
        s = r.selection.stencil(i)
        for j in range(s, s + k):
            assert p(xc[j % 12] + L * (j // 12)) == pytest.approx(u.values[j % 12], abs=1e-12)


# jump formula


def test_jump_formula_spike_example():
    u = unit([0, 0, 1, 0, 0])
    r = reconstruct(u, 2)
    assert jump_formula(r.table, r.selection, 1) == pytest.approx(1.5, abs=1e-15)


def test_jump_formula_first_order_is_average_jump():
    rng = np.random.default_rng(1)
    u = GridFunction(random_mesh(0, 1, 8, rng), rng.normal(size=8))
    r = reconstruct(u, 1)
    for i in range(7):
        assert jump_formula(r.table, r.selection, i) == pytest.approx(u.values[i + 1] - u.values[i], rel=1e-13)


def test_jump_formula_empty_sum():
    u = unit([0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 5.0, 5.0])
    r = reconstruct(u, 2)
    # cells 1 and 2 both use the flat pair {1, 2}
    assert r.selection.stencil(1) == r.selection.stencil(2) == 1
    assert jump_formula(r.table, r.selection, 1) == 0.0


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("kind", ["uniform", "random"])
def test_jump_formula_matches_traces(k, kind):
    rng = np.random.default_rng(100 + k)
    B, n = 2000, 32
    v = rng.uniform(-1, 1, (B, n))
    if kind == "uniform":
        x = build_uniform_mesh(0, 1, n).interfaces
    else:
        x = random_interfaces(0, 1, n, rng, size=B)
    b = eno_batch(v, x, k)
    jf = jump_formula_batch(b)
    rj = b.recon_jump
    assert np.all(np.abs(jf - rj) <= np.maximum(1e-9 * np.abs(rj), 1e-12))


def test_scalar_and_batched_jump_formula_agree():
    rng = np.random.default_rng(4)
    u = GridFunction(random_mesh(0, 1, 10, rng), rng.uniform(-1, 1, 10))
    r = reconstruct(u, 3)
    for i in range(10):
        j = r.trace.position(i)
        assert jump_formula(r.table, r.selection, i) == pytest.approx(r.trace.recon_jump[j], rel=1e-9, abs=1e-12)


# limiter form


@pytest.mark.parametrize("theta,phi", [(0.5, 0.5), (2.0, 1.0), (-3.0, 1.0), (-0.25, -0.25), (1.0, 1.0)])
def test_limiter_values(theta, phi):
    assert eno_limiter(theta) == phi


def test_limiter_flat_left_pair():
    # backward jump 0, forward jump 1: theta = 0, slope 0
    u = unit([0.0, 0.0, 1.0, 2.0])
    assert limiter_form(u)[1] == 0.0


def test_limiter_slopes_reproduce_second_order_eno():
    rng = np.random.default_rng(9)
    for _ in range(100):
        u = GridFunction(build_uniform_mesh(0, 1, 20), rng.uniform(-1, 1, 20))
        slopes = limiter_form(u)
        r = reconstruct(u, 2)
        got = np.array([p.coeffs[1] for p in r.polynomials])
        assert np.allclose(slopes, got, rtol=1e-12, atol=1e-12)


def test_limiter_zero_forward_jump():
    u = unit([0.0, 0.0, 1.0, 1.0, 3.0])
    slopes = limiter_form(u)
    r = reconstruct(u, 2)
    assert np.allclose(slopes, [p.coeffs[1] for p in r.polynomials])


def test_limiter_needs_uniform_mesh():
    u = GridFunction(Mesh([0.0, 1.0, 3.0, 4.0]), [1.0, 2.0, 3.0])
    with pytest.raises(NonuniformUnsupportedError):
        limiter_form(u)
