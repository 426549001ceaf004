from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enolab.divdiff import build_table, newton_table, table_equals_primitive_oracle
from enolab.errors import InvalidRangeError, SemanticsMismatchError
from enolab.mesh import CONSTANT, POINT, GridFunction, Mesh, build_uniform_mesh, random_mesh, sample_averages

from oracle import average_dd


def unit(values, boundary=CONSTANT):
    n = len(values)
    return GridFunction(build_uniform_mesh(0, n, n), values, boundary=boundary)


def test_constant_data_has_zero_differences():
    t = build_table(unit([5, 5, 5]), 2)
    assert np.all(t.level(1) == 0) and np.all(t.level(2) == 0)


def test_first_level_uses_two_cell_denominator():
    t = build_table(unit([0, 1]), 1)
    assert t[1, 0] == 0.5


def test_second_level_example():
    t = build_table(unit([0, 1, 3]), 2)
    assert t[2, 0] == pytest.approx(1 / 6, abs=1e-16)


def test_level_zero_is_the_data():
    u = GridFunction(random_mesh(0, 1, 9, np.random.default_rng(2)), np.random.default_rng(3).normal(size=9))
    assert np.array_equal(build_table(u, 3).level(0), u.values)


def test_stored_recursion_holds_exactly():
    rng = np.random.default_rng(5)
    u = GridFunction(random_mesh(0, 1, 12, rng), rng.uniform(-1, 1, 12))
    t = build_table(u, 4)
    x = t.nodes
    g = t.ghost
    for lvl in range(1, 5):
        for i in range(-2, 10):
            e = i + g
            expect = (t.levels[lvl - 1][e + 1] - t.levels[lvl - 1][e]) / (x[e + lvl + 1] - x[e])
            assert t.entry(lvl, i) == expect


def test_exact_rational_oracle_small_mesh():
    # rational data on a rational mesh, compared with the exact primitive table
    xs = [Fraction(0), Fraction(1, 3), Fraction(1), Fraction(7, 4), Fraction(2), Fraction(3)]
    vs = [Fraction(2), Fraction(-1, 2), Fraction(3, 5), Fraction(1), Fraction(-2)]
    u = GridFunction(Mesh([float(x) for x in xs]), [float(v) for v in vs], boundary=CONSTANT)
    t = build_table(u, 4)
    for lvl in range(5):
        for i in range(5 - lvl):
            exact = float(average_dd(vs, xs, lvl, i))
            assert t[lvl, i] == pytest.approx(exact, rel=1e-13, abs=1e-15)


def test_primitive_oracle_examples():
    assert table_equals_primitive_oracle(unit([4, 4, 4, 4]))
    assert table_equals_primitive_oracle(unit([0, 1]))


def test_primitive_oracle_on_random_meshes():
    rng = np.random.default_rng(11)
    for _ in range(100):
        u = GridFunction(random_mesh(0, 1, 20, rng), rng.uniform(-1, 1, 20))
        assert table_equals_primitive_oracle(u, max_level=8)


def test_primitive_oracle_rejects_point_values():
    with pytest.raises(SemanticsMismatchError):
        table_equals_primitive_oracle(GridFunction(build_uniform_mesh(0, 1, 3), [1, 2, 3], kind=POINT))


def test_level_bounds():
    with pytest.raises(InvalidRangeError):
        build_table(unit([1, 2, 3]), 10)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(-2**20, 2**20), min_size=12, max_size=12),
    st.integers(-2**10, 2**10),
    st.integers(0, 2**32 - 1),
)
def test_adding_a_constant_leaves_higher_levels_bit_identical(ints, shift, seed):
    # dyadic data and shift: every sum is exact, so only the table can differ
    mesh = random_mesh(0, 1, 12, np.random.default_rng(seed))
    v = np.array(ints, dtype=float) / 64.0
    beta = shift / 8.0
    t1 = build_table(GridFunction(mesh, v), 6)
    t2 = build_table(GridFunction(mesh, v + beta), 6)
    for lvl in range(1, 7):
        assert np.array_equal(t1.levels[lvl], t2.levels[lvl])


def test_adding_exact_constant_is_bit_identical():
    # integer data plus an integer shift are represented exactly
    rng = np.random.default_rng(0)
    mesh = build_uniform_mesh(0, 1, 16)
    v = rng.integers(-50, 50, 16).astype(float)
    t1 = build_table(GridFunction(mesh, v), 6)
    t2 = build_table(GridFunction(mesh, v + 7.0), 6)
    for lvl in range(1, 7):
        assert np.array_equal(t1.levels[lvl], t2.levels[lvl])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-1e3, 1e3).filter(lambda a: abs(a) > 1e-3))
def test_scaling(seed, alpha):
    rng = np.random.default_rng(seed)
    mesh = random_mesh(0, 1, 16, rng)
    v = rng.uniform(-1, 1, 16)
    t1 = build_table(GridFunction(mesh, v), 6)
    t2 = build_table(GridFunction(mesh, alpha * v), 6)
    for lvl in range(7):
        a, b = alpha * t1.levels[lvl], t2.levels[lvl]
        scale = np.abs(a).max()
        assert np.all(np.abs(a - b) <= 1e-14 * scale)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 5))
def test_averages_of_monomials(seed, d):
    # the level-d difference of cell averages of x^d is 1/(d+1) on any mesh
    rng = np.random.default_rng(seed)
    mesh = random_mesh(0, 1, 12, rng)
    u = sample_averages(lambda x: x**d, mesh, boundary=CONSTANT)
    lev = build_table(u, d).levels[d]
    g = d + 2
    inner = lev[g : g + 12 - d]
    assert np.allclose(inner, 1.0 / (d + 1), rtol=1e-8, atol=0)


def test_point_value_table_is_classical_newton():
    rng = np.random.default_rng(4)
    mesh = random_mesh(0, 1, 10, rng)
    v = rng.normal(size=10)
    t = build_table(GridFunction(mesh, v, kind=POINT, boundary=CONSTANT), 4)
    ref = newton_table(mesh.centers, v)
    for lvl in range(5):
        assert np.allclose(t.level(lvl)[: 10 - lvl], ref[lvl], rtol=1e-12, atol=0)


def test_csv_export(tmp_path):
    t = build_table(unit([0, 1, 3]), 2)
    t.to_csv(tmp_path / "t.csv", levels=[2])
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "level,i,value"
    assert lines[1].startswith("2,0,")
