"""Bounded discrete logarithm tables."""

import pytest

from quadfe import dlog
from quadfe.errors import FormatError, MemoryCapError, OutOfRangeError
from quadfe.group import GT


@pytest.fixture(scope="module")
def table_1k(ctx):
    return dlog.build_table(ctx, 1000)


def test_zero_bound_table(ctx):
    t = dlog.build_table(ctx, 0)
    assert t.solve(ctx.identity(GT)) == 0
    with pytest.raises(OutOfRangeError):
        t.solve(ctx.gT)


def test_totality_on_small_range(ctx):
    t = dlog.build_table(ctx, 40)
    for z in range(-40, 41):
        assert t.solve(ctx.exp(GT, ctx.gT, z)) == z


def test_trivial_and_boundary_values(ctx, table_1k):
    assert table_1k.solve(ctx.gT) == 1
    assert table_1k.solve(ctx.identity(GT)) == 0
    assert table_1k.solve(ctx.exp(GT, ctx.gT, 1000)) == 1000
    assert table_1k.solve(ctx.exp(GT, ctx.gT, -1000)) == -1000


def test_out_of_range_raises(ctx, table_1k):
    for z in (1001, -1001, 5000):
        with pytest.raises(OutOfRangeError):
            table_1k.solve(ctx.exp(GT, ctx.gT, z))


def test_random_targets_no_collisions(ctx, rng, table_1k):
    for _ in range(50):
        z = rng.randrange(-1000, 1001)
        assert table_1k.solve(ctx.exp(GT, ctx.gT, z)) == z


def test_table_size_is_sqrt_of_range(ctx, table_1k):
    assert table_1k.m == 45  # ceil(sqrt(2001))
    assert table_1k.bound == 1000


def test_memory_cap(ctx, monkeypatch):
    monkeypatch.setenv("QFE_DLOG_CAP_MB", "0")
    with pytest.raises(MemoryCapError):
        dlog.build_table(ctx, 10**6)


def test_invalid_bounds(ctx):
    with pytest.raises(ValueError):
        dlog.build_table(ctx, -1)
    with pytest.raises(ValueError):
        dlog.build_table(ctx, ctx.p)


def test_persistence_round_trip(ctx, tmp_path, table_1k):
    path = tmp_path / "table.qdt"
    dlog.save_table(table_1k, path)
    loaded = dlog.load_table(path)
    assert loaded.bound == 1000 and loaded.m == table_1k.m
    for z in (0, 1, -999, 731):
        assert loaded.solve(ctx.exp(GT, ctx.gT, z)) == z
    # canonical: saving the loaded table reproduces the bytes
    path2 = tmp_path / "table2.qdt"
    dlog.save_table(loaded, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_persistence_rejects_corruption(ctx, tmp_path, table_1k):
    path = tmp_path / "table.qdt"
    dlog.save_table(table_1k, path)
    data = path.read_bytes()
    bad = tmp_path / "bad.qdt"
    bad.write_bytes(b"XXXX" + data[4:])
    with pytest.raises(FormatError):
        dlog.load_table(bad)
    bad.write_bytes(data[:-5])
    with pytest.raises(FormatError):
        dlog.load_table(bad)
