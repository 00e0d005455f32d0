"""Smoke test for the torgreen_py extension module.

Build and run:

    cargo build -p torgreen-python --features extension-module --release
    cp target/release/libtorgreen_py.so python/torgreen_py.so
    python3 python/smoke_test.py

or `maturin develop -m crates/python/Cargo.toml` followed by the last line.
"""

import math
import sys

import torgreen_py as tg


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    assert close(tg.cycle_green(3, 0), 4 / 9)
    assert close(tg.cycle_green(3, 1), -2 / 9)
    assert close(tg.cycle_green_alpha(4, 1.0, 0), 1 / 3)
    assert close(tg.cycle_green_alpha(4, 1.0, 1), -1 / 12)
    assert close(tg.torus_green(3, 3, 0, 0), 8 / 9)
    assert close(tg.torus3_green(4, [1, 2, 3]), tg.t_torus_green([4, 4, 4], [1, 2, 3]), 1e-10)
    assert close(tg.cheb_t(2, 2.0), 7.0)
    assert close(tg.cheb_u(1.5, 1.0), 2.5)

    pinv = tg.cycle_pseudo_inverse(7)
    for a in range(7):
        assert close(pinv[0][a], tg.cycle_green(7, a), 1e-9)
    assert close(tg.cycle_hitting_time(5, 2, 0), 6.0, 1e-9)

    torus = tg.Torus([3, 4, 5])
    assert torus.vertex_count == 60 and torus.degree == 6
    row = torus.row(threads=2)
    oracle = torus.pseudo_inverse()[0]
    assert max(abs(x - y) for x, y in zip(row, oracle)) < 1e-8

    grid = tg.Torus([5, 5]).hitting_grid([0, 0])
    assert grid[0][0] == 0.0
    column = tg.Torus([5, 5]).hitting_oracle([2, 3])
    assert close(grid[2][3], column[0], 1e-9)

    try:
        tg.Torus([2, 5])
    except ValueError:
        pass
    else:
        raise AssertionError("cycle length 2 accepted")
    try:
        tg.cycle_green_alpha(5, -0.5, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative shift accepted")

    ok, lines = tg.verify("cycle", max_size=12)
    assert ok, lines
    assert not math.isnan(tg.torus_green(10, 10, 5, 5))
    print("torgreen_py smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
