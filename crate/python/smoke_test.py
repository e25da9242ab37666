"""Smoke test for the Python bindings. Build first, e.g.

    maturin develop -m crates/py/Cargo.toml --release
"""

import json
import math

import concave_lcm as cl


def main():
    assert cl.lcm([0.2, 0.3, 1.0]) == [(0.0, 0.0), (0.3, 2 / 3), (1.0, 1.0)]
    assert cl.ecdf([0.5, 0.5, 1.0]) == [(0.5, 2 / 3), (1.0, 1.0)]

    assert abs(cl.s_statistic([0.25, 1.0], 2) - math.sqrt(1 / 6)) < 1e-12
    assert abs(cl.t_statistic([0.2, 0.3, 1.0], 2.0) - 1 / 9) < 1e-12
    assert cl.s_statistic([0.2, 0.3, 1.0], "inf") > 0
    power = cl.ConcaveCdf.power(0.5)
    assert abs(cl.r_statistic([0.25, 1.0], 2, power) - math.sqrt(13 / 108)) < 1e-8

    two = cl.ConcaveCdf.piecewise([(0, 0), (0.5, 0.75), (1, 1)])
    assert two.intervals() == [(0.0, 0.5, 0.5, 0.75), (0.5, 1.0, 0.5, 0.25)]
    assert cl.ConcaveCdf.from_json(two.to_json()).to_json() == two.to_json()
    assert power.pit_transform([0.25, 1.0]) == [0.5, 1.0]
    x = two.sample(100, seed=3)
    assert len(x) == 100 and all(0 <= v <= 1 for v in x)

    try:
        cl.ConcaveCdf.piecewise([(0, 0), (0.5, 0.25), (1, 1)])
    except ValueError:
        pass
    else:
        raise AssertionError("non-concave spec accepted")

    grid = [j / 256 for j in range(257)]
    w = cl.sample_wiener(grid, seed=1, stream=2)
    bridge = [v - t * w[-1] for t, v in zip(grid, w)]
    assert cl.d_norm(grid, w, 2) == cl.d_norm(grid, bridge, 2)

    assert cl.limit_draw_general(power, 2, grid_size=64) == 0.0
    assert cl.limit_draw_uniform(1, grid_size=256) > 0
    assert cl.verify_prop1(two, 2, grid_size=512)["holds"]
    t = cl.verify_thm1(two, 1, grid_size=512)
    assert not t["violation"] and t["hull_violations"] == 0

    draws = [cl.limit_draw_uniform(2, grid_size=128, stream=r) for r in range(200)]
    (alpha, q, se), = cl.estimate_quantiles(draws, [0.1])
    assert alpha == 0.1 and q > 0 and se >= 0

    table = json.loads(cl.build_critical_table([1, "inf"], [0.05], grid_size=128, replications=200, seed=4))
    assert [e["p"] for e in table["entries"]] == ["1", "inf"]
    assert table["provenance"]["replications"] == 200

    report = json.loads(cl.counterexample())
    assert [c["reported"] for c in report["cases"]] == [0.37, 0.29]
    print("smoke test passed")


if __name__ == "__main__":
    main()
