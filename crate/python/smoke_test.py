"""Smoke test for the rankcollide_py extension module.

Build and install first, e.g.:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/rankcollide_py-*.whl
"""

import json

import rankcollide_py as rc


def main():
    # ranking: 1-based names, ties go to the smaller name
    assert rc.rank_permutation([3.0, 1.0, 2.0]) == [2, 3, 1]
    assert rc.rank_permutation([1.0, 1.0, 0.0]) == [3, 1, 2]
    assert rc.ranked_values([3.0, 1.0, 2.0]) == [1.0, 2.0, 3.0]
    assert rc.gaps([3.0, 1.0, 2.0]) == [1.0, 1.0]

    assert abs(rc.sphere_max([2.0, 1.0, 1.0, 1.0]) - 1.75) < 1e-9
    assert abs(rc.sphere_max([3.0, 1.0]) - 2.0) < 1e-12

    r = rc.check([1.0, 0.5, 0.5, 1.0], "EQ_TOTAL4")
    assert r.holds and r.margin == 0.125 and r.criterion == "EQ_TOTAL4"
    r = rc.check([2.0, 1.0, 1.0, 1.0], "THM11", n=4)
    assert not r and r.margin == -0.5
    assert json.loads(r.to_json())["criterion"] == "THM11"
    kinds = [x.criterion for x in rc.four_particle_report([1.0, 0.5, 0.5, 1.0])]
    assert kinds == ["EQ_TOTAL4", "LEMMA31A", "LEMMA31B", "LEMMA31C"], kinds

    try:
        rc.check([1.0, 0.0], "LEMMA21")
    except ValueError as err:
        assert "sigma2" in str(err)
    else:
        raise AssertionError("zero diffusion must be rejected")

    system = rc.FiniteSystem([1.0, 0.0, -1.0], [2.0, 1.0, 1.0], [-1.0, 0.0, 1.0])
    assert system.check("LEMMA21").holds == rc.check(system.sigma2, "LEMMA21").holds
    a = system.simulate(1.0, 1e-2, 200, seed=7, epsilons=[0.1], windows=[(1, 3)])
    b = system.simulate(1.0, 1e-2, 200, seed=7, epsilons=[0.1], windows=[(1, 3)], threads=2)
    assert a == b
    assert a["paths"] == 200 and a["min_gap"] >= 0.0
    assert a["windows"][0]["k"] == 1 and a["windows"][0]["n"] == 3
    lines = system.trajectory(0.1, 0.05, seed=1).splitlines()
    assert lines[0] == "t,X_1,X_2,X_3" and len(lines) == 4

    infinite = rc.InfiniteSystem.from_json(json.dumps({
        "n0": 1, "g_head": [], "sigma2_head": [], "g_tail": 0.0, "sigma2_tail": 1.0,
        "init": {"kind": "linear", "a": 0.0, "b": 0.5},
    }))
    assert infinite.violations() == []
    assert infinite.check(4).holds
    agg = infinite.simulate_truncated(0.1, 1e-2, 20, seed=3, m=20, buffer=5, windows=[(1, 4)])
    assert agg["truncation"]["boundary_contact_fraction"] == 0.0

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
