"""Smoke test for the compiled extension: python python/smoke_test.py"""

import math

import locopt

LINE = """\
pmpdc 4 4 2
0 1 2 10
1 0 1 9
2 1 0 8
10 9 8 0
3 3 3 3
"""


def check_pmedian():
    inst = locopt.PMedianInstance.from_native(LINE)
    assert (inst.n_demand, inst.n_sites, inst.p) == (4, 4, 2)
    sol = locopt.exact_solve(inst)
    assert sol.objective == 2 and sol.open == [1, 3], sol
    assert locopt.grasp_solve(inst, seed=1).objective == 2
    bound, incumbent = locopt.lagrangian_bound(inst)
    assert bound <= 2 <= incumbent.objective

    tight = locopt.PMedianInstance(inst.distances, 2, [0.5] * 4)
    report = locopt.feasibility_check(tight)
    assert report["verdict"] == "infeasible" and report["p_min"] == 4, report
    try:
        locopt.exact_solve(tight)
    except locopt.InfeasibleError as e:
        assert "4 sites" in str(e)
    else:
        raise AssertionError("expected InfeasibleError")

    big_m = locopt.choose_big_m(tight)
    assert max(map(max, locopt.transform_distances(tight, big_m))) == big_m

    gen = locopt.PMedianInstance.generate(3, 10, 3, 1.0)
    again = locopt.PMedianInstance.from_native(gen.to_native())
    assert again.distances == gen.distances and again.limits == gen.limits

    try:
        locopt.PMedianInstance.from_native("pmpdc 2 2 1\n0 1\n1 0\n3 3 3\n")
    except ValueError as e:
        assert "line 4" in str(e), e
    else:
        raise AssertionError("expected ValueError")


def check_committee():
    q = locopt.ApprovalProfile(["111", "100", "000"])
    assert [locopt.k_centrum_solve(q, k).objective for k in (1, 2, 3)] == [2, 3, 3]
    assert locopt.k_centrum_solve(q, 2).committee == "100"
    assert locopt.minisum_solve(q).committee == "100"
    assert locopt.minimax_solve(q).objective == 2
    assert locopt.objective_value(q, 3, "100") == 3
    assert locopt.k_centrum_solve(q, 2, heuristic=True, seed=5).objective == 3


def check_sensors():
    pts, obj = locopt.solve_minmaxmax(2.0, 2.0, p=3, delta=0.01)
    assert len(pts) == 3 and abs(obj - math.sqrt(2)) / math.sqrt(2) < 0.01
    assert locopt.solve_max_area(2.0, 2.0, math.sqrt(8))[1] == 2.0
    assert locopt.coverage_feasible(1.0, 1.0, 2.0, 2.0, 2.0)
    assert not locopt.coverage_feasible(0.0, 0.0, 2.0, 2.0, 2.0)
    assert abs(locopt.eccentricity(0.0, 0.0, 4.0, 2.0) - math.sqrt(20)) < 1e-12
    value = locopt.zone_weighted_value(3.0, 1.0, [1.0, 2.0], [1.0, 1.0, 1.0], [(0, 0), (3, 0), (3, 1)])
    assert abs(value - 1.5 / 3) < 1e-12


def main():
    check_pmedian()
    check_committee()
    check_sensors()
    passed, table = locopt.selftest(0)
    assert passed, table
    print(f"locopt {locopt.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
