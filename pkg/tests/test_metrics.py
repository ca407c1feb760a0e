import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from opisd_bench.modules.defs.meta import ReferenceKind
from opisd_bench.modules.errors import MetricInputError, MixedReferencesError, ReferenceViolationError
from opisd_bench.modules.metrics import (
    ReferenceCdf,
    SolutionSet,
    SolverRecord,
    area_vs_reference,
    build_cdf,
    cdf_breakpoints,
    compare_sets,
    deterministic_dominance,
    dominance_matrix,
    evaluate_cdf,
    first_order_dominates,
    opisd,
    perc,
    rank_solvers,
    reference_attribution,
    reference_cdf_global,
    reference_cdf_relative,
    second_order_dominates,
    summary_statistics,
)


def cdf(values, label=""):
    return build_cdf(values, label)


def test_build_cdf():
    f = cdf([3, 1, 2])
    np.testing.assert_array_equal(f.sorted_values, [1, 2, 3])
    assert_allclose(f.step, 1 / 3)
    assert cdf(np.arange(50)).h == 50
    assert set(cdf([4.0] * 5).sorted_values) == {4.0}


@pytest.mark.parametrize("values", [[], [1.0, np.nan], [np.inf]])
def test_build_cdf_rejects_bad_input(values):
    with pytest.raises(MetricInputError):
        build_cdf(values)


def test_solution_set_requires_finite_values():
    with pytest.raises(MetricInputError):
        SolutionSet("A", [1.0, float("inf")])
    with pytest.raises(MetricInputError):
        SolutionSet("A", [])


def test_evaluate_cdf_and_breakpoints():
    f = cdf([1.0, 2.0, 2.0, 4.0])
    assert_allclose(evaluate_cdf(f, [0.5, 1.0, 2.0, 3.0, 4.0]), [0.0, 0.25, 0.75, 0.75, 1.0])
    assert cdf_breakpoints(f) == [(1.0, 0.25), (2.0, 0.5), (2.0, 0.75), (4.0, 1.0)]


def test_deterministic_dominance():
    assert deterministic_dominance([1, 2], [3, 4])
    assert not deterministic_dominance([1, 3], [3, 4])
    assert not deterministic_dominance([1, 2], [1, 2])


def test_first_order_dominance():
    assert first_order_dominates(cdf([1, 2]), cdf([2, 3]))
    assert not first_order_dominates(cdf([1, 2]), cdf([1, 2]))
    assert not first_order_dominates(cdf([1, 4]), cdf([2, 3]))
    with pytest.raises(MetricInputError):
        first_order_dominates(cdf([1]), cdf([1, 2]))


def test_second_order_dominance():
    assert second_order_dominates(cdf([1, 4]), cdf([2, 3]))
    assert not second_order_dominates(cdf([2, 3]), cdf([1, 4]))
    assert not second_order_dominates(cdf([1, 2]), cdf([1, 2]))
    with pytest.raises(MetricInputError):
        second_order_dominates(cdf([1]), cdf([1, 2]))


def _step_dominates(a, b):
    points = np.union1d(a.sorted_values, b.sorted_values)
    fa, fb = evaluate_cdf(a, points), evaluate_cdf(b, points)
    return bool(np.all(fa >= fb) and np.any(fa > fb))


def test_first_order_agrees_with_step_functions_and_implies_second_order():
    rng = np.random.default_rng(123)
    for _ in range(1000):
        h = int(rng.integers(1, 8))
        a = cdf(rng.integers(0, 6, size=h).astype(float))
        b = cdf(rng.integers(0, 6, size=h).astype(float))
        assert first_order_dominates(a, b) == _step_dominates(a, b)
        if first_order_dominates(a, b):
            assert second_order_dominates(a, b)


def test_global_reference():
    ref = reference_cdf_global(9.859, 100)
    assert ref.kind == ReferenceKind.GLOBAL
    assert ref.h == 100 and set(ref.sorted_values) == {9.859}
    np.testing.assert_array_equal(reference_cdf_global(0.0, 1).sorted_values, [0.0])
    with pytest.raises(MetricInputError):
        reference_cdf_global(1.0, 0)


def test_relative_reference_two_solvers():
    ref, trimmed = reference_cdf_relative([SolutionSet("A", [1, 3]), SolutionSet("B", [2, 4])])
    np.testing.assert_array_equal(ref.sorted_values, [1, 2])
    assert ref.provenance == ("A", "B")
    assert [c.label for c in trimmed] == ["A", "B"]
    assert area_vs_reference(trimmed[0], ref) == 0.5
    assert perc(trimmed[0], ref) == 50.0


def test_relative_reference_trims_to_smallest_set():
    sets = [SolutionSet("A", [5, 1, 9, 3]), SolutionSet("B", [2, 8]), SolutionSet("C", [7, 6, 4])]
    ref, trimmed = reference_cdf_relative(sets)
    assert ref.h == 2
    np.testing.assert_array_equal(trimmed[0].sorted_values, [1, 3])
    np.testing.assert_array_equal(ref.sorted_values, [1, 2])
    with pytest.raises(MetricInputError):
        reference_cdf_relative(sets[:1])


def test_relative_reference_dominates_every_member():
    rng = np.random.default_rng(7)
    sets = [SolutionSet(label, rng.normal(10, 1, size=100)) for label in "ABC"]
    ref, trimmed = reference_cdf_relative(sets)
    assert ref.h == 100
    for f in trimmed:
        assert np.all(ref.sorted_values <= f.sorted_values)
        assert area_vs_reference(f, ref) >= 0.0
    assert sum(reference_attribution(ref).values()) == 100


def test_strictly_dominating_solver_is_the_reference():
    best = SolutionSet("best", [1.0, 1.5, 2.0])
    ref, trimmed = reference_cdf_relative([best, SolutionSet("other", [3.0, 4.0, 5.0])])
    np.testing.assert_array_equal(ref.sorted_values, trimmed[0].sorted_values)
    assert area_vs_reference(trimmed[0], ref) == 0.0
    assert opisd(0.0) == 1.0


def test_area_against_global_reference():
    assert area_vs_reference(cdf([6, 8]), reference_cdf_global(5.0, 2)) == 2.0
    values = np.random.default_rng(3).uniform(9.9, 11.0, size=37)
    assert area_vs_reference(cdf(values), reference_cdf_global(9.859, 37)) == float(np.mean(np.sort(values))) - 9.859
    with pytest.raises(ReferenceViolationError):
        area_vs_reference(cdf([1.0, 3.0]), reference_cdf_global(5.0, 2))
    with pytest.raises(MetricInputError):
        area_vs_reference(cdf([6.0]), reference_cdf_global(5.0, 2))


def test_area_of_identical_cdf_is_zero():
    assert area_vs_reference(cdf([5.0, 5.0, 5.0]), reference_cdf_global(5.0, 3)) == 0.0
    ref, trimmed = reference_cdf_relative([SolutionSet("A", [1, 2]), SolutionSet("B", [3, 4])])
    assert area_vs_reference(trimmed[0], ref) == 0.0


@pytest.mark.parametrize("area, expected", [(0.0, 1.0), (0.0180, 0.9823), (0.0165, 0.9837), (0.0464, 0.9556), (1.9533, 0.3386)])
def test_opisd_values(area, expected):
    # published values are truncated to four decimals
    assert math.floor(opisd(area) * 1e4) == round(expected * 1e4)


def test_opisd_rejects_negative_area():
    with pytest.raises(MetricInputError):
        opisd(-0.1)


def test_perc_global():
    ref = reference_cdf_global(2.0, 4)
    assert perc(cdf([2.0, 2.0, 2.0, 2.0]), ref) == 100.0
    assert perc(cdf([2.0, 2.0, 3.0, 5.0]), ref) == 50.0
    assert perc(cdf([2.0 + 1e-12, 2.0, 3.0, 5.0]), ref, eps=1e-9) == 50.0
    with pytest.raises(MetricInputError):
        perc(cdf([2.0]), ref)


def test_perc_relative_consumes_each_reference_entry_once():
    ref, trimmed = reference_cdf_relative([SolutionSet("A", [1, 1, 5]), SolutionSet("B", [1, 6, 7])])
    np.testing.assert_array_equal(ref.sorted_values, [1, 1, 1])
    assert perc(trimmed[0], ref) == pytest.approx(200 / 3)
    assert perc(trimmed[1], ref) == pytest.approx(100 / 3)
    standalone = ReferenceCdf(np.array([1.0, 2.0]), "reference", ReferenceKind.RELATIVE)
    assert perc(cdf([1.0, 3.0]), standalone) == 50.0


def test_rank_solvers_table_order():
    report = rank_solvers({"GA": 1.9533, "SA": 0.0165, "PSO": 0.0464})
    assert report.ranking == ["SA", "PSO", "GA"]
    assert [r.rank for r in report.records] == [1, 2, 3]
    assert report.record("GA").opisd == 1.0 / (1.0 + 1.9533)


def test_rank_solvers_edge_cases():
    assert rank_solvers({"only": 0.3}).ranking == ["only"]
    assert rank_solvers({"b": 0.5, "a": 0.5}).ranking == ["a", "b"]


def test_rank_solvers_rejects_mixed_references():
    records = [SolverRecord("A", 0.1, opisd(0.1), reference_digest="x"), SolverRecord("B", 0.2, opisd(0.2), reference_digest="y")]
    with pytest.raises(MixedReferencesError):
        rank_solvers(records)


def test_ranking_by_opisd_equals_ranking_by_area():
    rng = np.random.default_rng(5)
    areas = {f"s{k}": float(a) for k, a in enumerate(rng.uniform(0, 3, size=12))}
    report = rank_solvers(areas)
    assert report.ranking == sorted(areas, key=areas.get)
    opisds = [r.opisd for r in report.records]
    assert opisds == sorted(opisds, reverse=True)


def test_compare_sets_relative_toy():
    report = compare_sets([SolutionSet("A", [1, 3]), SolutionSet("B", [2, 4])], "R")
    assert report.ranking == ["A", "B"]
    assert_allclose([report.record("A").area, report.record("B").area], [0.5, 1.5])
    assert_allclose([report.record("A").opisd, report.record("B").opisd], [2 / 3, 0.4])
    assert report.h == 2 and report.kind == ReferenceKind.RELATIVE


def test_compare_sets_global_all_optimal():
    report = compare_sets([SolutionSet("A", [5.0] * 3), SolutionSet("B", [5.0] * 3)], "G", y_g=5.0)
    assert all(r.opisd == 1.0 and r.perc == 100.0 for r in report.records)
    assert report.h == 3
    with pytest.raises(MetricInputError):
        compare_sets([SolutionSet("A", [5.0])], "G")


def test_affine_shift_leaves_relative_results_unchanged():
    rng = np.random.default_rng(11)
    sets = [SolutionSet(label, rng.integers(10, 20, size=30)) for label in "ABC"]
    shifted = [SolutionSet(s.label, np.asarray(s.values) + 7.0) for s in sets]
    base, moved = compare_sets(sets, "R"), compare_sets(shifted, "R")
    assert base.ranking == moved.ranking
    assert_allclose([r.area for r in base.records], [r.area for r in moved.records], atol=1e-12)
    assert [r.perc for r in base.records] == [r.perc for r in moved.records]


def test_summary_statistics():
    stats = summary_statistics([1.0, 2.0, 3.0, 6.0])
    assert stats == {"count": 4, "best": 1.0, "worst": 6.0, "mean": 3.0, "median": 2.5,
                     "std": pytest.approx(np.std([1.0, 2.0, 3.0, 6.0], ddof=1))}


def test_dominance_matrix():
    rows = dominance_matrix([cdf([1, 4], "A"), cdf([2, 3], "B")])
    by_pair = {(r["dominant"], r["dominated"]): r for r in rows}
    assert by_pair[("A", "B")]["second_order"] and not by_pair[("A", "B")]["first_order"]
    assert not any(by_pair[("B", "A")][k] for k in ("deterministic", "first_order", "second_order"))


def test_first_order_agrees_with_step_functions_for_large_h():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        h = int(rng.integers(2, 201))
        a = cdf(rng.normal(0.0, 1.0, size=h))
        b = cdf(rng.normal(0.5, 1.0, size=h))
        assert first_order_dominates(a, b) == _step_dominates(a, b)
        if first_order_dominates(a, b):
            assert second_order_dominates(a, b)


def test_relative_reference_property_on_random_groups():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        sizes = rng.integers(1, 40, size=int(rng.integers(2, 6)))
        sets = [SolutionSet(f"s{k}", rng.gamma(2.0, 1.0, size=n).round(2)) for k, n in enumerate(sizes)]
        ref, trimmed = reference_cdf_relative(sets)
        assert ref.h == min(sizes)
        for f in trimmed:
            assert np.all(ref.sorted_values <= f.sorted_values)
            assert area_vs_reference(f, ref) >= 0.0
        assert sum(reference_attribution(ref).values()) == ref.h


def test_global_area_identity_on_random_inputs():
    rng = np.random.default_rng(8)
    for _ in range(200):
        y_g = float(rng.uniform(0, 10))
        values = y_g + rng.exponential(1.0, size=int(rng.integers(1, 120)))
        area = area_vs_reference(cdf(values), reference_cdf_global(y_g, len(values)))
        assert abs(area - (float(np.mean(values)) - y_g)) <= 1e-12


def test_compare_sets_global_rejects_unequal_run_counts():
    sets = [SolutionSet("A", [5.0, 5.0, 5.0, 100.0]), SolutionSet("B", [5.0, 6.0, 7.0])]
    with pytest.raises(MetricInputError):
        compare_sets(sets, "G", y_g=5.0)


def test_perc_relative_shares_tied_entries():
    report = compare_sets([SolutionSet("A", [1.0, 1.0]), SolutionSet("B", [1.0, 1.0])], "R")
    assert [report.record("A").perc, report.record("B").perc] == [100.0, 0.0]
    assert sum(r.perc for r in report.records) == 100.0


def test_perc_relative_sums_to_one_hundred_on_tied_groups():
    rng = np.random.default_rng(31)
    for _ in range(100):
        sizes = rng.integers(1, 25, size=int(rng.integers(2, 6)))
        sets = [SolutionSet(f"s{k}", rng.integers(0, 4, size=n).astype(float)) for k, n in enumerate(sizes)]
        report = compare_sets(sets, "R")
        assert sum(round(r.perc * report.h / 100.0) for r in report.records) == report.h
        assert_allclose(sum(r.perc for r in report.records), 100.0)
