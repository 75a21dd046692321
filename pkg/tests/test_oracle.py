import pytest

from modules.core_order import PointSet, rank
from modules.errors import BudgetExceededError
from modules.oracle import (
    LAMBDA_UNIQUENESS_INSTANCES,
    STABILITY_INSTANCES,
    Law,
    brute_force_min,
    check_hz19,
    check_idt,
    check_lambda_laws,
    check_lambda_uniqueness,
    check_lemma_sub,
    check_lw_agm,
    check_non_closed_minimiser,
    check_restate,
    check_stability,
    is_cartesian_product,
    random_lower_bound_suite,
    reports_frame,
    restate_suite,
)
from modules.projections import AXIS, HYPERPLANE, lambda_segment, sigma_segment


class TestBruteForce:
    @pytest.mark.parametrize("kind, n, m, box, expected", [
        (HYPERPLANE, 2, 3, (3, 3), 4),
        (HYPERPLANE, 3, 5, (3, 3, 3), 10),
        (AXIS, 2, 4, (4, 4), 4),
        (HYPERPLANE, 1, 4, (6,), 1),
        (AXIS, 3, 1, (2, 2, 2), 3),
    ])
    def test_examples(self, kind, n, m, box, expected):
        result = brute_force_min(kind, n, m, box=box)
        assert result.min_value == expected
        assert result.minimiser_count >= 1

    def test_default_box_contains_segment(self):
        result = brute_force_min(HYPERPLANE, 2, 5)
        assert result.box == (3, 3)
        assert result.min_value == sigma_segment(2, 5)

    def test_minimiser_count_of_pairs(self):
        # two cells sharing a row or a column
        result = brute_force_min(HYPERPLANE, 2, 2, box=(3, 3))
        assert (result.min_value, result.minimiser_count) == (3, 18)

    def test_witnesses_attain_minimum(self):
        result = brute_force_min(HYPERPLANE, 2, 4, box=(4, 4), witness_cap=5)
        assert len(result.witnesses) == 5
        assert all(is_cartesian_product(w) == [2, 2] for w in result.witnesses)

    def test_witnesses_in_lexicographic_rank_order(self):
        result = brute_force_min(HYPERPLANE, 2, 2, box=(3, 3), keep_all=True)
        ranks = [tuple(sorted(rank(p) for p in w.points)) for w in result.witnesses]
        assert len(ranks) == 18
        assert ranks == sorted(ranks)
        assert ranks[0] == (0, 1)

    def test_parallel_matches_serial(self):
        serial = brute_force_min(HYPERPLANE, 2, 4, box=(4, 4))
        parallel = brute_force_min(HYPERPLANE, 2, 4, box=(4, 4), threads=2)
        assert parallel == serial
        assert parallel.to_dict() == serial.to_dict()

    def test_small_chunks_match(self):
        assert brute_force_min(AXIS, 2, 5, box=(4, 4), chunk=7) == brute_force_min(AXIS, 2, 5, box=(4, 4))

    def test_budget_refusal(self):
        with pytest.raises(BudgetExceededError) as info:
            brute_force_min(HYPERPLANE, 3, 9, box=(3, 3, 3), budget=1000)
        assert info.value.candidates == 4686825

    @pytest.mark.parametrize("kind, n, m, box", [
        ("volume", 2, 2, (2, 2)),
        (HYPERPLANE, 2, 5, (2, 2)),
        (HYPERPLANE, 2, 2, (2, 2, 2)),
    ])
    def test_rejects_bad_input(self, kind, n, m, box):
        with pytest.raises(ValueError):
            brute_force_min(kind, n, m, box=box)

    def test_report_shapes(self):
        result = brute_force_min(HYPERPLANE, 2, 3, box=(3, 3), witness_cap=1)
        assert list(result.to_dict()) == ["kind", "n", "m", "box", "min_value", "minimiser_count", "witnesses"]
        assert result.to_frame().loc[0, "box"] == "3x3"

    @pytest.mark.slow
    @pytest.mark.parametrize("n, box", [(2, (4, 4)), (3, (3, 3, 3))])
    def test_agrees_with_formulas(self, n, box):
        for m in range(1, 10):
            assert brute_force_min(HYPERPLANE, n, m, box=box, threads=2).min_value == sigma_segment(n, m)
            assert brute_force_min(AXIS, n, m, box=box, threads=2).min_value == lambda_segment(n, m)


class TestProducts:
    @pytest.mark.parametrize("points, expected", [
        ([(0, 1), (0, 5), (2, 1), (2, 5)], [2, 2]),
        ([(0, 0), (1, 0), (0, 1)], None),
        ([(4, 4, 4)], [1, 1, 1]),
    ])
    def test_is_cartesian_product(self, points, expected):
        assert is_cartesian_product(PointSet.from_points(points)) == expected

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            is_cartesian_product(PointSet.empty(2))

    @pytest.mark.parametrize("n, K, i, box", [(2, 2, 0, (4, 4)), (2, 3, 1, (4, 4)), (2, 1, 1, (4, 4))])
    def test_stability(self, n, K, i, box):
        report = check_stability(n, K, i, box=box)
        assert report.ok, report.violations
        assert report.cases_checked > 0

    @pytest.mark.slow
    @pytest.mark.parametrize("n, K, i, box", STABILITY_INSTANCES)
    def test_stability_pinned(self, n, K, i, box):
        assert check_stability(n, K, i, box=box, threads=2).ok

    def test_lambda_uniqueness(self):
        report = check_lambda_uniqueness(2, 2, 0, box=(4, 4))
        assert report.ok, report.violations
        assert report.law is Law.LAMBDA_UNIQUENESS

    @pytest.mark.slow
    @pytest.mark.parametrize("n, K, i, box", LAMBDA_UNIQUENESS_INSTANCES)
    def test_lambda_uniqueness_pinned(self, n, K, i, box):
        assert check_lambda_uniqueness(n, K, i, box=box, threads=2).ok

    @pytest.mark.parametrize("K, C", [(3, 1), (2, 1), (5, 2)])
    def test_non_closed_minimiser(self, K, C):
        assert check_non_closed_minimiser(K, C).ok

    def test_non_closed_minimiser_arguments(self):
        with pytest.raises(ValueError):
            check_non_closed_minimiser(1, 2)


class TestSigmaLaws:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_lemma_sub(self, n):
        reports = check_lemma_sub(n, 80)
        assert [r.law for r in reports] == [Law.SUB_I, Law.SUB_II, Law.SUB_III][:3 if n >= 2 else 2]
        for r in reports:
            assert r.ok, (r.law, r.violations[:3])
            assert r.cases_checked > 0

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_lemma_sub_full(self, n):
        assert all(r.ok for r in check_lemma_sub(n, 300))

    def test_lemma_examples(self):
        assert sigma_segment(2, 2) + sigma_segment(2, 6) <= sigma_segment(2, 3) + sigma_segment(2, 5)
        assert sigma_segment(2, 2) < 2 * sigma_segment(2, 1)
        assert sigma_segment(2, 3) > sigma_segment(1, 3)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_idt(self, n):
        report = check_idt(n, 2000)
        assert report.ok, report.violations[:3]

    def test_idt_needs_two_dimensions(self):
        with pytest.raises(ValueError):
            check_idt(1, 10)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_lw_agm(self, n):
        assert check_lw_agm(n, 10_000).ok

    def test_reports_frame(self):
        frame = reports_frame(check_lemma_sub(2, 20))
        assert list(frame.columns) == ["law", "domain", "cases_checked", "violations"]
        assert frame["violations"].sum() == 0


class TestRestate:
    @pytest.mark.parametrize("n, m_list", [(2, [2, 2]), (3, [9, 8]), (3, [5]), (2, [0, 3, 0]), (1, [1, 0, 1])])
    def test_examples(self, n, m_list):
        report = check_restate(n, len(m_list), m_list)
        assert report.ok, report.violations

    def test_tight_cases(self):
        assert sigma_segment(2, 4) == 1 + 1 + 2
        assert sigma_segment(3, 17) == sigma_segment(2, 9) + sigma_segment(2, 8) + 9

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            check_restate(2, 2, [1])
        with pytest.raises(ValueError):
            check_restate(1, 1, [3])

    def test_suite_is_deterministic(self):
        first = restate_suite(200, 4, 5, 50, seed=3)
        again = restate_suite(200, 4, 5, 50, seed=3)
        assert first.ok
        assert first.cases_checked == 200
        assert first.to_dict() == again.to_dict()

    @pytest.mark.slow
    def test_suite_full(self):
        assert restate_suite(10_000, 4, 5, 50, seed=0).ok


class TestLambdaLaws:
    def test_examples(self):
        assert lambda_segment(2, 9) == lambda_segment(1, 3) + 3
        assert lambda_segment(2, 3) == lambda_segment(2, 4) == 4
        assert (lambda_segment(2, 2), lambda_segment(2, 3)) == (3, 4)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_laws(self, n):
        reports = check_lambda_laws(n, 200, 20)
        assert [r.law for r in reports] == [Law.HZ19, Law.LAMBDA_RESTATE, Law.LAMBDA_CLOSED_FORM]
        for r in reports:
            assert r.ok, (r.law, r.violations[:3])

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_increment_law_wide(self, n):
        assert check_hz19(n, 10_000).ok

    def test_increment_law_starts_at_one(self):
        # the empty segment is closed, yet the first point adds one value on every axis
        assert lambda_segment(3, 1) - lambda_segment(3, 0) == 3
        assert lambda_segment(1, 1) - lambda_segment(1, 0) == 1
        assert check_hz19(3, 50).cases_checked == 50


class TestRandomSets:
    def test_suite(self):
        report = random_lower_bound_suite(40, 4, 30, 6, seed=1)
        assert report.ok, report.violations
        assert report.cases_checked == 40

    def test_seed_reproducible(self):
        assert random_lower_bound_suite(10, 3, 12, 4, seed=5).to_dict() == \
            random_lower_bound_suite(10, 3, 12, 4, seed=5).to_dict()

    @pytest.mark.slow
    def test_suite_full(self):
        report = random_lower_bound_suite(1000, 4, 40, 15, seed=0)
        assert report.ok, report.violations[:3]

    def test_pipeline_failures_are_recorded(self, monkeypatch):
        def broken(A):
            raise ValueError("negative slab")

        monkeypatch.setattr("modules.oracle.rearrange_to_segment", broken)
        report = random_lower_bound_suite(3, 3, 10, 4, seed=2)
        assert [v["trial"] for v in report.violations] == [0, 1, 2]
        assert all(v["reason"] == "rearrange: ValueError: negative slab" for v in report.violations)
