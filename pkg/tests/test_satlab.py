import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from restartbandits.arms import ConstantReward, Empirical, ZeroReset
from restartbandits.policies import DecisionGrid
from restartbandits.satlab import (
    CnfFormula,
    CompletionSamples,
    DimacsError,
    EmptyDistributionError,
    MetaExperimentConfig,
    SolveAttempt,
    arm_from_samples,
    bundled_instances,
    collect_completion_samples,
    generate_random_3sat,
    meta_run,
    parse_dimacs,
    preset_grid,
    satisfies,
    serialize_dimacs,
    walksat,
)


class TestParser:
    def test_basic(self):
        f = parse_dimacs("p cnf 2 1\n1 -2 0\n")
        assert f.n_vars == 2 and f.clauses == ((1, -2),)

    def test_header_only(self):
        f = parse_dimacs("p cnf 3 0\n")
        assert f.n_vars == 3 and f.n_clauses == 0

    def test_comments_and_multiline_clauses(self):
        text = "c a comment\np cnf 3 2\n1 2\n3 0 -1\n-2 0\n"
        f = parse_dimacs(text)
        assert f.clauses == ((1, 2, 3), (-1, -2))

    def test_satlib_percent_block(self):
        text = "p cnf 2 1\n1 2 0\n%\n0\n"
        assert parse_dimacs(text).n_clauses == 1

    def test_duplicate_literals_dropped(self):
        f = parse_dimacs("p cnf 2 1\n1 1 -2 0\n")
        assert f.clauses == ((1, -2),)

    def test_missing_header(self):
        with pytest.raises(DimacsError, match="header"):
            parse_dimacs("1 2 0\n")

    def test_literal_out_of_range_with_line_number(self):
        with pytest.raises(DimacsError, match="line 2"):
            parse_dimacs("p cnf 2 1\n1 5 0\n")

    def test_clause_count_mismatch(self):
        with pytest.raises(DimacsError, match="declares 2"):
            parse_dimacs("p cnf 2 2\n1 0\n")

    def test_unterminated_clause(self):
        with pytest.raises(DimacsError, match="unterminated"):
            parse_dimacs("p cnf 2 1\n1 2\n")

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_round_trip_on_generated_instances(self, seed):
        f = generate_random_3sat(12, 40, seed)
        assert parse_dimacs(serialize_dimacs(f)) == f


class TestGenerator:
    def test_shape(self):
        f = generate_random_3sat(100, 430, 0)
        assert f.n_vars == 100 and f.n_clauses == 430
        assert all(len(c) == 3 for c in f.clauses)
        assert all(1 <= abs(l) <= 100 for c in f.clauses for l in c)

    def test_deterministic_per_seed(self):
        assert generate_random_3sat(20, 50, 9) == generate_random_3sat(20, 50, 9)

    def test_min_vars(self):
        with pytest.raises(ValueError):
            generate_random_3sat(2, 5, 0)


class TestWalksat:
    def test_zero_clauses_solved_immediately(self):
        f = CnfFormula(3, ())
        att = walksat(f, 0.5, 100, np.random.default_rng(0))
        assert att.solved and att.flips == 0

    def test_unit_clause(self):
        f = CnfFormula(1, ((1,),))
        att = walksat(f, 0.5, 100, np.random.default_rng(0))
        assert att.solved and att.flips <= 1
        assert att.assignment == (1,)

    def test_budget_exhaustion_counts_every_flip(self):
        # unsatisfiable formula: flips must equal the whole budget
        f = CnfFormula(1, ((1,), (-1,)))
        att = walksat(f, 0.5, 57, np.random.default_rng(0))
        assert not att.solved and att.flips == 57

    def test_assignment_verified(self):
        f = generate_random_3sat(15, 50, 4)
        att = walksat(f, 0.5, 50000, np.random.default_rng(1))
        if att.solved:
            assert satisfies(f, att.assignment)

    def test_parameter_validation(self):
        f = CnfFormula(1, ((1,),))
        with pytest.raises(ValueError):
            walksat(f, 1.5, 10)
        with pytest.raises(ValueError):
            walksat(f, 0.5, -1)

    def test_solve_attempt_invariants(self):
        with pytest.raises(ValueError):
            SolveAttempt(True, 3, None)
        with pytest.raises(ValueError):
            SolveAttempt(False, -1)


class TestCompletionSamples:
    def test_trivial_formula_gives_zero_flip_samples(self):
        f = CnfFormula(2, ())
        cs = collect_completion_samples([f], reps=5, rng=np.random.default_rng(0))
        assert cs.flips == (0.0,) * 5 and cs.censored == 0

    def test_all_censored_is_error(self):
        f = CnfFormula(1, ((1,), (-1,)))  # unsatisfiable
        with pytest.raises(EmptyDistributionError):
            collect_completion_samples([f], cap=50, reps=3, rng=np.random.default_rng(0))

    def test_censored_runs_counted_not_sampled(self):
        sat = CnfFormula(2, ())
        unsat = CnfFormula(1, ((1,), (-1,)))
        cs = collect_completion_samples([sat, unsat], cap=20, reps=2,
                                        rng=np.random.default_rng(0))
        assert len(cs.flips) == 2 and cs.censored == 2
        assert cs.total_runs == 4

    def test_arm_from_samples(self):
        cs = CompletionSamples((3.0, 1.0, 7.0), censored=1, cap=100)
        arm = arm_from_samples(cs)
        assert isinstance(arm.completion, Empirical)
        assert arm.completion.samples == (1.0, 3.0, 7.0)
        assert isinstance(arm.reward, ConstantReward) and arm.reward.value == 1.0
        assert isinstance(arm.reset, ZeroReset)


class TestPresetGrid:
    def test_scaled_to_median(self):
        grid = preset_grid([10.0, 20.0, 30.0], i_max=8)
        assert len(grid) == 9
        assert grid.cutoffs[0] == pytest.approx(20.0 * 10 ** -0.5)
        assert grid.cutoffs[-1] == pytest.approx(20.0 * 10 ** 0.5)

    def test_explicit_scale(self):
        grid = preset_grid([1.0], i_max=4, scale=100.0)
        assert grid.cutoffs[0] == pytest.approx(100.0 * 10 ** -0.5)


class TestMetaRun:
    def arm(self):
        rng = np.random.default_rng(0)
        return arm_from_samples(
            CompletionSamples(tuple(np.sort(rng.pareto(1.5, 200) * 30 + 5)), 0, 10**5)
        )

    def test_zero_budget_zero_solved(self):
        cfg = MetaExperimentConfig(tau=0.0, luby_base=10.0)
        res = meta_run(self.arm(), cfg)
        assert res.solved == 0

    def test_solved_equals_total_reward(self):
        arm = self.arm()
        grid = preset_grid(arm.completion.samples)
        cfg = MetaExperimentConfig(tau=5000.0, grid=grid, seed=3)
        res = meta_run(arm, cfg, record=True)
        assert res.solved == sum(1 for e in res.trace.epochs if e.completed)

    def test_time_accounting_within_one_cutoff(self):
        arm = self.arm()
        cfg = MetaExperimentConfig(tau=2000.0, luby_base=20.0, seed=1)
        res = meta_run(arm, cfg, record=True)
        last = res.trace.epochs[-1]
        assert res.trace.total_time - last.u <= cfg.tau < res.trace.total_time

    def test_config_requires_exactly_one_policy(self):
        with pytest.raises(ValueError):
            MetaExperimentConfig(tau=10.0)
        with pytest.raises(ValueError):
            MetaExperimentConfig(tau=10.0, luby_base=1.0, fixed_cutoff=2.0)


class TestBundled:
    def test_bundled_instances_load_and_solve(self):
        forms = bundled_instances()
        assert len(forms) >= 3
        for f in forms[:2]:
            att = walksat(f, 0.5, 10**5, np.random.default_rng(0))
            assert att.solved
            assert satisfies(f, att.assignment)
