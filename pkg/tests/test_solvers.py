import math
import pickle
from dataclasses import dataclass

import numpy as np
import pytest
from numpy.testing import assert_allclose

from opisd_bench.modules.defs.meta import RunStatus
from opisd_bench.modules.defs.solvers import SolverDef, get_solver, get_solvers
from opisd_bench.modules.enumeration import global_optimum
from opisd_bench.modules.errors import DegenerateProblemError
from opisd_bench.modules.network import is_radial, random_radial_config
from opisd_bench.modules.solvers import (
    GaParams,
    ProblemHandle,
    PsoParams,
    SaParams,
    acceptance_probability,
    adaptive_stop,
    c0_from_worsening,
    collect_solutions,
    estimate_c0,
    expand_grid,
    expand_values,
    inertia_weight,
    run_ga,
    run_pso,
    run_sa,
    selection_weights,
)
from opisd_bench.modules.solvers.moves import crossover, move_towards, mutate, open_only_in
from opisd_bench.modules.utils.rng import make_rng


@dataclass(eq=False)
class RadialityCheckingProblem(ProblemHandle):
    def objective(self, cfg):
        assert is_radial(self.network, cfg)
        return super().objective(cfg)


FAST_SA = SaParams(alpha=0.9, m_a=20, m_c=10, n_s=5)


def test_adaptive_stop_examples():
    assert not adaptive_stop([10, 9, 8, 7, 6], n_s=3)
    assert adaptive_stop([5, 5, 5], n_s=3)
    assert adaptive_stop([10, 10, 9.9999], n_s=2, threshold=1e-3)
    assert not adaptive_stop([5, 5], n_s=3)
    assert not adaptive_stop([3.0, 2.0, 1.0], n_s=1)
    assert adaptive_stop([3.0, 2.0, 2.0], n_s=1)
    assert adaptive_stop([4.0], n_s=1)
    with pytest.raises(ValueError):
        adaptive_stop([1], n_s=0)


def test_acceptance_probability():
    assert acceptance_probability(0.0, 1.0) == 1.0
    assert acceptance_probability(-3.0, 0.0) == 1.0
    assert acceptance_probability(1.0, 0.0) == 0.0
    assert acceptance_probability(1.0, 1e-300) == 0.0
    assert acceptance_probability(math.inf, 5.0) == 0.0
    assert_allclose(acceptance_probability(1.0, 2.0), math.exp(-0.5))


def test_c0_formula():
    assert_allclose(c0_from_worsening(1.0, 0.5), 1.4427, atol=1e-4)
    assert_allclose(c0_from_worsening(2.0, 0.5), 2.8854, atol=1e-4)


def test_estimate_c0_is_deterministic(mesh):
    problem = ProblemHandle.from_network(mesh)
    start = mesh.initial_configuration
    first = estimate_c0(problem, start, 10, 0.5, make_rng(4))
    assert first > 0
    assert estimate_c0(problem, start, 10, 0.5, make_rng(4)) == first


def test_estimate_c0_on_unique_configuration(chain5):
    with pytest.raises(DegenerateProblemError):
        estimate_c0(ProblemHandle.from_network(chain5), chain5.initial_configuration, 10, 0.5, make_rng(0))


def test_params_validation():
    with pytest.raises(ValueError):
        SaParams(alpha=1.0)
    with pytest.raises(ValueError):
        SaParams(m_a=10, m_c=20)
    with pytest.raises(ValueError):
        GaParams(c_ga=1)
    with pytest.raises(ValueError):
        GaParams(p_c=1.5)
    with pytest.raises(ValueError):
        PsoParams(w_init=0.3, w_final=0.4)


@pytest.mark.parametrize("run, params", [
    (run_sa, FAST_SA),
    (run_ga, GaParams(c_ga=6, p_c=0.9, p_m=0.1, n_s=4)),
    (run_pso, PsoParams(c_pso=6, n_s=4)),
])
def test_solvers_are_deterministic(mesh, run, params):
    problem = ProblemHandle.from_network(mesh)
    first, second = run(problem, params, 17), run(ProblemHandle.from_network(mesh), params, 17)
    assert first.best_config == second.best_config
    assert first.best_value == second.best_value
    assert (first.evaluations, first.iterations) == (second.evaluations, second.iterations)
    assert first.best_value == problem.objective(first.best_config)


@pytest.mark.parametrize("run, params", [
    (run_sa, FAST_SA),
    (run_sa, SaParams(alpha=0.9, m_a=20, m_c=10, n_s=1)),
    (run_ga, GaParams(c_ga=6, p_c=0.9, p_m=0.1, n_s=1)),
    (run_pso, PsoParams(c_pso=6, n_s=4)),
])
def test_best_so_far_never_worsens(mesh, run, params):
    sample = run(ProblemHandle.from_network(mesh), params, 5)
    history = sample.best_history
    assert len(history) == sample.iterations + 1
    assert all(later <= earlier for earlier, later in zip(history, history[1:]))
    assert history[-1] == sample.best_value
    assert sample.iterations >= 1


@pytest.mark.parametrize("run, params", [
    (run_sa, FAST_SA),
    (run_ga, GaParams(c_ga=4, n_s=3)),
    (run_pso, PsoParams(c_pso=4, n_s=3)),
])
def test_unique_configuration_is_returned(chain5, run, params):
    sample = run(ProblemHandle.from_network(chain5), params, 1)
    assert sample.best_config == chain5.initial_configuration
    assert sample.status == RunStatus.DEGENERATE
    assert math.isfinite(sample.best_value)


@pytest.mark.parametrize("run, params", [
    (run_sa, FAST_SA),
    (run_ga, GaParams(c_ga=8, p_c=0.9, p_m=0.2, n_s=4)),
    (run_pso, PsoParams(c_pso=8, n_s=4)),
])
def test_solvers_only_evaluate_radial_configurations(two_feeder, run, params):
    problem = RadialityCheckingProblem(two_feeder, ProblemHandle.from_network(two_feeder).limits)
    sample = run(problem, params, 5)
    assert is_radial(two_feeder, sample.best_config)


def test_ga_without_variation_keeps_initial_best(mesh):
    params = GaParams(c_ga=5, p_c=0.0, p_m=0.0, n_s=3)
    problem = ProblemHandle.from_network(mesh)
    rng = make_rng(9)
    initial = [random_radial_config(mesh, rng) for _ in range(params.c_ga)]
    sample = run_ga(problem, params, 9)
    assert sample.best_value == min(problem.objective(cfg) for cfg in initial)


def test_selection_weights():
    weights = selection_weights([3.0, 1.0, math.inf, 2.0])
    assert_allclose(weights.sum(), 1.0)
    assert weights[2] == 0.0
    assert weights[1] > weights[3] > weights[0] > 0.0
    assert_allclose(selection_weights([math.inf, math.inf]), [0.5, 0.5])


def test_inertia_schedule():
    assert inertia_weight(0, 0.9, 0.4, 100) == 0.9
    assert inertia_weight(10, 0.9, 0.4, 100) > inertia_weight(20, 0.9, 0.4, 100) > 0.4
    assert all(inertia_weight(m, 0.6, 0.6, 50) == 0.6 for m in range(100))


def test_moves_preserve_radiality(two_feeder):
    rng = make_rng(21)
    population = [random_radial_config(two_feeder, rng) for _ in range(20)]
    for a, b in zip(population, population[1:]):
        child = mutate(two_feeder, crossover(two_feeder, a, b, rng), 0.3, rng)
        assert is_radial(two_feeder, child)


def test_move_towards_reaches_target(mesh):
    rng = make_rng(2)
    start, target = random_radial_config(mesh, rng), random_radial_config(mesh, rng)
    moved = move_towards(mesh, start, target, 10 * mesh.n_open, rng)
    assert moved == target


def test_open_only_in_follows_gene_difference(mesh):
    rng = make_rng(4)
    start, target = random_radial_config(mesh, rng), random_radial_config(mesh, rng)
    differing = open_only_in(mesh, start, target)
    assert differing == mesh.ordered(start.open_ids - target.open_ids)
    assert 2 * len(differing) == int(np.count_nonzero(start.genes(mesh) != target.genes(mesh)))
    assert open_only_in(mesh, start, start) == []


def test_objective_cache_survives_pickling(mesh):
    problem = ProblemHandle.from_network(mesh)
    value = problem.objective(mesh.initial_configuration)
    clone = pickle.loads(pickle.dumps(problem))
    assert clone.objective(mesh.initial_configuration) == value


def test_expand_values():
    alphas = expand_values({"start": 0.900, "stop": 0.999, "step": 0.001})
    assert len(alphas) == 100
    assert (alphas[0], alphas[1], alphas[-1]) == (0.9, 0.901, 0.999)
    assert expand_values({"start": 100, "stop": 190, "step": 10}) == list(range(100, 200, 10))
    assert len(expand_values({"start": 0.35, "stop": 0.44, "step": 0.01})) == 10
    assert expand_values([1, 2]) == [1, 2]


def test_expand_grid_covers_all_combinations():
    cells = expand_grid({"c_ga": [10, 20], "p_c": [0.3, 0.4, 0.5]}, {"p_m": 0.01})
    assert len(cells) == 6
    assert cells[0] == {"p_m": 0.01, "c_ga": 10, "p_c": 0.3}
    assert cells[-1] == {"p_m": 0.01, "c_ga": 20, "p_c": 0.5}


def test_collect_solutions_schedule(ring4):
    problem = ProblemHandle.from_network(ring4)
    grid = {"alpha": [0.90 + 0.01 * k for k in range(10)]}
    fixed = {"m_a": 5, "m_c": 2, "n_s": 2}
    samples = collect_solutions(problem, "SA", grid, fixed, h_s=100, base_seed=1)
    assert len(samples) == 100
    assert [s.seed for s in samples] == list(range(1, 101))
    assert [s.run_index for s in samples] == list(range(100))
    assert samples[3].param_cell == samples[13].param_cell != samples[4].param_cell

    rerun = collect_solutions(problem, "SA", grid, fixed, h_s=100, base_seed=1)
    assert [(s.best_config, s.best_value) for s in rerun] == [(s.best_config, s.best_value) for s in samples]
    assert len(collect_solutions(problem, "SA", grid, fixed, h_s=1)) == 1


def test_collect_records_failed_runs(ring4, monkeypatch):
    def explode(problem, params, seed):
        raise RuntimeError("boom")

    monkeypatch.setitem(get_solvers(), "BOOM", SolverDef("BOOM", SaParams, explode, "Boom"))
    problem = ProblemHandle.from_network(ring4)
    samples = collect_solutions(problem, "BOOM", h_s=2, raise_errors=False)
    assert [s.status for s in samples] == [RunStatus.FAILED, RunStatus.FAILED]
    with pytest.raises(RuntimeError):
        collect_solutions(problem, "BOOM", h_s=1)


def test_registry_lists_the_three_solvers():
    assert {"SA", "GA", "PSO"} <= set(get_solvers())
    assert get_solver("GA").params_cls is GaParams
    with pytest.raises(KeyError):
        get_solver("TABU")


@pytest.mark.slow
def test_sa_finds_the_global_optimum(mesh):
    problem = ProblemHandle.from_network(mesh)
    y_g = global_optimum(mesh).y_g
    hits = sum(run_sa(problem, SaParams(alpha=0.95), seed).best_value == y_g for seed in range(1, 101))
    assert hits >= 95


@pytest.mark.slow
@pytest.mark.parametrize("run, params", [
    (run_ga, GaParams(c_ga=30, p_c=0.6, p_m=0.05, n_s=10)),
    (run_pso, PsoParams(c_pso=30, n_s=10)),
])
def test_population_solvers_find_the_global_optimum(mesh, run, params):
    problem = ProblemHandle.from_network(mesh)
    y_g = global_optimum(mesh).y_g
    hits = sum(run(problem, params, seed).best_value == y_g for seed in range(1, 21))
    assert hits > 10


@pytest.mark.slow
def test_parallel_collection_keeps_schedule_order(mesh):
    problem = ProblemHandle.from_network(mesh)
    serial = collect_solutions(problem, "SA", {"alpha": [0.9, 0.95]}, {"m_a": 20, "m_c": 5, "n_s": 3}, h_s=6)
    parallel = collect_solutions(problem, "SA", {"alpha": [0.9, 0.95]}, {"m_a": 20, "m_c": 5, "n_s": 3}, h_s=6, workers=2)
    assert [s.best_value for s in parallel] == [s.best_value for s in serial]
    assert [s.seed for s in parallel] == [s.seed for s in serial]


@pytest.mark.slow
@pytest.mark.parametrize("run, params", [(run_sa, SaParams(alpha=0.95)), (run_pso, PsoParams())])
def test_solvers_reach_the_optimum_of_an_enumerable_feeder(feeder15, run, params):
    problem = ProblemHandle.from_network(feeder15)
    y_g = global_optimum(feeder15).y_g
    values = [run(problem, params, seed).best_value for seed in range(1, 101)]
    assert min(values) == y_g
    assert sum(value == y_g for value in values) >= 95
