import math

import pytest

from rgdom.errors import InvariantViolation, ParameterError
from rgdom.exact_solver import has_domset_of_size, min_domset_bb
from rgdom.experiment_harness import derive_seed
from rgdom.graph_core import GenParams, VertexSet, gen_random_graph, is_dominating
from rgdom.greedy_approx import GoodVertexParams, good_greedy_size_cap
from rgdom.hybrid_reductions import (EXPRESSIONS, SCAN_BINARY, SCAN_LINEAR, SCAN_PARALLEL, ApproximatorHandle,
                                     PluginFunction, PluginFunctions, Stage, approx_via_fpt,
                                     approx_via_fpt_report, exact_handle, expected_qp_min_domset,
                                     fpt_via_approx, fpt_via_approx_branch, fpt_via_approx_report,
                                     fpt_via_approx_size_limit, greedy_handle, minimum_admissible_D,
                                     plugin_from_tag, simple_partition_min_domset, sparse_branch,
                                     sparse_fpt_decide, sparse_fpt_decide_report, sparse_size_limit)

from .strategies import complete, edgeless, star


def fpt(g, k):
    return has_domset_of_size(g, k)


def admissible_D(p=0.5, epsilon=0.1):
    return minimum_admissible_D(p, epsilon) + 1


def test_expected_qp_on_complete_graph():
    outcome = expected_qp_min_domset(complete(8), 0.5)
    assert outcome.stage is Stage.BOUNDED_ENUM
    assert outcome.witness == VertexSet((0,))
    assert outcome.threshold_used == 8


def test_expected_qp_clamped_cap_covers_edgeless_graph():
    outcome = expected_qp_min_domset(edgeless(6), 0.5)
    assert outcome.stage is Stage.BOUNDED_ENUM
    assert len(outcome.witness) == 6
    assert outcome.threshold_used == 6


def test_simple_partition_falls_back_when_cap_is_too_small():
    outcome = simple_partition_min_domset(edgeless(20), 0.99, 1.1)
    assert outcome.threshold_used == 1
    assert outcome.stage is Stage.EXACT_FALLBACK
    assert len(outcome.witness) == 20


def test_hybrid_rejects_bad_constants():
    with pytest.raises(ParameterError):
        expected_qp_min_domset(complete(4), 1.0)
    with pytest.raises(ParameterError):
        simple_partition_min_domset(complete(4), 0.5, 1)


def _hybrid_optimality_run(count):
    fallbacks = 0
    for trial in range(count):
        n = 30 + trial % 31
        g = gen_random_graph(GenParams(n, 0.5, derive_seed(41, n, trial)))
        outcome = expected_qp_min_domset(g, 0.5)
        assert len(outcome.witness) == min_domset_bb(g).size, (n, trial)
        assert is_dominating(g, outcome.witness)
        fallbacks += outcome.stage is Stage.EXACT_FALLBACK
    return fallbacks


def test_hybrid_is_optimal_on_seeded_graphs():
    assert _hybrid_optimality_run(8) == 0


@pytest.mark.slow
def test_hybrid_optimality_acceptance():
    assert _hybrid_optimality_run(500) <= 5


def test_plugin_defaults():
    assert EXPRESSIONS['log2'](1000) == 9
    assert EXPRESSIONS['log2'](1) == 1
    assert EXPRESSIONS['loglog2'](16) == 2
    assert EXPRESSIONS['loglog2'](2) == 1
    assert EXPRESSIONS['sqrt'](40) == 6


def test_plugin_inverse_by_bisection_and_formula():
    assert EXPRESSIONS['log2'].invert(5) == 32
    assert EXPRESSIONS['sqrt'].invert(4) == 16
    assert EXPRESSIONS['sqrt'](EXPRESSIONS['sqrt'].invert(7)) >= 7


def test_sparse_min_n_uses_the_inverse():
    assert PluginFunctions().sparse_min_n() == 4
    assert PluginFunctions(g=EXPRESSIONS['loglog2']).sparse_min_n() == 16
    with pytest.raises(ParameterError):
        PluginFunctions(g=PluginFunction('flat', lambda n: 1)).validate()


def test_plugin_monotonicity_check():
    PluginFunctions().validate()
    with pytest.raises(ParameterError):
        PluginFunction('shrinking', lambda n: 100 - n).check_monotone()


def test_plugin_from_tag_rejects_unknown():
    assert plugin_from_tag('sqrt') is EXPRESSIONS['sqrt']
    with pytest.raises(ParameterError):
        plugin_from_tag('cube')


def test_approximator_handle_checks_domination():
    assert greedy_handle()(star(5)) == VertexSet((0,))
    broken = ApproximatorHandle(lambda g: VertexSet(()), 'lnn')
    with pytest.raises(InvariantViolation):
        broken(star(5))


def test_approx_via_fpt_on_complete_graph():
    outcome = approx_via_fpt_report(complete(10), 0.5, fpt, PluginFunctions(), 0.1, admissible_D())
    assert outcome.step == 1
    assert outcome.witness == VertexSet((0,))


def test_approx_via_fpt_on_edgeless_graph():
    outcome = approx_via_fpt_report(edgeless(8), 0.5, fpt, PluginFunctions(), 0.1, admissible_D())
    assert outcome.step == 3
    assert len(outcome.witness) == 8


def test_approx_via_fpt_good_vertex_step_respects_cap():
    def never(g, k):
        return False, None

    g = gen_random_graph(GenParams(200, 0.5, 17))
    D = admissible_D()
    outcome = approx_via_fpt_report(g, 0.5, never, PluginFunctions(), 0.1, D)
    assert outcome.step == 2
    assert is_dominating(g, outcome.witness)
    assert len(outcome.witness) <= good_greedy_size_cap(200, GoodVertexParams(0.5, 0.1, D))


def test_approx_via_fpt_exact_fallback_is_optimal():
    # 4 log_q 16 < 5 at p = 0.9, so bounded search cannot cover edgeless(16)
    g = edgeless(16)
    outcome = approx_via_fpt_report(g, 0.9, fpt, PluginFunctions(), 0.1, admissible_D(0.9, 0.1))
    assert outcome.step == 4
    assert outcome.stage == "step4"
    assert outcome.witness == VertexSet(tuple(range(16)))
    assert len(outcome.witness) == min_domset_bb(g).size


def test_approx_via_fpt_rejects_small_D():
    minimum = minimum_admissible_D(0.5, 0.1)
    with pytest.raises(ParameterError, match="minimum admissible D") as excinfo:
        approx_via_fpt(complete(10), 0.5, fpt, PluginFunctions(), 0.1, 2.0)
    assert f"{minimum:.4f}" in str(excinfo.value)


def test_approx_via_fpt_rejects_unknown_scan():
    with pytest.raises(ParameterError):
        approx_via_fpt(complete(4), 0.5, fpt, PluginFunctions(), 0.1, admissible_D(), scan="random")


def test_minimum_admissible_D_formula():
    mu = 0.01 / (32 * 0.5 * math.log(2))
    assert minimum_admissible_D(0.5, 0.1) == pytest.approx(math.sqrt(5 / mu))


@pytest.mark.parametrize("seed", range(3))
def test_approx_via_fpt_scan_modes_agree(seed):
    g = gen_random_graph(GenParams(24, 0.5, seed))
    results = [approx_via_fpt(g, 0.5, fpt, PluginFunctions(), 0.1, admissible_D(), scan=scan, threads=3)
               for scan in (SCAN_LINEAR, SCAN_BINARY, SCAN_PARALLEL)]
    assert results[0] == results[1] == results[2]
    assert is_dominating(g, results[0])


def _approx_spot_check(count):
    for trial in range(count):
        n = 30 + 10 * (trial % 3)
        g = gen_random_graph(GenParams(n, 0.5, derive_seed(5, n, trial)))
        outcome = approx_via_fpt_report(g, 0.5, fpt, PluginFunctions(), 0.1, admissible_D())
        assert is_dominating(g, outcome.witness)
        if outcome.step == 1:
            assert len(outcome.witness) == min_domset_bb(g).size


def test_approx_via_fpt_matches_optimum_when_probe_succeeds():
    _approx_spot_check(3)


@pytest.mark.slow
def test_approx_via_fpt_spot_check_acceptance():
    _approx_spot_check(30)


def test_branch_predicates_use_exact_arithmetic():
    assert not fpt_via_approx_branch(2, 4)
    assert fpt_via_approx_branch(3, 8)
    assert not sparse_branch(2, 8)
    assert sparse_branch(3, 26)
    assert fpt_via_approx_size_limit(256, 0.5, 4) == 4
    assert sparse_size_limit(1000, 8) == math.ceil(2 * math.log(1000))


def test_fpt_via_approx_examples():
    assert fpt_via_approx(complete(6), 0.5, 1, exact_handle(), PluginFunctions()) == (True, VertexSet((0,)))
    assert fpt_via_approx(edgeless(9), 0.5, 2, exact_handle(), PluginFunctions()) == (False, None)


def test_fpt_via_approx_requires_declared_ratio():
    with pytest.raises(ParameterError):
        fpt_via_approx(complete(6), 0.5, 1, greedy_handle(), PluginFunctions())
    with pytest.raises(ParameterError):
        fpt_via_approx(complete(6), 0.5, 7, exact_handle(), PluginFunctions())


def _fpt_via_approx_run(count):
    plugins = PluginFunctions()
    for trial in range(count):
        n = 8 + trial % 33
        g = gen_random_graph(GenParams(n, 0.5, derive_seed(13, n, trial)))
        for k in range(1, min(6, n) + 1):
            outcome = fpt_via_approx_report(g, 0.5, k, exact_handle(), plugins)
            assert outcome.answer == has_domset_of_size(g, k)[0], (n, trial, k, outcome.step)
            if outcome.answer:
                assert len(outcome.witness) <= k
                assert is_dominating(g, outcome.witness)
            if outcome.step == 4:
                assert not has_domset_of_size(g, k)[0]


def test_fpt_via_approx_matches_decider():
    _fpt_via_approx_run(10)


@pytest.mark.slow
def test_fpt_via_approx_acceptance():
    _fpt_via_approx_run(300)


def test_sparse_examples():
    sqrt = plugin_from_tag('sqrt')
    assert sparse_fpt_decide(star(15), sqrt, 1) == (True, VertexSet((0,)))
    outcome = sparse_fpt_decide_report(edgeless(16), sqrt, 2)
    assert outcome.answer is False
    assert outcome.witness is None


def test_sparse_rejects_dense_plugin():
    with pytest.raises(ParameterError):
        sparse_fpt_decide(complete(10), PluginFunction('identity', lambda n: n), 1)


def _sparse_run(count):
    sqrt = plugin_from_tag('sqrt')
    for trial in range(count):
        n = 8 + trial % 33
        g = gen_random_graph(GenParams(n, 1.0 / sqrt(n), derive_seed(19, n, trial)))
        for k in range(1, min(8, n) + 1):
            answer, witness = sparse_fpt_decide(g, sqrt, k)
            assert answer == has_domset_of_size(g, k)[0], (n, trial, k)
            if answer:
                assert is_dominating(g, witness)


def test_sparse_matches_decider():
    _sparse_run(10)


@pytest.mark.slow
def test_sparse_acceptance():
    _sparse_run(200)
