import csv
import json
import math
import os
import pickle

import pytest

from rgdom.errors import ConfigError, HarnessError, InvariantViolation, ParameterError
from rgdom.experiment_harness import (CSV_HEADER, ExperimentConfig, TrialRecord, derive_seed, emit_csv,
                                      emit_summary_json, estimate_distinguish_frequency,
                                      estimate_max_degree_frequency, estimate_rarity,
                                      estimate_small_domset_frequency, small_domset_lower_bound,
                                      high_degree_failure_bound, good_greedy_failure_bound, rarity_bound,
                                      normalize_algorithm, run_campaign, run_experiment, splitmix64,
                                      expanded_cap_lower_bound, wilson_interval)


def make_config(**overrides):
    values = {'name': 'unit', 'n_values': [20], 'p': 0.5, 'trials': 3, 'base_seed': 99,
              'algorithms': ['greedy']}
    values.update(overrides)
    return ExperimentConfig(**values).validate()


def _csv_without_elapsed(file_path):
    with open(file_path, newline='') as f:
        return [row[:-1] for row in csv.reader(f)]


def test_splitmix64_reference_value():
    # first output of the reference splitmix64 stream seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_derive_seed_is_stable_and_spreads():
    assert derive_seed(1, 20, 0) == derive_seed(1, 20, 0, 0)
    seeds = {derive_seed(1, n, trial) for n in (10, 20) for trial in range(50)}
    assert len(seeds) == 100
    assert all(0 <= seed < 2 ** 64 for seed in seeds)
    assert derive_seed(1, 20, 0, 1) != derive_seed(1, 20, 0, 0)


def test_normalize_algorithm_tags():
    assert normalize_algorithm('greedy_lnn') == 'greedy'
    assert normalize_algorithm('approx_via_fpt') == 'approx-via-fpt'
    with pytest.raises(ConfigError):
        normalize_algorithm('quantum')


@pytest.mark.parametrize("overrides", [
    {'trials': 0},
    {'p': None},
    {'g_expr': 'sqrt'},
    {'base_seed': None},
    {'n_values': []},
    {'algorithms': ['nope']},
    {'algorithms': ['sparse']},
    {'algorithms': ['hunt'], 'C': 1.0},
    {'algorithms': ['approx-via-fpt'], 'D': 2.0},
    {'estimates': ['everything']},
    {'threads': 0},
    {'w_expr': 'cube'},
    {'n_values': 12},
    {'algorithms': 'greedy'},
    {'k_values': 3},
    {'estimates': 'rarity'},
    {'C': '4'},
    {'w_expr': ['log2']},
    {'estimates': ['distinguish'], 'C': 1.0},
])
def test_invalid_configs_fail_before_any_trial(overrides):
    with pytest.raises(ConfigError):
        make_config(**overrides)


def test_sparse_mode_requires_small_g():
    with pytest.raises(ConfigError):
        make_config(p=None, g_expr='sqrt', n_values=[3], algorithms=['sparse'])
    with pytest.raises(ConfigError, match="needs n >= 16"):
        make_config(p=None, g_expr='loglog2', n_values=[8], algorithms=['sparse'])
    config = make_config(p=None, g_expr='sqrt', n_values=[16], algorithms=['sparse'])
    assert config.edge_probability(16) == 0.25


def test_config_from_json(tmp_path):
    file_path = tmp_path / "campaign.json"
    file_path.write_text(json.dumps({'name': 'from_file', 'n_values': [12], 'p': 0.3, 'trials': 2,
                                     'base_seed': 4, 'algorithms': ['greedy_lnn', 'exact']}))
    config = ExperimentConfig.from_json(str(file_path))
    assert config.algorithms == ['greedy', 'exact']
    assert config.p == 0.3


def test_config_from_json_rejects_unknown_keys_and_bad_json(tmp_path):
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({'n_values': [12], 'p': 0.3, 'base_seed': 1, 'colour': 'red'}))
    with pytest.raises(ConfigError, match="colour"):
        ExperimentConfig.from_json(str(unknown))
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json(str(broken))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json(str(tmp_path / "missing.json"))


def test_greedy_campaign_records():
    records = run_campaign(make_config())
    assert len(records) == 3
    assert [r.trial for r in records] == [0, 1, 2]
    assert all(r.size >= 1 and r.algorithm == 'greedy' for r in records)
    assert all(r.seed == derive_seed(99, 20, r.trial, 0) for r in records)


def test_campaign_is_deterministic_apart_from_timing(tmp_path):
    config = make_config(algorithms=['greedy', 'exact', 'hunt'], n_values=[14, 18])
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_campaign(config), str(first))
    emit_csv(run_campaign(config), str(second))
    assert _csv_without_elapsed(first) == _csv_without_elapsed(second)


def test_parallel_campaign_matches_sequential(tmp_path):
    sequential = run_campaign(make_config(algorithms=['greedy', 'exact'], n_values=[12, 16], trials=4))
    parallel = run_campaign(make_config(algorithms=['greedy', 'exact'], n_values=[12, 16], trials=4,
                                        threads=2))
    strip = lambda records: [(r.n, r.trial, r.algorithm, r.seed, r.size, r.stage) for r in records]
    assert strip(sequential) == strip(parallel)


def _paired_run(n_values, trials):
    records = run_campaign(make_config(algorithms=['hybrid', 'exact'], n_values=n_values, trials=trials))
    by_trial = {}
    for record in records:
        by_trial.setdefault((record.n, record.trial), {})[record.algorithm] = record
    for pair in by_trial.values():
        assert pair['hybrid'].seed == pair['exact'].seed
        assert pair['hybrid'].size == pair['exact'].size
    return records


def test_hybrid_and_exact_pair_up():
    records = _paired_run([30], 3)
    assert len(records) == 6


@pytest.mark.slow
def test_hybrid_and_exact_pair_up_acceptance():
    assert len(_paired_run([30, 40, 50, 60], 50)) == 400


def test_decider_campaign_emits_one_record_per_k():
    config = make_config(algorithms=['fpt-via-approx'], n_values=[10], trials=2, k_values=[1, 2, 3])
    records = run_campaign(config)
    assert [r.algorithm for r in records] == ['fpt-via-approx:k=1', 'fpt-via-approx:k=2',
                                              'fpt-via-approx:k=3'] * 2
    assert all(r.stage.startswith('step') for r in records)


def test_hunt_records_carry_stall_and_rounds():
    records = run_campaign(make_config(algorithms=['hunt'], n_values=[60]))
    for record in records:
        assert record.stall is True
        assert record.stage == 'stall'
        assert record.rounds == 0
        assert record.red_counts == (60,)


def test_invariant_violation_writes_dump(tmp_path, monkeypatch):
    import rgdom.experiment_harness as harness

    def broken(g):
        raise InvariantViolation("forced", {'where': 'test'})

    monkeypatch.setattr(harness, 'greedy_lnn', broken)
    config = make_config(output_csv=str(tmp_path / "out.csv"))
    with pytest.raises(InvariantViolation) as excinfo:
        run_campaign(config)
    dump_path = excinfo.value.details['dump_path']
    with open(dump_path) as f:
        dump = json.load(f)
    assert dump['error'] == 'forced'
    assert dump['details']['where'] == 'test'
    assert dump['details']['trial'] == 0


def test_invariant_violation_survives_pickling():
    error = pickle.loads(pickle.dumps(InvariantViolation("boom", {'round': 3})))
    assert str(error) == "boom"
    assert error.details == {'round': 3}


def test_emit_csv_format(tmp_path):
    record = TrialRecord(trial=0, seed=5, n=10, p=0.5, algorithm='hunt', size=4, stage='stall',
                         stall=True, rounds=2, elapsed_ns=123)
    file_path = tmp_path / "one.csv"
    emit_csv([record], str(file_path))
    content = file_path.read_bytes().decode('utf-8')
    assert content == ",".join(CSV_HEADER) + "\n0,5,10,0.500000,hunt,4,stall,1,2,123\n"


def test_emit_csv_is_pure_serialization(tmp_path):
    records = run_campaign(make_config())
    emit_csv(records, str(tmp_path / "a.csv"))
    emit_csv(records, str(tmp_path / "b.csv"))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_emit_csv_refuses_empty_and_reports_path(tmp_path):
    with pytest.raises(HarnessError):
        emit_csv([], str(tmp_path / "empty.csv"))
    record = TrialRecord(trial=0, seed=1, n=2, p=0.5, algorithm='greedy', size=1)
    with pytest.raises(HarnessError) as excinfo:
        emit_csv([record], str(tmp_path))
    assert str(tmp_path) in str(excinfo.value)


def test_wilson_interval():
    low, high = wilson_interval(50, 100)
    assert low == pytest.approx(0.4038, abs=1e-3)
    assert high == pytest.approx(0.5962, abs=1e-3)
    low, high = wilson_interval(0, 300)
    assert low == pytest.approx(0.0, abs=1e-12)
    assert 0 < high < 0.02
    with pytest.raises(ParameterError):
        wilson_interval(1, 0)


def test_analytic_bounds():
    assert small_domset_lower_bound(300, 0.5, 4) == pytest.approx(1.0)
    assert small_domset_lower_bound(4, 0.5, 2) < 0
    assert expanded_cap_lower_bound(300, 0.5, 4) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        expanded_cap_lower_bound(300, 0.5, 3)
    assert rarity_bound(40) == pytest.approx(math.exp(-math.sqrt(40) / 4))
    assert rarity_bound(40) == pytest.approx(0.2056, abs=1e-3)
    assert high_degree_failure_bound(2000, 0.5, 0.1) == 0.0
    assert 0.0 <= good_greedy_failure_bound(500, 0.5, 0.1, 2.0) <= 1.0


def test_small_domset_frequency_clamped_cap():
    result = estimate_small_domset_frequency(16, 0.5, 4, 20, 1)
    assert result['cap'] == 16
    assert result['frequency'] == 1.0
    assert result['methods']['clamped'] == 20


def test_small_domset_frequency_at_scale():
    result = estimate_small_domset_frequency(300, 0.5, 4, 5, 2)
    assert result['cap'] == math.ceil(6 * math.log2(300))
    assert result['frequency'] == 1.0
    assert result['consistent']
    assert 'small_domset_lower_bound' in result['overlays']
    assert low_le_high(result['wilson_95'])


def low_le_high(interval):
    return 0.0 <= interval[0] <= interval[1] <= 1.0


def _rarity_run(trials, ceiling):
    result = estimate_rarity(40, 0.5, 3, trials, 8)
    assert result['threshold'] == 2
    assert result['frequency'] <= ceiling
    assert result['consistent']
    return result


def test_rarity_on_seeded_graphs():
    _rarity_run(20, 0.2)


@pytest.mark.slow
def test_rarity_acceptance():
    _rarity_run(300, 0.05)


def test_rarity_sanity_inversion_and_zero_threshold():
    # dominating triples are typical in G(40, 1/2)
    assert estimate_rarity(40, 0.5, 2, 20, 8)['frequency'] > 0
    assert estimate_rarity(40, 0.5, 0.5, 10, 8)['frequency'] == 1.0
    assert estimate_rarity(10, 0.5, 1000, 10, 8)['frequency'] == 0.0


def test_max_degree_frequency():
    result = estimate_max_degree_frequency(400, 0.5, 0.1, 5, 3)
    assert result['frequency'] == 1.0
    assert result['target_degree'] == pytest.approx(160)


def test_distinguish_frequency_in_dense_graphs():
    result = estimate_distinguish_frequency(60, 0.5, 4, 5, 1)
    assert result['block_size'] == 24
    assert result['block_count'] == 3
    assert result['pairs'] == 10
    assert result['pair_frequency'] == 0.0
    assert result['frequency'] == 0.0
    assert result['overlays']['distinguish_edge_probability'] == pytest.approx(24 * 0.5 ** 24)
    assert result['consistent']


def test_distinguish_frequency_with_small_blocks():
    result = estimate_distinguish_frequency(200, 0.5, 1.5, 5, 2)
    assert result['block_size'] == 12
    assert result['pairs'] == 5 * 16 * 15
    assert result['pair_frequency'] < 0.02
    assert result['overlays']['distinguish_edge_probability'] == pytest.approx(12 * 0.5 ** 12)
    with pytest.raises(ParameterError):
        estimate_distinguish_frequency(60, 0.5, 1, 5, 1)


def test_summary_reports_runtimes_red_counts_and_overlays(tmp_path):
    config = make_config(algorithms=['hunt', 'good-greedy'], estimates=['distinguish'],
                         output_json=str(tmp_path / "summary.json"))
    run_experiment(config)
    with open(config.output_json) as f:
        summary = json.load(f)
    entries = {entry['algorithm']: entry for entry in summary['frequencies']}
    for entry in entries.values():
        assert 0 <= entry['mean_elapsed_ns'] <= entry['max_elapsed_ns']

    hunt = entries['hunt']
    assert hunt['red_counts']['initial_mean'] == 20
    assert hunt['red_counts']['final_mean'] <= 20
    by_round = hunt['partially_distinguished_by_round']
    assert by_round[0] == {'round': 0, 'trials': 3, 'frequency': by_round[0]['frequency']}
    assert all(0.0 <= r['frequency'] <= 1.0 for r in by_round)

    bound = entries['good-greedy']['overlays']['good_greedy_presence_lower_bound']
    assert bound == pytest.approx(1.0 - good_greedy_failure_bound(20, 0.5, 0.1, 2.0))
    assert summary['estimates'][0]['estimate'] == 'distinguish'


def test_hunt_records_keep_partial_rounds():
    record = run_campaign(make_config(algorithms=['hunt'], n_values=[60], trials=1))[0]
    assert record.partial_rounds == (False,)


def test_run_experiment_writes_outputs(tmp_path):
    config = make_config(algorithms=['greedy', 'hunt'], estimates=['max_degree'],
                         output_csv=str(tmp_path / "out" / "run.csv"),
                         output_json=str(tmp_path / "out" / "run.json"))
    records, estimates = run_experiment(config)
    assert len(records) == 6
    assert len(estimates) == 1
    with open(config.output_json) as f:
        summary = json.load(f)
    assert summary['config']['name'] == 'unit'
    hunt = [entry for entry in summary['frequencies'] if entry['algorithm'] == 'hunt'][0]
    assert hunt['trials'] == 3
    assert low_le_high(hunt['wilson_95'])
    assert summary['overlays'][0]['n'] == 20
    assert _csv_without_elapsed(config.output_csv)[0] == CSV_HEADER[:-1]


def test_emit_summary_json_reports_path(tmp_path):
    config = make_config()
    with pytest.raises(HarnessError):
        emit_summary_json(config, [], [], str(tmp_path))


@pytest.mark.parametrize("name", ["hybrid_vs_exact", "partition_hunt", "rarity", "sparse_decider"])
def test_shipped_configs_validate(name):
    config_dir = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs")
    config = ExperimentConfig.from_json(os.path.join(config_dir, f"{name}.json"))
    assert config.name == name
    assert config.output_json
