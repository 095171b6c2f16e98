import os

import numpy as np
import pytest

from LogitLeak.extract import TargetDevice, LogitOracle, ExactLogitOracle, \
    logit_oracle, profile, extract_logits, self_test, save_bundle, \
    load_bundle
from LogitLeak.leaksim import LeakageConfig, capture_profiling_set, \
    calibrate_sigma, UNIFORM
from LogitLeak.evaluate import evaluate_extraction
from LogitLeak.qnn import nnom_softmax
from LogitLeak.util import ConfigError, EmptyPoiError


def random_pixels(seed, size=64):
    return np.random.default_rng(seed).integers(0, 256, size=size)


def test_noiseless_single_trace_recovery(noiseless_extractor, noiseless_cfg):
    assert noiseless_extractor.kind == 'template'
    assert all(len(s.poi) == noiseless_cfg.samples_per_event
               for s in noiseless_extractor.scorers)
    ts = capture_profiling_set(UNIFORM, 500, noiseless_cfg, seed=99)
    for position, scorer in enumerate(noiseless_extractor.scorers):
        guess = np.argmax(scorer.log_scores(ts.samples), axis=1)
        assert np.array_equal(guess, ts.byte_labels(position))


def test_self_test_is_perfect_without_noise(noiseless_extractor):
    assert self_test(noiseless_extractor, 64, seed=5) == 1.0


def test_extract_logits_of_a_model(noiseless_extractor, noiseless_cfg,
                                   random_model):
    device = TargetDevice(random_model, noiseless_cfg)
    for seed in range(5):
        result = extract_logits(device, random_pixels(seed),
                                noiseless_extractor, noiseless_cfg, seed=seed,
                                n=1, evaluate=True)
        assert result.correct
        assert result.traces_consumed == 1
        assert result.estimate == device.reference_logits(
            random_pixels(seed))


def test_mismatched_config_is_rejected(noiseless_extractor, noiseless_cfg,
                                       random_model):
    other = noiseless_cfg.replace(noise_sigma=0.5)
    with pytest.raises(ConfigError):
        extract_logits(random_model, random_pixels(0), noiseless_extractor,
                       other, seed=0)
    ts = capture_profiling_set(UNIFORM, 3, other, seed=0)
    with pytest.raises(ConfigError):
        noiseless_extractor.estimate(ts)


def test_oracle_never_reads_true_logits(noiseless_extractor, noiseless_cfg,
                                        random_model, monkeypatch):
    device = TargetDevice(random_model, noiseless_cfg)
    expected = device.reference_logits(random_pixels(1))

    def forbidden(self, x):
        raise AssertionError("evaluation channel used by the oracle")

    monkeypatch.setattr(TargetDevice, 'reference_logits', forbidden)
    monkeypatch.setattr(TargetDevice, 'classify', forbidden)
    oracle = LogitOracle(noiseless_extractor, device, seed=3, n=2)
    z, probs, traces = oracle(random_pixels(1))
    assert z == expected
    assert np.allclose(probs, nnom_softmax(expected.values))
    assert traces == 2


def test_oracle_counts_shared_captures(noiseless_extractor, noiseless_cfg,
                                       random_model):
    oracle = logit_oracle(noiseless_extractor, random_model, noiseless_cfg,
                          seed=0, n=3, record_accuracy=True)
    for i in range(4):
        oracle(random_pixels(i))
    assert oracle.calls == 4
    assert oracle.traces_consumed == 4 * 3
    assert oracle.history == [1.0] * 4


def test_oracle_defaults_to_bundle_trace_count(noiseless_extractor,
                                               noiseless_cfg, random_model):
    device = TargetDevice(random_model, noiseless_cfg)
    oracle = LogitOracle(noiseless_extractor, device, seed=0)
    assert oracle.n == noiseless_extractor.traces_per_query
    assert oracle(random_pixels(0))[2] == oracle.n


def test_exact_oracle(noiseless_cfg, random_model):
    device = TargetDevice(random_model, noiseless_cfg)
    oracle = ExactLogitOracle(device)
    z, probs, traces = oracle(random_pixels(2))
    assert z == device.reference_logits(random_pixels(2))
    assert traces == 0 and oracle.calls == 1
    assert oracle.exact


def test_bundle_round_trip(tmp_path, noiseless_extractor, noiseless_cfg):
    path = str(tmp_path / "bundle")
    save_bundle(noiseless_extractor, path)
    assert sorted(os.listdir(path)) == sorted(
        ["manifest.toml"] + ["position_%d.toml" % i for i in range(10)])
    loaded = load_bundle(path)
    assert loaded.fingerprint == noiseless_cfg.fingerprint()
    assert loaded.traces_per_query == noiseless_extractor.traces_per_query
    ts = capture_profiling_set(UNIFORM, 20, noiseless_cfg, seed=7)
    assert np.array_equal(loaded.estimate(ts).scores,
                          noiseless_extractor.estimate(ts).scores)


def test_same_seed_same_bundle_bytes(tmp_path, noiseless_cfg):
    digests = []
    for name in ("a", "b"):
        ex = profile(noiseless_cfg, 3000, 'template', seed=2, max_points=2)
        digests.append(save_bundle(ex, str(tmp_path / name)))
        with open(str(tmp_path / name / "position_3.toml"), 'rb') as f:
            digests.append(f.read())
    assert digests[0] == digests[2]
    assert digests[1] == digests[3]


def test_threshold_above_every_sample(noiseless_cfg):
    cfg = noiseless_cfg.replace(noise_sigma=1.0)
    with pytest.raises(EmptyPoiError) as e:
        profile(cfg, 600, 'template', seed=0, snr_threshold=1e6)
    assert e.value.position == 0


def test_neural_extractor_on_clean_traces(noiseless_cfg):
    ex = profile(noiseless_cfg, 6000, 'logreg', seed=4, max_points=2,
                 hyper={'epochs': 30, 'batch_size': 128, 'lr': 5e-2})
    assert ex.kind == 'logreg'
    assert len(ex.snr_profiles) == 10
    # far above the 1/256 chance level
    assert self_test(ex, 200, seed=1) >= 0.05


@pytest.mark.slow
def test_calibrated_mlp_extraction(calibrated_extractor):
    bundle = evaluate_extraction({'mlp': calibrated_extractor},
                                 max_traces=10, repeats=10, seed=3)
    for position in range(10):
        assert bundle.curves[('mlp', position)].success_rate[-1] == 1.0


@pytest.mark.slow
def test_scorer_ordering_on_identity_leakage():
    cfg = LeakageConfig(samples_per_event=8, pad_samples=2,
                        leak_model='identity_byte', rng_seed=6)
    cfg = cfg.replace(noise_sigma=calibrate_sigma(cfg, 60.0))
    ts = capture_profiling_set(UNIFORM, 60000, cfg, seed=12)
    hyper = {
        'logreg': {'epochs': 30, 'batch_size': 256, 'lr': 1e-2},
        'mlp': {'hidden': [200, 100], 'epochs': 30, 'batch_size': 256,
                'lr': 1e-3},
    }
    extractors = {kind: profile(cfg, len(ts), kind, seed=13, ts=ts,
                                hyper=hyper.get(kind))
                  for kind in ('template', 'logreg', 'mlp')}
    bundle = evaluate_extraction(extractors, max_traces=10, repeats=50,
                                 seed=14)
    s = bundle.summary
    assert s['compared_at_traces'] == 10
    assert s['trials_mlp'] == 500
    # neither ordering is rejected by the one-sided test at 0.05
    assert s['p_mlp_below_logreg'] >= 0.05
    assert s['p_logreg_below_template'] >= 0.05
    assert s['sr_template'] > 1.0 / 256


def test_target_device_classifies_by_argmax(noiseless_cfg, random_model):
    device = TargetDevice(random_model, noiseless_cfg)
    x = random_pixels(4)
    assert device.classify(x) == device.reference_logits(x).argmax()
    assert device.input_size == 64
    ts = device.acquire(x, 2, seed=11)
    assert len(ts) == 2 and not ts.labeled
