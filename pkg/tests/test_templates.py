import math

import numpy as np

from LogitLeak.leaksim import TraceSet, LeakageConfig, hamming_weight, \
    capture_profiling_set, UNIFORM
from LogitLeak.qnn import LOAD_LOGIT
from LogitLeak.sca import PoiSelection, fit_templates, template_log_scores, \
    template_log_scores_batch, regularized_cholesky, save_distinguisher, \
    load_distinguisher


def labeled(samples, classes):
    return TraceSet(np.asarray(samples, dtype=np.float32),
                    np.asarray(classes).reshape(-1, 1))


def test_identical_pairs_get_loaded_diagonal():
    x = np.array([[1.0, 2.0], [1.0, 2.0], [5.0, -1.0], [5.0, -1.0]])
    model = fit_templates(labeled(x, [7, 7, 9, 9]), PoiSelection([0, 1], 1.0),
                          reg_epsilon=1e-6)
    assert model.means[7].tolist() == [1.0, 2.0]
    assert model.means[9].tolist() == [5.0, -1.0]
    assert model.reg[7] == 1e-6
    assert np.allclose(model.chol[7], math.sqrt(1e-6) * np.eye(2))
    assert model.profiled.sum() == 2


def test_one_dimensional_scores_match_formula():
    x = np.array([[-1.0], [1.0], [2.0], [4.0], [6.0]])
    model = fit_templates(labeled(x, [0, 0, 1, 1, 1]), PoiSelection([0], 1.0))
    assert model.reg[0] == 0.0
    for v in (-3.0, 0.0, 2.5, 10.0):
        scores = template_log_scores(np.array([v]), model)
        for c, mu, var in ((0, 0.0, 2.0), (1, 4.0, 4.0)):
            sigma = math.sqrt(var)
            expected = -0.5 * ((v - mu) / sigma) ** 2 - math.log(sigma) - \
                0.5 * math.log(2 * math.pi)
            assert np.isclose(scores[c], expected)


def test_unprofiled_classes_never_win():
    x = np.array([[0.0], [0.1], [5.0], [5.1]])
    model = fit_templates(labeled(x, [1, 1, 2, 2]), PoiSelection([0], 1.0))
    scores = template_log_scores_batch(np.array([[-100.0], [2.5], [100.0]]),
                                       model)
    assert np.all(np.isneginf(scores[:, [0] + list(range(3, 256))]))
    assert set(np.argmax(scores, axis=1)) <= {1, 2}


def test_mean_trace_wins_with_shared_covariance():
    rng = np.random.default_rng(0)
    classes = np.repeat([3, 4, 5], 200)
    centers = {3: [0.0, 0.0], 4: [1.0, 0.0], 5: [0.0, 1.0]}
    noise = rng.standard_normal((200, 2)) * 0.3
    x = np.concatenate([np.array(centers[c]) + noise for c in (3, 4, 5)])
    model = fit_templates(labeled(x, classes), PoiSelection([0, 1], 1.0))
    for c in (3, 4, 5):
        assert np.argmax(template_log_scores(model.means[c], model)) == c


def test_scores_ignore_samples_outside_poi():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((400, 3))
    classes = rng.integers(0, 4, size=400)
    x[:, 1] += classes
    poi = PoiSelection([1], 1.0)
    model = fit_templates(labeled(x, classes), poi)
    trace = x[0].copy()
    before = template_log_scores(trace, model)
    trace[[0, 2]] = rng.standard_normal(2) * 50
    assert np.array_equal(template_log_scores(trace, model), before)
    assert np.allclose(model.log_scores(x[:5])[0], before)


def test_hamming_weight_class_means():
    cfg = LeakageConfig(samples_per_event=1, pad_samples=0, noise_sigma=0.1,
                        leak_model='hamming_weight', leak_amplitude=2.0)
    ts = capture_profiling_set(UNIFORM, 50000, cfg, seed=3)
    sample = cfg.window(0, LOAD_LOGIT).start
    model = fit_templates(ts, PoiSelection([sample], 1.0), position=0)
    counts = model.counts
    assert model.profiled.all()
    expected = 2.0 * hamming_weight(np.arange(256))
    bound = 5 * 0.1 / np.sqrt(counts)
    assert np.all(np.abs(model.means[:, 0] - expected) < bound)


def test_regularized_cholesky_escalation():
    pd = np.array([[2.0, 0.5], [0.5, 1.0]])
    factor, eps = regularized_cholesky(pd, 1e-6)
    assert eps == 0.0
    assert np.allclose(factor @ factor.T, pd)

    singular = np.array([[1.0, 1.0], [1.0, 1.0]])
    factor, eps = regularized_cholesky(singular, 1e-6)
    assert eps >= 1e-6
    assert np.allclose(factor @ factor.T, singular + eps * np.eye(2))

    factor, eps = regularized_cholesky(np.zeros((2, 2)), 1e-3)
    assert eps == 1e-3
    assert np.allclose(factor @ factor.T, 1e-3 * np.eye(2))

    factor, eps = regularized_cholesky(-np.eye(2), 1e-6, max_retries=2)
    assert factor is None


def test_template_file_round_trip(tmp_path):
    x = np.array([[-1.0], [1.0], [2.0], [4.0], [6.0]])
    model = fit_templates(labeled(x, [0, 0, 1, 1, 1]), PoiSelection([0], 1.0))
    path = str(tmp_path / "t.toml")
    save_distinguisher(model, path)
    loaded = load_distinguisher(path)
    assert loaded.kind == 'template' and loaded.position == 0
    samples = np.array([[0.5], [3.0]])
    assert np.array_equal(loaded.log_scores(samples),
                          model.log_scores(samples))
