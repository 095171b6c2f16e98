import numpy as np
import pytest

from LogitLeak.advgen import AttackSpec, zoo_attack
from LogitLeak.advgen.report_io import report_to_dict, save_report
from LogitLeak.cli.main import attack_inputs, attack_one
from LogitLeak.evaluate import check_trace_accounting, summarize_attacks
from LogitLeak.extract import ExactLogitOracle, LogitOracle, TargetDevice
from LogitLeak.util import ConfigError, RejectedInputError

X0 = np.array([200.0, 50.0])


def spec(**kwargs):
    d = dict(coords=2, step=1.0, lr=1.0, max_iters=500)
    d.update(kwargs)
    return AttackSpec(**d)


def test_defaults():
    s = AttackSpec()
    assert s.kappa == 0.0
    assert s.max_iters == 10000
    assert s.box == (0.0, 255.0)
    assert s.confirmations == 3


def test_step_below_quantization_is_rejected():
    with pytest.raises(ConfigError):
        AttackSpec(step=0.5)
    with pytest.raises(ConfigError):
        AttackSpec(mode='targeted')


def test_untargeted_with_exact_logits(toy_device):
    report = zoo_attack(ExactLogitOracle(toy_device), X0, spec(), seed=1,
                        true_label=0, verify=toy_device.classify)
    assert report.success and report.verified
    assert report.original_class == 0
    assert report.final_class == 1
    assert toy_device.classify(report.adversarial) == 1
    assert 0 < report.iterations <= 120
    # one initial query, two per coordinate and one check per iteration
    assert report.queries == 1 + 5 * report.iterations
    assert report.gradient_queries == 4 * report.iterations
    assert report.traces == 0
    assert len(report.objective_log) == report.iterations + 1
    assert np.all((report.adversarial >= 0) & (report.adversarial <= 255))
    assert report.distortion == pytest.approx(
        np.linalg.norm(report.adversarial - X0))


def test_targeted_with_exact_logits(toy_device):
    report = zoo_attack(ExactLogitOracle(toy_device), X0,
                        spec(mode='targeted', target=1), seed=1,
                        verify=toy_device.classify)
    assert report.success
    assert report.target == 1 and report.final_class == 1


def test_side_channel_oracle_pays_traces(toy_device, noiseless_extractor):
    n = 2
    exact = zoo_attack(ExactLogitOracle(toy_device), X0, spec(), seed=1,
                       true_label=0)
    oracle = LogitOracle(noiseless_extractor, toy_device, seed=4, n=n)
    report = zoo_attack(oracle, X0, spec(), seed=1, true_label=0,
                        verify=toy_device.classify)
    assert report.success
    assert report.iterations == exact.iterations
    assert np.array_equal(report.adversarial, exact.adversarial)
    # two more confirmations of the final point
    assert report.queries == exact.queries + 2
    assert report.traces == n * report.queries
    assert oracle.traces_consumed == report.traces
    assert check_trace_accounting(report, n)


def test_accuracy_history_is_reported(toy_device, noiseless_extractor):
    oracle = LogitOracle(noiseless_extractor, toy_device, seed=4, n=1,
                         record_accuracy=True)
    report = zoo_attack(oracle, X0, spec(max_iters=5), seed=1, true_label=0)
    assert report.extraction_accuracy == [1.0] * report.queries


def test_same_seed_same_report(toy_device):
    a = zoo_attack(ExactLogitOracle(toy_device), X0, spec(), seed=7,
                   true_label=0, input_id="x")
    b = zoo_attack(ExactLogitOracle(toy_device), X0, spec(), seed=7,
                   true_label=0, input_id="x")
    assert report_to_dict(a) == report_to_dict(b)


def test_budget_exhaustion(toy_device):
    report = zoo_attack(ExactLogitOracle(toy_device), X0, spec(max_iters=3),
                        seed=1, true_label=0, verify=toy_device.classify)
    assert not report.success
    assert report.iterations == 3
    assert report.queries == 1 + 5 * 3
    assert toy_device.classify(report.adversarial) == 0


def test_newton_steps_jump_to_the_box(toy_device):
    report = zoo_attack(ExactLogitOracle(toy_device), X0,
                        spec(solver='newton'), seed=1, true_label=0,
                        verify=toy_device.classify)
    assert report.success
    assert report.iterations == 1
    assert report.adversarial.tolist() == [0.0, 255.0]


def test_misclassified_input_is_rejected(toy_device):
    with pytest.raises(RejectedInputError, match="misclassified"):
        zoo_attack(ExactLogitOracle(toy_device), X0, spec(), seed=0,
                   true_label=1)


def test_target_already_reached(toy_device):
    with pytest.raises(RejectedInputError):
        zoo_attack(ExactLogitOracle(toy_device), X0,
                   spec(mode='targeted', target=0), seed=0)


def test_input_outside_box(toy_device):
    with pytest.raises(RejectedInputError):
        zoo_attack(ExactLogitOracle(toy_device), np.array([300.0, 0.0]),
                   spec(), seed=0)


def test_unlabeled_untargeted_attacks_first_class(toy_device):
    report = zoo_attack(ExactLogitOracle(toy_device), X0, spec(), seed=1)
    assert report.original_class == 0
    assert report.success and report.final_class == 1


@pytest.mark.slow
def test_targeted_digits_with_exact_logits(digits, digits_victim,
                                           noiseless_cfg):
    images, labels = digits
    model, _, report = digits_victim
    device = TargetDevice(model, noiseless_cfg)
    chosen = [int(i) for i in report['test_indices']
              if device.classify(images[i]) == labels[i]][:20]
    successes = 0
    for idx in chosen:
        target = (int(labels[idx]) + 1) % 10
        r = zoo_attack(ExactLogitOracle(device), images[idx],
                       spec(mode='targeted', target=target, coords=16,
                            max_iters=10000), seed=idx,
                       verify=device.classify)
        if r.success:
            assert device.classify(r.adversarial) == target
            successes += 1
    assert successes >= 18


@pytest.fixture(scope='module')
def side_channel_attacks(digits, digits_victim, calibrated_cfg,
                         calibrated_extractor):
    """ZOO through the side-channel oracle and BIM on 20 held-out digits."""
    images, labels = digits
    images = images.astype(np.float64)
    model, shadow, report = digits_victim
    device = TargetDevice(model, calibrated_cfg)
    chosen = attack_inputs(device, images, labels, report['test_indices'], 20)

    def run(idx):
        return attack_one(device, calibrated_extractor, shadow, images[idx],
                          int(labels[idx]), AttackSpec(), idx, 5,
                          'side-channel', False, "test_%d" % idx)

    return {'chosen': chosen, 'results': [run(idx) for idx in chosen],
            'run': run}


@pytest.mark.slow
def test_side_channel_attack_on_digits(side_channel_attacks):
    chosen = side_channel_attacks['chosen']
    results = side_channel_attacks['results']
    assert len(chosen) == 20
    zoo = [z for z, _, error in results if error is None]
    assert sum(r.success for r in zoo) >= 16
    for r in zoo:
        assert r.queries == 1 + r.gradient_queries + r.verification_queries
        assert r.traces == 5 * r.queries
        assert check_trace_accounting(r, 5)
        if r.success:
            assert r.verified and r.final_class != r.original_class


@pytest.mark.slow
def test_whitebox_transfer_trails_side_channel_attack(side_channel_attacks):
    results = side_channel_attacks['results']
    zoo = [z for z, _, error in results if error is None]
    bim = [b for _, b, error in results if error is None]
    summary = summarize_attacks(zoo, bim, failures=len(results) - len(zoo))
    assert summary['transfer_rate'] < summary['success_rate']


@pytest.mark.slow
def test_same_seed_same_report_files(side_channel_attacks, tmp_path):
    for idx, first in zip(side_channel_attacks['chosen'][:3],
                          side_channel_attacks['results']):
        again = side_channel_attacks['run'](idx)
        for method, a, b in (('zoo', first[0], again[0]),
                             ('bim', first[1], again[1])):
            if a is None:
                assert b is None and again[2] == first[2]
                continue
            paths = [str(tmp_path / ("%s-%d-%s.toml" % (run, idx, method)))
                     for run in ('first', 'again')]
            save_report(a, paths[0], AttackSpec())
            save_report(b, paths[1], AttackSpec())
            with open(paths[0], 'rb') as f, open(paths[1], 'rb') as g:
                assert f.read() == g.read()
