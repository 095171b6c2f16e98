import numpy as np
import pytest

from LogitLeak.advgen import AttackSpec, bim_whitebox_baseline, zoo_attack
from LogitLeak.extract import ExactLogitOracle

X0 = np.array([200.0, 50.0])


def test_small_ball_does_not_transfer(toy_shadow, toy_device):
    report = bim_whitebox_baseline(toy_shadow, X0, AttackSpec(), 0,
                                   toy_device.classify, input_id="toy")
    assert not report.success
    assert report.method == 'bim'
    assert report.final_class == 0
    assert report.adversarial.tolist() == [184.0, 66.0]
    assert report.queries == 0 and report.traces == 0
    assert len(report.objective_log) == 20


def test_large_ball_transfers(toy_shadow, toy_device):
    spec = AttackSpec(bim_epsilon=100.0, bim_iters=60)
    report = bim_whitebox_baseline(toy_shadow, X0, spec, 0,
                                   toy_device.classify)
    assert report.success and report.verified
    assert report.final_class == 1
    assert report.adversarial.tolist() == [100.0, 150.0]
    assert report.distortion == pytest.approx(np.hypot(100.0, 100.0))


def test_loss_rises_along_the_path(toy_shadow, toy_device):
    spec = AttackSpec(bim_epsilon=100.0, bim_iters=60)
    report = bim_whitebox_baseline(toy_shadow, X0, spec, 0,
                                   toy_device.classify)
    assert np.all(np.diff(report.objective_log[:50]) > 0)


def test_targeted_descends_target_loss(toy_shadow, toy_device):
    spec = AttackSpec(mode='targeted', target=1, bim_epsilon=100.0,
                      bim_iters=60)
    report = bim_whitebox_baseline(toy_shadow, X0, spec, 0,
                                   toy_device.classify)
    assert report.success
    assert report.target == 1 and report.final_class == 1


def test_zoo_reaches_what_bim_cannot(toy_shadow, toy_device):
    spec = AttackSpec(coords=2, lr=1.0, max_iters=500)
    bim = bim_whitebox_baseline(toy_shadow, X0, spec, 0, toy_device.classify)
    zoo = zoo_attack(ExactLogitOracle(toy_device), X0, spec, seed=1,
                     true_label=0, verify=toy_device.classify)
    assert zoo.success and not bim.success
