import numpy as np
import pytest
import toml

from LogitLeak.qnn import save_model, load_model, model_hash, save_shadow, \
    load_shadow, forward_batch, quantize_input
from LogitLeak.util import DataError


def test_model_file_reloads_bit_exact(tmp_path, random_model):
    path = str(tmp_path / "victim.toml")
    save_model(random_model, path, provenance={'seed': 3})
    loaded = load_model(path)
    x = quantize_input(np.random.default_rng(0).integers(0, 256, (20, 64)))
    assert np.array_equal(forward_batch(loaded, x),
                          forward_batch(random_model, x))
    assert model_hash(loaded) == model_hash(random_model)


def test_same_model_same_bytes(tmp_path, random_model):
    a, b = str(tmp_path / "a.toml"), str(tmp_path / "b.toml")
    assert save_model(random_model, a) == save_model(random_model, b)
    with open(a, 'rb') as fa, open(b, 'rb') as fb:
        assert fa.read() == fb.read()


def test_hash_ignores_provenance(tmp_path, random_model):
    path = str(tmp_path / "victim.toml")
    save_model(random_model, path, provenance={'seed': 1, 'accuracy': 0.5})
    assert model_hash(load_model(path)) == model_hash(random_model)


def test_newer_format_is_rejected(tmp_path, random_model):
    path = str(tmp_path / "victim.toml")
    save_model(random_model, path)
    doc = toml.load(path)
    doc['format_version'] = 2
    with open(path, 'w') as f:
        toml.dump(doc, f)
    with pytest.raises(DataError, match="format_version"):
        load_model(path)


def test_wrong_kind_is_rejected(tmp_path, toy_shadow):
    path = str(tmp_path / "shadow.toml")
    save_shadow(toy_shadow, path)
    with pytest.raises(DataError, match="float_shadow"):
        load_model(path)


def test_missing_layer_field(tmp_path, random_model):
    path = str(tmp_path / "victim.toml")
    save_model(random_model, path)
    doc = toml.load(path)
    del doc['layer_1']
    with open(path, 'w') as f:
        toml.dump(doc, f)
    with pytest.raises(DataError, match="layer_1"):
        load_model(path)


def test_shadow_round_trip(tmp_path, toy_shadow):
    path = str(tmp_path / "shadow.toml")
    save_shadow(toy_shadow, path)
    loaded = load_shadow(path)
    pixels = np.array([[200.0, 50.0], [10.0, 250.0]])
    assert np.array_equal(loaded.logits(pixels), toy_shadow.logits(pixels))
