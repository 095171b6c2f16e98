import copy
import os

import pytest
import toml

from LogitLeak.util import DEFAULT_CONFIG, SEED_STAGES, ConfigError, \
    merge_dicts, load_config, validate_config, seed_overrides


def seeded(**sections):
    config = load_config(overrides=seed_overrides(0))
    return merge_dicts(config, sections)


def test_defaults_are_not_shared():
    config = load_config()
    config['leakage']['noise_sigma'] = 5.0
    assert DEFAULT_CONFIG['leakage']['noise_sigma'] == 1.0
    assert config['attack']['loss'] == 'logit'
    assert config['seeds'] == {}


def test_merge_is_recursive():
    sink = {'a': {'x': 1, 'y': 2}, 'b': 1}
    merge_dicts(sink, {'a': {'y': 3}, 'c': 4})
    assert sink == {'a': {'x': 1, 'y': 3}, 'b': 1, 'c': 4}
    with pytest.raises(TypeError):
        merge_dicts({}, [1])


def test_relative_paths_follow_the_config_file(tmp_path):
    path = str(tmp_path / "exp.toml")
    with open(path, 'w') as f:
        toml.dump({'victim': {'images': 'd/img.idx', 'labels': 'd/lbl.idx'},
                   'leakage': {'noise_sigma': 0.5}}, f)
    config = load_config(path)
    assert config['victim']['images'] == os.path.join(str(tmp_path),
                                                      'd/img.idx')
    assert config['leakage']['noise_sigma'] == 0.5
    assert config['leakage']['samples_per_event'] == 8


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(str(tmp_path / "none.toml"))
    path = str(tmp_path / "bad.toml")
    with open(path, 'w') as f:
        f.write('victim = "unterminated\n')
    with pytest.raises(ConfigError, match="cannot parse"):
        load_config(path)


def test_seeds_are_required():
    with pytest.raises(ConfigError, match="no seed for stage 'victim'"):
        validate_config(load_config())
    validate_config(load_config(), stages=[])


def test_seed_overrides_cover_every_stage():
    seeds = seed_overrides(3)['seeds']
    assert sorted(seeds) == sorted(SEED_STAGES)
    assert len(set(seeds.values())) == len(SEED_STAGES)
    assert seeds == seed_overrides(3)['seeds']
    validate_config(seeded())


@pytest.mark.parametrize("section,key,value", [
    ('attack', 'oracle', 'magic'),
    ('attack', 'step', 0.5),
    ('attack', 'step', '1'),
    ('attack', 'box', ['a', 'b']),
    ('attack', 'box', [255.0, 0.0]),
    ('attack', 'box', 255.0),
    ('attack', 'mode', 'targeted'),
    ('leakage', 'leak_model', 'power'),
    ('leakage', 'position_amplitudes', [1.0, 2.0]),
    ('profiling', 'snr_threshold', 0.0),
    ('profiling', 'scorer', 'svm'),
    ('victim', 'num_samples', 5),
    ('evaluation', 'scorers', ['template', 'cnn']),
])
def test_invalid_values(section, key, value):
    config = seeded()
    config[section][key] = value
    with pytest.raises(ConfigError):
        validate_config(config)


def test_required_files(tmp_path):
    config = seeded(victim={'images': str(tmp_path / "img"),
                            'labels': str(tmp_path / "lbl")})
    with pytest.raises(ConfigError, match="victim.images"):
        validate_config(config, require_files=[('victim', 'images')])


def test_missing_section():
    config = copy.deepcopy(seeded())
    del config['attack']
    with pytest.raises(ConfigError, match=r"\[attack\]"):
        validate_config(config)
