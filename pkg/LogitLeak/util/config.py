import copy
import logging
import numbers
import os

import toml

from .errors import ConfigError
from .seeds import derive_seed

logger = logging.getLogger(__name__)

SEED_STAGES = ['victim', 'leakage', 'profiling', 'attack', 'evaluation']
SCORERS = ['template', 'logreg', 'mlp']
ORACLES = ['side-channel', 'exact']

# desk-scale experiment, stage seeds are deliberately absent
DEFAULT_CONFIG = {
    'victim': {
        'images': '',
        'labels': '',
        'num_samples': 3000,
        'hidden': [32],
        'epochs': 60,
        'batch_size': 64,
        'lr': 1e-2,
        'holdout': 0.2,
        'min_accuracy': 0.9,
        'model_file': 'victim.toml',
        'shadow_file': 'victim-shadow.toml',
        'report_file': 'victim-report.toml',
    },
    'leakage': {
        'samples_per_event': 8,
        'pad_samples': 3,
        'noise_sigma': 1.0,
        'leak_model': 'weighted_bits',
        'leak_amplitude': 1.0,
        'position_amplitudes': [],
    },
    'profiling': {
        'n_traces': 50000,
        'scorer': 'mlp',
        'snr_threshold': 0.02,
        'reg_epsilon': 1e-6,
        'epochs': 20,
        'batch_size': 512,
        'lr': 0.0,
        'hidden': [1000, 1000, 100],
        'bundle': 'extractor',
        'traces': '',
        'save_traces': False,
        'num_workers': 1,
        'self_test_inputs': 256,
        'max_points': 0,
    },
    'extraction': {
        'n_traces': 5,
    },
    'attack': {
        'mode': 'untargeted',
        'target': -1,
        'kappa': 0.0,
        'const': 1.0,
        'step': 1.0,
        'lr': 1.0,
        'max_iters': 10000,
        'coords': 16,
        'box': [0.0, 255.0],
        'loss': 'logit',
        'solver': 'adam',
        'confirmations': 3,
        'distortion_scale': 1.0 / 128,
        'bim_epsilon': 16.0,
        'bim_alpha': 2.0,
        'bim_iters': 20,
        'num_inputs': 20,
        'oracle': 'side-channel',
        'record_accuracy': True,
        'n_jobs': 1,
    },
    'evaluation': {
        'max_traces': 10,
        'repeats': 10,
        'scorers': ['mlp'],
        'n_jobs': 1,
        'chance': True,
    },
    'seeds': {},
    'output': {
        'dir': 'out',
    },
}


def merge_dicts(sink, source):
    if not isinstance(sink, dict) or not isinstance(source, dict):
        raise TypeError('Args to merge_dicts should be dicts')

    for k, v in source.items():
        if isinstance(source[k], dict) and isinstance(sink.get(k), dict):
            sink[k] = merge_dicts(sink[k], v)
        else:
            sink[k] = v

    return sink


def load_config(path=None, overrides=None):
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError("config file %s does not exist" % path)
        try:
            user = toml.load(path)
        except toml.TomlDecodeError as e:
            raise ConfigError("cannot parse config %s: %s" % (path, e))
        base = os.path.dirname(os.path.abspath(path))
        for section, key in (('victim', 'images'), ('victim', 'labels'),
                             ('profiling', 'traces')):
            value = user.get(section, {}).get(key)
            if value and not os.path.isabs(value):
                user[section][key] = os.path.join(base, value)
        config = merge_dicts(config, user)
    if overrides:
        config = merge_dicts(config, overrides)
    return config


def seed_overrides(seed):
    """Stage seeds derived from a single command-line seed."""
    return {'seeds': {stage: derive_seed(seed, i)
                      for i, stage in enumerate(SEED_STAGES)}}


def _check(cond, msg, *args):
    if not cond:
        raise ConfigError(msg % args)


def _is_int(v):
    return isinstance(v, numbers.Integral) and not isinstance(v, bool)


def _is_real(v):
    return isinstance(v, numbers.Real) and not isinstance(v, bool)


def validate_config(config, stages=SEED_STAGES, require_files=()):
    """Check every section before any heavy work starts.

    ``stages`` names the stochastic stages the command will run; each must
    carry a seed. ``require_files`` lists (section, key) pairs of paths
    that have to exist.
    """
    for section in DEFAULT_CONFIG:
        _check(isinstance(config.get(section), dict),
               "missing config section [%s]", section)

    seeds = config['seeds']
    for stage in stages:
        _check(stage in seeds, "no seed for stage '%s' (set seeds.%s or "
               "pass --seed)", stage, stage)
        _check(_is_int(seeds[stage]), "seeds.%s must be an integer", stage)

    victim = config['victim']
    _check(_is_int(victim['num_samples']) and victim['num_samples'] >= 20,
           "victim.num_samples must be an integer >= 20")
    _check(all(_is_int(h) and h >= 1 for h in victim['hidden']),
           "victim.hidden must list positive layer widths")
    _check(0.0 < victim['holdout'] < 1.0, "victim.holdout must be in (0, 1)")
    _check(bool(victim['images']) == bool(victim['labels']),
           "victim.images and victim.labels must be given together")

    leakage = config['leakage']
    _check(_is_int(leakage['samples_per_event']) and
           leakage['samples_per_event'] >= 1,
           "leakage.samples_per_event must be >= 1")
    _check(_is_int(leakage['pad_samples']) and leakage['pad_samples'] >= 0,
           "leakage.pad_samples must be >= 0")
    _check(_is_real(leakage['noise_sigma']) and leakage['noise_sigma'] >= 0,
           "leakage.noise_sigma must be >= 0")
    _check(leakage['leak_model'] in
           ('hamming_weight', 'identity_byte', 'weighted_bits'),
           "unknown leakage.leak_model %r", leakage['leak_model'])
    _check(len(leakage['position_amplitudes']) in (0, 10),
           "leakage.position_amplitudes must be empty or list 10 values")

    profiling = config['profiling']
    _check(_is_int(profiling['n_traces']) and profiling['n_traces'] >= 1,
           "profiling.n_traces must be >= 1")
    _check(_is_int(profiling['max_points']) and profiling['max_points'] >= 0,
           "profiling.max_points must be >= 0 (0 keeps every PoI)")
    _check(profiling['scorer'] in SCORERS, "unknown profiling.scorer %r",
           profiling['scorer'])
    thresholds = profiling['snr_threshold']
    if isinstance(thresholds, list):
        _check(len(thresholds) == 10 and all(t > 0 for t in thresholds),
               "profiling.snr_threshold list must hold 10 positive values")
    else:
        _check(_is_real(thresholds) and thresholds > 0,
               "profiling.snr_threshold must be > 0")

    _check(_is_int(config['extraction']['n_traces']) and
           config['extraction']['n_traces'] >= 1,
           "extraction.n_traces must be >= 1")

    attack = config['attack']
    _check(attack['mode'] in ('targeted', 'untargeted'),
           "attack.mode must be targeted or untargeted")
    _check(attack['mode'] == 'untargeted'
           or (_is_int(attack['target']) and 0 <= attack['target'] < 10),
           "attack.target must name a class for targeted attacks")
    _check(_is_real(attack['step']) and attack['step'] >= 1.0,
           "attack.step must be >= one input quantization step (1.0)")
    _check(_is_int(attack['max_iters']) and attack['max_iters'] >= 1,
           "attack.max_iters must be >= 1")
    box = attack['box']
    _check(isinstance(box, (list, tuple)) and len(box) == 2
           and all(_is_real(b) for b in box) and box[0] < box[1],
           "attack.box must be [lo, hi]")
    _check(attack['loss'] in ('log_prob', 'logit'),
           "attack.loss must be log_prob or logit")
    _check(attack['solver'] in ('adam', 'newton'),
           "attack.solver must be adam or newton")
    _check(attack['oracle'] in ORACLES, "attack.oracle must be one of %s",
           ", ".join(ORACLES))
    _check(_is_int(attack['num_inputs']) and attack['num_inputs'] >= 1,
           "attack.num_inputs must be >= 1")
    if profiling['traces']:
        _check(os.path.isfile(profiling['traces']),
               "profiling.traces: %s does not exist", profiling['traces'])

    evaluation = config['evaluation']
    _check(_is_int(evaluation['repeats']) and evaluation['repeats'] >= 1,
           "evaluation.repeats must be >= 1")
    _check(_is_int(evaluation['max_traces']) and
           evaluation['max_traces'] >= 1,
           "evaluation.max_traces must be >= 1")
    _check(all(s in SCORERS for s in evaluation['scorers']),
           "evaluation.scorers must be a subset of %s", SCORERS)

    for section, key in require_files:
        path = config[section][key]
        _check(bool(path) and os.path.exists(path),
               "%s.%s: %s does not exist", section, key, path)

    logger.info("config validated (stages: %s)", ", ".join(stages))
    return config
