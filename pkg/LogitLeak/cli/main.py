import argparse
import glob
import logging
import os
import sys

import numpy as np
from joblib import Parallel, delayed

from ..advgen import AttackSpec, zoo_attack, bim_whitebox_baseline, \
    save_report, export_adversarial_idx
from ..evaluate import MetricsBundle, evaluate_extraction, attack_metrics, \
    save_metrics, load_metrics, check_trace_accounting
from ..extract import TargetDevice, LogitOracle, ExactLogitOracle, profile, \
    self_test, save_bundle, load_bundle
from ..leaksim import LeakageConfig, capture_profiling_set, read_llts, \
    write_llts, UNIFORM
from ..qnn import train_victim, write_digits, read_dataset, save_model, \
    load_model, save_shadow, load_shadow, model_hash, forward_batch, \
    quantize_input, logit_histogram
from ..util import LogitLeakError, ConfigError, AttackError, \
    load_config, validate_config, seed_overrides, derive_seed, \
    array2dict, dict2array, dump_document, load_document
from ..visualize import write_plotdata

logger = logging.getLogger(__name__)

COMMANDS = ('train-victim', 'profile', 'eval-extraction', 'attack',
            'plotdata')
REPORT_KIND = 'victim_report'
REPORT_VERSION = 1


def get_arguments(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, dest='config',
                        help='experiment config (toml)')
    common.add_argument('--seed', type=int, dest='seed',
                        help='derive every stage seed from this value')
    common.add_argument('--out', type=str, dest='out',
                        help='output folder')
    common.add_argument('--scorer', type=str, dest='scorer',
                        choices=['template', 'logreg', 'mlp'],
                        help='distinguisher kind')
    common.add_argument('--n-traces', type=int, dest='n_traces',
                        help='attack traces per extraction query')
    common.add_argument('--sigma', type=float, dest='sigma',
                        help='noise standard deviation of the traces')
    common.add_argument('--budget', type=int, dest='budget',
                        help='maximum ZOO iterations per input')
    common.add_argument('--debug', action='store_true',
                        help='verbose logging')
    common.add_argument('--quiet', action='store_true',
                        help='warnings and errors only')

    parser = argparse.ArgumentParser(prog='logitleak')
    sub = parser.add_subparsers(dest='command')
    sub.required = True
    sub.add_parser('train-victim', parents=[common],
                   help='train and quantize the victim network')
    sub.add_parser('profile', parents=[common],
                   help='profile the open device and fit an extractor')
    sub.add_parser('eval-extraction', parents=[common],
                   help='success-rate curves of the extractors')
    sub.add_parser('attack', parents=[common],
                   help='black-box ZOO attack through the side channel')
    plot = sub.add_parser('plotdata', parents=[common],
                          help='delimited text tables of metrics files')
    plot.add_argument('--metrics', type=str, dest='metrics',
                      action='append', help='metrics hdf file')
    return parser.parse_args(argv)


def config_from_args(args):
    overrides = {}
    if args.seed is not None:
        overrides = seed_overrides(args.seed)
    if args.out is not None:
        overrides['output'] = {'dir': args.out}
    if args.scorer is not None:
        overrides['profiling'] = {'scorer': args.scorer}
        overrides['evaluation'] = {'scorers': [args.scorer]}
    if args.n_traces is not None:
        overrides['extraction'] = {'n_traces': args.n_traces}
    if args.sigma is not None:
        overrides['leakage'] = {'noise_sigma': args.sigma}
    if args.budget is not None:
        overrides['attack'] = {'max_iters': args.budget}
    return load_config(args.config, overrides)


def setup_logging(args, out_dir):
    """Console logging plus a run.log sidecar in the output folder.

    Timestamps only go to the sidecar so artifacts stay reproducible.
    """
    level = logging.DEBUG if args.debug else \
        logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level,
                        format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger().setLevel(level)
    os.makedirs(out_dir, exist_ok=True)
    handler = logging.FileHandler(os.path.join(out_dir, 'run.log'))
    handler.setFormatter(logging.Formatter(
        '%(asctime)s %(levelname)s %(name)s: %(message)s'))
    logging.getLogger().addHandler(handler)
    return handler


def out_path(config, *parts):
    return os.path.join(config['output']['dir'], *parts)


def bundle_dir(config, kind):
    return out_path(config, "%s_%s" % (config['profiling']['bundle'], kind))


def leakage_config(config):
    return LeakageConfig.from_dict(config['leakage'],
                                   config['seeds']['leakage'])


def _require(path, what):
    if not os.path.exists(path):
        raise ConfigError("%s %s does not exist, run the earlier stage first"
                          % (what, path))


def dataset_files(config):
    victim = config['victim']
    if victim['images']:
        return victim['images'], victim['labels']
    return write_digits(out_path(config, 'data'), victim['num_samples'],
                        derive_seed(config['seeds']['victim'], 1))


def cmd_train_victim(config):
    validate_config(config, stages=['victim'],
                    require_files=[('victim', 'images'),
                                   ('victim', 'labels')]
                    if config['victim']['images'] else [])
    victim = config['victim']
    images_file, labels_file = dataset_files(config)
    images, labels = read_dataset(images_file, labels_file)
    model, shadow, report = train_victim(
        images.reshape(len(images), -1), labels, hidden=victim['hidden'],
        seed=config['seeds']['victim'], epochs=victim['epochs'],
        batch_size=victim['batch_size'], lr=victim['lr'],
        holdout=victim['holdout'], min_accuracy=victim['min_accuracy'])

    provenance = {'seed': report['seed'], 'accuracy': report['accuracy'],
                  'dataset': os.path.basename(images_file)}
    digest = save_model(model, out_path(config, victim['model_file']),
                        provenance)
    save_shadow(shadow, out_path(config, victim['shadow_file']))
    doc = {
        'format_version': REPORT_VERSION,
        'kind': REPORT_KIND,
        'images': os.path.abspath(images_file),
        'labels': os.path.abspath(labels_file),
        'model_hash': model_hash(model),
        'test_indices': array2dict(report.pop('test_indices')),
    }
    doc.update(report)
    dump_document(doc, out_path(config, victim['report_file']))
    logger.info("victim accuracy %.4f, model file sha256 %s",
                report['accuracy'], digest[:12])
    return model, report


def _hyper(config):
    p = config['profiling']
    return {'epochs': p['epochs'], 'batch_size': p['batch_size'],
            'lr': p['lr'] or None, 'hidden': p['hidden']}


def _profiling_set(config, cfg):
    p = config['profiling']
    if p['traces']:
        ts = read_llts(p['traces'], fingerprint=cfg.fingerprint())
        if ts.trace_length != cfg.trace_length or not ts.labeled:
            raise ConfigError("%s holds %s traces of %d samples, the leakage "
                              "config needs labeled traces of %d"
                              % (p['traces'], 'labeled' if ts.labeled else
                                 'unlabeled', ts.trace_length,
                                 cfg.trace_length))
        return ts
    ts = capture_profiling_set(UNIFORM, p['n_traces'], cfg,
                               derive_seed(config['seeds']['profiling'], 0),
                               num_workers=p['num_workers'])
    if p['save_traces']:
        write_llts(ts, out_path(config, 'profiling.llts'))
    return ts


def _fit_extractor(config, cfg, kind, ts):
    p = config['profiling']
    ex = profile(cfg, len(ts), kind, config['seeds']['profiling'],
                 snr_threshold=p['snr_threshold'],
                 reg_epsilon=p['reg_epsilon'],
                 max_points=p['max_points'] or None,
                 traces_per_query=config['extraction']['n_traces'],
                 hyper=_hyper(config) if kind != 'template' else None,
                 ts=ts)
    ex.provenance['self_test'] = self_test(
        ex, p['self_test_inputs'],
        derive_seed(config['seeds']['profiling'], 2))
    save_bundle(ex, bundle_dir(config, kind))
    return ex


def _model_histogram(config, model):
    report = load_document(out_path(config, config['victim']['report_file']),
                           REPORT_KIND, REPORT_VERSION)
    images, _ = read_dataset(report['images'], report['labels'])
    q = quantize_input(images.reshape(len(images), -1))
    return logit_histogram(forward_batch(model, q))


def cmd_profile(config):
    validate_config(config, stages=['leakage', 'profiling'])
    cfg = leakage_config(config)
    ts = _profiling_set(config, cfg)
    kind = config['profiling']['scorer']
    ex = _fit_extractor(config, cfg, kind, ts)

    bundle = MetricsBundle(provenance={'seed': config['seeds']['profiling'],
                                       'n_profiling': len(ts),
                                       'fingerprint': cfg.fingerprint()})
    bundle.snr = {p: s.values for p, s in enumerate(ex.snr_profiles)}
    bundle.histograms['uniform'] = logit_histogram(ts.labels.view(np.int8))
    model_file = out_path(config, config['victim']['model_file'])
    if os.path.isfile(model_file):
        bundle.histograms['model-driven'] = _model_histogram(
            config, load_model(model_file))
    for p, s in enumerate(ex.snr_profiles):
        logger.info("position %d: peak SNR %.4f at sample %d", p, s.peak,
                    s.peak_index)
    save_metrics(bundle, out_path(config, 'profile-metrics.h5'))
    write_plotdata(bundle, out_path(config, 'plotdata', 'profile'))
    return ex


def cmd_eval_extraction(config):
    validate_config(config, stages=['leakage', 'profiling', 'evaluation'])
    cfg = leakage_config(config)
    e = config['evaluation']
    extractors, ts = {}, None
    for kind in e['scorers']:
        path = bundle_dir(config, kind)
        if os.path.isdir(path):
            ex = load_bundle(path)
        else:
            logger.info("no %s extractor in %s, profiling it", kind, path)
            if ts is None:
                ts = _profiling_set(config, cfg)
            ex = _fit_extractor(config, cfg, kind, ts)
        if ex.fingerprint != cfg.fingerprint():
            raise ConfigError("extractor %s was profiled under another "
                              "leakage config" % path)
        extractors[kind] = ex

    bundle = evaluate_extraction(extractors, e['max_traces'], e['repeats'],
                                 config['seeds']['evaluation'],
                                 chance=e['chance'], n_jobs=e['n_jobs'])
    for (kind, position), curve in sorted(bundle.curves.items()):
        logger.info("%s position %d: full success after %d traces", kind,
                    position, curve.traces_to_full_success)
    save_metrics(bundle, out_path(config, 'extraction-metrics.h5'))
    write_plotdata(bundle, out_path(config, 'plotdata', 'extraction'))
    return bundle


def attack_inputs(device, images, labels, test_indices, num_inputs):
    """First num_inputs held-out digits the victim classifies correctly."""
    chosen = []
    for idx in test_indices:
        if device.classify(images[idx]) == labels[idx]:
            chosen.append(int(idx))
        if len(chosen) == num_inputs:
            break
    if len(chosen) < num_inputs:
        logger.warning("only %d correctly classified test inputs",
                       len(chosen))
    return chosen


def attack_one(device, ex, shadow, x, label, spec, seed, n, oracle_kind,
               record_accuracy, input_id):
    """ZOO through the oracle and the BIM baseline for one input.

    Attack-stage errors are returned, not raised, so a batch goes on.
    """
    if oracle_kind == 'exact':
        oracle = ExactLogitOracle(device)
    else:
        oracle = LogitOracle(ex, device, derive_seed(seed, 0), n,
                             record_accuracy=record_accuracy)
    try:
        zoo = zoo_attack(oracle, x, spec, derive_seed(seed, 1),
                         true_label=label, verify=device.classify,
                         input_id=input_id)
    except AttackError as e:
        return None, None, str(e)
    bim = bim_whitebox_baseline(shadow, x, spec, label, device.classify,
                                input_id=input_id)
    return zoo, bim, None


def cmd_attack(config):
    validate_config(config, stages=['leakage', 'attack'])
    victim, a = config['victim'], config['attack']
    model_file = out_path(config, victim['model_file'])
    shadow_file = out_path(config, victim['shadow_file'])
    report_file = out_path(config, victim['report_file'])
    for path, what in ((model_file, 'victim model'),
                       (shadow_file, 'shadow model'),
                       (report_file, 'victim report')):
        _require(path, what)
    cfg = leakage_config(config)
    ex = None
    if a['oracle'] == 'side-channel':
        path = bundle_dir(config, config['profiling']['scorer'])
        _require(path, 'extractor bundle')
        ex = load_bundle(path)
        if ex.fingerprint != cfg.fingerprint():
            raise ConfigError("extractor %s was profiled under another "
                              "leakage config" % path)
    spec = AttackSpec.from_dict(a)

    model = load_model(model_file)
    shadow = load_shadow(shadow_file)
    report = load_document(report_file, REPORT_KIND, REPORT_VERSION)
    images, labels = read_dataset(report['images'], report['labels'])
    images = images.reshape(len(images), -1).astype(np.float64)
    device = TargetDevice(model, cfg)
    chosen = attack_inputs(device, images, labels,
                           dict2array(report['test_indices']),
                           a['num_inputs'])
    n = config['extraction']['n_traces']

    results = Parallel(n_jobs=a['n_jobs'])(
        delayed(attack_one)(device, ex, shadow, images[idx], int(labels[idx]),
                            spec, derive_seed(config['seeds']['attack'], idx),
                            n, a['oracle'], a['record_accuracy'],
                            "test_%d" % idx)
        for idx in chosen)

    report_dir = out_path(config, 'attacks')
    os.makedirs(report_dir, exist_ok=True)
    zoo_reports, bim_reports, failures = [], [], {}
    for idx, (zoo, bim, error) in zip(chosen, results):
        input_id = "test_%d" % idx
        if error is not None:
            logger.warning("%s: %s", input_id, error)
            failures[input_id] = error
            continue
        if a['oracle'] == 'side-channel' and \
                not check_trace_accounting(zoo, n):
            logger.warning("%s spent %d traces for %d queries", input_id,
                           zoo.traces, zoo.queries)
        save_report(zoo, os.path.join(report_dir, input_id + "-zoo.toml"),
                    spec)
        save_report(bim, os.path.join(report_dir, input_id + "-bim.toml"),
                    spec)
        zoo_reports.append(zoo)
        bim_reports.append(bim)
    dump_document({'failures': failures},
                  os.path.join(report_dir, 'failures.toml'))
    if chosen and not zoo_reports:
        raise AttackError("every attack failed (%d inputs)" % len(chosen))

    successes = [r for r in zoo_reports if r.success]
    if successes:
        export_adversarial_idx(successes, os.path.join(
            report_dir, 'adversarial-images.idx'))
    bundle = attack_metrics(zoo_reports, bim_reports, len(failures),
                            provenance={'seed': config['seeds']['attack'],
                                        'n': n, 'oracle': a['oracle']})
    save_metrics(bundle, out_path(config, 'attack-metrics.h5'))
    write_plotdata(bundle, out_path(config, 'plotdata', 'attack'))
    return bundle


def cmd_plotdata(config, metrics=None):
    if not metrics:
        metrics = sorted(glob.glob(out_path(config, '*-metrics.h5')))
    if not metrics:
        raise ConfigError("no metrics files in %s"
                          % config['output']['dir'])
    written = {}
    for path in metrics:
        name = os.path.basename(path).replace('-metrics.h5', '')
        written[name] = write_plotdata(
            load_metrics(path), out_path(config, 'plotdata', name))
    return written


def run_command(args, config):
    if args.command == 'train-victim':
        return cmd_train_victim(config)
    if args.command == 'profile':
        return cmd_profile(config)
    if args.command == 'eval-extraction':
        return cmd_eval_extraction(config)
    if args.command == 'attack':
        return cmd_attack(config)
    return cmd_plotdata(config, args.metrics)


def main(argv=None):
    args = get_arguments(argv)
    try:
        config = config_from_args(args)
    except LogitLeakError as e:
        logging.basicConfig()
        logger.error("%s", e)
        return e.exit_code

    handler = setup_logging(args, config['output']['dir'])
    try:
        run_command(args, config)
    except LogitLeakError as e:
        logger.error("%s failed: %s", args.command, e)
        return e.exit_code
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()
    return 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
