import logging
import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .device import TargetDevice
from ..leaksim.capture import capture_profiling_set, UNIFORM
from ..leaksim.config import LeakageConfig
from ..qnn.inference import LogitVector
from ..sca.accumulate import map_accumulate
from ..sca.model_io import save_distinguisher, load_distinguisher
from ..sca.neural import train_distinguisher
from ..sca.snr import compute_snr, select_poi, NUM_BYTE_CLASSES
from ..sca.templates import fit_templates
from ..util.convert import dump_document, load_document
from ..util.errors import ConfigError, DataError, EmptyPoiError
from ..util.seeds import derive_seed

logger = logging.getLogger(__name__)

BUNDLE_KIND = 'extractor_bundle'
BUNDLE_VERSION = 1
MANIFEST = 'manifest.toml'


@dataclass(eq=False)
class ExtractionResult:
    estimate: LogitVector
    scores: np.ndarray              # (num_classes, 256) accumulated
    traces_consumed: int
    correct: Optional[bool] = None
    position_correct: Optional[np.ndarray] = None


@dataclass(eq=False)
class ProfiledExtractor:
    """One fitted scorer per logit position plus the capture config.

    All positions are scored on the same traces: one acquisition covers
    every window of the max-search.
    """
    scorers: List
    cfg: LeakageConfig
    traces_per_query: int = 5
    provenance: dict = field(default_factory=dict)
    snr_profiles: List = field(default_factory=list)

    def __post_init__(self):
        assert len(self.scorers) == self.cfg.num_classes, \
            "%d scorers for %d logit positions" % (len(self.scorers),
                                                   self.cfg.num_classes)
        assert self.traces_per_query >= 1, "traces_per_query must be >= 1"

    @property
    def fingerprint(self):
        return self.cfg.fingerprint()

    @property
    def kind(self):
        return self.scorers[0].kind

    @property
    def num_classes(self):
        return len(self.scorers)

    def estimate(self, ts):
        """MAP estimate of every logit byte from one shared trace set."""
        ts.check_fingerprint(self.fingerprint)
        raw = np.zeros(self.num_classes, dtype=np.uint8)
        scores = np.zeros((self.num_classes, NUM_BYTE_CLASSES))
        for position, scorer in enumerate(self.scorers):
            raw[position], scores[position] = map_accumulate(ts, scorer)
        return ExtractionResult(LogitVector.from_raw(raw), scores, len(ts))


def fit_position(ts, position, kind, threshold, reg_epsilon, seed,
                 max_points=None, hyper=None, progress=False):
    snr = compute_snr(ts, position)
    try:
        poi = select_poi(snr, threshold, max_points=max_points)
    except EmptyPoiError as e:
        raise EmptyPoiError(e.threshold, e.max_snr, position)
    if kind == 'template':
        scorer = fit_templates(ts, poi, reg_epsilon, position)
    else:
        scorer = train_distinguisher(ts, poi, kind, position,
                                     seed=derive_seed(seed, 1, position),
                                     progress=progress, **(hyper or {}))
    return scorer, snr


def profile(cfg, n_profiling, kind, seed, snr_threshold=0.02,
            reg_epsilon=1e-6, traces_per_query=5, max_points=None,
            hyper=None, ts=None, num_workers=1, progress=False):
    """Profiling phase on the open device.

    Captures n_profiling traces with uniformly drawn logit bytes (unless
    a profiling set ts is given), then per logit position computes the
    SNR, selects the PoI and fits the chosen scorer. snr_threshold is a
    single value or one per position.
    """
    if n_profiling < NUM_BYTE_CLASSES * cfg.num_classes:
        logger.warning("%d profiling traces are fewer than %d; some byte "
                       "classes will be thin", n_profiling,
                       NUM_BYTE_CLASSES * cfg.num_classes)
    if ts is None:
        ts = capture_profiling_set(UNIFORM, n_profiling, cfg,
                                   derive_seed(seed, 0),
                                   num_workers=num_workers)
    ts.check_fingerprint(cfg.fingerprint())
    thresholds = snr_threshold if isinstance(snr_threshold, (list, tuple)) \
        else [snr_threshold] * cfg.num_classes

    scorers, profiles = [], []
    for position in range(cfg.num_classes):
        scorer, snr = fit_position(ts, position, kind, thresholds[position],
                                   reg_epsilon, seed, max_points, hyper,
                                   progress)
        scorers.append(scorer)
        profiles.append(snr)
    provenance = {'seed': int(seed), 'n_profiling': int(len(ts)),
                  'kind': kind}
    return ProfiledExtractor(scorers, cfg, traces_per_query, provenance,
                             profiles)


def extract_logits(target, x, ex, cfg, seed, n=None, evaluate=False):
    """Attack phase: estimate the logits of one input from n traces.

    In evaluation mode the estimate is compared with the true logits,
    read through the device's reference channel after estimation.
    """
    if cfg.fingerprint() != ex.fingerprint:
        raise ConfigError("extractor was profiled under config %s, attack "
                          "config is %s" % (ex.fingerprint[:12],
                                            cfg.fingerprint()[:12]))
    device = target if isinstance(target, TargetDevice) else \
        TargetDevice(target, cfg)
    if device.cfg.fingerprint() != ex.fingerprint:
        raise ConfigError("target device captures under a different config")
    n = ex.traces_per_query if n is None else n
    result = ex.estimate(device.acquire(x, n, seed))
    if evaluate:
        truth = device.reference_logits(x)
        result.position_correct = result.estimate.values == truth.values
        result.correct = bool(np.all(result.position_correct))
    return result


def self_test(ex, n_inputs, seed):
    """Fraction of logit positions recovered from a single fresh trace,
    over n_inputs uniformly drawn logit vectors."""
    ts = capture_profiling_set(UNIFORM, n_inputs, ex.cfg, seed)
    hits = np.zeros((n_inputs, ex.num_classes), dtype=bool)
    for position, scorer in enumerate(ex.scorers):
        guess = np.argmax(scorer.log_scores(ts.samples), axis=1)
        hits[:, position] = guess == ts.byte_labels(position)
    rate = float(np.mean(hits))
    logger.info("self-test: %.4f of positions recovered", rate)
    return rate


def save_bundle(ex, out_dir):
    """Extractor bundle: one model file per position plus a manifest."""
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for position, scorer in enumerate(ex.scorers):
        name = "position_%d.toml" % position
        save_distinguisher(scorer, os.path.join(out_dir, name))
        files.append(name)
    manifest = {
        'format_version': BUNDLE_VERSION,
        'kind': BUNDLE_KIND,
        'fingerprint': ex.fingerprint,
        'scorer': ex.kind,
        'traces_per_query': int(ex.traces_per_query),
        'files': files,
        'leakage': ex.cfg.to_dict(),
        'provenance': dict(ex.provenance),
    }
    digest = dump_document(manifest, os.path.join(out_dir, MANIFEST))
    logger.info("wrote extractor bundle %s (%s)", out_dir, digest[:12])
    return digest


def load_bundle(path):
    doc = load_document(os.path.join(path, MANIFEST), BUNDLE_KIND,
                        BUNDLE_VERSION)
    cfg = LeakageConfig(**doc['leakage'])
    if cfg.fingerprint() != doc['fingerprint']:
        raise DataError("%s: leakage section does not match fingerprint %s"
                        % (path, doc['fingerprint'][:12]))
    scorers = [load_distinguisher(os.path.join(path, f))
               for f in doc['files']]
    return ProfiledExtractor(scorers, cfg, int(doc['traces_per_query']),
                             dict(doc.get('provenance', {})))
