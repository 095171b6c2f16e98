import logging
import math

import numpy as np

from .zoo import AttackReport
from ..qnn.io_idx import write_idx
from ..util.convert import array2dict, dict2array, dump_document, \
    load_document

logger = logging.getLogger(__name__)

REPORT_KIND = 'attack_report'
REPORT_VERSION = 1

_SCALARS = ('success', 'distortion', 'iterations', 'queries', 'traces',
            'method', 'original_class', 'final_class', 'target', 'verified',
            'gradient_queries', 'verification_queries', 'input_id')


def report_to_dict(report, spec=None):
    doc = {'format_version': REPORT_VERSION, 'kind': REPORT_KIND}
    for name in _SCALARS:
        doc[name] = getattr(report, name)
    doc['adversarial'] = array2dict(np.asarray(report.adversarial,
                                               dtype=np.float64))
    doc['objective_log'] = array2dict(np.asarray(report.objective_log,
                                                 dtype=np.float64))
    doc['extraction_accuracy'] = array2dict(
        np.asarray(report.extraction_accuracy, dtype=np.float64))
    if spec is not None:
        doc['spec'] = spec.to_dict()
    return doc


def report_from_dict(doc):
    fields = {name: doc[name] for name in _SCALARS}
    return AttackReport(
        adversarial=dict2array(doc['adversarial']),
        objective_log=dict2array(doc['objective_log']).tolist(),
        extraction_accuracy=dict2array(doc['extraction_accuracy']).tolist(),
        **fields)


def save_report(report, path, spec=None):
    return dump_document(report_to_dict(report, spec), path)


def load_report(path):
    return report_from_dict(load_document(path, REPORT_KIND, REPORT_VERSION))


def export_adversarial_idx(reports, path):
    """Adversarial inputs as an IDX image file, rounded to uint8 pixels."""
    images = np.stack([np.asarray(r.adversarial) for r in reports])
    side = int(round(math.sqrt(images.shape[1])))
    if side * side == images.shape[1]:
        images = images.reshape(len(images), side, side)
    pixels = np.clip(np.rint(images), 0, 255).astype(np.uint8)
    logger.info("exporting %d adversarial inputs to %s", len(pixels), path)
    return write_idx(path, pixels)
