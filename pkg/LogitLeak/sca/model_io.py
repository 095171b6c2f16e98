import logging

import numpy as np

from .neural import NeuralDistinguisher, NEURAL_KINDS
from .snr import PoiSelection
from .templates import TemplateModel
from ..models.mlp import MLP
from ..util.convert import array2dict, dict2array, dump_document, \
    load_document
from ..util.errors import DataError

logger = logging.getLogger(__name__)

DISTINGUISHER_KINDS = ('template',) + NEURAL_KINDS
DISTINGUISHER_VERSION = 1


def poi_to_dict(poi):
    return {'threshold': float(poi.threshold),
            'indices': array2dict(poi.indices)}


def poi_from_dict(table):
    return PoiSelection(dict2array(table['indices']),
                        float(table['threshold']))


def distinguisher_to_dict(d):
    doc = {
        'format_version': DISTINGUISHER_VERSION,
        'kind': d.kind,
        'position': -1 if d.position is None else int(d.position),
        'poi': poi_to_dict(d.poi),
    }
    if d.kind == 'template':
        doc['means'] = array2dict(d.means)
        # lower Cholesky factors, so reloading never refactorizes
        doc['chol'] = array2dict(d.chol)
        doc['profiled'] = array2dict(d.profiled.astype(np.uint8))
        doc['reg'] = array2dict(d.reg)
        doc['counts'] = array2dict(d.counts.astype(np.int64))
    else:
        doc['widths'] = list(d.net.widths)
        doc['mean'] = array2dict(d.mean)
        doc['std'] = array2dict(d.std)
        doc['record'] = dict(d.record)
        for i, (w, b) in enumerate(d.net.weights()):
            doc['layer_%d' % i] = {'weight': array2dict(w),
                                   'bias': array2dict(b)}
    return doc


def distinguisher_from_dict(doc):
    kind = doc['kind']
    position = int(doc['position'])
    position = None if position < 0 else position
    poi = poi_from_dict(doc['poi'])
    try:
        if kind == 'template':
            model = TemplateModel(dict2array(doc['means']),
                                  dict2array(doc['chol']),
                                  dict2array(doc['profiled']).astype(bool),
                                  dict2array(doc['reg']),
                                  dict2array(doc['counts']), poi, position)
            if model.means.shape[1] != len(poi):
                raise DataError("template dimension %d does not match %d PoI"
                                % (model.means.shape[1], len(poi)))
            return model
        net = MLP(doc['widths'], dtype=np.float32, zero_init=True)
        for i in range(net.num_layers):
            t = doc['layer_%d' % i]
            for name, key in (('w', 'weight'), ('b', 'bias')):
                value = dict2array(t[key])
                if value.shape != net.params['%s%d' % (name, i)].shape:
                    raise DataError("layer %d %s has shape %s" %
                                    (i, key, value.shape))
                net.params['%s%d' % (name, i)] = value.astype(np.float32)
        return NeuralDistinguisher(kind, net, poi, dict2array(doc['mean']),
                                   dict2array(doc['std']),
                                   dict(doc.get('record', {})), position)
    except KeyError as e:
        raise DataError("%s document lacks field %s" % (kind, e))


def save_distinguisher(d, path):
    return dump_document(distinguisher_to_dict(d), path)


def load_distinguisher(path):
    doc = load_document(path, DISTINGUISHER_KINDS, DISTINGUISHER_VERSION)
    return distinguisher_from_dict(doc)
