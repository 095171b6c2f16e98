import logging

import numpy as np

from .inference import QuantizedLayer, QuantizedModel
from .quantize import QuantizedTensor
from .shadow import FloatMLP
from ..models.mlp import MLP
from ..util.convert import array2dict, dict2array, dump_document, \
    load_document, document_hash
from ..util.errors import DataError

logger = logging.getLogger(__name__)

MODEL_KIND = 'quantized_model'
MODEL_VERSION = 1


def model_to_dict(model, provenance=None):
    doc = {
        'format_version': MODEL_VERSION,
        'kind': MODEL_KIND,
        'input_frac_bits': int(model.input_frac_bits),
        'num_classes': int(model.num_classes),
        'num_layers': len(model.layers),
    }
    for i, layer in enumerate(model.layers):
        doc['layer_%d' % i] = {
            'activation': layer.activation,
            'out_frac_bits': int(layer.out_frac_bits),
            'weight_frac_bits': int(layer.weight.frac_bits),
            'bias_frac_bits': int(layer.bias.frac_bits),
            'weight': array2dict(layer.weight.data),
            'bias': array2dict(layer.bias.data),
        }
    if provenance:
        doc['provenance'] = provenance
    return doc


def model_from_dict(doc):
    try:
        layers = []
        for i in range(int(doc['num_layers'])):
            t = doc['layer_%d' % i]
            weight = dict2array(t['weight']).astype(np.int8)
            bias = dict2array(t['bias']).astype(np.int8)
            layers.append(QuantizedLayer(
                QuantizedTensor(weight, int(t['weight_frac_bits'])),
                QuantizedTensor(bias, int(t['bias_frac_bits'])),
                t['activation'], int(t['out_frac_bits'])))
        return QuantizedModel(layers, int(doc['input_frac_bits']),
                              int(doc['num_classes']))
    except KeyError as e:
        raise DataError("model document lacks field %s" % e)
    except AssertionError as e:
        raise DataError("inconsistent model document: %s" % e)


def save_model(model, path, provenance=None):
    digest = dump_document(model_to_dict(model, provenance), path)
    logger.info("wrote model %s (sha256 %s)", path, digest[:12])
    return digest


def load_model(path):
    return model_from_dict(load_document(path, MODEL_KIND, MODEL_VERSION))


def model_hash(model):
    """sha256 of the canonical serialization, provenance excluded."""
    return document_hash(model_to_dict(model))


SHADOW_KIND = 'float_shadow'


def save_shadow(shadow, path):
    net = shadow.net
    doc = {
        'format_version': MODEL_VERSION,
        'kind': SHADOW_KIND,
        'widths': list(net.widths),
    }
    for i, (w, b) in enumerate(net.weights()):
        doc['layer_%d' % i] = {'weight': array2dict(w), 'bias': array2dict(b)}
    return dump_document(doc, path)


def load_shadow(path):
    doc = load_document(path, SHADOW_KIND, MODEL_VERSION)
    net = MLP(doc['widths'], dtype=np.float64, zero_init=True)
    for i in range(net.num_layers):
        t = doc['layer_%d' % i]
        w, b = dict2array(t['weight']), dict2array(t['bias'])
        if w.shape != net.params['w%d' % i].shape:
            raise DataError("%s: layer %d weight has shape %s, expected %s"
                            % (path, i, w.shape, net.params['w%d' % i].shape))
        net.params['w%d' % i] = w.astype(np.float64)
        net.params['b%d' % i] = b.astype(np.float64)
    return FloatMLP(net)
