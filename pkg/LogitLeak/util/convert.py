import argparse
import base64
import hashlib
import logging
import os

import h5py
import numpy as np
import toml

if __package__ is None or __package__ == '':
    from errors import DataError
else:
    from .errors import DataError

logger = logging.getLogger(__name__)


def array2dict(array):
    """Encode an array as a toml-friendly table (dtype, shape, base64)."""
    array = np.ascontiguousarray(array)
    dtype = array.dtype.newbyteorder('<')
    return {
        'dtype': dtype.str,
        'shape': list(array.shape),
        'data': base64.b64encode(array.astype(dtype).tobytes()).decode('ascii'),
    }


def dict2array(table):
    try:
        dtype = np.dtype(table['dtype'])
        shape = tuple(int(s) for s in table['shape'])
        raw = base64.b64decode(table['data'])
    except (KeyError, TypeError, ValueError) as e:
        raise DataError("malformed array table: %s" % e)
    expected = int(np.prod(shape)) * dtype.itemsize
    if len(raw) != expected:
        raise DataError("array payload has %d bytes, expected %d for shape %s"
                        % (len(raw), expected, shape))
    return np.frombuffer(raw, dtype=dtype).reshape(shape).copy()


def dump_document(doc, path):
    """Write a toml document; keys are emitted in insertion order."""
    text = toml.dumps(doc)
    with open(path, 'w') as f:
        f.write(text)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def load_document(path, kind, version):
    if not os.path.isfile(path):
        raise DataError("missing file %s" % path)
    try:
        doc = toml.load(path)
    except toml.TomlDecodeError as e:
        raise DataError("cannot parse %s: %s" % (path, e))
    if 'format_version' not in doc:
        raise DataError("%s has no format_version field" % path)
    if doc.get('kind') not in (kind if isinstance(kind, (list, tuple))
                               else [kind]):
        raise DataError("%s is a %r document, expected %r"
                        % (path, doc.get('kind'), kind))
    if int(doc['format_version']) > version:
        raise DataError("%s has format_version %s, this reader supports <= %d"
                        % (path, doc['format_version'], version))
    return doc


def document_hash(doc):
    return hashlib.sha256(toml.dumps(doc).encode('utf-8')).hexdigest()


def hdf2txt(hdf_file, hdf_key, txt_file=None, header=None):
    """Write one 1-d or 2-d dataset of an hdf file as delimited text."""
    if txt_file is None:
        txt_file = os.path.splitext(hdf_file)[0] + \
            "_" + hdf_key.replace("/", "_") + ".txt"

    with h5py.File(hdf_file, 'r') as f:
        array = np.array(f[hdf_key])
    if array.ndim == 1:
        array = array[:, np.newaxis]
    logger.info("writing %s %s to %s", hdf_key, array.shape, txt_file)
    np.savetxt(txt_file, array, delimiter='\t', fmt='%.10g',
               header=header if header is not None else hdf_key)
    return txt_file


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument('--in-file', type=str, dest='in_file',
                        help='input hdf file', required=True)
    parser.add_argument('--in-key', type=str, dest='in_key',
                        help='input key', action='append', required=True)
    parser.add_argument('--out-folder', type=str, dest='out_folder',
                        help='output folder')
    args = parser.parse_args()

    for key in args.in_key:
        txt_file = None
        if args.out_folder is not None:
            os.makedirs(args.out_folder, exist_ok=True)
            txt_file = os.path.join(args.out_folder,
                                    key.replace("/", "_") + ".txt")
        hdf2txt(args.in_file, key, txt_file)


if __name__ == "__main__":
    main()
