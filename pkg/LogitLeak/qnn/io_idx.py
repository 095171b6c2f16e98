import gzip
import logging
import struct

import numpy as np

from ..util.errors import DataError

logger = logging.getLogger(__name__)

# third magic byte -> element type, see the MNIST distribution notes
IDX_TYPES = {
    0x08: np.dtype('>u1'),
    0x09: np.dtype('>i1'),
    0x0B: np.dtype('>i2'),
    0x0C: np.dtype('>i4'),
    0x0D: np.dtype('>f4'),
    0x0E: np.dtype('>f8'),
}
IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


def _open(path):
    with open(path, 'rb') as f:
        head = f.read(2)
    if head == b'\x1f\x8b':
        return gzip.open(path, 'rb')
    return open(path, 'rb')


def read_idx(path, expect_magic=None):
    """Read an IDX file (optionally gzip-compressed) into a numpy array.

    Parse failures raise DataError naming the byte offset and, for
    truncated payloads, the expected against the actual byte count.
    """
    try:
        with _open(path) as f:
            buf = f.read()
    except OSError as e:
        raise DataError("cannot read %s: %s" % (path, e))

    if len(buf) < 4:
        raise DataError("%s: header truncated at byte offset %d (need 4)"
                        % (path, len(buf)))
    zero, dtype_code, ndim = struct.unpack('>HBB', buf[:4])
    magic = struct.unpack('>I', buf[:4])[0]
    if zero != 0 or dtype_code not in IDX_TYPES:
        raise DataError("%s: bad magic 0x%08x at byte offset 0"
                        % (path, magic))
    if expect_magic is not None and magic != expect_magic:
        raise DataError("%s: magic 0x%08x at byte offset 0, expected 0x%08x"
                        % (path, magic, expect_magic))

    header_end = 4 + 4 * ndim
    if len(buf) < header_end:
        raise DataError("%s: dimension sizes truncated at byte offset %d "
                        "(need %d header bytes)" % (path, len(buf), header_end))
    shape = struct.unpack('>' + 'I' * ndim, buf[4:header_end])
    dtype = IDX_TYPES[dtype_code]
    expected = int(np.prod(shape)) * dtype.itemsize
    actual = len(buf) - header_end
    if actual != expected:
        raise DataError("%s: payload at byte offset %d has %d bytes, "
                        "expected %d for shape %s"
                        % (path, header_end, actual, expected, shape))

    data = np.frombuffer(buf, dtype=dtype, offset=header_end)
    logger.debug("read %s: shape %s, dtype %s", path, shape, dtype)
    return data.reshape(shape).astype(dtype.newbyteorder('='))


def write_idx(path, array):
    array = np.asarray(array)
    codes = {v.newbyteorder('='): k for k, v in IDX_TYPES.items()}
    dtype = array.dtype.newbyteorder('=')
    if dtype not in codes:
        raise DataError("cannot store dtype %s in IDX" % array.dtype)
    header = struct.pack('>HBB', 0, codes[dtype], array.ndim) + \
        struct.pack('>' + 'I' * array.ndim, *array.shape)
    with open(path, 'wb') as f:
        f.write(header)
        f.write(array.astype(dtype.newbyteorder('>')).tobytes())
    return path


def read_dataset(images_file, labels_file):
    images = read_idx(images_file, expect_magic=IMAGES_MAGIC)
    labels = read_idx(labels_file, expect_magic=LABELS_MAGIC)
    if len(images) != len(labels):
        raise DataError("%s holds %d images but %s holds %d labels"
                        % (images_file, len(images), labels_file,
                           len(labels)))
    return images, labels
