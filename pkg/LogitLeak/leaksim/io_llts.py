import logging
import struct

import numpy as np

from .traces import TraceSet
from ..util.errors import DataError

logger = logging.getLogger(__name__)

LLTS_MAGIC = b'LLTS'
LLTS_VERSION = 1
# magic, version u16, trace_count u32, trace_length u32, labeled u8,
# num_classes u8; little-endian, no padding
HEADER = struct.Struct('<4sHIIBB')


def write_llts(ts, path):
    num_classes = ts.num_classes if ts.labeled else 0
    header = HEADER.pack(LLTS_MAGIC, LLTS_VERSION, len(ts), ts.trace_length,
                         1 if ts.labeled else 0, num_classes)
    samples = ts.samples.astype('<f4')
    with open(path, 'wb') as f:
        f.write(header)
        if ts.labeled:
            record = np.dtype([('samples', '<f4', (ts.trace_length,)),
                               ('label', 'u1', (num_classes,))])
            rows = np.empty(len(ts), dtype=record)
            rows['samples'] = samples
            rows['label'] = ts.labels
            f.write(rows.tobytes())
        else:
            f.write(samples.tobytes())
    logger.info("wrote %d traces to %s", len(ts), path)
    return path


def read_llts(path, fingerprint=None):
    """Read an LLTS trace set; fingerprint is attached, not checked."""
    try:
        with open(path, 'rb') as f:
            buf = f.read()
    except OSError as e:
        raise DataError("cannot read %s: %s" % (path, e))

    if len(buf) < HEADER.size:
        raise DataError("%s: header truncated at byte offset %d (need %d)"
                        % (path, len(buf), HEADER.size))
    magic, version, count, length, labeled, num_classes = \
        HEADER.unpack_from(buf)
    if magic != LLTS_MAGIC:
        raise DataError("%s: bad magic %r at byte offset 0" % (path, magic))
    if version != LLTS_VERSION:
        raise DataError("%s: LLTS version %d at byte offset 4, this reader "
                        "supports version %d" % (path, version, LLTS_VERSION))
    if labeled not in (0, 1):
        raise DataError("%s: labeled flag %d at byte offset 14"
                        % (path, labeled))

    if labeled:
        record = np.dtype([('samples', '<f4', (length,)),
                           ('label', 'u1', (num_classes,))])
    else:
        record = np.dtype([('samples', '<f4', (length,))])
    expected = count * record.itemsize
    actual = len(buf) - HEADER.size
    if actual != expected:
        raise DataError("%s: payload at byte offset %d has %d bytes, "
                        "expected %d for %d traces of %d samples"
                        % (path, HEADER.size, actual, expected, count,
                           length))

    rows = np.frombuffer(buf, dtype=record, count=count, offset=HEADER.size)
    samples = rows['samples'].astype(np.float32).reshape(count, length)
    if not np.all(np.isfinite(samples)):
        bad = int(np.argwhere(~np.isfinite(samples))[0][0])
        raise DataError("%s: trace %d holds non-finite samples" % (path, bad))
    labels = rows['label'].reshape(count, num_classes).copy() \
        if labeled else None
    return TraceSet(samples, labels, fingerprint=fingerprint,
                    metadata={'source_file': str(path)})
