import os

import numpy as np
import pytest

from LogitLeak.leaksim import TraceSet, read_llts, write_llts, \
    capture_profiling_set, UNIFORM, LeakageConfig
from LogitLeak.util import DataError

GOLDEN = os.path.join(os.path.dirname(__file__), "data", "golden.llts")


def test_reads_golden_file():
    ts = read_llts(GOLDEN)
    assert ts.samples.dtype == np.float32
    assert ts.samples.tolist() == [[1.0, 0.5], [-2.5, 2.0]]
    assert ts.labels.tolist() == [[5, 255], [128, 0]]
    assert ts[0].label.values.tolist() == [5, -1]
    assert ts[1].label.values.tolist() == [-128, 0]


def test_writes_golden_bytes(tmp_path):
    ts = TraceSet(np.array([[1.0, 0.5], [-2.5, 2.0]]),
                  np.array([[5, -1], [-128, 0]]))
    path = str(tmp_path / "out.llts")
    write_llts(ts, path)
    with open(path, 'rb') as f, open(GOLDEN, 'rb') as g:
        assert f.read() == g.read()


def test_unlabeled_set(tmp_path):
    ts = TraceSet(np.arange(12, dtype=np.float32).reshape(3, 4))
    path = str(tmp_path / "attack.llts")
    write_llts(ts, path)
    assert os.path.getsize(path) == 16 + 3 * 4 * 4
    back = read_llts(path)
    assert not back.labeled
    assert np.array_equal(back.samples, ts.samples)


def test_fingerprint_is_attached(tmp_path):
    cfg = LeakageConfig(samples_per_event=1, pad_samples=0, noise_sigma=1.0)
    ts = capture_profiling_set(UNIFORM, 20, cfg, seed=0)
    path = str(tmp_path / "p.llts")
    write_llts(ts, path)
    back = read_llts(path, fingerprint=cfg.fingerprint())
    assert back.fingerprint == cfg.fingerprint()
    assert back.metadata['source_file'] == path
    assert np.array_equal(back.labels, ts.labels)


def _corrupt(tmp_path, data):
    path = str(tmp_path / "bad.llts")
    with open(path, 'wb') as f:
        f.write(data)
    return path


def test_truncated_payload(tmp_path):
    with open(GOLDEN, 'rb') as f:
        data = f.read()
    with pytest.raises(DataError, match="has 19 bytes, expected 20"):
        read_llts(_corrupt(tmp_path, data[:-1]))


def test_truncated_header(tmp_path):
    with pytest.raises(DataError, match="byte offset 7"):
        read_llts(_corrupt(tmp_path, b"LLTS\x01\x00\x02"))


def test_bad_magic(tmp_path):
    with open(GOLDEN, 'rb') as f:
        data = f.read()
    with pytest.raises(DataError, match="bad magic"):
        read_llts(_corrupt(tmp_path, b"LLTX" + data[4:]))


def test_future_version(tmp_path):
    with open(GOLDEN, 'rb') as f:
        data = f.read()
    with pytest.raises(DataError, match="version 2"):
        read_llts(_corrupt(tmp_path, data[:4] + b"\x02" + data[5:]))


def test_bad_label_flag(tmp_path):
    with open(GOLDEN, 'rb') as f:
        data = f.read()
    with pytest.raises(DataError, match="byte offset 14"):
        read_llts(_corrupt(tmp_path, data[:14] + b"\x07" + data[15:]))


def test_non_finite_sample(tmp_path):
    with open(GOLDEN, 'rb') as f:
        data = bytearray(f.read())
    # first sample of trace 1 becomes nan
    data[26:30] = b"\x00\x00\xc0\x7f"
    with pytest.raises(DataError, match="trace 1"):
        read_llts(_corrupt(tmp_path, bytes(data)))
