import argparse
import logging
import os

import numpy as np

if __package__ is None or __package__ == '':
    from LogitLeak.evaluate.metrics import load_metrics
else:
    from ..evaluate.metrics import load_metrics

logger = logging.getLogger(__name__)

COLUMNS_PREFIX = "# columns:"
PLOT_FILES = ('snr', 'success_rate', 'guessing_entropy', 'histograms',
              'objectives', 'extraction_accuracy', 'summary')


def write_table(path, title, columns, rows):
    """Tab-delimited numeric table with two '#' header lines.

    rows is a 2-d array with one column per name; missing entries of
    ragged series are nan.
    """
    rows = np.asarray(rows, dtype=np.float64)
    rows = rows.reshape(len(rows) if rows.size else 0, len(columns))
    with open(path, 'w') as f:
        f.write("# %s\n" % title)
        f.write("%s %s\n" % (COLUMNS_PREFIX, "\t".join(columns)))
        for row in rows:
            f.write("\t".join("%.10g" % v for v in row) + "\n")
    logger.debug("wrote %d rows to %s", len(rows), path)
    return path


def read_table(path):
    columns, rows = [], []
    with open(path) as f:
        for line in f:
            line = line.rstrip("\n")
            if line.startswith(COLUMNS_PREFIX):
                names = line[len(COLUMNS_PREFIX):].strip()
                columns = names.split("\t") if names else []
            elif line and not line.startswith("#"):
                rows.append([float(v) for v in line.split("\t")])
    return columns, np.array(rows, dtype=np.float64).reshape(len(rows),
                                                             len(columns))


def _ragged(series):
    """Stack 1-d series of different lengths into columns, nan padded."""
    length = max((len(s) for s in series), default=0)
    out = np.full((length, len(series)), np.nan)
    for j, s in enumerate(series):
        out[:len(s), j] = s
    return out


def _indexed(index_name, names, series):
    table = _ragged(series)
    index = np.arange(len(table), dtype=np.float64)[:, np.newaxis]
    return [index_name] + list(names), np.hstack([index, table])


def snr_table(bundle):
    positions = sorted(bundle.snr)
    return _indexed('sample', ["position_%d" % p for p in positions],
                    [bundle.snr[p] for p in positions])


def curve_table(bundle, attribute):
    keys = sorted(bundle.curves)
    columns, rows = _indexed(
        'traces', ["%s_position_%d" % k for k in keys],
        [getattr(bundle.curves[k], attribute) for k in keys])
    # first row is one accumulated trace
    rows[:, 0] += 1
    return columns, rows


def histogram_table(bundle):
    names, series = [], []
    for source in sorted(bundle.histograms):
        for p, counts in enumerate(bundle.histograms[source]):
            names.append("%s_position_%d" % (source, p))
            series.append(counts)
    columns, rows = _indexed('byte', names, series)
    columns[0] = 'raw_byte'
    return columns, rows


def series_table(mapping, index_name):
    keys = sorted(mapping)
    return _indexed(index_name, keys, [mapping[k] for k in keys])


def summary_table(bundle):
    keys = sorted(bundle.summary)
    return keys, np.array([[float(bundle.summary[k]) for k in keys]]) \
        if keys else np.zeros((0, 0))


def write_plotdata(bundle, out_dir):
    """Emit every plot table of a bundle; empty parts give header-only
    files. Returns the written paths by table name."""
    os.makedirs(out_dir, exist_ok=True)
    tables = {
        'snr': ("SNR per sample and logit position", snr_table(bundle)),
        'success_rate': ("success rate after k accumulated traces",
                         curve_table(bundle, 'success_rate')),
        'guessing_entropy': ("mean rank of the true byte after k traces",
                             curve_table(bundle, 'guessing_entropy')),
        'histograms': ("logit byte counts per source and position",
                       histogram_table(bundle)),
        'objectives': ("attack objective per oracle evaluation",
                       series_table(bundle.objectives, 'step')),
        'extraction_accuracy': ("fraction of logits extracted per call",
                                series_table(bundle.extraction_accuracy,
                                             'call')),
        'summary': ("run summary", summary_table(bundle)),
    }
    paths = {}
    for name in PLOT_FILES:
        title, (columns, rows) = tables[name]
        paths[name] = write_table(os.path.join(out_dir, name + ".txt"),
                                  title, columns, rows)
    logger.info("wrote plot data to %s", out_dir)
    return paths


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument('--in-file', type=str, dest='in_file',
                        help='metrics hdf file', required=True)
    parser.add_argument('--out-folder', type=str, dest='out_folder',
                        help='output folder', required=True)
    args = parser.parse_args()

    write_plotdata(load_metrics(args.in_file), args.out_folder)


if __name__ == "__main__":
    main()
