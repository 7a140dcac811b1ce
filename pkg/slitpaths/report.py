"""
SlitPaths - Reports
CSV emission and parsing. Header lines start with '#'; values are written
with 17 significant digits and no timestamps, so identical runs produce
identical files.
"""

import csv
import logging
import numbers
from pathlib import Path

import numpy as np

from slitpaths.errors import ReportError

logger = logging.getLogger(__name__)

COMMENT = '#'
CONFIG_PREFIX = 'config: '


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (numbers.Integral, np.integer)):
        return str(int(value))
    return f"{float(value):.16e}"


def header_lines(command, config, self_convergence=None, notes=()):
    """Comment header: command, config hash, convergence estimate, notes, config echo"""
    lines = [
        f"slitpaths {command}",
        f"config_sha256 = {config.digest()}",
    ]
    if self_convergence is not None:
        lines.append(f"self_convergence = {self_convergence:.3e}")
    lines.extend(notes)
    lines.extend(CONFIG_PREFIX + line for line in config.echo_lines())
    return lines


def write_table(path, columns, header=()):
    """
    Write `columns` ({name: 1-D sequence}, insertion order kept) as CSV.
    Raises ReportError if the file cannot be written or columns differ in length.
    """
    names = list(columns)
    lengths = {len(columns[name]) for name in names}
    if len(lengths) > 1:
        raise ReportError(f"columns of unequal length for {path}: {sorted(lengths)}")

    path = Path(path)
    try:
        with path.open('w', newline='', encoding='utf-8') as f:
            for line in header:
                f.write(f"{COMMENT} {line}\n")
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(names)
            for row in zip(*(columns[name] for name in names)):
                writer.writerow([format_value(value) for value in row])
    except OSError as e:
        logger.error(f"Error writing {path}: {e}", exc_info=True)
        raise ReportError(f"cannot write {path}: {e.strerror or e}") from e

    logger.info(f"Wrote {path} ({len(names)} columns, {lengths.pop() if lengths else 0} rows)")
    return path


def read_table(path, required=()):
    """
    Read a CSV written by write_table (or by hand).
    Returns (header_lines, {column: float array}).
    """
    path = Path(path)
    try:
        with path.open('r', newline='', encoding='utf-8') as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ReportError(f"cannot read {path}: {e.strerror or e}") from e

    header = [line[1:].strip() for line in lines if line.startswith(COMMENT)]
    body = [line for line in lines if line.strip() and not line.startswith(COMMENT)]
    if not body:
        raise ReportError(f"{path} has no header row")

    reader = csv.DictReader(body)
    fieldnames = [name.strip() for name in reader.fieldnames]
    missing = [name for name in required if name not in fieldnames]
    if missing:
        raise ReportError(f"{path} is missing required columns: {', '.join(missing)}")

    data = {name: [] for name in fieldnames}
    for row_number, row in enumerate(reader, start=2):
        for raw_name, raw_value in row.items():
            if raw_name is None:
                raise ReportError(f"{path}, row {row_number}: more values than columns")
            name = raw_name.strip()
            try:
                data[name].append(float(raw_value))
            except (TypeError, ValueError):
                raise ReportError(
                    f"{path}, row {row_number}: column {name} has non-numeric value {raw_value!r}"
                ) from None

    logger.debug(f"Read {path}: {len(fieldnames)} columns")
    return header, {name: np.asarray(values, dtype=float) for name, values in data.items()}


def config_echo(header):
    """The `key = value` lines of a config echo found in a header"""
    return [line[len(CONFIG_PREFIX):] for line in header if line.startswith(CONFIG_PREFIX)]
