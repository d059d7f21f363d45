'''
Writers for run artifacts. CSV files carry a header line and a fixed column
order, and every float is written with round-trip precision.
'''
import csv
import json
import os

import numpy as np
import yaml

from pulsevo.utils import format_float


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def _ensure_directory(path):
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(directory):
        os.makedirs(directory)


def write_csv(path, header, rows):
    _ensure_directory(path)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def read_csv(path):
    with open(path, newline='') as f:
        return list(csv.DictReader(f))


def write_json(path, data):
    _ensure_directory(path)
    with open(path, 'w') as f:
        json.dump(data, f, sort_keys=True, indent=2)
        f.write('\n')
    return path


def read_json(path):
    with open(path) as f:
        return json.load(f)


def write_jsonl(path, items):
    _ensure_directory(path)
    with open(path, 'w') as f:
        for item in items:
            f.write(json.dumps(item, sort_keys=True) + '\n')
    return path


def write_yaml(path, data):
    _ensure_directory(path)
    with open(path, 'w') as f:
        yaml.safe_dump(data, f, default_flow_style=False, sort_keys=True)
    return path


def load_yaml(path):
    with open(path) as f:
        return yaml.safe_load(f) or {}


def trace_rows(trace):
    return zip(trace.time, trace.input_intensity, trace.output_intensity)


TRACE_HEADER = ('time', 'input_intensity', 'output_intensity')


def generation_record_dict(record):
    return {
        'generation': record.generation,
        'best_fitness': record.best_fitness,
        'new_evaluations': record.new_evaluations,
        'best_genome': list(record.best_genome),
    }
