from dataclasses import asdict, dataclass
import json
import os
from typing import Optional

from twisted.python.logfile import LogFile

from pulsevo.pulse_codec import make_genome
from pulsevo.validate import validate_record

RUNLOG_FILENAME = 'runlog.jsonl'


@dataclass(frozen=True)
class RunLogRecord(object):
    '''One evaluated individual. ``new`` is set on the first evaluation of
    a genome and cleared on every cache hit.'''
    generation: int
    encoding: str
    genome: tuple
    fitness: float
    eta: Optional[float] = None
    beta: float = 1.0
    area: Optional[float] = None
    new: bool = True

    def to_dict(self):
        data = asdict(self)
        data['genome'] = list(self.genome)
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        validate_record(data)
        return cls(**dict(
            data, genome=make_genome(data['encoding'], data['genome'])))


def _optional_float(value):
    return None if value is None else float(value)


class RunLog(object):
    '''
    Append-only record of every evaluated individual.

    :param logfile: Where records are written as JSON lines, or ``None`` to
        keep them in memory only.
    :type logfile: :class:`twisted.python.logfile.LogFile`
    '''

    def __init__(self, records=(), logfile=None):
        self.records = list(records)
        self.logfile = logfile

    @classmethod
    def open(cls, path):
        '''A log that also writes to the file at ``path``, replacing any
        previous contents.'''
        directory, name = os.path.split(os.path.abspath(path))
        if not os.path.exists(directory):
            os.makedirs(directory)
        if os.path.exists(path):
            os.remove(path)
        return cls(logfile=LogFile(name, directory, rotateLength=None))

    def append(self, record):
        record = RunLogRecord(
            generation=int(record.generation),
            encoding=record.encoding,
            genome=record.genome,
            fitness=float(record.fitness),
            eta=_optional_float(record.eta),
            beta=float(record.beta),
            area=_optional_float(record.area),
            new=bool(record.new))
        self.records.append(record)
        if self.logfile is not None:
            self.logfile.write((record.to_json() + '\n').encode('utf-8'))

    def flush(self):
        if self.logfile is not None:
            self.logfile.flush()

    def close(self):
        if self.logfile is not None:
            self.logfile.close()

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    @property
    def encodings(self):
        return sorted(set(r.encoding for r in self.records))

    def generation(self, index):
        return [r for r in self.records if r.generation == index]

    def unique(self):
        '''The first record of every distinct genome, in log order.'''
        seen = set()
        records = []
        for record in self.records:
            if record.genome not in seen:
                seen.add(record.genome)
                records.append(record)
        return records


def read_lines(path):
    '''
    Reads the complete lines of a JSON-lines file. The last line is ignored
    if it does not end in a new line, since a killed run may not have
    finished writing it.
    '''
    with open(path) as f:
        data = f.read()
    lines = data.split('\n')
    # either the empty string after the final new line or a partial line
    lines.pop(-1)
    return [line for line in lines if line != '']


def read_runlog(path):
    '''Loads a run log written by :meth:`RunLog.open`, validating every
    record.'''
    return RunLog(
        RunLogRecord.from_dict(json.loads(line)) for line in read_lines(path))
