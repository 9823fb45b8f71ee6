import csv
import json
from typing import Any, Dict, List, Sequence

from .._agent.agent import PolicySummary, RunRecord
from .._errors import ParseError

TRAIN_COLUMNS = list(RunRecord._fields)
EVAL_KEYS = list(PolicySummary._fields)

_INT_COLUMNS = ('episode', 'steps')


def _cell(column: str, value) -> str:
    if column in _INT_COLUMNS:
        return str(int(value))
    # repr is the shortest string that parses back to the same float
    return repr(float(value))


def write_records(path: str, records: Sequence[RunRecord]) -> None:
    with open(path, mode='w', encoding='utf8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(TRAIN_COLUMNS)
        for record in records:
            writer.writerow([_cell(c, getattr(record, c)) for c in TRAIN_COLUMNS])


def read_records(path: str) -> List[RunRecord]:
    records = []
    with open(path, mode='r', encoding='utf8', newline='') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != TRAIN_COLUMNS:
            raise ParseError(f'Unexpected header {header}, expected {TRAIN_COLUMNS}', path, 1)
        for row in reader:
            line = reader.line_num
            if len(row) != len(TRAIN_COLUMNS):
                raise ParseError(
                    f'Expected {len(TRAIN_COLUMNS)} columns, got {len(row)}', path, line
                )
            try:
                values = {
                    c: int(v) if c in _INT_COLUMNS else float(v)
                    for c, v in zip(TRAIN_COLUMNS, row)
                }
            except ValueError as e:
                raise ParseError(str(e), path, line) from e
            records.append(RunRecord(**values))
    return records


def write_json(path: str, obj: Any) -> None:
    with open(path, mode='w', encoding='utf8') as f:
        f.write(json.dumps(obj, indent=2, sort_keys=True) + '\n')


def read_json(path: str) -> Any:
    with open(path, mode='r', encoding='utf8') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, path, e.lineno) from e


def write_summary(path: str, summary: PolicySummary) -> None:
    write_json(path, summary.to_dict())


def read_summary(path: str) -> PolicySummary:
    data: Dict[str, Any] = read_json(path)
    missing = [k for k in EVAL_KEYS if k not in data]
    if missing:
        raise ParseError(f'Missing keys {missing}', path)
    return PolicySummary(
        episodes=int(data['episodes']),
        mean=float(data['mean']),
        median=float(data['median']),
        min=float(data['min']),
        max=float(data['max']),
        per_episode=tuple(float(r) for r in data['per_episode']),
    )
