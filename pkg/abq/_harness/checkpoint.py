"""
Checkpoint layout::

    <JSON header>\\n
    <parameter payload, little-endian float64, arrays in BranchingNetParams.arrays() order>
    <payload length, little-endian uint64><sha256 of the payload, 32 bytes>
"""
import hashlib
import json
import os
from typing import Any, Dict, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from .._errors import DimensionError, IntegrityError
from .._net.baseline import BaselineMode
from .._net.qnet import BranchingNetParams, zeros_network

FORMAT_VERSION = 1
MAGIC = 'abq-checkpoint'

_LENGTH = np.dtype('<u8')
_FLOAT = np.dtype('<f8')
TRAILER_SIZE = _LENGTH.itemsize + hashlib.sha256().digest_size


class CheckpointMeta(NamedTuple):
    env_name: str
    env_params: Tuple[Tuple[str, Any], ...] = ()
    baseline_mode: BaselineMode = BaselineMode.ABQ_MAX_MEAN
    seed: int = 0
    episode: int = 0


def save_checkpoint(net: BranchingNetParams, meta: CheckpointMeta, path: str) -> None:
    header = {
        'format': MAGIC,
        'version': FORMAT_VERSION,
        'state_dim': net.state_dim,
        'n': net.n,
        'N': net.N,
        'widths': list(net.widths),
        'baseline_mode': BaselineMode.parse(meta.baseline_mode).value,
        'seed': int(meta.seed),
        'episode': int(meta.episode),
        'env_name': meta.env_name,
        'env_params': dict(meta.env_params),
    }
    payload = b''.join(np.ascontiguousarray(a, dtype=_FLOAT).tobytes() for a in net.arrays())
    trailer = np.array([len(payload)], dtype=_LENGTH).tobytes()
    trailer += hashlib.sha256(payload).digest()

    tmp_path = path + '.tmp'
    with open(tmp_path, mode='wb') as f:
        f.write(json.dumps(header, sort_keys=True).encode('utf8') + b'\n')
        f.write(payload)
        f.write(trailer)
    os.replace(tmp_path, path)


def _split(data: bytes, path: str) -> Tuple[Dict[str, Any], bytes]:
    newline = data.find(b'\n')
    if newline < 0:
        raise IntegrityError(f'{path}: missing checkpoint header')
    try:
        header = json.loads(data[:newline].decode('utf8'))
    except (UnicodeDecodeError, ValueError) as e:
        raise IntegrityError(f'{path}: unreadable checkpoint header') from e
    if not isinstance(header, dict) or header.get('format') != MAGIC:
        raise IntegrityError(f'{path}: not a checkpoint file')
    if header.get('version') != FORMAT_VERSION:
        raise IntegrityError(
            f'{path}: checkpoint version {header.get("version")} is not supported '
            f'(expected {FORMAT_VERSION})'
        )

    body = data[newline + 1:]
    if len(body) < TRAILER_SIZE:
        raise IntegrityError(f'{path}: truncated checkpoint')
    payload, trailer = body[:-TRAILER_SIZE], body[-TRAILER_SIZE:]
    length = int(np.frombuffer(trailer[: _LENGTH.itemsize], dtype=_LENGTH)[0])
    if length != len(payload):
        raise IntegrityError(f'{path}: payload holds {len(payload)} bytes, trailer says {length}')
    if hashlib.sha256(payload).digest() != trailer[_LENGTH.itemsize:]:
        raise IntegrityError(f'{path}: checksum mismatch')
    return header, payload


def load_checkpoint(
    path: str,
    expect: Optional[Mapping[str, int]] = None,
) -> Tuple[BranchingNetParams, CheckpointMeta]:
    """
    Read a checkpoint written by ``save_checkpoint``.

    ``expect`` may pin any of ``state_dim``, ``n`` and ``N``; a mismatch raises
    ``DimensionError`` before any parameters are built.
    """
    with open(path, mode='rb') as f:
        data = f.read()
    header, payload = _split(data, path)

    for key, value in (expect or {}).items():
        if header.get(key) != int(value):
            raise DimensionError(
                f'{path}: checkpoint has {key}={header.get(key)}, run requests {key}={value}'
            )

    try:
        template = zeros_network(header['state_dim'], header['n'], header['N'], header['widths'])
    except KeyError as e:
        raise IntegrityError(f'{path}: header lacks {e}') from e

    values = np.frombuffer(payload, dtype=_FLOAT)
    shapes = [a.shape for a in template.arrays()]
    expected = sum(int(np.prod(s)) for s in shapes)
    if values.size != expected:
        raise IntegrityError(f'{path}: payload holds {values.size} values, expected {expected}')

    arrays, offset = [], 0
    for shape in shapes:
        size = int(np.prod(shape))
        arrays.append(values[offset: offset + size].reshape(shape).astype(np.float64))
        offset += size

    meta = CheckpointMeta(
        env_name=header.get('env_name', ''),
        env_params=tuple(sorted(header.get('env_params', {}).items())),
        baseline_mode=BaselineMode.parse(header['baseline_mode']),
        seed=int(header['seed']),
        episode=int(header['episode']),
    )
    return template.with_arrays(arrays), meta
