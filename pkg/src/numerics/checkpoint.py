# Copyright 2020 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Binary checkpoint format.

All integers are little-endian. A checkpoint is

    magic           8 bytes   b"SETENCKP"
    version         uint32    currently 1
    metadata_len    uint32    byte length of the metadata block
    metadata        bytes     UTF-8 JSON object, keys sorted
    record_count    uint32
    record_count records, each
        name_len    uint16
        name        bytes     UTF-8
        ndim        uint8
        dims        ndim x uint32
        values      prod(dims) x float64, row-major

Records keep the order in which they were written, so a save/load cycle
reproduces names, shapes and values bit for bit.
"""

import collections
import json
import logging
import struct
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from src.errors import DataError

logger = logging.getLogger(__name__)

MAGIC = b"SETENCKP"
VERSION = 1


def serialize_checkpoint(
    arrays: Mapping[str, np.ndarray], metadata: Mapping[str, Any] = None
) -> bytes:
    meta = json.dumps(dict(metadata or {}), sort_keys=True).encode("utf-8")
    chunks = [MAGIC, struct.pack("<II", VERSION, len(meta)), meta]
    chunks.append(struct.pack("<I", len(arrays)))
    for name, array in arrays.items():
        array = np.asarray(array, dtype=np.float64)
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<HB", len(encoded), array.ndim))
        chunks.append(encoded)
        chunks.append(struct.pack(f"<{array.ndim}I", *array.shape))
        chunks.append(array.astype("<f8").tobytes(order="C"))
    return b"".join(chunks)


def deserialize_checkpoint(
    payload: bytes,
) -> Tuple["collections.OrderedDict[str, np.ndarray]", Dict[str, Any]]:
    if payload[:8] != MAGIC:
        raise DataError("Not a checkpoint: bad magic bytes.")
    offset = 8
    arrays = collections.OrderedDict()
    try:
        version, meta_len = struct.unpack_from("<II", payload, offset)
        if version != VERSION:
            raise DataError(f"Unsupported checkpoint version {version}.")
        offset += 8
        metadata = json.loads(payload[offset : offset + meta_len].decode("utf-8"))
        offset += meta_len
        (count,) = struct.unpack_from("<I", payload, offset)
        offset += 4
        for _ in range(count):
            name_len, ndim = struct.unpack_from("<HB", payload, offset)
            offset += 3
            name = payload[offset : offset + name_len].decode("utf-8")
            offset += name_len
            shape = struct.unpack_from(f"<{ndim}I", payload, offset)
            offset += 4 * ndim
            size = int(np.prod(shape)) if ndim else 1
            values = np.frombuffer(payload, dtype="<f8", count=size, offset=offset)
            offset += 8 * size
            arrays[name] = values.astype(np.float64).reshape(shape)
    except (struct.error, ValueError) as e:
        raise DataError(f"Truncated checkpoint: {e}") from e
    if offset != len(payload):
        raise DataError("Trailing bytes after the last checkpoint record.")
    return arrays, metadata


def save_checkpoint(path: str, arrays: Mapping[str, np.ndarray], metadata=None):
    with open(path, "wb") as f:
        f.write(serialize_checkpoint(arrays, metadata))
    logger.info("Wrote checkpoint with %d tensors to %s", len(arrays), path)


def load_checkpoint(path: str):
    with open(path, "rb") as f:
        return deserialize_checkpoint(f.read())
