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

import collections
import os
import tempfile
import unittest

import numpy as np

from src.errors import DataError
from src.numerics.checkpoint import (
    deserialize_checkpoint,
    load_checkpoint,
    save_checkpoint,
    serialize_checkpoint,
)


class CheckpointTest(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(0)
        self.arrays = collections.OrderedDict(
            [
                ("b.weight", rng.normal(size=(3, 2))),
                ("a.bias", rng.normal(size=(2,))),
                ("scalar", np.array(1.5)),
            ]
        )

    def test_round_trip_is_bit_exact(self):
        payload = serialize_checkpoint(self.arrays, {"name": "m", "x": [1, 2]})
        arrays, metadata = deserialize_checkpoint(payload)
        self.assertEqual(list(arrays), ["b.weight", "a.bias", "scalar"])
        for name, array in self.arrays.items():
            self.assertEqual(arrays[name].shape, array.shape)
            self.assertEqual(arrays[name].tobytes(), array.tobytes())
        self.assertEqual(metadata, {"name": "m", "x": [1, 2]})
        self.assertEqual(serialize_checkpoint(arrays, metadata), payload)

    def test_bad_magic(self):
        payload = serialize_checkpoint(self.arrays)
        with self.assertRaises(DataError):
            deserialize_checkpoint(b"NOTACKPT" + payload[8:])

    def test_truncated(self):
        payload = serialize_checkpoint(self.arrays)
        with self.assertRaises(DataError):
            deserialize_checkpoint(payload[:-4])

    def test_truncated_header(self):
        payload = serialize_checkpoint(self.arrays, {"step": 3})
        for end in (8, 12, 15):
            with self.assertRaises(DataError):
                deserialize_checkpoint(payload[:end])

    def test_trailing_bytes(self):
        with self.assertRaises(DataError):
            deserialize_checkpoint(serialize_checkpoint(self.arrays) + b"\x00")

    def test_save_and_load(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "model.ckpt")
            save_checkpoint(path, self.arrays, {"step": 3})
            arrays, metadata = load_checkpoint(path)
        np.testing.assert_array_equal(arrays["b.weight"], self.arrays["b.weight"])
        self.assertEqual(metadata, {"step": 3})


if __name__ == "__main__":
    unittest.main()
