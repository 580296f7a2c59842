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

"""Exception hierarchy shared by every module of the re-ranker."""


class SetEncoderError(Exception):
    """Base class of all errors raised by this package."""


class ShapeError(SetEncoderError):
    """Tensor shapes do not conform for the requested operation."""


class NumericDomainError(SetEncoderError):
    """An operation received or produced non-finite values."""


class UsageError(SetEncoderError):
    """A public operation was called with arguments outside its contract."""


class ConfigError(SetEncoderError):
    """A configuration object or option holds an invalid value."""


class DataError(SetEncoderError):
    """Input files or in-memory collections are inconsistent."""


class TrainingDivergedError(SetEncoderError):
    """The training loss became non-finite."""

    def __init__(self, step: int, message: str):
        super().__init__(f"Training diverged at step {step}: {message}")
        self.step = step
