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

import os

from src.errors import ConfigError
from src.metrics.ndcg import GainMode
from src.metrics.report import Metric

MAX_PASSAGES_PER_QUERY = 100


class TrainOptions:
    """Build the options of a training run.

    learning_rate / weight_decay: AdamW hyperparameters.
    batch_size: number of queries per optimizer step.
    negatives: stage-1 negatives sampled next to the positive.
    max_steps: stage-1 step cap. min_steps: steps before early stopping
               may trigger.
    bce_threshold / patience_steps: duplicate-aware training stops once the
                                    held-out duplicate BCE stayed below the
                                    threshold for this many steps.
    eval_every: steps between held-out evaluations and loss log lines.
    heldout_queries: number of held-out queries used for monitoring.
    passages_per_query: stage-2 list length, at most 100.
    epochs: stage-2 passes over the training queries.
    include_copy: let the appended duplicate take part in both loss terms.
    validation_metric: stage-2 keeps the parameters scoring best on the
                       held-out queries under this metric. None disables it.
    seed: drives batching, negative sampling and duplicate injection.
    """

    def __init__(
        self,
        learning_rate: float = 1e-3,
        weight_decay: float = 0.01,
        batch_size: int = 4,
        negatives: int = 7,
        max_steps: int = 500,
        min_steps: int = 0,
        bce_threshold: float = 0.05,
        patience_steps: int = 100,
        eval_every: int = 10,
        heldout_queries: int = 16,
        passages_per_query: int = 20,
        epochs: int = 1,
        include_copy: bool = False,
        validation_metric: str = Metric.ALPHA_NDCG.value,
        seed: int = 0,
    ):
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.negatives = negatives
        self.max_steps = max_steps
        self.min_steps = min_steps
        self.bce_threshold = bce_threshold
        self.patience_steps = patience_steps
        self.eval_every = eval_every
        self.heldout_queries = heldout_queries
        self.passages_per_query = passages_per_query
        self.epochs = epochs
        self.include_copy = include_copy
        self.validation_metric = self._get_metric(validation_metric)
        self.seed = seed
        self._check_values()

    def _get_metric(self, name):
        # Return the Metric member, or None when validation is switched off.
        if name is None:
            return None
        try:
            return Metric(name)
        except ValueError:
            raise ConfigError(f"Unknown validation metric `{name}`.")

    def _check_values(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"Invalid learning_rate: {self.learning_rate}")
        if self.weight_decay < 0:
            raise ConfigError(f"Invalid weight_decay: {self.weight_decay}")
        for name in ("batch_size", "negatives", "eval_every", "heldout_queries"):
            if getattr(self, name) < 1:
                raise ConfigError(
                    f"{name} must be at least 1, got {getattr(self, name)}"
                )
        for name in ("max_steps", "min_steps", "patience_steps", "epochs"):
            if getattr(self, name) < 0:
                raise ConfigError(
                    f"{name} must be non-negative, got {getattr(self, name)}"
                )
        if self.min_steps > self.max_steps:
            raise ConfigError(
                f"min_steps {self.min_steps} exceeds max_steps {self.max_steps}."
            )
        if not 0.0 < self.bce_threshold < 1.0:
            raise ConfigError(f"Invalid bce_threshold: {self.bce_threshold}")
        if not 2 <= self.passages_per_query <= MAX_PASSAGES_PER_QUERY:
            raise ConfigError(
                f"passages_per_query must lie in 2..{MAX_PASSAGES_PER_QUERY}, "
                f"got {self.passages_per_query}"
            )

    def to_dict(self):
        values = dict(vars(self))
        if self.validation_metric is not None:
            values["validation_metric"] = self.validation_metric.value
        return values


class EvalOptions:
    """Build the options of an evaluation.

    metric: ndcg or alpha-ndcg.
    k: evaluation depth.
    alpha: redundancy penalty of alpha-ndcg, in [0, 1).
    gain_mode: nDCG gain, exponential or linear.
    human_readable_message: Optional flag. Print a summary to stdout if true.
    output_json_path: Optional. The path of the metrics json file. If not
                      specified, `$cwd/metrics.json` is used.
    output_report_path: Optional. Where to write the tab-separated report.
    """

    def __init__(
        self,
        metric: str = Metric.NDCG.value,
        k: int = 10,
        alpha: float = 0.99,
        gain_mode: str = GainMode.EXPONENTIAL.value,
        human_readable_message: bool = False,
        output_json_path: str = None,
        output_report_path: str = None,
    ):
        try:
            self.metric = Metric(metric)
            self.gain_mode = GainMode(gain_mode)
        except ValueError as e:
            raise ConfigError(str(e))
        if k < 1:
            raise ConfigError(f"k must be at least 1, got {k}")
        if not 0.0 <= alpha < 1.0:
            raise ConfigError(f"alpha must lie in [0, 1), got {alpha}")
        self.k = k
        self.alpha = alpha
        self.human_readable_message = human_readable_message
        self.output_json_path = self._get_output_path(output_json_path, "metrics.json")
        self.output_report_path = (
            self._get_output_path(output_report_path, None)
            if output_report_path
            else None
        )

    def _get_output_path(self, path, default_name):
        # Return the output path, use the default in the current directory if
        # not set. Raise error if the parent directory does not exist.
        if not path:
            return os.path.join(os.getcwd(), default_name)
        parent = os.path.dirname(os.path.abspath(path))
        if not os.path.isdir(parent):
            raise ConfigError(f"The directory {parent} is not existing.")
        return path
