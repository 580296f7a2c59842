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

import json
import sys
from typing import Optional, Sequence

from src.harness.instances import RunEntry, rankings_by_query
from src.harness.options import EvalOptions
from src.metrics.evaluation import evaluate_run
from src.metrics.judgments import QrelSet, SubtopicMap
from src.metrics.report import MetricReport


class Evaluator:
    """Evaluate a run against relevance judgments and write the report."""

    def __init__(
        self,
        run: Sequence[RunEntry],
        qrels: QrelSet,
        opts: EvalOptions,
        subtopics: Optional[SubtopicMap] = None,
    ):
        self.run = run
        self.qrels = qrels
        self.opts = opts
        self.subtopics = subtopics
        self.report = MetricReport()

    def evaluate(self) -> MetricReport:
        evaluate_run(
            rankings_by_query(self.run),
            self.qrels,
            self.opts.metric,
            k=self.opts.k,
            alpha=self.opts.alpha,
            subtopics=self.subtopics,
            gain_mode=self.opts.gain_mode,
            report=self.report,
        )
        # Output json file of the metric records, the tab-separated report if
        # a path is given, and human-readable messages if enabled.
        with open(self.opts.output_json_path, "w") as write_json_file:
            json.dump(self.report.to_dict_arr(), write_json_file)
        if self.opts.output_report_path:
            with open(self.opts.output_report_path, "w") as report_file:
                for line in self.report.to_lines():
                    report_file.write(line + "\n")
        if self.opts.human_readable_message:
            sys.stdout.write(self.report.to_human_readable_message())
        return self.report
