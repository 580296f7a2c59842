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

import functools
import json
import logging
import os

import click

from src.encoder.config import InteractionMode, ModelConfig
from src.encoder.cost import attention_cost
from src.encoder.model_io import SetEncoderModel, load_model, save_model
from src.encoder.params import init_params
from src.errors import SetEncoderError, UsageError
from src.harness.evaluation import Evaluator
from src.harness.formats import (
    FIRST_STAGE_FILE,
    load_collection,
    read_corpus,
    read_qrels,
    read_queries,
    read_run,
    write_collection,
    write_run,
)
from src.harness.options import EvalOptions, TrainOptions
from src.harness.perturbation import PerturbMode, perturb
from src.harness.rank_changes import rank_change_matrix, write_rank_changes
from src.harness.reranking import DEFAULT_TOP_K, rerank
from src.harness.synthetic import SyntheticConfig, generate_synthetic
from src.harness.training import Stage1Loss, Stage2Loss, train_stage1, train_stage2
from src.metrics.judgments import SubtopicMap
from src.metrics.ndcg import GainMode
from src.metrics.report import Metric
from src.novelty.cluster_file import read_clusters
from src.tokenization.vocab import build_vocab

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"

# Architecture of a fresh model; a checkpoint given via --init brings its own.
ARCHITECTURE_DEFAULTS = {
    "interaction_mode": InteractionMode.INT_TOKEN.value,
    "layers": 2,
    "heads": 4,
    "model_dim": 64,
    "ffn_dim": 256,
    "name": "set-encoder",
}


def _reports_errors(command):
    # Library errors become one-line click errors with exit status 1.
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except SetEncoderError as e:
            raise click.ClickException(str(e))

    return wrapper


def _write_manifest(output_path: str):
    # Echo every flag of the running command next to its output.
    ctx = click.get_current_context()
    manifest = {"command": ctx.info_name, "params": ctx.params}
    with open(output_path + MANIFEST_SUFFIX, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)


@click.group()
@click.option(
    "-v", "--verbose", count=True, help="Log INFO with -v and DEBUG with -vv."
)
def cli(verbose: int):
    """Train and evaluate permutation-invariant passage re-rankers."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


@cli.command()
@click.option("--output-dir", required=True, help="Directory of the collection.")
@click.option("--num-queries", default=200, show_default=True)
@click.option("--num-eval-queries", default=50, show_default=True)
@click.option("--passages-per-query", default=20, show_default=True)
@click.option("--vocab-size", default=4000, show_default=True)
@click.option("--passage-length", default=24, show_default=True)
@click.option("--topic-words", default=4, show_default=True)
@click.option("--hard-negatives", default=4, show_default=True)
@click.option("--duplicate-rate", default=0.0, show_default=True)
@click.option("--noise-rate", default=0.1, show_default=True)
@click.option("--seed", default=0, show_default=True)
@_reports_errors
def generate(output_dir: str, **kwargs):
    """Generate a synthetic collection with planted relevance."""
    collection = generate_synthetic(SyntheticConfig(**kwargs))
    write_collection(output_dir, collection)
    _write_manifest(os.path.join(output_dir, "collection"))


@cli.command()
@click.option("--collection", "collection_dir", required=True)
@click.option("--output", required=True, help="Path of the trained checkpoint.")
@click.option("--stage", type=click.IntRange(1, 2), default=1, show_default=True)
@click.option(
    "--loss",
    type=click.Choice([m.value for m in Stage1Loss] + [m.value for m in Stage2Loss]),
    default=None,
    help="Defaults to info_nce in stage 1 and rank_net in stage 2.",
)
@click.option("--init", "init_path", help="Checkpoint to start from (stage 2).")
@click.option(
    "--interaction-mode",
    type=click.Choice([m.value for m in InteractionMode]),
    help="Fresh models only [default: int_token].",
)
@click.option("--layers", type=int, help="Fresh models only [default: 2].")
@click.option("--heads", type=int, help="Fresh models only [default: 4].")
@click.option("--model-dim", type=int, help="Fresh models only [default: 64].")
@click.option("--ffn-dim", type=int, help="Fresh models only [default: 256].")
@click.option("--name", help="Fresh models only [default: set-encoder].")
@click.option("--seed", default=0, show_default=True)
@click.option("--steps", "max_steps", default=500, show_default=True)
@click.option("--min-steps", default=0, show_default=True)
@click.option("--epochs", default=1, show_default=True)
@click.option("--learning-rate", default=1e-3, show_default=True)
@click.option("--weight-decay", default=0.01, show_default=True)
@click.option("--batch-size", default=4, show_default=True)
@click.option("--negatives", default=7, show_default=True)
@click.option("--bce-threshold", default=0.05, show_default=True)
@click.option("--patience-steps", default=100, show_default=True)
@click.option("--eval-every", default=10, show_default=True)
@click.option("--passages-per-query", default=20, show_default=True)
@click.option("--include-copy", is_flag=True, default=False)
@click.option(
    "--validation-metric",
    type=click.Choice([m.value for m in Metric] + ["none"]),
    default=Metric.ALPHA_NDCG.value,
    show_default=True,
)
@_reports_errors
def train(
    collection_dir: str,
    output: str,
    stage: int,
    loss: str,
    init_path: str,
    interaction_mode: str,
    layers: int,
    heads: int,
    model_dim: int,
    ffn_dim: int,
    name: str,
    validation_metric: str,
    **option_values,
):
    """Fine-tune a model in stage 1 (contrastive) or stage 2 (distillation)."""
    stage_loss = Stage1Loss if stage == 1 else Stage2Loss
    if loss is not None and loss not in {m.value for m in stage_loss}:
        raise UsageError(f"Loss `{loss}` does not belong to stage {stage}.")
    architecture = {
        "interaction_mode": interaction_mode,
        "layers": layers,
        "heads": heads,
        "model_dim": model_dim,
        "ffn_dim": ffn_dim,
        "name": name,
    }
    given = [key for key, value in architecture.items() if value is not None]
    if init_path and given:
        flags = ", ".join("--" + key.replace("_", "-") for key in given)
        raise UsageError(f"The --init checkpoint fixes the architecture; drop {flags}.")
    if stage == 2 and not init_path:
        raise UsageError("Stage 2 needs a stage-1 checkpoint via --init.")
    collection = load_collection(collection_dir)
    options = TrainOptions(
        validation_metric=None if validation_metric == "none" else validation_metric,
        **option_values,
    )
    if init_path:
        model = load_model(init_path)
    else:
        values = {
            key: ARCHITECTURE_DEFAULTS[key] if value is None else value
            for key, value in architecture.items()
        }
        vocab = build_vocab(collection.texts())
        config = ModelConfig(
            vocab_size=len(vocab),
            layers=values["layers"],
            heads=values["heads"],
            model_dim=values["model_dim"],
            ffn_dim=values["ffn_dim"],
            interaction_mode=values["interaction_mode"],
            init_seed=options.seed,
        )
        model = SetEncoderModel(init_params(config), config, vocab, values["name"])
    default_loss = Stage1Loss.INFO_NCE if stage == 1 else Stage2Loss.RANK_NET
    train_stage = train_stage1 if stage == 1 else train_stage2
    result = train_stage(collection, model, options, stage_loss(loss or default_loss))
    save_model(output, result.model)
    with open(output + ".curve.json", "w") as f:
        json.dump(
            {
                "loss": result.loss_curve,
                "heldout_bce": result.heldout_bce,
                "validation": result.validation,
                "stopped_early": result.stopped_early,
                "steps_run": result.steps_run,
            },
            f,
        )
    _write_manifest(output)


@cli.command("rerank")
@click.option("--model", "model_path", required=True)
@click.option("--collection", "collection_dir", help="Reads corpus and queries.")
@click.option("--corpus", "corpus_path", help="Corpus file, overrides --collection.")
@click.option("--queries", "queries_path", help="Queries file, overrides --collection.")
@click.option("--run", "run_path", help="Defaults to the collection's first stage.")
@click.option("--top-k", default=DEFAULT_TOP_K, show_default=True)
@click.option("--output", required=True)
@_reports_errors
def rerank_command(
    model_path, collection_dir, corpus_path, queries_path, run_path, top_k, output
):
    """Re-rank the top-k passages of every query of a run."""
    if collection_dir:
        collection = load_collection(collection_dir)
        corpus, queries = collection.corpus, collection.all_queries()
        run_path = run_path or os.path.join(collection_dir, FIRST_STAGE_FILE)
    elif not (corpus_path and queries_path and run_path):
        raise UsageError("Give --collection or all of --corpus, --queries and --run.")
    if corpus_path:
        corpus = read_corpus(corpus_path)
    if queries_path:
        queries = read_queries(queries_path)
    model = load_model(model_path)
    write_run(output, rerank(model, read_run(run_path), corpus, queries, top_k))
    _write_manifest(output)


@cli.command("perturb")
@click.option("--run", "run_path", required=True)
@click.option("--qrels", "qrels_path", required=True)
@click.option(
    "--mode", type=click.Choice([m.value for m in PerturbMode]), required=True
)
@click.option("--seed", default=0, show_default=True)
@click.option("--output", required=True)
@_reports_errors
def perturb_command(run_path, qrels_path, mode, seed, output):
    """Reorder the rankings of a run (random, ideal, reverse ideal)."""
    write_run(output, perturb(read_run(run_path), mode, read_qrels(qrels_path), seed))
    _write_manifest(output)


@cli.command("eval")
@click.option("--run", "run_path", required=True)
@click.option("--qrels", "qrels_path", required=True)
@click.option("--clusters", "clusters_path", help="Subtopics for alpha-ndcg.")
@click.option(
    "--metric",
    type=click.Choice([m.value for m in Metric]),
    default=Metric.NDCG.value,
    show_default=True,
)
@click.option("--k", default=10, show_default=True)
@click.option("--alpha", default=0.99, show_default=True)
@click.option(
    "--gain",
    type=click.Choice([m.value for m in GainMode]),
    default=GainMode.EXPONENTIAL.value,
    show_default=True,
)
@click.option(
    "--output_json_path",
    help="The file path for json output which contains all the metric records. The default path is the current folder.",
)
@click.option("--report", "report_path", help="Tab-separated per-query report.")
@click.option(
    "--human_readable_message",
    default=False,
    is_flag=True,
    help="Print a summary per metric. Default value is false.",
)
@_reports_errors
def eval_command(
    run_path,
    qrels_path,
    clusters_path,
    metric,
    k,
    alpha,
    gain,
    output_json_path,
    report_path,
    human_readable_message,
):
    """Evaluate a run with nDCG@k or alpha-nDCG@k."""
    options = EvalOptions(
        metric, k, alpha, gain, human_readable_message, output_json_path, report_path
    )
    subtopics = None
    if clusters_path:
        subtopics = SubtopicMap.from_clusters(read_clusters(clusters_path))
    elif options.metric is Metric.ALPHA_NDCG:
        raise UsageError("alpha-ndcg needs --clusters.")
    Evaluator(read_run(run_path), read_qrels(qrels_path), options, subtopics).evaluate()
    _write_manifest(options.output_json_path)


@cli.command("rank-changes")
@click.option("--before", "before_path", required=True, help="Input run.")
@click.option("--after", "after_path", required=True, help="Re-ranked run.")
@click.option("--depth", default=100, show_default=True)
@click.option("--output", required=True, help="CSV file of the matrix.")
@_reports_errors
def rank_changes_command(before_path, after_path, depth, output):
    """Share of queries moving input rank i to output rank j."""
    matrix = rank_change_matrix(read_run(before_path), read_run(after_path), depth)
    write_rank_changes(output, matrix)
    _write_manifest(output)


@cli.command("attn-cost")
@click.option("--k", required=True, type=int, help="Passages per query.")
@click.option("--len", "length", required=True, type=int, help="Sequence length.")
@_reports_errors
def attn_cost_command(k, length):
    """Attention score entries per layer and head, against concatenation."""
    cost = attention_cost(ModelConfig(vocab_size=5), k, length)
    click.echo(f"set_encoder_entries\t{cost.set_encoder_entries}")
    click.echo(f"concat_entries\t{cost.concat_entries}")
    click.echo(f"ratio\t{cost.ratio:.2f}")


if __name__ == "__main__":
    cli()
