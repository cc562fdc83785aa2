"""
Command-line router for the SXI++ pipeline
"""
import dataclasses
import logging
import os
from typing import Optional

import click

from evaluation.formatter import export_comparison_excel, format_comparison, format_evaluation
from pipeline.artifact import load_artifact, save_artifact
from pipeline.config import PipelineConfig, config_from_dict, config_schema, derive_seed, load_config
from pipeline.experiment import load_cases, run_experiment
from pipeline.insights import run_insights
from pipeline.scoring import evaluate_rows, score_rows
from pipeline.train import train_pipeline
from scoring.formatter import format_benchmark_report
from tabular.cleaning import drop_sparse_columns, fit_imputation, missing_report
from tabular.data import load_csv, write_csv
from tabular.synth import synth_generate, synth_physionet
from utils.config import REPORT_DIR
from utils.errors import ArtifactError
from utils.report_util import dumps, write_json_report, write_text_report

# Configure logging
logger = logging.getLogger(__name__)

EXISTING_FILE = click.Path(exists=True, dir_okay=False)
# missing data or model files surface as DataError / ArtifactError from the loaders
INPUT_FILE = click.Path(dir_okay=False)


def _text_path(json_path: str) -> str:
    root, _ = os.path.splitext(json_path)
    return root + ".txt"


@click.group("sxi")
def cli():
    """SXI++ scoring pipeline for tabular binary classification"""


@cli.command(help="Drop columns missing in more than the threshold share of rows")
@click.option("--in", "in_path", required=True, type=INPUT_FILE)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--threshold", default=0.4, show_default=True, type=click.FloatRange(0, 1, min_open=True, max_open=True))
@click.option("--log", "log_path", default=None, type=click.Path(dir_okay=False),
              help="Cleaning log (default: <out>.cleaning.json)")
def prepare(in_path: str, out_path: str, threshold: float, log_path: Optional[str]):
    table = load_csv(in_path)
    cleaned, dropped = drop_sparse_columns(table, threshold)
    write_csv(cleaned, out_path)
    # statistics are reported, not applied; training fits its own on the training split
    report = missing_report(table, dropped, fit_imputation(cleaned))
    write_json_report(report, log_path or out_path + ".cleaning.json")
    click.echo(f"Kept {len(cleaned.feature_names)} feature columns, dropped {len(dropped)}: {', '.join(dropped)}")


@cli.command(help="Generate a synthetic two-class table")
@click.option("--n", default=2000, show_default=True, type=click.IntRange(min=2))
@click.option("--d", default=10, show_default=True, type=click.IntRange(min=1))
@click.option("--pos-frac", default=0.3, show_default=True, type=float)
@click.option("--sep", default=2.0, show_default=True, type=float)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--physionet", is_flag=True, help="PhysioNet 2019 layout with its missingness profile")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def synth(n: int, d: int, pos_frac: float, sep: float, seed: int, physionet: bool, out_path: str):
    if physionet:
        table = synth_physionet(n, seed, positive_frac=pos_frac)
    else:
        table = synth_generate(n, d, pos_frac, sep, seed)
    write_csv(table, out_path)
    click.echo(f"Wrote {table.n_rows} rows to {out_path}")


@cli.command(help="Train the full pipeline and save the model artifact")
@click.option("--data", "data_path", required=True, type=INPUT_FILE)
@click.option("--config", "config_path", default=None, type=EXISTING_FILE)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--report", "report_path", default=None, type=click.Path(dir_okay=False))
@click.option("--seed", default=None, type=int, help="Override the master seed")
def train(data_path: str, config_path: Optional[str], out_path: str, report_path: Optional[str],
          seed: Optional[int]):
    config = load_config(config_path) if config_path else PipelineConfig()
    if seed is not None:
        config = dataclasses.replace(config, seed=seed)
    table = load_csv(data_path)
    artifact, report = train_pipeline(table, config)
    save_artifact(artifact, out_path)

    report_path = report_path or os.path.join(REPORT_DIR, "report.json")
    write_json_report(report, report_path)
    text = "\n\n".join([
        format_benchmark_report(report["benchmark"]),
        format_evaluation(report["evaluation"]["test"], "Test split"),
        format_evaluation(report["evaluation"]["validation"], "Validation split"),
    ])
    write_text_report(text, _text_path(report_path))
    click.echo(text)


@cli.command(help="Score rows with a saved artifact")
@click.option("--model", "model_path", required=True, type=INPUT_FILE)
@click.option("--in", "in_path", required=True, type=INPUT_FILE)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def score(model_path: str, in_path: str, out_path: str):
    artifact = load_artifact(model_path)
    rows = load_csv(in_path, target=artifact.target, require_target=False)
    scored = score_rows(artifact, rows)
    scored.to_frame().to_csv(out_path, index=False, float_format="%.17g")
    click.echo(f"Scored {rows.n_rows} rows into {out_path}")


@cli.command("eval", help="Evaluate a saved artifact on labelled rows")
@click.option("--model", "model_path", required=True, type=INPUT_FILE)
@click.option("--in", "in_path", required=True, type=INPUT_FILE)
@click.option("--report", "report_path", default=None, type=click.Path(dir_okay=False))
@click.option("--n-boot", default=1000, show_default=True, type=click.IntRange(min=100))
@click.option("--level", default=0.95, show_default=True, type=click.FloatRange(0, 1, min_open=True, max_open=True))
@click.option("--seed", default=0, show_default=True, type=int)
def evaluate(model_path: str, in_path: str, report_path: Optional[str], n_boot: int, level: float, seed: int):
    artifact = load_artifact(model_path)
    rows = load_csv(in_path, target=artifact.target)
    evaluation = evaluate_rows(artifact, rows, n_boot, level, seed)
    text = format_evaluation(evaluation, os.path.basename(in_path))
    if report_path:
        write_json_report(evaluation, report_path)
        write_text_report(text, _text_path(report_path))
    click.echo(text)


@cli.command(help="Decision-path insights on adjusted features")
@click.option("--model", "model_path", required=True, type=INPUT_FILE)
@click.option("--data", "data_path", required=True, type=INPUT_FILE)
@click.option("--p-up", default=None, type=click.FloatRange(0, 1, max_open=True))
@click.option("--p-down", default=None, type=click.FloatRange(0, 1, max_open=True))
@click.option("--target-class", default=None, type=click.IntRange(0, 1))
@click.option("--trees", default=None, type=click.IntRange(min=1))
@click.option("--seed", default=None, type=int)
@click.option("--out-dir", default=REPORT_DIR, show_default=True, type=click.Path(file_okay=False))
def insights(model_path: str, data_path: str, p_up: Optional[float], p_down: Optional[float],
             target_class: Optional[int], trees: Optional[int], seed: Optional[int], out_dir: str):
    artifact = load_artifact(model_path)
    config = config_from_dict(artifact.config)
    overrides = {k: v for k, v in (("p_up", p_up), ("p_down", p_down), ("target_class", target_class),
                                   ("n_trees", trees)) if v is not None}
    options = dataclasses.replace(config.insights, **overrides)
    forest_seed = seed if seed is not None else derive_seed(config.seed, "insights")

    table = load_csv(data_path, target=artifact.target)
    text, payload = run_insights(artifact, table, options, forest_seed, config.workers)
    write_text_report(text, os.path.join(out_dir, "report.txt"))
    write_json_report(payload, os.path.join(out_dir, "report.json"))
    click.echo(text)


@cli.command(help="Run the use-case comparison protocol")
@click.option("--config", "cases_path", required=True, type=EXISTING_FILE)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="JSON report (text goes next to it)")
@click.option("--excel", "excel_path", default=None, type=click.Path(dir_okay=False))
def experiment(cases_path: str, out_path: Optional[str], excel_path: Optional[str]):
    config, cases = load_cases(cases_path)
    result = run_experiment(config, cases)
    text = format_comparison(result["cases"])
    out_path = out_path or os.path.join(REPORT_DIR, "experiment.json")
    write_json_report(result, out_path)
    write_text_report(text, _text_path(out_path))
    if excel_path and export_comparison_excel(result["cases"], excel_path) is None:
        raise ArtifactError(f"cannot write experiment workbook {excel_path}")
    click.echo(text)


@cli.command(help="Print the configuration schema")
def schema():
    click.echo(dumps(config_schema()))
