"""Command-line front door: validate, ask, simulate, docs, eval, serve.

Exit codes: 0 success, 1 validation or pipeline errors, 2 usage errors,
3 provider failures.  `--json` output is byte-identical to the HTTP API
bodies for the same operation.
"""

from __future__ import annotations

import functools
import json
from pathlib import Path

import click

from .config import ConfigError, config_from_env, make_embedder, make_language_model
from .errors import IvyError, PipelineStageError, ProviderUnavailable, TmkSchemaError, TmkSyntaxError
from .evaluation import evaluate_corpus, load_questions, render_report_table, write_report
from .model import TmkModel
from .parser import parse_model
from .pipeline import ModelSession, answer
from .retrieval import compile_documents
from .service import ask_payload, simulate_payload, to_json_bytes
from .simulate import render_trace_summary, simulate, summarize_trace
from .storage import Storage
from .validation import validate_model

EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_PROVIDER = 3


def _fail(message: str, code: int) -> SystemExit:
    click.echo(f"error: {message}", err=True)
    return SystemExit(code)


def _load_model(model_file: str) -> TmkModel:
    """Parse and validate, or exit 1 listing what is wrong."""
    try:
        model = parse_model(Path(model_file).read_text())
    except (TmkSyntaxError, TmkSchemaError) as exc:
        raise _fail(str(exc), EXIT_VALIDATION) from exc
    report = validate_model(model)
    if not report.valid:
        for error in report.errors:
            click.echo(f"error: {error}", err=True)
        raise SystemExit(EXIT_VALIDATION)
    return model


def _build_config(provider: str | None, storage_dir: str | None, **extra):
    try:
        return config_from_env(provider=provider, storage_dir=storage_dir, **extra)
    except ConfigError as exc:
        raise _fail(str(exc), EXIT_USAGE) from exc


def _providers(config):
    try:
        return make_language_model(config), make_embedder(config)
    except ConfigError as exc:
        raise _fail(str(exc), EXIT_USAGE) from exc


def _pipeline_errors(fn):
    """Translate pipeline exceptions into the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ProviderUnavailable, PipelineStageError) as exc:
            cause = exc.cause if isinstance(exc, PipelineStageError) else exc
            if isinstance(cause, ProviderUnavailable):
                raise _fail(str(cause), EXIT_PROVIDER) from exc
            raise _fail(str(exc), EXIT_VALIDATION) from exc
        except IvyError as exc:
            raise _fail(str(exc), EXIT_VALIDATION) from exc

    return wrapper


@click.group()
def main() -> None:
    """Question answering over Task-Method-Knowledge skill models."""


@main.command()
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
def validate(model_file: str) -> None:
    """Check a model file; exit 0 only when it has no errors."""
    try:
        model = parse_model(Path(model_file).read_text())
    except (TmkSyntaxError, TmkSchemaError) as exc:
        raise _fail(str(exc), EXIT_VALIDATION) from exc
    report = validate_model(model)
    for error in report.errors:
        click.echo(f"error: {error}")
    for warning in report.warnings:
        click.echo(f"warning: {warning}")
    if not report.valid:
        raise SystemExit(EXIT_VALIDATION)
    counts = model.summary_counts()
    click.echo(
        f"ok: {model.id} ({counts['tasks']} tasks, {counts['methods']} methods, "
        f"{counts['knowledge']} knowledge entities)"
    )


@main.command()
@click.option("--model", "model_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--question", required=True)
@click.option("--provider", type=click.Choice(["mock", "remote"]), default="mock", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the HTTP /ask body instead of text.")
@click.option("--storage", "storage_dir", type=click.Path(file_okay=False), default=None,
              help="Trace persistence directory (default: IVY_STORAGE_DIR).")
@_pipeline_errors
def ask(model_file: str, question: str, provider: str, as_json: bool, storage_dir: str | None) -> None:
    """Answer one question against a model file."""
    if not question.strip():
        raise _fail("--question must be non-empty", EXIT_USAGE)
    model = _load_model(model_file)
    config = _build_config(provider, storage_dir)
    language_model, embedder = _providers(config)
    storage = Storage(config.storage_dir)
    session = ModelSession.build(model, embedder)
    result = answer(question, session, language_model, embedder, trace_store=storage)
    if as_json:
        click.echo(to_json_bytes(ask_payload(model.id, result)).decode("utf-8"))
        return
    click.echo(result.text)
    click.echo()
    click.echo(f"category: {result.category} (k={result.k_score})")
    if result.cited_doc_ids:
        click.echo(f"cited: {', '.join(result.cited_doc_ids)}")
    if result.trace_id is not None:
        click.echo(f"trace: {result.trace_id}")


@main.command(name="simulate")
@click.option("--model", "model_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--task", "task_id", required=True)
@click.option("--init", "init_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON file with the initial world state (default: the model's default_initial).")
@click.option("--limit", "step_limit", type=int, default=None, help="Step budget before giving up.")
@click.option("--json", "as_json", is_flag=True, help="Emit the HTTP /simulate body instead of text.")
@click.option("--storage", "storage_dir", type=click.Path(file_okay=False), default=None)
@_pipeline_errors
def simulate_cmd(model_file: str, task_id: str, init_file: str | None, step_limit: int | None,
                 as_json: bool, storage_dir: str | None) -> None:
    """Run a task's method to completion and persist the trace."""
    model = _load_model(model_file)
    try:
        model.task(task_id)
    except KeyError:
        raise _fail(f"model has no task {task_id!r}", EXIT_VALIDATION) from None
    if init_file is not None:
        initial = json.loads(Path(init_file).read_text())
    else:
        initial = model.default_initial
    if initial is None:
        raise _fail("no --init given and the model declares no default_initial", EXIT_VALIDATION)
    if step_limit is not None and step_limit < 1:
        raise _fail(f"--limit must be positive, got {step_limit}", EXIT_USAGE)
    config = _build_config(None, storage_dir)
    storage = Storage(config.storage_dir)
    kwargs = {"store": storage}
    if step_limit is not None:
        kwargs["step_limit"] = step_limit
    trace = simulate(model, task_id, initial, **kwargs)
    if as_json:
        click.echo(to_json_bytes(simulate_payload(trace)).decode("utf-8"))
        return
    click.echo(f"trace saved: {storage.trace_path(trace.trace_id)}")
    click.echo(render_trace_summary(summarize_trace(trace)))


@main.command()
@click.option("--model", "model_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Emit the document list as JSON.")
def docs(model_file: str, as_json: bool) -> None:
    """Dump the retrieval documents compiled from a model."""
    model = _load_model(model_file)
    documents = compile_documents(model)
    if as_json:
        payload = [
            {
                "doc_id": d.doc_id,
                "category": d.category,
                "title": d.title,
                "text": d.text,
                "source_ref": d.source_ref,
                "associated_method_ref": d.associated_method_ref,
            }
            for d in documents
        ]
        click.echo(json.dumps(payload, indent=2))
        return
    for doc in documents:
        click.echo(f"=== {doc.doc_id} ({doc.category}) ===")
        click.echo(doc.title)
        click.echo()
        click.echo(doc.text)
        click.echo()


@main.command(name="eval")
@click.option("--model", "model_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--questions", "questions_file", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="eval-report",
              show_default=True)
@click.option("--runs", type=int, default=5, show_default=True,
              help="Pipeline repetitions for the consistency metric.")
@click.option("--provider", type=click.Choice(["mock", "remote"]), default="mock", show_default=True)
@_pipeline_errors
def eval_cmd(model_file: str, questions_file: str, out_dir: str, runs: int, provider: str) -> None:
    """Score a question corpus and write report files plus figures."""
    if runs < 2:
        raise _fail(f"--runs must be at least 2, got {runs}", EXIT_USAGE)
    model = _load_model(model_file)
    questions = load_questions(Path(questions_file).read_text())
    if not questions:
        raise _fail(f"{questions_file} contains no questions", EXIT_USAGE)
    config = _build_config(provider, None)
    language_model, embedder = _providers(config)
    session = ModelSession.build(model, embedder)
    results = evaluate_corpus(questions, session, language_model, embedder, runs=runs)
    written = write_report(results, model.id, Path(out_dir), runs)
    click.echo(render_report_table(results))
    files = ", ".join(p.name for paths in written.values() for p in paths)
    click.echo(f"\nreport written to {out_dir}/: {files}")


@main.command()
@click.option("--host", default=None, help="Bind address (default 127.0.0.1).")
@click.option("--port", type=int, default=None, help="Port (default: IVY_PORT or 8000).")
@click.option("--storage", "storage_dir", type=click.Path(file_okay=False), default=None)
@click.option("--provider", type=click.Choice(["mock", "remote"]), default="mock", show_default=True)
def serve(host: str | None, port: int | None, storage_dir: str | None, provider: str) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    config = _build_config(provider, storage_dir, host=host, port=port)
    try:
        app = create_app(config)
    except ConfigError as exc:
        raise _fail(str(exc), EXIT_USAGE) from exc
    except OSError as exc:
        raise _fail(f"storage directory unusable: {exc}", EXIT_VALIDATION) from exc
    uvicorn.run(app, host=config.host, port=config.port, log_level=config.log_level)


if __name__ == "__main__":
    main()
