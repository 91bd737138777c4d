"""Command-line entry point wiring the full pipeline.

Subcommands: ``index`` builds the context database, ``check`` runs a checker
over one file, ``query`` executes structural queries, ``repair`` drives the
iterative loop over tasks, and ``eval`` computes metrics over run outputs.
Flags take precedence over the config file, which takes precedence over
built-in defaults; every run writes a machine-readable summary echoing the
effective configuration.
"""

from __future__ import annotations

import concurrent.futures
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from .diagnostics.builtin import builtin_check
from .diagnostics.external import CheckerConfig, run_external_checker
from .diagnostics.models import Diagnostic, filter_to_solution
from .errors import CtxRepairError, QueryRejectedError
from .evaluation import evaluate
from .gateway.backends import (
    AuditLog,
    CompletionBackend,
    MockBackend,
    RemoteChatBackend,
    prompt_digest,
)
from .index.build import build_database
from .index.models import ProjectDatabase
from .index.scan import scan_source_files
from .loop.engine import _Workspace, repair as run_repair
from .loop.models import (
    CandidateStatus,
    GenerationTask,
    IterationTrace,
    write_traces_jsonl,
)
from .loop.runtests import run_task_tests
from .query.hardcoded import hardcoded_query_for
from .query.parser import parse_query
from .query.run import execute_query
from .query.synthesize import synthesize_query
from .retrieval import (
    LOCAL_EMBEDDING_DIM,
    REMOTE_EMBEDDING_DIM,
    EmbeddingIndex,
    LocalEmbedder,
    RemoteEmbedder,
)
from .runconfig import RunConfig, build_run_config


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _make_embedder(cfg: RunConfig):
    if cfg.embedder_kind == "local":
        return LocalEmbedder(dim=cfg.embedder_dim or LOCAL_EMBEDDING_DIM, seed=cfg.embedder_seed)
    if cfg.embedder_kind == "remote":
        if not cfg.embedder_endpoint or not cfg.embedder_model:
            raise click.UsageError("remote embedder requires an endpoint and model")
        return RemoteEmbedder(
            endpoint=cfg.embedder_endpoint,
            model=cfg.embedder_model,
            dim=cfg.embedder_dim or REMOTE_EMBEDDING_DIM,
        )
    raise click.UsageError(f"unknown embedder kind: {cfg.embedder_kind!r}")


def _make_backend(cfg: RunConfig, task_id: Optional[str], audit: Optional[AuditLog]) -> CompletionBackend:
    kind = cfg.backend_kind
    if kind.startswith("mock:"):
        location = Path(kind[len("mock:") :])
        if location.is_dir():
            if task_id is None:
                raise click.UsageError("mock transcript directory requires a task context")
            location = location / f"{task_id}.json"
        return MockBackend.from_file(location, audit=audit)
    if kind == "remote":
        if not cfg.backend_endpoint or not cfg.backend_model:
            raise click.UsageError("remote backend requires --endpoint and --model")
        return RemoteChatBackend(
            endpoint=cfg.backend_endpoint, model=cfg.backend_model, audit=audit
        )
    raise click.UsageError(f"unknown backend kind: {kind!r} (use remote or mock:<path>)")


@click.group()
def cli() -> None:
    """Repository-context-aware code repair pipeline."""


# ---------------------------------------------------------------------------
# index
# ---------------------------------------------------------------------------


@cli.command("index")
@click.argument("project_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(), help="Database file to write.")
@click.option("--ext", "extensions", multiple=True, default=(".py",), show_default=True, help="Source extensions to index.")
@click.option("--embedder", "embedder_kind", type=click.Choice(["local", "remote"]), default=None, help="Embedding encoder for entry passages.")
@click.option("--embed-dim", type=int, default=None, help="Embedding dimensionality.")
@click.option("--embed-seed", type=int, default=None, help="Local embedder hash seed.")
@click.option("--embed-endpoint", default=None, help="Remote embedding service URL.")
@click.option("--embed-model", default=None, help="Remote embedding model name.")
@click.option("--config", "config_file", type=click.Path(), default=None, help="TOML or JSON config file.")
def index_cmd(project_dir, out_path, extensions, embedder_kind, embed_dim, embed_seed, embed_endpoint, embed_model, config_file) -> None:
    """Index PROJECT_DIR into a context database."""
    cfg = build_run_config(
        config_file,
        {
            "paths": {"project_root": project_dir},
            "embedder": {
                "kind": embedder_kind,
                "dim": embed_dim,
                "seed": embed_seed,
                "endpoint": embed_endpoint,
                "model": embed_model,
            },
        },
    )
    embedder = _make_embedder(cfg)
    units = scan_source_files(project_dir, extensions)
    db = build_database(
        units,
        embedder,
        project_root=str(Path(project_dir).resolve()),
        embedder_info=embedder.info(),
    )
    db.dump(out_path)
    summary = {
        "command": "index",
        "database": str(out_path),
        "source_files": len(units),
        "entries": len(db),
        "entries_without_embedding": len(db.missing_embedding_ids),
        "effective_config": cfg.to_json(),
    }
    _write_json(Path(str(out_path) + ".summary.json"), summary)
    click.echo(f"indexed {len(units)} files into {len(db)} entries -> {out_path}")


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


@cli.command("check")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--db", "db_path", required=True, type=click.Path(exists=True), help="Context database.")
@click.option("--checker", type=click.Choice(["builtin", "external"]), default="builtin", show_default=True, help="Which checker to run.")
@click.option("--span", default=None, help="start:end line range to restrict findings (defaults to the whole file).")
@click.option("--analyzer", default=None, help="External analyzer executable override.")
def check_cmd(file, db_path, checker, span, analyzer) -> None:
    """Check FILE against the project database; print the report as JSON."""
    db = ProjectDatabase.load(db_path)
    text = Path(file).read_text(encoding="utf-8")
    n_lines = max(1, len(text.splitlines()))
    if span:
        try:
            start, end = (int(part) for part in span.split(":"))
        except ValueError:
            raise click.UsageError("--span must look like start:end")
    else:
        start, end = 1, n_lines
    if checker == "external":
        checker_config = CheckerConfig(executable=analyzer) if analyzer else None
        diags = run_external_checker(file, db.project_root, checker_config)
    else:
        diags = builtin_check(text, (start, end), db, file=str(file))
    report = filter_to_solution(diags, (start, end))
    click.echo(json.dumps(report.to_json(), indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# query
# ---------------------------------------------------------------------------


@cli.command("query")
@click.argument("db_path", type=click.Path(exists=True))
@click.option("--text", "query_text", default=None, help="Structural query to execute.")
@click.option("--for-error", "error_path", type=click.Path(exists=True), default=None, help="Diagnostic JSON file to retrieve context for.")
@click.option("--backend", "backend_kind", default=None, help="Completion backend (remote or mock:<path>) for query synthesis.")
@click.option("--endpoint", default=None, help="Remote backend URL.")
@click.option("--model", default=None, help="Remote backend model name.")
@click.option("--line-budget", type=int, default=40, show_default=True, help="Max source lines per rendered snippet.")
def query_cmd(db_path, query_text, error_path, backend_kind, endpoint, model, line_budget) -> None:
    """Run a structural query (or error-directed retrieval) over a database."""
    if (query_text is None) == (error_path is None):
        raise click.UsageError("provide exactly one of --text or --for-error")
    db = ProjectDatabase.load(db_path)

    if query_text is not None:
        query = parse_query(query_text)
        result = execute_query(query, db, line_budget=line_budget)
        payload = {
            "query": query.render(),
            "tuples": [list(row) for row in result.tuples],
            "rendered": list(result.rendered),
        }
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
        return

    with open(error_path, "r", encoding="utf-8") as fh:
        diag = Diagnostic.from_json(json.load(fh))
    result = hardcoded_query_for(diag, db)
    query_repr = f"hardcoded:{diag.code}"
    if result is None and backend_kind:
        cfg = build_run_config(
            None,
            {"backend": {"kind": backend_kind, "endpoint": endpoint, "model": model}},
        )
        backend = _make_backend(cfg, task_id=None, audit=None)
        try:
            query = synthesize_query(diag, backend)
            query_repr = query.render()
            result = execute_query(query, db, line_budget=line_budget)
        except QueryRejectedError as exc:
            click.echo(json.dumps({"query": None, "rejected": str(exc)}, indent=2))
            return
    if result is None:
        click.echo(
            json.dumps(
                {
                    "query": None,
                    "reason": f"no hard-coded retrieval for {diag.code}; supply --backend for synthesis",
                },
                indent=2,
            )
        )
        return
    payload = {
        "query": query_repr,
        "tuples": [list(row) for row in result.tuples],
        "rendered": list(result.rendered),
    }
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# repair
# ---------------------------------------------------------------------------


def _load_tasks(task_path: Path) -> list[GenerationTask]:
    if task_path.is_dir():
        tasks = [GenerationTask.from_file(p) for p in sorted(task_path.glob("*.json"))]
        if not tasks:
            raise click.UsageError(f"no task files under {task_path}")
        return tasks
    return [GenerationTask.from_file(task_path)]


def _repair_one_task(
    task: GenerationTask,
    db: ProjectDatabase,
    cfg: RunConfig,
    index: EmbeddingIndex,
    out_dir: Path,
    audit: Optional[AuditLog],
) -> dict:
    backend = _make_backend(cfg, task_id=task.id, audit=audit)
    candidates, traces = run_repair(
        task,
        db,
        backend,
        config=cfg.loop,
        gen_config=cfg.generation,
        embedding_index=index,
    )

    n_passing = 0
    func_diags = []
    for idx, candidate in enumerate(candidates):
        if candidate.status != CandidateStatus.CLEAN:
            continue
        if task.test_command:
            workspace = _Workspace(db.project_root, task)
            try:
                workspace.write(candidate.code)
                failures = run_task_tests(
                    candidate, task, cwd=str(workspace.root), timeout=cfg.loop.test_timeout
                )
            finally:
                workspace.cleanup()
            if failures:
                func_diags.append((idx, candidate, failures))
                continue
        n_passing += 1

    # FUNC findings join the trace stream for distribution reporting; they
    # never re-enter retrieval.
    for idx, candidate, failures in func_diags:
        traces.append(
            IterationTrace(
                iteration=candidate.iteration,
                candidate_index=idx,
                prompt_digest="",
                structural_query=None,
                structural_tuple_count=0,
                semantic_results=(),
                diagnostics_before=candidate.report.solution_diagnostics,
                diagnostics_after=tuple(failures),
                candidate_digest=prompt_digest(candidate.code),
            )
        )

    write_traces_jsonl(traces, out_dir / f"{task.id}.traces.jsonl")
    representative = next(
        (c for c in candidates if c.status == CandidateStatus.CLEAN), candidates[0]
    )
    (out_dir / f"{task.id}.final.py").write_text(representative.code + "\n", encoding="utf-8")
    return {
        "task_id": task.id,
        "n": len(candidates),
        "c": n_passing,
        "statuses": [c.status.value for c in candidates],
        "iterations": [c.iteration for c in candidates],
    }


@cli.command("repair")
@click.option("--db", "db_path", required=True, type=click.Path(exists=True), help="Context database.")
@click.option("--task", "task_path", required=True, type=click.Path(exists=True), help="Task JSON file or directory of task files.")
@click.option("--backend", "backend_kind", default=None, help="Completion backend: remote or mock:<path>.")
@click.option("--endpoint", default=None, help="Remote backend URL.")
@click.option("--model", default=None, help="Remote backend model name.")
@click.option("--max-iters", type=int, default=None, help="Refinement iteration cap.")
@click.option("--n", "n_candidates", type=int, default=None, help="Candidates sampled per task.")
@click.option("--retrieval-n", type=int, default=None, help="Context entries retrieved per query.")
@click.option("--checker", type=click.Choice(["builtin", "external"]), default=None, help="Checker driving the loop.")
@click.option("--temperature", type=float, default=None, help="Sampling temperature.")
@click.option("--top-k", type=int, default=None, help="Top-k sampling parameter forwarded to the backend.")
@click.option("--out", "output_dir", default=None, help="Output directory for traces and results.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Tasks repaired concurrently.")
@click.option("--audit/--no-audit", "audit_enabled", default=True, show_default=True, help="Record every backend call to an audit transcript.")
@click.option("--config", "config_file", type=click.Path(), default=None, help="TOML or JSON config file.")
def repair_cmd(db_path, task_path, backend_kind, endpoint, model, max_iters, n_candidates, retrieval_n, checker, temperature, top_k, output_dir, jobs, audit_enabled, config_file) -> None:
    """Run the repair loop over one task or a directory of tasks."""
    cfg = build_run_config(
        config_file,
        {
            "paths": {"database": db_path, "tasks": task_path, "output_dir": output_dir},
            "loop": {
                "max_iterations": max_iters,
                "n_candidates": n_candidates,
                "retrieval_n": retrieval_n,
                "checker": checker,
            },
            "generation": {"temperature": temperature, "top_k": top_k},
            "backend": {"kind": backend_kind, "endpoint": endpoint, "model": model},
        },
    )
    if cfg.backend_kind == "remote":
        # Fail on missing credentials before any indexing or staging work.
        _make_backend(cfg, task_id=None, audit=None)

    db = ProjectDatabase.load(cfg.database)
    embedder = None
    if db.embedder.kind == "remote":
        embedder = _make_embedder(cfg)
    index = EmbeddingIndex.from_database(db, embedder)
    tasks = _load_tasks(Path(cfg.tasks))

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    audit = AuditLog(out_dir / "backend_audit.jsonl") if audit_enabled else None

    results: list[dict] = []
    failures: list[tuple[str, str]] = []

    def run_one(task: GenerationTask) -> dict:
        return _repair_one_task(task, db, cfg, index, out_dir, audit)

    if jobs > 1 and len(tasks) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(run_one, task): task for task in tasks}
            for future in concurrent.futures.as_completed(futures):
                task = futures[future]
                try:
                    results.append(future.result())
                except CtxRepairError as exc:
                    failures.append((task.id, str(exc)))
    else:
        for task in tasks:
            try:
                results.append(run_one(task))
            except CtxRepairError as exc:
                failures.append((task.id, str(exc)))

    results.sort(key=lambda r: r["task_id"])
    _write_json(
        out_dir / "results.json",
        [{"task_id": r["task_id"], "n": r["n"], "c": r["c"]} for r in results],
    )
    _write_json(
        out_dir / "summary.json",
        {
            "command": "repair",
            "tasks": results,
            "aborted": [{"task_id": tid, "error": msg} for tid, msg in failures],
            "effective_config": cfg.to_json(),
        },
    )
    for task_id, message in failures:
        click.echo(f"task {task_id} aborted: {message}", err=True)
    click.echo(
        f"repaired {len(results)}/{len(tasks)} tasks -> {out_dir}"
        + (f" ({len(failures)} aborted)" if failures else "")
    )
    if failures:
        raise click.exceptions.Exit(1)


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


@cli.command("eval")
@click.option("--results", "results_dir", required=True, type=click.Path(exists=True, file_okay=False), help="Repair output directory.")
@click.option("--k", "k_values", default="1,5,10", show_default=True, help="Comma-separated k values for pass@k.")
@click.option("--refs", "refs_dir", type=click.Path(exists=True, file_okay=False), default=None, help="Directory of gold files (<task_id>.py) for match metrics.")
@click.option("--json-out", type=click.Path(), default=None, help="Where to write the JSON report (default <results>/eval_report.json).")
@click.option("--csv-out", type=click.Path(), default=None, help="Optional CSV of the error distribution.")
def eval_cmd(results_dir, k_values, refs_dir, json_out, csv_out) -> None:
    """Compute pass@k, error distributions, and match metrics for a run."""
    try:
        ks = [int(part) for part in k_values.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError("--k must be a comma-separated list of integers")
    if not ks:
        raise click.UsageError("--k must name at least one value")
    report = evaluate(results_dir, ks, refs_dir)
    click.echo(report.to_text_table())
    target = Path(json_out) if json_out else Path(results_dir) / "eval_report.json"
    _write_json(target, report.to_json())
    if csv_out:
        Path(csv_out).write_text(report.distribution_csv(), encoding="utf-8")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; returns the process exit status."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except CtxRepairError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
