"""``exedec-lab`` command line: generate corpora, run synthesis, score runs.

::

    exedec-lab gen  --domain deepcoder --category length --split test --count 1000 --out corpus.jsonl
    exedec-lab run  --corpus corpus.jsonl --mode exedec --backend teacher+oracle --out results.jsonl
    exedec-lab eval --corpus corpus.jsonl --results results.jsonl --out reports/

Exit status: 0 success, 2 usage error, 3 data error, 4 backend error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections.abc import Iterator
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path

from . import __version__
from .engine import (
    DEFAULT_BEAM, OracleBackend, RunResult, StepTrace, TeacherSubgoalBackend, default_max_steps,
    run_exedec, run_regism, run_single_step,
)
from .errors import BackendError, BudgetExhausted, ExedecLabError, SpecError
from .metrics import score_task, write_reports
from .protocol import ExternalBackend, decode_value, encode_value
from .syntax import Domain, Program, var_name
from .taskgen import GenCategory, Split, Task, build_corpus, parse_category, satisfies_category
from .text import parse_program, parse_step, render_program, render_step
from .values import Example, TaskSpec

log = logging.getLogger("exedec_lab")

SCHEMA_VERSION = 1
CORPUS_SCHEMA = "exedec-lab/corpus"
RESULTS_SCHEMA = "exedec-lab/results"

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BACKEND = 0, 2, 3, 4

MODES = ("regism", "exedec", "single-step")
BACKENDS = ("oracle", "teacher+oracle", "external")


class UsageError(ExedecLabError):
    pass


class DataError(ExedecLabError):
    pass


# ---------------------------------------------------------------------------
# records


def task_record(task: Task) -> dict:
    return {
        "task_id": task.task_id,
        "seed": task.seed,
        "domain": task.domain.value,
        "category": task.category.category.value,
        "split": task.category.split.value,
        "program": render_program(task.ground_truth),
        "examples": [
            {"inputs": {n: encode_value(v) for n, v in ex.inputs}, "output": encode_value(ex.output)}
            for ex in task.spec.examples
        ],
    }


def task_from_record(rec: dict) -> Task:
    try:
        domain = Domain(rec["domain"])
        examples = [
            Example({n: decode_value(v) for n, v in ex["inputs"].items()}, decode_value(ex["output"]))
            for ex in rec["examples"]
        ]
        cat = GenCategory(rec["category"], rec["split"])
        program = parse_program(rec["program"], domain)
        return Task(rec["task_id"], TaskSpec(examples), program, cat, int(rec["seed"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed task record: {exc}") from None


def result_record(task: Task, seed: int, result: RunResult | None, error: str | None = None) -> dict:
    rec = {"task_id": task.task_id, "seed": seed}
    if result is None:
        rec.update(solved=False, steps_used=0, program=None, note=None, error=error, traces=[])
        return rec
    rec.update(
        solved=result.solved,
        steps_used=result.steps_used,
        max_steps=result.max_steps,
        beam=result.beam_size,
        program=render_program(result.program),
        note=result.note,
        error=error,
        traces=[
            {
                "index": t.index,
                "subgoal": None if t.subgoal is None else [encode_value(v) for v in t.subgoal],
                "subprogram": render_step(t.subprogram),
                "values": [encode_value(v) for v in t.values],
            }
            for t in result.traces
        ],
    )
    return rec


def run_from_record(rec: dict, task: Task) -> RunResult:
    """Rebuild a :class:`RunResult` (without spec snapshots) from its record."""
    domain = task.domain
    steps, traces = [], []
    n_inputs = len(task.spec.input_names)
    try:
        for k, t in enumerate(rec.get("traces", [])):
            step = parse_step(t["subprogram"], domain)
            if domain is Domain.DEEPCODER:
                step = step.retarget(var_name(n_inputs + k))
            subgoal = None if t.get("subgoal") is None else tuple(decode_value(v) for v in t["subgoal"])
            values = tuple(decode_value(v) for v in t["values"])
            steps.append(step)
            traces.append(StepTrace(k, subgoal, step, values, task.spec))
        program = Program(domain, tuple(steps), task.spec.input_names)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed result record for {rec.get('task_id')}: {exc}") from None
    return RunResult(bool(rec["solved"]), program, tuple(traces),
                     int(rec.get("max_steps", 0)), int(rec.get("beam", 0)), rec.get("note"))


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def read_records(path: Path, schema: str) -> tuple[dict, list[dict]]:
    """Header and records of a line-delimited file; a torn last line is ignored."""
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    lines = raw.split("\n")
    complete = lines[:-1]  # text after the final newline is an interrupted write
    if not complete:
        raise DataError(f"{path} has no header line")
    try:
        header = json.loads(complete[0])
        records = [json.loads(line) for line in complete[1:] if line.strip()]
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not line-delimited JSON: {exc}") from None
    if header.get("schema") != schema or header.get("version") != SCHEMA_VERSION:
        raise DataError(f"{path}: expected schema {schema} v{SCHEMA_VERSION}")
    return header, records


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    domain = Domain(args.domain)
    try:
        category = parse_category(args.category)
    except ExedecLabError as exc:
        raise UsageError(str(exc)) from None
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    cat = GenCategory(category, Split(args.split))
    try:
        tasks = build_corpus(domain, category, cat.split, args.count, args.seed, lengths=args.lengths)
    except SpecError as exc:
        raise UsageError(str(exc)) from None
    violations = [t.task_id for t in tasks if not satisfies_category(t.ground_truth, cat)]
    header = {
        "schema": CORPUS_SCHEMA, "version": SCHEMA_VERSION, "domain": domain.value,
        "category": category.value, "split": cat.split.value, "seed": args.seed, "count": len(tasks),
        "lengths": list(args.lengths) if args.lengths else None,
    }
    lines = [_dumps(header)] + [_dumps(task_record(t)) for t in tasks]
    _write_text(Path(args.out), "\n".join(lines) + "\n")
    lengths: dict[int, int] = {}
    for t in tasks:
        lengths[len(t.ground_truth)] = lengths.get(len(t.ground_truth), 0) + 1
    print(f"wrote {len(tasks)} {domain.value} tasks ({cat}) to {args.out}")
    print("lengths: " + ", ".join(f"{n}:{c}" for n, c in sorted(lengths.items())))
    print(f"predicate violations: {len(violations)}")
    return EXIT_OK if not violations else EXIT_DATA


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def load_corpus(path: Path) -> tuple[dict, list[Task]]:
    header, records = read_records(path, CORPUS_SCHEMA)
    return header, [task_from_record(r) for r in records]


# ---------------------------------------------------------------------------
# run


@dataclass(frozen=True)
class RunConfig:
    mode: str
    backend: str
    endpoint: str | None
    beam: int
    max_steps: int | None
    timeout: float = 30.0


_WORKER: dict = {}


def _make_synth(cfg: RunConfig):
    if cfg.backend == "external":
        return ExternalBackend(cfg.endpoint, cfg.timeout)
    return OracleBackend()


def _worker_init(cfg: RunConfig):
    _WORKER["cfg"] = cfg
    _WORKER["synth"] = None


def _run_one(job) -> dict:
    task, seed = job
    cfg: RunConfig = _WORKER["cfg"]
    try:
        if _WORKER.get("synth") is None:
            _WORKER["synth"] = _make_synth(cfg)
        synth = _WORKER["synth"]
        max_steps = cfg.max_steps if cfg.max_steps is not None else default_max_steps(len(task.ground_truth))
        if cfg.mode == "single-step":
            result = run_single_step(task, synth, cfg.beam)
        elif cfg.mode == "regism":
            result = run_regism(task, synth, max_steps, cfg.beam)
        else:
            goals = synth if cfg.backend == "external" else TeacherSubgoalBackend(task.ground_truth)
            result = run_exedec(task, goals, synth, max_steps, cfg.beam)
        return result_record(task, seed, result)
    except BackendError as exc:
        _WORKER["synth"] = None  # reconnect for the next task
        return result_record(task, seed, None, f"backend: {exc}")


def _check_run_config(args) -> RunConfig:
    if args.mode == "exedec" and args.backend == "oracle":
        raise UsageError("--mode exedec needs a subgoal source: use --backend teacher+oracle or external")
    if args.backend == "external" and not args.endpoint:
        raise UsageError("--backend external needs --endpoint")
    if args.beam < 1:
        raise UsageError("--beam must be at least 1")
    if args.max_steps is not None and args.max_steps < 0:
        raise UsageError("--max-steps must be non-negative")
    return RunConfig(args.mode, args.backend, args.endpoint, args.beam, args.max_steps, args.timeout)


def _results_header(cfg: RunConfig, corpus_header: dict, seeds) -> dict:
    return {
        "schema": RESULTS_SCHEMA, "version": SCHEMA_VERSION, "mode": cfg.mode,
        "backend": cfg.backend, "endpoint": cfg.endpoint, "beam": cfg.beam, "max_steps": cfg.max_steps,
        "seeds": list(seeds), "domain": corpus_header.get("domain"),
        "category": corpus_header.get("category"), "split": corpus_header.get("split"),
        "corpus_seed": corpus_header.get("seed"),
    }


def _open_results(path: Path, header: dict) -> set:
    """Prepare ``path`` for appending; returns the (task_id, seed) pairs already done."""
    if not path.exists() or path.stat().st_size == 0:
        _write_text(path, _dumps(header) + "\n")
        return set()
    old_header, records = read_records(path, RESULTS_SCHEMA)
    if old_header != header:
        raise DataError(f"{path} was written with a different configuration; refusing to resume")
    raw = path.read_bytes()
    cut = raw.rfind(b"\n") + 1
    if cut < len(raw):
        with open(path, "r+b") as fh:
            fh.truncate(cut)
    return {(r["task_id"], r["seed"]) for r in records}


def cmd_run(args) -> int:
    cfg = _check_run_config(args)
    seeds = args.seeds if args.seeds else [args.seed]
    corpus_header, tasks = load_corpus(Path(args.corpus))
    out = Path(args.out)
    done = _open_results(out, _results_header(cfg, corpus_header, seeds))
    jobs = [(t, s) for t in tasks for s in seeds if (t.task_id, s) not in done]
    errors = solved = 0
    with open(out, "a", encoding="utf-8") as sink:
        for rec in _execute(jobs, cfg, args.jobs):
            sink.write(_dumps(rec) + "\n")
            sink.flush()
            errors += rec["error"] is not None
            solved += rec["solved"]
    print(f"ran {len(jobs)} job(s), skipped {len(done)} completed; solved {solved}; backend errors {errors}")
    return EXIT_BACKEND if errors else EXIT_OK


def _execute(jobs, cfg: RunConfig, n_jobs: int) -> Iterator[dict]:
    if n_jobs <= 1 or len(jobs) < 2:
        _worker_init(cfg)
        try:
            for job in jobs:
                yield _run_one(job)
        finally:
            _close_worker()
        return
    with Pool(n_jobs, initializer=_worker_init, initargs=(cfg,)) as pool:
        yield from pool.imap(_run_one, jobs, chunksize=4)


def _close_worker():
    synth = _WORKER.get("synth")
    if isinstance(synth, ExternalBackend):
        synth.close()
    _WORKER.clear()


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args) -> int:
    corpus_header, tasks = load_corpus(Path(args.corpus))
    results_header, records = read_records(Path(args.results), RESULTS_SCHEMA)
    by_id = {t.task_id: t for t in tasks}
    missing = sorted({r["task_id"] for r in records if r["task_id"] not in by_id})
    if missing:
        raise DataError("results reference unknown task ids: " + ", ".join(missing))
    label = (
        corpus_header.get("domain"), corpus_header.get("category"),
        corpus_header.get("split"), results_header.get("mode"),
    )
    pairs = []
    for rec in records:
        task = by_id[rec["task_id"]]
        run = run_from_record(rec, task)
        score = score_task(run, task.ground_truth, task.spec, task.task_id, rec["seed"], args.score_subgoals)
        pairs.append((score, run))
    groups = {label: pairs} if pairs else {}
    paths = write_reports(Path(args.out), groups, args.bins)
    print(f"scored {len(pairs)} run(s); reports: " + ", ".join(str(p) for p in paths))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def _seed_default() -> int:
    raw = os.environ.get("EXEDEC_LAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _seed_list(text: str) -> list[int]:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def _length_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("-")
    try:
        bounds = (int(lo), int(hi) if sep else int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad length range {text!r}") from None
    if not 1 <= bounds[0] <= bounds[1]:
        raise argparse.ArgumentTypeError(f"bad length range {text!r}")
    return bounds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exedec-lab", description="Execution-guided synthesis workbench.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a task corpus")
    gen.add_argument("--domain", choices=[d.value for d in Domain], required=True)
    gen.add_argument("--category", required=True, help="e.g. train, length, compose-new-operation")
    gen.add_argument("--split", choices=[s.value for s in Split], default="train")
    gen.add_argument("--count", type=int, default=1000)
    gen.add_argument("--lengths", type=_length_range, default=None,
                     help="restrict program lengths, e.g. 1 or 2-3")
    gen.add_argument("--seed", type=int, default=_seed_default())
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="run a synthesis loop over a corpus")
    run.add_argument("--corpus", required=True)
    run.add_argument("--mode", choices=MODES, default="regism")
    run.add_argument("--backend", choices=BACKENDS, default="oracle")
    run.add_argument("--endpoint", help="stdio:<command> or tcp:<host>:<port>")
    run.add_argument("--beam", type=int, default=DEFAULT_BEAM)
    run.add_argument("--max-steps", type=int, default=None)
    run.add_argument("--seed", type=int, default=_seed_default())
    run.add_argument("--seeds", type=_seed_list, default=None, help="comma-separated run seeds")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--timeout", type=float, default=30.0, help="external backend timeout (s)")
    run.add_argument("--out", required=True)
    run.set_defaults(func=cmd_run)

    ev = sub.add_parser("eval", help="score results against their corpus")
    ev.add_argument("--corpus", required=True)
    ev.add_argument("--results", required=True)
    ev.add_argument("--bins", type=int, default=4)
    ev.add_argument("--score-subgoals", action="store_true",
                    help="score predicted subgoals instead of executed values")
    ev.add_argument("--out", required=True, help="report directory")
    ev.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and argparse usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"exedec-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BackendError as exc:
        print(f"exedec-lab: backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (DataError, BudgetExhausted, ExedecLabError, ValueError) as exc:
        print(f"exedec-lab: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
