"""Operator command line: corpus building, pipeline runs, scoring, audits.

Commands: ``corpus build|classify|split``, ``run``, ``eval``, ``judge``,
``reward audit``, ``tools list|invoke``. All take ``--config``; flags
override file values; ``--mock`` forces every backend onto the offline
in-process implementations.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import config as cfgmod
from .agents.orchestrator import VARIANTS, run_pipeline
from .corpus.build import build_instance, read_instances, write_instances
from .corpus.classify import classify_mllm, classify_rule
from .corpus.context import retrieve_context
from .corpus.filters import FilterDecision, filter_element, filter_paper
from .corpus.split import split_eval
from .document.model import build_reference_graph, document_to_json
from .document.parse import parse_document
from .errors import IdMismatch, MalformedSource, TabfigError
from .metrics.aggregate import aggregate, compute_metrics, delta, summary_table
from .metrics.judge import judge_corpus
from .rewards.breakdown import critic_reward, expert_reward, planner_reward, solver_reward
from .rewards.groups import group_advantages
from .tools.registry import ToolCall, invoke as invoke_tool
from .tools.specs import TOOL_SPECS


def _fail(kind: str, detail) -> None:
    click.echo(json.dumps({"error": kind, "detail": detail}), err=True)
    sys.exit(1)


def _run_dir(out, config: dict) -> Path:
    """Explicit --out, or a fresh runs/<timestamp>-<confighash> directory."""
    if out is not None:
        return Path(out)
    import time as _time

    stamp = _time.strftime("%Y%m%d-%H%M%S")
    return Path("runs") / f"{stamp}-{cfgmod.config_hash(config)}"


def _safe_id(instance_id: str) -> str:
    return instance_id.replace("/", "__")


def _load_documents(config: dict) -> dict:
    documents = {}
    for entry in config.get("corpus", {}).get("papers", []):
        try:
            raw = Path(entry["path"]).read_text(encoding="utf-8")
            doc = parse_document(raw, entry["format"], entry)
            documents[doc.paper_id] = doc
        except (OSError, MalformedSource, KeyError, ValueError):
            continue
    return documents


def _resolve(config_path, mock: bool, replay: bool, seed, workers) -> dict:
    overrides: dict = {}
    if seed is not None:
        overrides["seed"] = seed
    if workers is not None:
        overrides["workers"] = workers
    if replay:
        overrides["tools"] = {"mode": "replay"}
    config = cfgmod.load_config(config_path, overrides)
    if mock:
        config = cfgmod.force_mock(config)
    return config


def _shared_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True), default=None)(fn)
    fn = click.option("--seed", type=int, default=None)(fn)
    fn = click.option("--mock", is_flag=True, help="force all backends to in-process mocks")(fn)
    fn = click.option("--replay", is_flag=True, help="serve tool HTTP calls from fixtures only")(fn)
    fn = click.option("--workers", type=int, default=None)(fn)
    return fn


@click.group()
def main() -> None:
    """Scientific table & figure analysis toolkit."""


# ---------------------------------------------------------------- corpus


@main.group()
def corpus() -> None:
    """Build, classify, and split analysis instances."""


@corpus.command("build")
@_shared_options
@click.option("--out", type=click.Path(), required=True)
@click.option("--dump-documents", is_flag=True, help="also write each parsed document as JSON")
def corpus_build(config_path, seed, mock, replay, workers, out, dump_documents) -> None:
    """Parse configured papers into an instance file plus a stage report."""
    config = _resolve(config_path, mock, replay, seed, workers)
    thresholds = cfgmod.build_thresholds(config)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)

    report = {
        "papers": {"total": 0, "accepted": 0, "rejected": {}},
        "elements": {"total": 0, "accepted": 0, "rejected": {}},
        "instances": {"built": 0, "rejected": {}},
    }

    def bump(section: str, reason: str) -> None:
        bucket = report[section]["rejected"]
        bucket[reason] = bucket.get(reason, 0) + 1

    instances = []
    capped = False
    for entry in config.get("corpus", {}).get("papers", []):
        if capped:
            break
        report["papers"]["total"] += 1
        try:
            raw = Path(entry["path"]).read_text(encoding="utf-8")
        except OSError:
            bump("papers", "access_failure")
            continue
        try:
            doc = parse_document(raw, entry["format"], entry)
        except (MalformedSource, ValueError):
            bump("papers", "parse_failure")
            continue
        decision = filter_paper(doc, thresholds)
        if not decision:
            bump("papers", decision.reason)
            continue
        report["papers"]["accepted"] += 1
        if dump_documents:
            dump_dir = out_dir / "documents"
            dump_dir.mkdir(exist_ok=True)
            (dump_dir / f"{doc.paper_id}.json").write_text(
                document_to_json(doc), encoding="utf-8"
            )

        graph = build_reference_graph(doc)
        for el in doc.elements:
            if el.kind not in ("table", "figure"):
                continue
            report["elements"]["total"] += 1
            el_decision = filter_element(el, doc.format, thresholds.require_caption)
            if not el_decision:
                bump("elements", el_decision.reason)
                continue
            report["elements"]["accepted"] += 1
            ctx = retrieve_context(graph, el.element_id, thresholds.context_depth)
            result = build_instance(doc, el, ctx, thresholds, graph)
            if isinstance(result, FilterDecision):
                bump("instances", result.reason)
                continue
            classify_rule(result, doc)
            instances.append(result)
            report["instances"]["built"] += 1
            if len(instances) >= thresholds.max_samples:
                capped = True
                break

    write_instances(out_dir / "instances.jsonl", instances)
    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True), encoding="utf-8"
    )
    cfgmod.new_manifest(config, "corpus_build", [], out_dir).write(out_dir / "manifest.json")
    click.echo(f"built {len(instances)} instances -> {out_dir}")


@corpus.command("classify")
@_shared_options
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def corpus_classify(config_path, seed, mock, replay, workers, in_path, out) -> None:
    """Add depth/objective labels via the judge backend (or mock)."""
    config = _resolve(config_path, mock, replay, seed, workers)
    backends = cfgmod.build_backends(config)
    gateway = cfgmod.build_gateway(config, backends)
    judge_backend = backends.get("judge") or backends.get("default")
    instances = read_instances(in_path)
    try:
        for inst in instances:
            classify_mllm(inst, gateway, judge_backend)
    except TabfigError as exc:
        _fail("backend_failure", f"{type(exc).__name__}: {exc}")
    write_instances(out, instances)
    click.echo(f"classified {len(instances)} instances -> {out}")


@corpus.command("split")
@_shared_options
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--eval-year", type=int, required=True)
@click.option("--max-eval", type=int, default=None)
@click.option("--out", type=click.Path(), required=True)
def corpus_split(config_path, seed, mock, replay, workers, in_path, eval_year, max_eval, out) -> None:
    """Partition an instance file into train/eval by evaluation year."""
    config = _resolve(config_path, mock, replay, seed, workers)
    instances = read_instances(in_path)
    train, eval_set = split_eval(
        instances, eval_year, seed=int(config.get("seed", 0)), max_eval=max_eval
    )
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_instances(out_dir / "train.jsonl", train)
    write_instances(out_dir / "eval.jsonl", eval_set)
    click.echo(f"split {len(instances)} -> train {len(train)} / eval {len(eval_set)}")


# ------------------------------------------------------------------- run


@main.command("run")
@_shared_options
@click.option("--instances", "instances_path", type=click.Path(exists=True), required=True)
@click.option("--variant", type=click.Choice(VARIANTS), default=None)
@click.option("--out", type=click.Path(), default=None)
def run_cmd(config_path, seed, mock, replay, workers, instances_path, variant, out) -> None:
    """Run the agent pipeline over instances; resumable by instance id."""
    config = _resolve(config_path, mock, replay, seed, workers)
    backends = cfgmod.build_backends(config)
    gateway = cfgmod.build_gateway(config, backends)
    pipe_config = cfgmod.build_pipeline_config(config, backends, variant)
    documents = _load_documents(config)
    tool_env = cfgmod.build_tool_env(config, gateway, backends, documents)

    out_dir = _run_dir(out, config)
    transcripts_dir = out_dir / "transcripts"
    transcripts_dir.mkdir(parents=True, exist_ok=True)
    manifest = cfgmod.new_manifest(config, pipe_config.variant, [instances_path], out_dir)

    instances = read_instances(instances_path)
    pending = [
        inst
        for inst in instances
        if not (transcripts_dir / f"{_safe_id(inst.instance_id)}.json").exists()
    ]
    failures: dict[str, str] = {}

    def run_one(inst):
        try:
            transcript = run_pipeline(inst, pipe_config, gateway, tool_env)
        except TabfigError as exc:
            failures[inst.instance_id] = f"{type(exc).__name__}: {exc}"
            return
        path = transcripts_dir / f"{_safe_id(inst.instance_id)}.json"
        path.write_text(transcript.to_json(), encoding="utf-8")

    n_workers = max(1, int(config.get("workers", 1)))
    if n_workers == 1:
        for inst in pending:
            run_one(inst)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(run_one, pending))

    # regenerate the analyses file from every transcript present, so an
    # interrupted run resumed later converges to the same artifact
    rows = []
    for path in sorted(transcripts_dir.glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        rows.append({"instance_id": data["instance_id"], "analysis": data["final"]})
    rows.sort(key=lambda r: r["instance_id"])
    with open(out_dir / "analyses.jsonl", "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    if failures:
        (out_dir / "failures.json").write_text(
            json.dumps(failures, indent=2, sort_keys=True), encoding="utf-8"
        )
    manifest.write(out_dir / "manifest.json")
    click.echo(f"ran {len(pending)} instances ({len(failures)} failed) -> {out_dir}")


# ------------------------------------------------------------------ eval


def _read_generated(path: str) -> dict[str, str]:
    generated: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            generated[row["instance_id"]] = row.get("analysis", row.get("generated", ""))
    return generated


@main.command("eval")
@_shared_options
@click.option("--generated", "generated_path", type=click.Path(exists=True), required=True)
@click.option("--instances", "instances_path", type=click.Path(exists=True), required=True)
@click.option("--judge", "with_judge", is_flag=True, help="add the five-dimensional judge pass")
@click.option("--baseline", "baseline_path", type=click.Path(exists=True), default=None)
@click.option("--rouge-f", "with_rouge_f", is_flag=True, help="also emit conventional LCS F-measure diagnostics")
@click.option("--out", type=click.Path(), default=None)
def eval_cmd(
    config_path, seed, mock, replay, workers, generated_path, instances_path, with_judge,
    baseline_path, with_rouge_f, out
) -> None:
    """Score generated analyses against gold with the six rule metrics."""
    config = _resolve(config_path, mock, replay, seed, workers)
    backends = cfgmod.build_backends(config)
    gateway = cfgmod.build_gateway(config, backends)
    embedder = cfgmod.build_embedder(config, gateway, backends)

    instances = read_instances(instances_path)
    generated = _read_generated(generated_path)
    gold_ids = {inst.instance_id for inst in instances}
    gen_ids = set(generated)
    if gold_ids != gen_ids:
        mismatch = IdMismatch(missing=list(gold_ids - gen_ids), extra=list(gen_ids - gold_ids))
        _fail("id_mismatch", {"missing": mismatch.missing, "extra": mismatch.extra})

    ids = sorted(gold_ids)
    by_id = {inst.instance_id: inst for inst in instances}
    vectors = [compute_metrics(by_id[i].gold, generated[i], embedder) for i in ids]
    report = aggregate(vectors, instance_ids=ids)

    payload = report.as_dict()
    if with_rouge_f:
        from .metrics.lexical import rouge_l_f

        values = [rouge_l_f(by_id[i].gold, generated[i]) for i in ids]
        payload["rouge_l_f_mean"] = sum(values) / len(values)
    if baseline_path:
        baseline = json.loads(Path(baseline_path).read_text(encoding="utf-8"))
        payload["deltas"] = {
            key: delta(payload[key], baseline[key]) for key in ("s_lex", "s_sem", "s_avg")
        }
    if with_judge:
        judge_backend = backends.get("judge") or backends.get("default")
        try:
            judge_report = judge_corpus(instances, generated, gateway, judge_backend)
        except TabfigError as exc:
            _fail("backend_failure", f"{type(exc).__name__}: {exc}")
        payload["judge"] = judge_report.as_dict()

    out_dir = _run_dir(out, config)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False), encoding="utf-8"
    )
    table = summary_table(report)
    (out_dir / "table.txt").write_text(table + "\n", encoding="utf-8")
    click.echo(table)


@main.command("judge")
@_shared_options
@click.option("--generated", "generated_path", type=click.Path(exists=True), required=True)
@click.option("--instances", "instances_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def judge_cmd(config_path, seed, mock, replay, workers, generated_path, instances_path, out) -> None:
    """Five-dimensional judge grading of generated analyses."""
    config = _resolve(config_path, mock, replay, seed, workers)
    backends = cfgmod.build_backends(config)
    gateway = cfgmod.build_gateway(config, backends)
    judge_backend = backends.get("judge") or backends.get("default")
    instances = read_instances(instances_path)
    generated = _read_generated(generated_path)
    report = judge_corpus(instances, generated, gateway, judge_backend)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "judge.json").write_text(
        json.dumps(report.as_dict(), indent=2, sort_keys=True, ensure_ascii=False),
        encoding="utf-8",
    )
    click.echo(f"judged {len(report.per_instance)} instances, s_mllm={report.s_mllm:.2f}")


# ---------------------------------------------------------------- reward


@main.group()
def reward() -> None:
    """Reward computation and audits."""


@reward.command("audit")
@_shared_options
@click.option("--samples", "samples_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def reward_audit(config_path, seed, mock, replay, workers, samples_path, out) -> None:
    """Compute reward breakdowns (and group advantages) for sample rows."""
    config = _resolve(config_path, mock, replay, seed, workers)
    backends = cfgmod.build_backends(config)
    gateway = cfgmod.build_gateway(config, backends)
    embedder = cfgmod.build_embedder(config, gateway, backends)
    weights = cfgmod.build_reward_weights(config)

    rows = []
    with open(samples_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))

    results = []
    for index, row in enumerate(rows):
        agent = row["agent"]
        output = row["output"]
        if agent == "planner":
            breakdown = planner_reward(output, set(row["gold_options"]), weights)
        elif agent == "critic":
            breakdown = critic_reward(output, set(row["gold_options"]), weights)
        elif agent == "expert":
            gold = row["gold_call"]
            breakdown = expert_reward(
                output, ToolCall(gold["tool_name"], gold.get("params", {})), weights
            )
        elif agent == "solver":
            breakdown = solver_reward(output, row["reference"], embedder, weights)
        else:
            _fail("unknown_agent", agent)
        entry = {"index": index, **breakdown.as_dict()}
        if "group" in row:
            entry["group"] = row["group"]
        results.append(entry)

    by_group: dict[str, list[int]] = {}
    for entry in results:
        if "group" in entry:
            by_group.setdefault(entry["group"], []).append(entry["index"])
    for group, indices in by_group.items():
        if len(indices) < 2:
            continue
        advantages = group_advantages([results[i]["total"] for i in indices])
        for i, adv in zip(indices, advantages):
            results[i]["advantage"] = adv

    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        for entry in results:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
    click.echo(f"audited {len(results)} samples -> {out_path}")


# ----------------------------------------------------------------- tools


@main.group()
def tools() -> None:
    """Inspect and invoke registry tools."""


@tools.command("list")
def tools_list() -> None:
    for spec in TOOL_SPECS.values():
        click.echo(f"{spec.tool_name:28s} [{spec.toolkit}] {spec.description}")


@tools.command("invoke")
@_shared_options
@click.option("--name", required=True)
@click.option("--params", "params_json", default="{}")
def tools_invoke(config_path, seed, mock, replay, workers, name, params_json) -> None:
    config = _resolve(config_path, mock, replay, seed, workers)
    backends = cfgmod.build_backends(config)
    gateway = cfgmod.build_gateway(config, backends)
    documents = _load_documents(config)
    env = cfgmod.build_tool_env(config, gateway, backends, documents)
    try:
        params = json.loads(params_json)
    except json.JSONDecodeError as exc:
        _fail("bad_params", str(exc))
    result = invoke_tool(ToolCall(tool_name=name, params=params), env)
    click.echo(
        json.dumps(
            {"status": result.status, "error_kind": result.error_kind, "payload": result.payload},
            ensure_ascii=False,
        )
    )
    if result.status == "error":
        sys.exit(2)


if __name__ == "__main__":
    main()
