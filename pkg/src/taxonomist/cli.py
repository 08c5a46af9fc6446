"""Command surface tying the workbench phases together.

Exit codes: 0 success, 1 operational error, 2 validation/threshold failure
(budget exceeded, non-stable drift) so commands work as CI gates.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone

import click

from . import alignment as alignment_mod
from . import drift as drift_mod
from . import fewshot as fewshot_mod
from . import gateway as gateway_mod
from . import prompting as prompting_mod
from . import seqval as seqval_mod
from . import stats as stats_mod
from .corpus import Corpus, PreprocessConfig, ProcessedDocument, load_corpus
from .errors import TaxonomistError
from .fixtures import write_fixture_files
from .gateway import BackendConfig, load_mock_profile, make_classifier
from .schema import load_schema
from .store import GoldenSet, Store, canonical_json, load_golden, make_run

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_THRESHOLD = 2


def _emit(payload: dict, as_json: bool, summary: str, out: str | None = None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(payload) + "\n")
    if as_json:
        click.echo(canonical_json(payload))
    else:
        click.echo(summary)


def _backend_config(backend: str, profile: str | None, endpoint: str | None,
                    model: str) -> BackendConfig:
    if backend == "mock":
        mock_profile = load_mock_profile(profile) if profile else gateway_mod.MockProfile()
        return BackendConfig(kind="mock", model_id=model, mock_profile=mock_profile)
    return BackendConfig(kind="http", endpoint=endpoint or "", model_id=model)


def _store(path: str | None) -> Store:
    root = path or os.environ.get("TAXONOMIST_STORE") or ".taxonomist"
    return Store(root)


backend_options = [
    click.option("--backend", default="mock", type=click.Choice(["mock", "http"])),
    click.option("--profile", default=None, help="mock profile TOML"),
    click.option("--endpoint", default=None, help="http backend URL"),
    click.option("--model", default="mock", help="model id"),
]


def add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


@click.group()
def main():
    """Workbench for hierarchical LLM text classifiers."""


@main.command()
@click.argument("input_path")
@click.option("--max-segment-tokens", default=400, type=int)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
def ingest(input_path, max_segment_tokens, out, as_json):
    """Load a JSONL corpus, clean and segment it."""
    corpus = load_corpus(input_path, PreprocessConfig(max_segment_tokens=max_segment_tokens))
    payload = {
        "documents": [
            {"id": d.id, "source_id": d.source_id, "text": d.text,
             "segment_index": d.segment_index, "token_estimate": d.token_estimate}
            for d in corpus.documents
        ],
        "provenance": {"source": corpus.provenance.source,
                       "config_hash": corpus.provenance.config_hash},
    }
    _emit(payload, as_json, f"ingested {len(corpus)} documents", out)


def _load_processed(path: str) -> Corpus:
    """Read a corpus that is already preprocessed (ingest --out or fixture)."""
    from .corpus import corpus_from_documents, estimate_tokens

    with open(path, encoding="utf-8") as fh:
        first_line = fh.readline()
    try:
        parsed = json.loads(first_line)
    except json.JSONDecodeError:
        parsed = None
    if isinstance(parsed, dict) and "documents" in parsed:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        docs = [
            ProcessedDocument(
                id=d["id"], source_id=d.get("source_id", d["id"]), text=d["text"],
                segment_index=d.get("segment_index", 0),
                token_estimate=d.get("token_estimate", estimate_tokens(d["text"])),
            )
            for d in obj["documents"]
        ]
        return corpus_from_documents(docs, source=path)
    return load_corpus(path)


def _load_prompt(path: str | None, schema) -> prompting_mod.PromptSpec:
    if path:
        spec = prompting_mod.load_spec(path)
    else:
        spec = prompting_mod.PromptSpec(schema_version=schema.version, cot_enabled=True)
    return prompting_mod.finalize(schema, spec)


@main.command()
@click.option("--corpus", "corpus_path", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--prompt", "prompt_path", default=None)
@click.option("--store", "store_path", default=None)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def classify(corpus_path, schema_path, prompt_path, store_path, out, as_json,
             backend, profile, endpoint, model):
    """Classify a corpus and record the run in the store."""
    schema = load_schema(schema_path)
    spec = _load_prompt(prompt_path, schema)
    config = _backend_config(backend, profile, endpoint, model)
    corpus = _load_processed(corpus_path)
    started = datetime.now(timezone.utc).isoformat()
    results = gateway_mod.classify_corpus(corpus, spec, schema, config)
    finished = datetime.now(timezone.utc).isoformat()
    record = make_run(spec.hash, schema.version, config.backend_id, results,
                      started=started, finished=finished)
    _store(store_path).save_run(record)
    payload = {
        "run_id": record.run_id,
        "prompt_hash": record.prompt_hash,
        "schema_version": record.schema_version,
        "backend_id": record.backend_id,
        "results": [
            {"doc_id": r.doc_id, "parent": r.parent, "child": r.child}
            for r in results
        ],
    }
    _emit(payload, as_json, f"run {record.run_id}: {len(results)} documents", out)


@main.command()
@click.option("--corpus", "corpus_path", required=True)
@click.option("--max-topics", default=10, type=int)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def topics(corpus_path, max_topics, out, as_json, backend, profile, endpoint, model):
    """Unconstrained topic discovery over a corpus."""
    config = _backend_config(backend, profile, endpoint, model)
    corpus = _load_processed(corpus_path)
    topic_set, assign = gateway_mod.discover_topics(
        corpus, gateway_mod.DEFAULT_TOPIC_PROMPT, max_topics, config)
    payload = {
        "topics": [{"name": t.name, "description": t.description} for t in topic_set.topics],
        "assignments": assign,
    }
    _emit(payload, as_json, f"{len(topic_set)} topics over {len(corpus)} documents", out)


@main.command()
@click.option("--run", "run_id", required=True)
@click.option("--topic-assign", "topic_path", required=True,
              help="topics JSON with an 'assignments' map")
@click.option("--store", "store_path", default=None)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
def align(run_id, topic_path, store_path, out, as_json):
    """Build the class-vs-topic alignment matrix for a stored run."""
    store = _store(store_path)
    record = store.load_run(run_id)
    with open(topic_path, encoding="utf-8") as fh:
        topic_assign = json.load(fh)["assignments"]
    class_assign = {r.doc_id: r.parent for r in record.results}
    matrix = alignment_mod.build_alignment(class_assign, topic_assign, run_id=run_id)
    store.save_artifact("alignment", run_id, matrix.to_dict())
    _emit(matrix.to_dict(), as_json,
          f"alignment {len(matrix.rows)}x{len(matrix.cols)}, total {matrix.total()}", out)


@main.command()
@click.option("--run", "run_id", required=True)
@click.option("--store", "store_path", default=None)
@click.option("--failed-share", default=0.02, type=float)
@click.option("--vague-purity", default=0.5, type=float)
@click.option("--validated-purity", default=0.8, type=float)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
def diagnose(run_id, store_path, failed_share, vague_purity, validated_purity, out, as_json):
    """Per-class verdicts from a stored alignment matrix."""
    store = _store(store_path)
    matrix = alignment_mod.matrix_from_dict(store.load_artifact("alignment", run_id))
    thresholds = alignment_mod.DiagnosticThresholds(
        failed_share=failed_share, vague_purity=vague_purity,
        validated_purity=validated_purity)
    diags = alignment_mod.diagnose(matrix, thresholds)
    payload = {"run_id": run_id, "diagnostics": [d.to_dict() for d in diags]}
    store.save_artifact("diagnostics", run_id, payload)
    lines = [f"{d.class_name}: {d.verdict} (purity {d.purity:.2f})" for d in diags]
    _emit(payload, as_json, "\n".join(lines), out)


@main.command()
@click.option("--schema", "schema_path", required=True)
@click.option("--prompt", "prompt_path", required=True)
@click.option("--edits", "edits_path", required=True,
              help="JSON list of {class_name, new_definition?, add_exclusions?}")
@click.option("--snapshot", default=None, help="alignment snapshot id for the audit trail")
@click.option("--out", required=True)
@click.option("--json", "as_json", is_flag=True)
def refine(schema_path, prompt_path, edits_path, snapshot, out, as_json):
    """Produce the next prompt iteration from definition edits."""
    schema = load_schema(schema_path)
    spec = prompting_mod.load_spec(prompt_path)
    with open(edits_path, encoding="utf-8") as fh:
        edits = [
            prompting_mod.DefinitionEdit(
                class_name=e["class_name"],
                new_definition=e.get("new_definition"),
                add_exclusions=tuple(e.get("add_exclusions", ())),
            )
            for e in json.load(fh)
        ]
    new_spec = prompting_mod.refine_prompt(schema, spec, edits, alignment_snapshot=snapshot)
    prompting_mod.save_spec(new_spec, out)
    payload = {"iteration": new_spec.iteration, "hash": new_spec.hash, "out": out}
    _emit(payload, as_json, f"iteration {new_spec.iteration} written to {out}")


@main.command()
@click.option("--schema", "schema_path", required=True)
@click.option("--prompt", "prompt_path", required=True)
@click.option("--golden", "golden_path", required=True)
@click.option("--theta", default=0.9, type=float)
@click.option("--out", required=True)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def optimize(schema_path, prompt_path, golden_path, theta, out, as_json,
             backend, profile, endpoint, model):
    """Shorten the prompt by sentence ablation while keeping V >= theta."""
    schema = load_schema(schema_path)
    spec = prompting_mod.finalize(schema, prompting_mod.load_spec(prompt_path))
    golden = load_golden(golden_path, schema)
    config = _backend_config(backend, profile, endpoint, model)
    before = prompting_mod.prompt_tokens(schema, spec)
    optimized = prompting_mod.optimize_prompt(schema, spec, golden, theta, config)
    after = prompting_mod.prompt_tokens(schema, optimized)
    prompting_mod.save_spec(optimized, out)
    payload = {"tokens_before": before, "tokens_after": after,
               "hash": optimized.hash, "out": out}
    _emit(payload, as_json, f"prompt shrunk {before} -> {after} tokens", None)


# -- fewshot ---------------------------------------------------------------

@main.group()
def fewshot():
    """Embedding-based example ranking and KL-constrained selection."""


def _load_candidates(path: str):
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                out.append((obj["doc_id"], obj["text"], obj["parent"], obj.get("child")))
    return out


@fewshot.command()
@click.option("--schema", "schema_path", required=True)
@click.option("--candidates", "candidates_path", required=True,
              help="JSONL {doc_id, text, parent, child?}")
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def rank(schema_path, candidates_path, out, as_json, backend, profile, endpoint, model):
    schema = load_schema(schema_path)
    config = _backend_config(backend, profile, endpoint, model)
    cands = _load_candidates(candidates_path)
    descriptions = {p.internal_name: p.definition for p in schema.parents}
    pairs = [
        (ProcessedDocument(id=doc_id, source_id=doc_id, text=text), parent)
        for doc_id, text, parent, _child in cands
    ]
    ranked = fewshot_mod.rank_examples(pairs, descriptions, config)
    payload = {"ranked": [
        {"doc_id": r.doc_id, "class_name": r.class_name, "similarity": r.similarity}
        for r in ranked
    ]}
    _emit(payload, as_json, "\n".join(
        f"{r.doc_id} {r.class_name} {r.similarity:.4f}" for r in ranked), out)


@fewshot.command()
@click.option("--schema", "schema_path", required=True)
@click.option("--candidates", "candidates_path", required=True)
@click.option("--golden", "golden_path", required=True)
@click.option("--monitor-corpus", "monitor_path", required=True)
@click.option("--prompt", "prompt_path", default=None)
@click.option("--epsilon", default=fewshot_mod.DEFAULT_EPSILON, type=float)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def select(schema_path, candidates_path, golden_path, monitor_path, prompt_path,
           epsilon, out, as_json, backend, profile, endpoint, model):
    schema = load_schema(schema_path)
    config = _backend_config(backend, profile, endpoint, model)
    golden = load_golden(golden_path, schema)
    monitor = _load_processed(monitor_path)
    base_spec = _load_prompt(prompt_path, schema)
    cands = _load_candidates(candidates_path)
    descriptions = {p.internal_name: p.definition for p in schema.parents}
    pairs = [
        (ProcessedDocument(id=doc_id, source_id=doc_id, text=text), parent)
        for doc_id, text, parent, _child in cands
    ]
    ranked = fewshot_mod.rank_examples(pairs, descriptions, config)
    texts = {doc_id: (text, parent, child) for doc_id, text, parent, child in cands}
    zero_shot = gateway_mod.classify_corpus(monitor, base_spec, schema, config)
    baseline = stats_mod.class_distribution(zero_shot, schema)
    k_star, chosen, report = fewshot_mod.select_k(
        ranked, texts, golden, baseline, epsilon, config, schema, base_spec, monitor)
    payload = report.to_dict()
    payload["chosen"] = [
        {"text": e.text, "parent": e.expected_parent, "child": e.expected_child}
        for e in chosen
    ]
    _emit(payload, as_json, f"k* = {k_star} of {len(ranked)} candidates", out)


# -- preferences -----------------------------------------------------------

@main.group()
def prefs():
    """Preference capture and reviewer agreement."""


@prefs.command()
@click.option("--store", "store_path", default=None)
@click.option("--doc-id", required=True)
@click.option("--winner", required=True)
@click.option("--loser", required=True)
@click.option("--reviewer", required=True)
@click.option("--round", "round_", default=1, type=int)
@click.option("--json", "as_json", is_flag=True)
def add(store_path, doc_id, winner, loser, reviewer, round_, as_json):
    store = _store(store_path)
    pref_store = fewshot_mod.PreferenceStore(store.prefs_path())
    doc = ProcessedDocument(id=doc_id, source_id=doc_id, text="")
    pair = fewshot_mod.record_preference(
        pref_store, doc, winner, loser, reviewer, source="human", round=round_)
    _emit(pair.to_dict(), as_json, f"recorded preference for {doc_id}")


@prefs.command()
@click.option("--store", "store_path", default=None)
@click.option("--schema", "schema_path", required=True)
@click.option("--constitution", "constitution_path", required=True)
@click.option("--doc-id", required=True)
@click.option("--text", required=True)
@click.option("--candidates", required=True, help="two internal labels, comma-separated")
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def judge(store_path, schema_path, constitution_path, doc_id, text, candidates,
          as_json, backend, profile, endpoint, model):
    schema = load_schema(schema_path)
    config = _backend_config(backend, profile, endpoint, model)
    constitution = fewshot_mod.load_constitution(constitution_path)
    doc = ProcessedDocument(id=doc_id, source_id=doc_id, text=text)
    pair = fewshot_mod.judge_preference(
        doc, [c.strip() for c in candidates.split(",")], constitution, config, schema)
    store = _store(store_path)
    fewshot_mod.PreferenceStore(store.prefs_path()).append(pair)
    _emit(pair.to_dict(), as_json, f"judge preferred {pair.y_w} over {pair.y_l}")


@prefs.command()
@click.option("--judgments", "judgments_path", required=True,
              help="JSON {reviewer: {doc_id: label}}")
@click.option("--rounds", "rounds_path", default=None,
              help="JSON {reviewer: [{doc_id: label}, ...]}")
@click.option("--json", "as_json", is_flag=True)
def agreement(judgments_path, rounds_path, as_json):
    with open(judgments_path, encoding="utf-8") as fh:
        judgments = json.load(fh)
    rounds = None
    if rounds_path:
        with open(rounds_path, encoding="utf-8") as fh:
            rounds = json.load(fh)
    report = fewshot_mod.agreement(judgments, rounds)
    _emit(report.to_dict(), as_json,
          f"mean inter-rater kappa: {report.mean_inter}")


# -- validation suite ------------------------------------------------------

@main.group()
def validate():
    """Sequence-robustness and adversarial validation (exit 2 over budget)."""


def _classifier(schema_path, prompt_path, backend, profile, endpoint, model):
    schema = load_schema(schema_path)
    spec = _load_prompt(prompt_path, schema)
    config = _backend_config(backend, profile, endpoint, model)
    return schema, spec, config, make_classifier(schema, spec, config)


@validate.command()
@click.option("--corpus", "corpus_path", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--prompt", "prompt_path", default=None)
@click.option("--runs", default=10, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--budget", default=0, type=int)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def stateless(corpus_path, schema_path, prompt_path, runs, seed, budget, out, as_json,
              backend, profile, endpoint, model):
    _schema, _spec, _config, classify_fn = _classifier(
        schema_path, prompt_path, backend, profile, endpoint, model)
    corpus = _load_processed(corpus_path)
    report = seqval_mod.test_statelessness(classify_fn, corpus, n_iter=runs, seed=seed)
    _emit(report.to_dict(), as_json,
          f"inconsistency count I = {report.inconsistency_count}", out)
    if report.inconsistency_count > budget:
        sys.exit(EXIT_THRESHOLD)


@validate.command()
@click.option("--corpus", "corpus_path", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--prompt", "prompt_path", default=None)
@click.option("--proportion", default=0.3, type=float)
@click.option("--min-tokens", default=60, type=int)
@click.option("--budget", default=0, type=int)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def intradoc(corpus_path, schema_path, prompt_path, proportion, min_tokens, budget,
             out, as_json, backend, profile, endpoint, model):
    _schema, _spec, _config, classify_fn = _classifier(
        schema_path, prompt_path, backend, profile, endpoint, model)
    corpus = _load_processed(corpus_path)
    report = seqval_mod.test_intradoc(classify_fn, corpus, p=proportion,
                                      min_tokens=min_tokens)
    _emit(report.to_dict(), as_json,
          f"i_prefix={report.i_prefix} i_suffix={report.i_suffix} i_middle={report.i_middle}",
          out)
    if max(report.i_prefix, report.i_suffix, report.i_middle) > budget:
        sys.exit(EXIT_THRESHOLD)


@validate.command()
@click.option("--corpus", "corpus_path", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--prompt", "prompt_path", required=True)
@click.option("--cap", default=120, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--budget", default=0, type=int)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def inprompt(corpus_path, schema_path, prompt_path, cap, seed, budget, out, as_json,
             backend, profile, endpoint, model):
    schema = load_schema(schema_path)
    spec = _load_prompt(prompt_path, schema)
    config = _backend_config(backend, profile, endpoint, model)
    corpus = _load_processed(corpus_path)
    factory = seqval_mod.classifier_factory(schema, spec, config)
    report = seqval_mod.test_inprompt(spec.examples, corpus, factory, cap=cap, seed=seed)
    _emit(report.to_dict(), as_json, f"i_prompt = {report.i_prompt}", out)
    if report.i_prompt > budget:
        sys.exit(EXIT_THRESHOLD)


@validate.command()
@click.option("--corpus", "corpus_path", required=True)
@click.option("--phrases", "phrases_path", default=None)
@click.option("--quarantine", "quarantine_path", default=None,
              help="side file for flagged documents")
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
def adversarial(corpus_path, phrases_path, quarantine_path, out, as_json):
    corpus = _load_processed(corpus_path)
    phrases = seqval_mod.DEFAULT_ADVERSARIAL_PHRASES
    if phrases_path:
        with open(phrases_path, encoding="utf-8") as fh:
            phrases = tuple(line.strip() for line in fh if line.strip())
    flagged = []
    for doc in corpus.documents:
        outcome = seqval_mod.filter_adversarial(doc, phrases)
        if outcome.flagged:
            flagged.append({"doc_id": doc.id, "matches": [list(m) for m in outcome.matches]})
    if quarantine_path and flagged:
        with open(quarantine_path, "w", encoding="utf-8") as fh:
            for item in flagged:
                fh.write(canonical_json(item) + "\n")
    payload = {"checked": len(corpus), "flagged": flagged}
    _emit(payload, as_json, f"{len(flagged)} of {len(corpus)} documents flagged", out)
    if flagged:
        sys.exit(EXIT_THRESHOLD)


@validate.command()
@click.option("--schema", "schema_path", required=True)
@click.option("--artifact", "artifact_paths", multiple=True, required=True)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
def obfuscation(schema_path, artifact_paths, out, as_json):
    schema = load_schema(schema_path)
    artifacts = {}
    for path in artifact_paths:
        with open(path, encoding="utf-8") as fh:
            artifacts[path] = fh.read()
    leaks = seqval_mod.obfuscation_audit(schema, artifacts)
    payload = {"leaks": [leak.to_dict() for leak in leaks]}
    _emit(payload, as_json, f"{len(leaks)} internal-name leaks", out)
    if leaks:
        sys.exit(EXIT_THRESHOLD)


# -- stats -----------------------------------------------------------------

@main.group(name="stats")
def stats_group():
    """Statistical tests over classification outputs."""


def _counts(text: str) -> list[int]:
    return [int(x) for x in text.split(",")]


@stats_group.command()
@click.option("--pairs", "pairs_path", default=None,
              help="JSON list of [a_correct, b_correct] pairs")
@click.option("--b", "b_count", default=None, type=int)
@click.option("--c", "c_count", default=None, type=int)
@click.option("--alpha", default=stats_mod.DEFAULT_ALPHA, type=float)
@click.option("--correction", is_flag=True)
@click.option("--json", "as_json", is_flag=True)
def mcnemar(pairs_path, b_count, c_count, alpha, correction, as_json):
    if pairs_path:
        with open(pairs_path, encoding="utf-8") as fh:
            paired = [(bool(a), bool(b)) for a, b in json.load(fh)]
    elif b_count is not None and c_count is not None:
        paired = [(True, False)] * b_count + [(False, True)] * c_count
    else:
        raise click.UsageError("provide --pairs or both --b and --c")
    result = stats_mod.mcnemar(paired, alpha=alpha, continuity_correction=correction)
    _emit(result.to_dict(), as_json,
          f"chi2 = {result.statistic:.4f}, p = {result.p_value:.4f}")


@stats_group.command()
@click.option("--a", "a_counts", required=True, help="comma-separated counts")
@click.option("--b", "b_counts", required=True)
@click.option("--labels", default=None)
@click.option("--alpha", default=stats_mod.DEFAULT_ALPHA, type=float)
@click.option("--json", "as_json", is_flag=True)
def chisq(a_counts, b_counts, labels, alpha, as_json):
    a = _counts(a_counts)
    b = _counts(b_counts)
    names = labels.split(",") if labels else [f"c{i}" for i in range(len(a))]
    result = stats_mod.chi2_homogeneity(
        stats_mod.distribution_from_counts(names, a),
        stats_mod.distribution_from_counts(names, b), alpha=alpha)
    _emit(result.to_dict(), as_json,
          f"chi2 = {result.statistic:.4f}, df = {result.df}, p = {result.p_value:.4f}")


@stats_group.command()
@click.option("--p", "p_counts", required=True)
@click.option("--q", "q_counts", required=True)
@click.option("--smoothing", default=stats_mod.DEFAULT_SMOOTHING, type=float)
@click.option("--json", "as_json", is_flag=True)
def kl(p_counts, q_counts, smoothing, as_json):
    p = _counts(p_counts)
    q = _counts(q_counts)
    names = [f"c{i}" for i in range(len(p))]
    value = stats_mod.kl_divergence(
        stats_mod.distribution_from_counts(names, p),
        stats_mod.distribution_from_counts(names, q), smoothing=smoothing)
    _emit({"kl_nats": value}, as_json, f"D_KL = {value:.6f} nats")


# -- drift -----------------------------------------------------------------

@main.group(name="drift")
def drift_group():
    """Post-deployment drift checks (exit 2 on any non-stable verdict)."""


@drift_group.command()
@click.option("--ref", "ref_path", required=True, help="reference window JSON")
@click.option("--cur", "cur_path", required=True, help="current window JSON")
@click.option("--alpha", default=stats_mod.DEFAULT_ALPHA, type=float)
@click.option("--recent-corpus", "recent_path", default=None,
              help="recent sample for the novelty scan")
@click.option("--schema", "schema_path", default=None)
@click.option("--tau", default=0.35, type=float)
@click.option("--golden-trend", default=None, help="comma-separated macro-F1 series")
@click.option("--golden-drop", default=0.1, type=float)
@click.option("--store", "store_path", default=None)
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def check(ref_path, cur_path, alpha, recent_path, schema_path, tau, golden_trend,
          golden_drop, store_path, out, as_json, backend, profile, endpoint, model):
    with open(ref_path, encoding="utf-8") as fh:
        ref = drift_mod.window_from_dict(json.load(fh))
    with open(cur_path, encoding="utf-8") as fh:
        cur = drift_mod.window_from_dict(json.load(fh))
    chi2, alerts = drift_mod.distributional_drift(ref, cur, alpha=alpha)
    novel = []
    if recent_path and schema_path:
        schema = load_schema(schema_path)
        config = _backend_config(backend, profile, endpoint, model)
        recent = _load_processed(recent_path)
        novel = drift_mod.novelty_scan(recent, schema, tau, config)
    trend = [float(x) for x in golden_trend.split(",")] if golden_trend else []
    thresholds = drift_mod.DriftThresholds(alpha=alpha, novelty_tau=tau,
                                           golden_drop=golden_drop)
    report = drift_mod.evaluate_drift(
        chi2, alerts, novel_topics=novel, golden_trend=trend, thresholds=thresholds)
    _store(store_path).save_artifact("windows", "latest_drift", report.to_dict())
    _emit(report.to_dict(), as_json, f"verdict: {report.verdict}", out)
    if report.verdict != "stable":
        sys.exit(EXIT_THRESHOLD)


# -- golden ----------------------------------------------------------------

@main.group(name="golden")
def golden_group():
    """Golden-set evaluation and degradation tracking."""


@golden_group.command(name="eval")
@click.option("--golden", "golden_path", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--prompt", "prompt_path", default=None)
@click.option("--history", "history_path", default=None,
              help="JSON time series appended per evaluation, keyed by prompt hash")
@click.option("--out", default=None)
@click.option("--json", "as_json", is_flag=True)
@add_options(backend_options)
def golden_eval_cmd(golden_path, schema_path, prompt_path, history_path, out, as_json,
                    backend, profile, endpoint, model):
    schema = load_schema(schema_path)
    spec = _load_prompt(prompt_path, schema)
    config = _backend_config(backend, profile, endpoint, model)
    golden = load_golden(golden_path, schema)
    classify_fn = make_classifier(schema, spec, config)
    report = drift_mod.golden_eval(golden, classify_fn, schema.parent_names())
    payload = {"prompt_hash": spec.hash, **report.to_dict()}
    if history_path:
        history = []
        if os.path.exists(history_path):
            with open(history_path, encoding="utf-8") as fh:
                history = json.load(fh)
        history.append({"prompt_hash": spec.hash, "macro_f1": report.macro_f1,
                        "accuracy": report.accuracy})
        with open(history_path, "w", encoding="utf-8") as fh:
            json.dump(history, fh, indent=2)
    _emit(payload, as_json,
          f"accuracy {report.accuracy:.3f}, macro-F1 {report.macro_f1:.3f}", out)


# -- fixtures and serve ----------------------------------------------------

@main.command()
@click.option("--out-dir", default="fixtures")
@click.option("--docs", default=200, type=int)
@click.option("--json", "as_json", is_flag=True)
def fixtures(out_dir, docs, as_json):
    """Write the bundled synthetic fruit-feedback fixtures to disk."""
    paths = write_fixture_files(out_dir, n_docs=docs)
    _emit(paths, as_json, "\n".join(f"{k}: {v}" for k, v in paths.items()))


@main.command()
@click.option("--port", default=8765, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--store", "store_path", default=None)
def serve(port, host, store_path):
    """Serve the local review API (backs the review UI)."""
    import uvicorn

    from .server import create_app

    app = create_app(_store(store_path))
    uvicorn.run(app, host=host, port=port)


def run_main() -> int:
    try:
        main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc}", err=True)
        return EXIT_ERROR
    except TaxonomistError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run_main())
