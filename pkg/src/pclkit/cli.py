"""Command-line entry point orchestrating the pipeline end to end.

Subcommands: lexicon, clean, pt-filter, score, sft-build, eval, iaa,
serve, run.  Exit codes: 0 success, 1 validation failure, 2
environment/IO failure.  Every artifact is written atomically (temp file
then rename) and each ``run`` leaves a manifest recording the config
hash, seeds and input checksums so identical inputs reproduce identical
artifacts.
"""

from __future__ import annotations

import functools
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path

import click
import yaml

from . import annotation as ann
from . import evaluation as ev
from . import instruct, lexicon as lex, toxicity, webclean
from .model import (
    Document,
    LabelRecord,
    Language,
    Stage,
    ValidationError,
    canonical_json,
    load_dataset,
    save_dataset,
)


def _atomic_write(path, data: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValidationError, ann.SessionError) as exc:
            click.echo(f"validation error: {exc}", err=True)
            sys.exit(1)
        except OSError as exc:
            click.echo(f"io error: {exc}", err=True)
            sys.exit(2)
    return wrapper


@click.group()
def main():
    """Bilingual condescending-language data and evaluation toolkit."""


# -- lexicon ----------------------------------------------------------------

@main.group("lexicon")
def lexicon_group():
    """Build and query the condescension dictionary."""


@lexicon_group.command("calibrate")
@click.option("--raw", "raw_path", required=True, type=click.Path(exists=True),
              help="TSV of term<TAB>confidence")
@click.option("--decisions", "dec_path", required=True, type=click.Path(exists=True),
              help="TSV of term<TAB>relevant")
@click.option("--language", type=click.Choice(["EN", "ZH"]), default="EN")
@click.option("--out", "out_path", required=True, type=click.Path())
@_exit_codes
def lexicon_calibrate(raw_path, dec_path, language, out_path):
    raw_terms = []
    for line in Path(raw_path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            term, conf = line.split("\t")
            raw_terms.append({"term": term, "confidence": float(conf)})
    decisions = []
    for line in Path(dec_path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            term, rel = line.split("\t")
            decisions.append({"term": term, "relevant": rel.lower() in ("true", "1")})
    result = lex.calibrate(raw_terms, decisions, Language(language))
    lex.save_lexicon(result, out_path)
    click.echo(f"{len(result.entries)} entries, {len(result.relevant_entries)} relevant")


@lexicon_group.command("match")
@click.option("--lexicon", "lex_path", required=True, type=click.Path(exists=True))
@click.option("--language", type=click.Choice(["EN", "ZH"]), default="EN")
@click.argument("text")
@_exit_codes
def lexicon_match(lex_path, language, text):
    lx = lex.load_lexicon(lex_path, Language(language))
    for m in lex.match_terms(text, lx):
        click.echo(f"{m.term}\t{m.start}\t{m.end}")


# -- clean ------------------------------------------------------------------

@main.command("clean")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path())
@_exit_codes
def clean_cmd(config_path, in_path, out_path, report_path):
    config = webclean.CleaningConfig.load(config_path)
    docs = load_dataset(in_path)
    cleaned, report = webclean.clean_pipeline(docs, config)
    lines = "".join(canonical_json(d.to_dict()) + "\n" for d in cleaned)
    _atomic_write(out_path, lines)
    if report_path:
        _atomic_write(report_path, canonical_json(report.to_dict()))
    click.echo(f"{len(cleaned)} docs kept ({report.removed_dupes} dupes removed)")


# -- pt-filter --------------------------------------------------------------

@main.command("pt-filter")
@click.option("--lexicon", "lex_path", required=True, type=click.Path(exists=True))
@click.option("--language", type=click.Choice(["EN", "ZH"]), default="EN")
@click.option("--keep-prob", type=float, default=0.30, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--stats", "stats_path", type=click.Path())
@_exit_codes
def pt_filter(lex_path, language, keep_prob, seed, in_path, out_path, stats_path):
    lx = lex.load_lexicon(lex_path, Language(language))
    docs = load_dataset(in_path)
    retained, stats = lex.filter_pretrain_corpus(docs, lx, keep_prob=keep_prob, seed=seed)
    lines = "".join(canonical_json(d.to_dict()) + "\n" for d in retained)
    _atomic_write(out_path, lines)
    if stats_path:
        _atomic_write(stats_path, canonical_json(stats.__dict__))
    click.echo(f"retained {stats.output_count}/{stats.input_count} "
               f"({stats.matched_count} matched)")


# -- score ------------------------------------------------------------------

@main.command("score")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--endpoint", default=None, help="scoring service URL")
@click.option("--credential", default="")
@click.option("--rate", type=float, default=1.0)
@click.option("--fallback", "use_fallback", is_flag=True,
              help="use the offline lexicon scorer instead of the endpoint")
@click.option("--lexicon", "lex_path", type=click.Path(exists=True))
@click.option("--language", type=click.Choice(["EN", "ZH"]), default="EN")
@click.option("--cache", "cache_path", type=click.Path())
@_exit_codes
def score_cmd(in_path, out_path, endpoint, credential, rate, use_fallback,
              lex_path, language, cache_path):
    docs = load_dataset(in_path)
    if use_fallback:
        if not lex_path:
            raise ValidationError("--fallback requires --lexicon")
        lx = lex.load_lexicon(lex_path, Language(language))
        scores = [toxicity.score_fallback(d.id, d.text, lx) for d in docs]
        errors = {}
    elif endpoint:
        cache = toxicity.ScoreCache(cache_path)
        config = toxicity.EndpointConfig(url=endpoint, credential=credential,
                                         rate_per_sec=rate)
        scores, errors = toxicity.score_external(
            [(d.id, d.text) for d in docs], config, cache
        )
    else:
        raise ValidationError("either --endpoint or --fallback is required")
    lines = "".join(
        canonical_json({"doc_id": s.doc_id, "score": s.score,
                        "origin": s.origin.value,
                        "intensity": toxicity.bucketize(s.score).value}) + "\n"
        for s in scores
    )
    _atomic_write(out_path, lines)
    for doc_id, msg in errors.items():
        click.echo(f"error {doc_id}: {msg}", err=True)
    click.echo(f"scored {len(scores)} docs, {len(errors)} errors")


# -- sft-build --------------------------------------------------------------

@main.command("sft-build")
@click.option("--dataset", type=click.Choice(["dpm", "td", "cpcl"]), required=True)
@click.option("--docs", "docs_path", type=click.Path(exists=True))
@click.option("--labels", "labels_path", type=click.Path(exists=True))
@click.option("--pairs", "pairs_path", type=click.Path(exists=True),
              help="line-oriented {comment, reply, label} records for td")
@click.option("--scores", "scores_path", type=click.Path(exists=True),
              help="toxicity score records, enables intensity lookup")
@click.option("--with-intensity", is_flag=True)
@click.option("--offensive-lexicon", "off_path", type=click.Path(exists=True))
@click.option("--language", type=click.Choice(["EN", "ZH"]), default="EN")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--dpm-threshold", type=int, default=2, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path())
@_exit_codes
def sft_build(dataset, docs_path, labels_path, pairs_path, scores_path,
              with_intensity, off_path, language, config_path, dpm_threshold,
              out_path, report_path):
    config = (instruct.TemplateConfig.load(config_path) if config_path
              else instruct.TemplateConfig.default())
    if dataset == "td":
        if not pairs_path:
            raise ValidationError("td build requires --pairs")
        pairs, labels = [], []
        for line in Path(pairs_path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            pairs.append((obj["comment"], obj["reply"]))
            labels.append(obj.get("label"))
        offensive = (lex.load_lexicon(off_path, Language(language))
                     if off_path else None)
        samples, report = instruct.build_pair_dataset(
            pairs, labels, offensive_lexicon=offensive,
            language=Language(language), config=config,
        )
    else:
        if not docs_path or not labels_path:
            raise ValidationError(f"{dataset} build requires --docs and --labels")
        docs = load_dataset(docs_path)
        labels = load_dataset(labels_path)
        intensities = {}
        if scores_path:
            for line in Path(scores_path).read_text(encoding="utf-8").splitlines():
                if line.strip():
                    obj = json.loads(line)
                    intensities[obj["doc_id"]] = toxicity.bucketize(obj["score"])
        samples, report = instruct.build_doc_dataset(
            docs, labels, intensities=intensities,
            include_intensity=with_intensity, config=config,
            dpm_threshold=dpm_threshold if dataset == "dpm" else None,
        )
    for s in samples:
        s.validate(config)
    lines = "".join(
        canonical_json(s.to_dict()) + "\n" for s in samples
    )
    _atomic_write(out_path, lines)
    if report_path:
        _atomic_write(report_path, canonical_json(report.to_dict()))
    click.echo(f"exported {report.exported}/{report.input_count} samples")


# -- eval -------------------------------------------------------------------

@main.command("eval")
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True),
              help="label records (pcl field is the gold binary)")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True),
              help="line-oriented {doc_id, raw_output} records")
@click.option("--docs", "docs_path", type=click.Path(exists=True),
              help="documents (needed for --by-group / --interference)")
@click.option("--language", type=click.Choice(["EN", "ZH"]), default="EN")
@click.option("--by-group", is_flag=True)
@click.option("--by-subcategory", is_flag=True)
@click.option("--interference", is_flag=True)
@click.option("--few-fraction", type=float, default=0.5, show_default=True)
@click.option("--seed", type=int, default=0)
@click.option("--unknown-policy", type=click.Choice(["COUNT_AS_WRONG", "COUNT_AS_NEGATIVE"]),
              default="COUNT_AS_WRONG")
@click.option("--out", "out_path", type=click.Path(), help="machine-readable report")
@_exit_codes
def eval_cmd(gold_path, pred_path, docs_path, language, by_group, by_subcategory,
             interference, few_fraction, seed, unknown_policy, out_path):
    gold_records = load_dataset(gold_path)
    gold = {r.doc_id: r for r in gold_records}
    mapping = ev.MappingConfig.default()
    policy = ev.UnknownPolicy(unknown_policy)
    preds = {}
    for line in Path(pred_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        preds[obj["doc_id"]] = ev.map_output(obj["raw_output"], Language(language), mapping)
    ids = [i for i in gold if i in preds]
    golds = [gold[i].pcl for i in ids]
    mapped = [preds[i] for i in ids]
    report = ev.evaluate(golds, mapped, policy)
    per_group = {}
    per_sub = {}
    if by_group and docs_path:
        docs = {d.id: d for d in load_dataset(docs_path)}
        triples = [(gold[i].pcl, preds[i], docs[i].group_tag)
                   for i in ids if docs.get(i) and docs[i].group_tag]
        per_group = ev.group_breakdown(triples, policy)
    if by_subcategory:
        triples = []
        for i in ids:
            for sub in gold[i].subcategories:
                triples.append((gold[i].pcl, preds[i], sub))
        per_sub = ev.subcategory_breakdown(triples, policy)
    report = ev.EvalReport(confusion=report.confusion, macro=report.macro,
                           per_group=per_group, per_subcategory=per_sub)
    payload = ev.report_to_json(report)
    if interference:
        if not docs_path:
            raise ValidationError("--interference requires --docs")
        docs = load_dataset(docs_path)
        pool = [d for d in docs if d.id in preds and d.id in gold]
        result = ev.interference_experiment(
            pool, {i: gold[i].pcl for i in gold}, preds,
            few_fraction=few_fraction, seed=seed, unknown_policy=policy,
        )
        payload = canonical_json({
            "reports": {k: v.to_dict() for k, v in result.reports.items()},
            "f1_percent": result.f1_percent,
            "deltas": result.deltas,
        })
    if out_path:
        _atomic_write(out_path, payload)
    click.echo(ev.render_text_report(report), nl=False)


# -- iaa --------------------------------------------------------------------

@main.command("iaa")
@click.option("--labels-a", required=True, type=click.Path(exists=True))
@click.option("--labels-b", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path())
@_exit_codes
def iaa_cmd(labels_a, labels_b, out_path):
    recs_a = {r.doc_id: r for r in load_dataset(labels_a)}
    recs_b = {r.doc_id: r for r in load_dataset(labels_b)}
    shared = [i for i in recs_a if i in recs_b]
    pairs = [(recs_a[i], recs_b[i]) for i in shared]
    report = ann.compute_iaa_report(pairs)
    if out_path:
        _atomic_write(out_path, canonical_json(report.to_dict()))
    click.echo(report.render_text(), nl=False)


# -- serve ------------------------------------------------------------------

@main.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--sessions", "sessions_dir", required=True, type=click.Path())
@click.option("--tokens", "tokens_path", required=True, type=click.Path(exists=True))
@click.option("--eval-runs", "eval_runs_dir", type=click.Path())
@click.option("--static", "static_dir", type=click.Path(exists=True))
@_exit_codes
def serve_cmd(port, host, sessions_dir, tokens_path, eval_runs_dir, static_dir):
    import uvicorn

    from .service import SessionStore, TokenStore, create_app

    app = create_app(
        SessionStore(sessions_dir),
        TokenStore.load(tokens_path),
        eval_runs_dir=eval_runs_dir,
        static_dir=static_dir,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


# -- run --------------------------------------------------------------------

STAGES = ("lexicon", "clean", "pt-filter", "score", "sft-build", "eval")


@main.command("run")
@click.argument("stage", type=click.Choice(STAGES + ("all",)))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@_exit_codes
def run_cmd(stage, config_path):
    """Run one pipeline stage (or all) from a declarative config file."""
    config = yaml.safe_load(Path(config_path).read_text(encoding="utf-8"))
    workdir = Path(config_path).resolve().parent / config.get("workdir", ".")
    out_dir = workdir / config.get("out_dir", "out")
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = config.get("seeds", {})
    stages = list(STAGES) if stage == "all" else [stage]
    manifest = {
        "config_hash": _sha256(config_path),
        "seeds": seeds,
        "inputs": {},
        "stages": [],
    }
    runner = click.get_current_context()

    def invoke(cmd, **kwargs):
        runner.invoke(cmd, **kwargs)

    lang = config.get("language", "EN")
    lex_path = workdir / config["lexicon"]
    manifest["inputs"]["lexicon"] = _sha256(lex_path)

    for st in stages:
        if st == "lexicon":
            # already calibrated lexicon is an input; nothing to do here
            manifest["stages"].append("lexicon")
        elif st == "clean":
            invoke(clean_cmd, config_path=str(workdir / config["cleaning_config"]),
                   in_path=str(workdir / config["raw_docs"]),
                   out_path=str(out_dir / "cleaned.jsonl"),
                   report_path=str(out_dir / "clean_report.json"))
            manifest["stages"].append("clean")
        elif st == "pt-filter":
            invoke(pt_filter, lex_path=str(lex_path), language=lang,
                   keep_prob=float(config.get("keep_prob", 0.30)),
                   seed=int(seeds.get("pt_filter", 0)),
                   in_path=str(out_dir / "cleaned.jsonl"),
                   out_path=str(out_dir / "pretrain.jsonl"),
                   stats_path=str(out_dir / "filter_stats.json"))
            manifest["stages"].append("pt-filter")
        elif st == "score":
            invoke(score_cmd, in_path=str(out_dir / "cleaned.jsonl"),
                   out_path=str(out_dir / "scores.jsonl"),
                   endpoint=None, credential="", rate=1.0, use_fallback=True,
                   lex_path=str(lex_path), language=lang, cache_path=None)
            manifest["stages"].append("score")
        elif st == "sft-build":
            invoke(sft_build, dataset=config.get("sft_dataset", "cpcl"),
                   docs_path=str(out_dir / "cleaned.jsonl"),
                   labels_path=str(workdir / config["labels"]),
                   pairs_path=None,
                   scores_path=str(out_dir / "scores.jsonl"),
                   with_intensity=bool(config.get("with_intensity", True)),
                   off_path=None, language=lang,
                   config_path=(str(workdir / config["template_config"])
                                if config.get("template_config") else None),
                   dpm_threshold=int(config.get("dpm_threshold", 2)),
                   out_path=str(out_dir / "sft.jsonl"),
                   report_path=str(out_dir / "sft_report.json"))
            manifest["stages"].append("sft-build")
        elif st == "eval":
            invoke(eval_cmd, gold_path=str(workdir / config["labels"]),
                   pred_path=str(workdir / config["predictions"]),
                   docs_path=str(out_dir / "cleaned.jsonl"),
                   language=lang, by_group=True, by_subcategory=True,
                   interference=False, few_fraction=0.5, seed=0,
                   unknown_policy="COUNT_AS_WRONG",
                   out_path=str(out_dir / "eval_report.json"))
            manifest["stages"].append("eval")

    # Inert, documented training hyperparameter block exported verbatim for
    # downstream trainers; this toolkit never trains.
    if "training" in config:
        _atomic_write(out_dir / "training_config.json",
                      canonical_json(config["training"]))
    _atomic_write(out_dir / "run_manifest.json", canonical_json(manifest))
    click.echo(f"completed stages: {', '.join(manifest['stages'])}")
