"""Command-line interface: ingest, query, eval, gen-data."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import load_config
from .datagen import export_dataset
from .errors import PdfqaError
from .evaluate import load_cases, run_eval
from .pipeline import (
    STORE_FILENAME,
    generate_corpus_dataset,
    ingest_corpus,
    query_index,
)
from .qa import AssetCatalog, Query, answer
from .services import resolve_embedder, resolve_llm
from .store import VectorStore


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdfqa",
        description="Retrieval-augmented question answering over document corpora.",
    )
    parser.add_argument("--config", type=Path, default=None,
                        help="flat TOML config file")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed overriding the config value")
    parser.add_argument("--json", action="store_true", dest="as_json",
                        help="emit machine-readable JSON on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build an index from a corpus directory")
    p.add_argument("--corpus", type=Path, required=True, help="directory of corpus documents")
    p.add_argument("--out", type=Path, required=True, help="index output directory")

    p = sub.add_parser("query", help="answer one question against an index")
    p.add_argument("--index", type=Path, required=True, help="ingest output directory")
    p.add_argument("--question", required=True)
    p.add_argument("-k", type=int, default=None, help="number of chunks to retrieve")

    p = sub.add_parser("eval", help="run an evaluation case file against an index")
    p.add_argument("--cases", type=Path, required=True, help="JSONL evaluation cases")
    p.add_argument("--index", type=Path, required=True, help="ingest output directory")
    p.add_argument("--report", type=Path, required=True, help="where to write the JSON report")

    p = sub.add_parser("gen-data", help="generate finetuning examples from a corpus")
    p.add_argument("--corpus", type=Path, required=True, help="directory of corpus documents")
    p.add_argument("--out", type=Path, required=True, help="JSONL dataset output path")
    p.add_argument("--questions-per-context", type=int, default=None)

    return parser


def _cmd_ingest(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed=args.seed)
    store, reports, failures = ingest_corpus(args.corpus, args.out, config)
    if args.as_json:
        print(json.dumps({
            "index": str(args.out),
            "entries": len(store),
            "docs": [vars(r) for r in reports],
            "failures": [str(p) for p, _ in failures],
        }))
    else:
        for r in reports:
            print(
                f"{r.doc_id}: pages={r.pages} elements={r.elements} "
                f"chunks={r.chunks} images={r.images} tables={r.tables}"
            )
        print(f"indexed {len(reports)} documents ({len(store)} chunks) -> {args.out}")
        for path, exc in failures:
            print(f"failed: {path.name}: {exc}", file=sys.stderr)
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed=args.seed, k=args.k)
    result = query_index(args.index, args.question, config)
    if args.as_json:
        print(json.dumps(result.to_dict(), ensure_ascii=False))
    else:
        print(result.answer_text)
        print()
        print("retrieved:")
        for rank, (chunk_id, score) in enumerate(result.retrieved, start=1):
            print(f"  {rank}. {chunk_id}  {score:.4f}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed=args.seed)
    cases = load_cases(args.cases)
    store = VectorStore.load(Path(args.index) / STORE_FILENAME)
    embedder = resolve_embedder(config.embedder_url, dim=config.embed_dim, seed=config.seed)
    llm = resolve_llm(config.llm_url)
    catalog = AssetCatalog(args.index)

    def answer_fn(question: str):
        return answer(
            Query(text=question, k=config.k), store, embedder, llm,
            catalog=catalog, max_tokens=config.max_tokens,
        )

    report = run_eval(cases, answer_fn, embedder)
    report.save(args.report)
    if args.as_json:
        print(json.dumps(report.to_dict(), ensure_ascii=False))
    else:
        print(f"cases: {len(report.cases)}  mean similarity: {report.mean_similarity:.4f}")
        for tau, value in sorted(report.accuracy.items()):
            print(f"accuracy@{tau}: {value:.4f}")
        if report.image_accuracy is not None:
            print(f"image accuracy: {report.image_accuracy:.4f}")
        if report.table_accuracy is not None:
            print(f"table accuracy: {report.table_accuracy:.4f}")
        print(f"report -> {args.report}")
    return 0


def _cmd_gen_data(args: argparse.Namespace) -> int:
    config = load_config(
        args.config, seed=args.seed, questions_per_context=args.questions_per_context
    )
    examples = generate_corpus_dataset(args.corpus, config)
    export_dataset(examples, args.out)
    if args.as_json:
        print(json.dumps({"examples": len(examples), "path": str(args.out)}))
    else:
        print(f"wrote {len(examples)} examples -> {args.out}")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "query": _cmd_query,
    "eval": _cmd_eval,
    "gen-data": _cmd_gen_data,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (PdfqaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
