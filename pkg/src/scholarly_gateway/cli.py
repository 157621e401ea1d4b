"""Command-line entry point: serve, one-shot search, interactive chat,
and the evaluation drivers."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import GatewayError, ProviderFailure
from .evalkit import (build_ai_qa, build_comparison_qa, evaluate_dataset,
                      load_comparisons, perf_stats, relevancy_sweep, save_items)
from .evalkit.datasets import StubQuestionLlm
from .federation import SourceRegistry
from .federation.types import SourceRecord
from .generator import ExtractiveLlm, RemoteLlm
from .retriever import HashingEmbedder, RemoteEmbedder, build_kb, flatten_record
from .service.config import EMBEDDING_KEY_ENV, LLM_KEY_ENV, ServiceConfig
from .service.pipeline import GatewayPipeline
from .service.telemetry import load_telemetry
from .taxonomy import map_record

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PROVIDER = 2


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; 2 is reserved for provider failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="scholarly-gateway",
                     description="Federated scholarly search with conversational QA.")
    verbs = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    serve = verbs.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--config", help="service config JSON")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.add_argument("--sources", help="source registry JSON")
    serve.add_argument("--static", help="directory with the built web UI")

    search = verbs.add_parser("search", help="one-shot federated search")
    search.add_argument("query")
    search.add_argument("--sources", help="source registry JSON")
    search.add_argument("--config", help="service config JSON")

    chat = verbs.add_parser("chat", help="search once, then chat over the results")
    chat.add_argument("query")
    chat.add_argument("--sources", help="source registry JSON")
    chat.add_argument("--config", help="service config JSON")
    chat.add_argument("--provider", choices=("local", "remote"), default="local")

    evaluate = verbs.add_parser("eval", help="evaluation drivers")
    tasks = evaluate.add_subparsers(dest="task", required=True, parser_class=_Parser)
    for name in ("ai-qa", "comparison-qa", "sweep", "perf"):
        task = tasks.add_parser(name)
        task.add_argument("--seed", type=int, default=42)
        task.add_argument("--input", required=True)
        task.add_argument("--output")
        task.add_argument("--provider", choices=("local", "remote"), default="local")
        if name == "comparison-qa":
            task.add_argument("--titles", help="file of retrieved titles, one per line")
        if name == "sweep":
            task.add_argument("--query", required=True)
            task.add_argument("--bm25-mode", choices=("vector", "raw"), default="vector")
    return parser


def _llm_provider(kind: str):
    if kind == "remote":
        endpoint = os.environ.get("GATEWAY_LLM_ENDPOINT")
        if not endpoint:
            raise ProviderFailure("GATEWAY_LLM_ENDPOINT is not set")
        return RemoteLlm(endpoint=endpoint,
                         model=os.environ.get("GATEWAY_LLM_MODEL", "gpt-3.5-turbo"),
                         api_key=os.environ.get(LLM_KEY_ENV))
    return ExtractiveLlm()


def _embedder(kind: str):
    if kind == "remote":
        endpoint = os.environ.get("GATEWAY_EMBEDDING_ENDPOINT")
        if not endpoint:
            raise ProviderFailure("GATEWAY_EMBEDDING_ENDPOINT is not set")
        return RemoteEmbedder(endpoint=endpoint,
                              api_key=os.environ.get(EMBEDDING_KEY_ENV))
    return HashingEmbedder()


def _load_config(args) -> ServiceConfig:
    config = ServiceConfig.from_file(args.config) if getattr(args, "config", None) \
        else ServiceConfig()
    if getattr(args, "sources", None):
        config.sources_path = args.sources
    return config


def _make_pipeline(args, provider: str = "local") -> GatewayPipeline:
    config = _load_config(args)
    if not config.sources_path:
        raise GatewayError("a source registry is required; pass --sources or --config")
    registry = SourceRegistry.from_config(config.sources_path)
    return GatewayPipeline(registry=registry, dedup_weights=config.dedup,
                           bm25_params=config.bm25, ensemble=config.ensemble,
                           llm_provider=_llm_provider(provider))


def _load_records(path: str):
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError(f"{path} must hold a JSON list")
    records = []
    for entry in raw:
        fields = entry if isinstance(entry, dict) else {"title": str(entry)}
        records.append(map_record(SourceRecord(source_id="input", native_fields=fields)))
    return records


def _load_texts(path: str) -> list[str]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError(f"{path} must hold a JSON list")
    texts = []
    for entry in raw:
        if isinstance(entry, str):
            texts.append(entry)
        else:
            fields = dict(entry)
            texts.append(flatten_record(
                map_record(SourceRecord(source_id="input", native_fields=fields))))
    return texts


def _emit_items(items, output: Optional[str]):
    if output:
        save_items(items, output)
        print(f"wrote {len(items)} items to {output}")
    else:
        for item in items:
            print(json.dumps({"question": item.question, "ground_truth": item.ground_truth,
                              "source": item.source}, ensure_ascii=False))


def _cmd_search(args) -> int:
    pipeline = _make_pipeline(args)
    result = pipeline.search(args.query)
    payload = result.to_payload()
    print(f"query: {result.query}")
    print(f"sources: " + ", ".join(
        f"{s['id']}={s['status']}({s['records']})" for s in payload["sources"]))
    print(f"records: {result.total_records} fetched, {result.unique_records} unique")
    for facet, members in payload["groups"].items():
        print(f"\n[{facet}]")
        for member in members:
            authors = ", ".join(member["authors"]) or "unknown"
            sources = ",".join(member["sources"])
            print(f"  - {member['title']} ({authors}) [{sources}]")
    return EXIT_OK


def _cmd_chat(args) -> int:
    pipeline = _make_pipeline(args, provider=args.provider)
    result = pipeline.search(args.query)
    print(f"{result.unique_records} documents ready; ask away (blank line or 'exit' quits)")
    while True:
        try:
            question = input("? ").strip()
        except EOFError:
            break
        if not question or question.lower() in ("exit", "quit"):
            break
        outcome = pipeline.chat(result.session_id, question)
        print(outcome.answer)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import build_app

    config = _load_config(args)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    if getattr(args, "static", None):
        config.static_dir = args.static
    app = build_app(config)
    uvicorn.run(app, host=config.host, port=config.port)
    return EXIT_OK


def _cmd_eval(args) -> int:
    if args.task == "ai-qa":
        records = _load_records(args.input)
        kb = build_kb(records, _embedder(args.provider))
        provider = StubQuestionLlm() if args.provider == "local" else _llm_provider("remote")
        items = build_ai_qa(kb, provider, seed=args.seed)
        _emit_items(items, args.output)
    elif args.task == "comparison-qa":
        comparisons = load_comparisons(args.input)
        if getattr(args, "titles", None):
            titles = {line.strip() for line in Path(args.titles).read_text(
                encoding="utf-8").splitlines() if line.strip()}
        else:
            titles = {p.title for c in comparisons for p in c.papers}
        items = build_comparison_qa(comparisons, titles)
        _emit_items(items, args.output)
    elif args.task == "sweep":
        texts = _load_texts(args.input)
        curves = relevancy_sweep(args.query, texts, embedder=_embedder(args.provider),
                                 bm25_mode=args.bm25_mode)
        rows = curves.to_csv_rows()
        if args.output:
            with open(args.output, "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle)
                writer.writerow(["threshold", "representation", "retained_count"])
                writer.writerows(rows)
            print(f"wrote {len(rows)} rows to {args.output}")
        else:
            print("threshold,representation,retained_count")
            for row in rows:
                print(f"{row[0]},{row[1]},{row[2]}")
    elif args.task == "perf":
        entries = load_telemetry(args.input)
        stats = perf_stats(entries)
        payload = json.dumps(stats.to_dict(), indent=2)
        if args.output:
            Path(args.output).write_text(payload + "\n", encoding="utf-8")
            print(f"wrote stats to {args.output}")
        else:
            print(payload)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "serve":
            return _cmd_serve(args)
        if args.verb == "search":
            return _cmd_search(args)
        if args.verb == "chat":
            return _cmd_chat(args)
        if args.verb == "eval":
            return _cmd_eval(args)
    except ProviderFailure as exc:
        print(f"provider failure: {exc.message}", file=sys.stderr)
        return EXIT_PROVIDER
    except GatewayError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
