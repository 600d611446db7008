"""Command-line front end: proxy server, mock upstream, corpus tools."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from . import md5hash
from .adminapi import AdminServer
from .config import load_config
from .harness.corpus import generate_corpus, read_corpus, write_corpus
from .harness.mock_upstream import MockUpstream, load_credentials
from .harness.replay import replay
from .pipeline import Pipeline
from .prototypes import load_prototypes
from .reputation import FileNotifier, LogNotifier, ReputationStore
from .server import ProxyServer

logger = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saniproxy",
        description="intrusion-prevention reverse proxy and its test harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the proxy and admin API")
    serve.add_argument("--listen", help="host:port for client traffic")
    serve.add_argument("--upstream", help="host:port of the protected app")
    serve.add_argument("--admin-listen", help="host:port for the admin API")
    serve.add_argument("--config", help="path to a JSON config file")
    serve.add_argument("--log-dir", help="directory for JSONL logs")
    serve.add_argument("--ui-dir", help="directory of dashboard static files")

    mock = sub.add_parser("mock-upstream", help="run the demo upstream app")
    mock.add_argument("--listen", default="127.0.0.1:9000")
    mock.add_argument("--credentials", help="JSON file of username to MD5 hex")

    corpus = sub.add_parser("make-corpus", help="write the labeled corpus")
    corpus.add_argument("--out", required=True)
    corpus.add_argument("--seed", type=int, default=20240801)

    rep = sub.add_parser("replay", help="replay a corpus against the proxy")
    rep.add_argument("--corpus", required=True)
    rep.add_argument("--proxy", required=True, help="host:port of the proxy")
    rep.add_argument("--baseline", help="host:port of the bare upstream")
    rep.add_argument("--concurrency", type=int, default=8)
    rep.add_argument("--out", help="write the JSON report here")

    return parser


def _cmd_serve(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.listen:
        overrides["listen"] = args.listen
    if args.upstream:
        overrides["upstream"] = args.upstream
    if args.admin_listen:
        overrides["admin_listen"] = args.admin_listen
    if args.log_dir:
        overrides["log_dir"] = args.log_dir
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)

    md5hash.warm_up()
    notifier = FileNotifier(cfg.notifier_sink) if cfg.notifier_sink else LogNotifier()
    store = ReputationStore(
        cfg.log_dir,
        threshold=cfg.block_threshold,
        block_seconds=cfg.block_seconds,
        consecutive_only=cfg.consecutive_only,
        notifier=notifier,
    )
    prototypes = load_prototypes(cfg.prototypes_path) if cfg.prototypes_path else None
    pipeline = Pipeline(cfg, store, prototypes)

    proxy = ProxyServer(cfg, pipeline)
    admin = AdminServer(cfg, store, ui_dir=args.ui_dir)
    admin.start_background()
    logger.info("proxy on %s, admin on %s, upstream %s",
                cfg.listen, cfg.admin_listen, cfg.upstream)
    try:
        proxy.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        proxy.stop()
        admin.stop()
        store.close()
    return 0


def _cmd_mock_upstream(args) -> int:
    credentials = load_credentials(args.credentials) if args.credentials else {}
    server = MockUpstream(args.listen, credentials)
    logger.info("mock upstream on %s (%d credential entries)",
                args.listen, len(credentials))
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


def _cmd_make_corpus(args) -> int:
    entries = generate_corpus(seed=args.seed)
    write_corpus(entries, args.out)
    by_label: dict[str, int] = {}
    for entry in entries:
        by_label[entry.label] = by_label.get(entry.label, 0) + 1
    for label in sorted(by_label):
        print(f"{label}: {by_label[label]}")
    print(f"total: {len(entries)} -> {args.out}")
    return 0


def _cmd_replay(args) -> int:
    entries = read_corpus(args.corpus)
    report = replay(
        entries,
        proxy_addr=args.proxy,
        baseline_addr=args.baseline,
        concurrency=args.concurrency,
    )
    failed = False
    for label, score in sorted(report.per_label.items()):
        line = (f"{label}: {score.detected}/{score.expected}")
        if score.missed:
            line += f" missed={score.missed}"
            failed = True
        if score.false_positive:
            line += f" false_positive={score.false_positive}"
            failed = True
        print(line)
    if report.errored:
        failed = True
        print(f"errored: {len(report.errored)}")
    if report.latency_ms:
        print("latency_ms: mean={mean:.2f} p50={p50:.2f} p95={p95:.2f}".format(
            **report.latency_ms))
    if report.overhead_ms:
        print("overhead_ms (benign, vs baseline): mean={mean:.2f}".format(
            **report.overhead_ms))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
        print(f"report written to {args.out}")
    return 1 if failed else 0


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "mock-upstream":
        return _cmd_mock_upstream(args)
    if args.command == "make-corpus":
        return _cmd_make_corpus(args)
    if args.command == "replay":
        return _cmd_replay(args)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
