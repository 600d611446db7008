"""Evaluation rig: mock upstream app, labeled corpus, replay driver."""

from .corpus import CorpusEntry, generate_corpus, read_corpus, write_corpus
from .mock_upstream import MockUpstream, load_credentials
from .replay import ReplayReport, replay

__all__ = [
    "CorpusEntry",
    "generate_corpus",
    "read_corpus",
    "write_corpus",
    "MockUpstream",
    "load_credentials",
    "ReplayReport",
    "replay",
]
