"""Shared fixtures and the acceptance-suite result banner."""

from __future__ import annotations

import os
from pathlib import Path

import pytest

from heapsq import corpus

BOOKS_ENV = "HEAPSQ_BOOKS"

#: Gutenberg ebook numbers of the 20-book suite (see scripts/fetch_books.py)
BOOK_IDS = (
    59, 11, 1524, 16328, 2130, 64317, 84, 57493, 1342, 10615,
    1228, 345, 3207, 2701, 4300, 145, 1023, 996, 3300, 2600,
)

_ACCEPTANCE_FILE = "test_acceptance.py"


def books_dir() -> Path:
    default = Path(__file__).resolve().parent.parent / "data" / "books"
    return Path(os.environ.get(BOOKS_ENV, default))


def book_path(book_id: int) -> Path:
    return books_dir() / f"{book_id}.txt"


def load_book_stream(book_id: int) -> corpus.TokenStream:
    path = book_path(book_id)
    raw = corpus.strip_gutenberg(corpus.read_raw_text(path, source_id=str(book_id)))
    return corpus.tokenize(raw)


@pytest.fixture(scope="session")
def war_and_peace_stream() -> corpus.TokenStream:
    if not book_path(2600).exists():
        pytest.skip(
            "Gutenberg ebook #2600 not cached locally; run scripts/fetch_books.py"
        )
    return load_book_stream(2600)


@pytest.fixture(scope="session")
def all_book_streams() -> dict[int, corpus.TokenStream]:
    missing = [b for b in BOOK_IDS if not book_path(b).exists()]
    if missing:
        pytest.skip(
            f"{len(missing)} of 20 books not cached locally; run scripts/fetch_books.py"
        )
    return {b: load_book_stream(b) for b in BOOK_IDS}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL/SKIP line per acceptance criterion."""
    rows = {}
    for outcome in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if _ACCEPTANCE_FILE not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            label = {"passed": "PASS", "failed": "FAIL", "error": "FAIL", "skipped": "SKIP"}[outcome]
            rows[name] = label
    if rows:
        terminalreporter.section("acceptance criteria")
        for name in sorted(rows):
            terminalreporter.write_line(f"{rows[name]:<5} {name}")
