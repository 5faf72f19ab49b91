"""Plain-text ingestion: Project Gutenberg boilerplate stripping, word
tokenization, and type counting.

The tokenizer rule is deliberately simple and fully documented so that every
downstream number is reproducible:

* a token is a maximal run of Unicode letters, with apostrophes allowed only
  between two letters ("don't" is one token, "don't!" drops the bang);
* curly apostrophes (U+2019) are normalized to the ASCII one;
* tokens are lowercased; no stemming ("work", "works", "worked" stay three
  distinct types);
* digits, underscores, hyphens and all other punctuation separate tokens, so
  numerals never produce tokens and hyphenated compounds split.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)

START_MARKER = "*** START OF"
END_MARKER = "*** END OF"

# Letter runs with internal apostrophes; [^\W\d_] is "word char minus digits
# and underscore", i.e. any Unicode letter.
_WORD_RE = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*")


@dataclass(frozen=True)
class RawText:
    """A text body plus a label (typically the Gutenberg book number)."""

    content: str
    source_id: str = ""


@dataclass(frozen=True)
class TokenStream:
    """Ordered sequence of normalized word tokens from one text."""

    tokens: tuple[str, ...]
    source_id: str = ""

    @property
    def length(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class TypeCensus:
    """Occurrence count per distinct type."""

    counts: dict[str, int]

    @property
    def num_types(self) -> int:
        return len(self.counts)

    @property
    def total_tokens(self) -> int:
        return sum(self.counts.values())


def read_raw_text(path: str | Path, source_id: str | None = None) -> RawText:
    """Load a UTF-8 text file; source_id defaults to the file stem."""
    path = Path(path)
    content = path.read_text(encoding="utf-8", errors="replace")
    return RawText(content=content, source_id=source_id or path.stem)


def has_gutenberg_markers(content: str) -> bool:
    """True when both the START and END boilerplate markers are present."""
    start = content.find(START_MARKER)
    return start >= 0 and content.find(END_MARKER, start) >= 0


def strip_gutenberg(raw: RawText) -> RawText:
    """Return the text strictly between the Gutenberg START/END marker lines.

    Texts without both markers pass through unchanged (a warning is logged),
    so non-Gutenberg files can be ingested with the same entry point.
    Raises ValueError("empty body") if stripping leaves nothing.
    """
    lines = raw.content.splitlines()
    start_idx = end_idx = None
    for i, line in enumerate(lines):
        if start_idx is None:
            if START_MARKER in line:
                start_idx = i
        elif END_MARKER in line:
            end_idx = i
            break
    if start_idx is None or end_idx is None:
        logger.warning("no boilerplate found in %r", raw.source_id)
        return raw
    body = "\n".join(lines[start_idx + 1 : end_idx])
    if not body.strip():
        raise ValueError("empty body")
    return RawText(content=body, source_id=raw.source_id)


def tokenize(raw: RawText) -> TokenStream:
    """Split a text into lowercase word tokens.

    The text is lowercased before extraction so every emitted token is
    itself a fixed point of the rule (some uppercase letters lower to
    letter + combining mark, which must act as a separator, not survive
    inside a token).  Raises ValueError("no tokens") when the text contains
    no word at all.
    """
    tokens = tuple(
        m.group(0).replace("’", "'")
        for m in _WORD_RE.finditer(raw.content.lower())
    )
    if not tokens:
        raise ValueError("no tokens")
    return TokenStream(tokens=tokens, source_id=raw.source_id)


def census(stream: TokenStream) -> TypeCensus:
    """Count occurrences of every type in the stream."""
    if stream.length == 0:
        raise ValueError("no tokens")
    return TypeCensus(counts=dict(Counter(stream.tokens)))
