"""Condescension dictionary: calibration, multi-pattern matching, corpus filtering.

The matcher is an Aho-Corasick automaton so a whole lexicon is matched in
a single pass per document; this is what makes filtering a >1.4M-line
corpus practical.  Matching semantics differ by language:

  * EN: case-insensitive, on word boundaries (a boundary is a transition
    between alphanumeric and non-alphanumeric characters, or the text
    edge).
  * ZH: exact substring, no boundary condition (Chinese has no word
    delimiters).

Reported spans are byte offsets into the UTF-8 encoding of the text and
always fall on UTF-8 character boundaries.

Corpus filtering retains every matching document and an independent,
seeded fraction of the non-matching ones.  The per-document keep/drop
draw is a keyed hash of (seed, doc id), so the decision for one document
never depends on corpus order and the whole operation is reproducible.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .model import Document, Language, ValidationError


@dataclass(frozen=True)
class LexiconEntry:
    term: str
    confidence: float
    relevant: bool = False

    def __post_init__(self):
        if not self.term:
            raise ValidationError("lexicon term must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(
                f"term {self.term!r}: confidence {self.confidence} outside [0,1]"
            )


@dataclass(frozen=True)
class Lexicon:
    language: Language
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for e in self.entries:
            key = e.term.casefold() if self.language is Language.EN else e.term
            if key in seen:
                raise ValidationError(f"duplicate lexicon term {e.term!r}")
            seen.add(key)

    @property
    def relevant_entries(self) -> tuple:
        return tuple(e for e in self.entries if e.relevant)

    def confidence_of(self, term: str) -> float:
        key = term.casefold() if self.language is Language.EN else term
        for e in self.entries:
            ekey = e.term.casefold() if self.language is Language.EN else e.term
            if ekey == key:
                return e.confidence
        raise KeyError(term)


def calibrate(
    raw_terms: Sequence[dict],
    decisions: Sequence[dict],
    language: Language = Language.EN,
) -> Lexicon:
    """Apply proofreader relevance decisions to a raw term list.

    Terms with no decision default to relevant=False (conservative); a
    decision naming an unknown term is an error.
    """
    entries = {}
    for raw in raw_terms:
        e = LexiconEntry(term=raw["term"], confidence=float(raw["confidence"]))
        key = e.term.casefold() if language is Language.EN else e.term
        if key in entries:
            raise ValidationError(f"duplicate raw term {e.term!r}")
        entries[key] = e
    for dec in decisions:
        key = dec["term"].casefold() if language is Language.EN else dec["term"]
        if key not in entries:
            raise ValidationError(f"decision for unknown term {dec['term']!r}")
        old = entries[key]
        entries[key] = LexiconEntry(old.term, old.confidence, bool(dec["relevant"]))
    return Lexicon(language=language, entries=tuple(entries.values()))


def load_lexicon(path, language: Language) -> Lexicon:
    """Read ``term<TAB>confidence<TAB>relevant`` lines."""
    entries = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValidationError(f"{path}: line {lineno}: expected 3 fields")
            term, conf, rel = parts
            entries.append(LexiconEntry(term, float(conf), rel.lower() in ("true", "1")))
    return Lexicon(language=language, entries=tuple(entries))


def save_lexicon(lexicon: Lexicon, path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for e in lexicon.entries:
            fh.write(f"{e.term}\t{e.confidence}\t{str(e.relevant).lower()}\n")


# --------------------------------------------------------------------------
# Aho-Corasick matcher
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Match:
    term: str
    start: int  # byte offset (UTF-8)
    end: int


class _ACNode:
    __slots__ = ("children", "fail", "output")

    def __init__(self):
        self.children: dict = {}
        self.fail: Optional["_ACNode"] = None
        self.output: list = []


class AhoCorasick:
    """Multi-pattern automaton over characters.

    Build the goto trie, then compute failure links breadth-first; each
    node's output is its own patterns plus everything reachable along
    its failure chain.  ``search`` yields (pattern, char_start, char_end)
    for every occurrence.
    """

    def __init__(self, patterns: Iterable[str]):
        self._root = _ACNode()
        for p in patterns:
            node = self._root
            for ch in p:
                node = node.children.setdefault(ch, _ACNode())
            node.output.append(p)
        self._build_failure_links()

    def _build_failure_links(self):
        queue = deque()
        for child in self._root.children.values():
            child.fail = self._root
            queue.append(child)
        while queue:
            node = queue.popleft()
            for ch, child in node.children.items():
                fail = node.fail
                while fail is not None and ch not in fail.children:
                    fail = fail.fail
                child.fail = fail.children[ch] if fail and ch in fail.children else self._root
                if child.fail is child:
                    child.fail = self._root
                child.output = child.output + child.fail.output
                queue.append(child)

    def search(self, text: str):
        node = self._root
        for i, ch in enumerate(text):
            while node is not self._root and ch not in node.children:
                node = node.fail
            node = node.children.get(ch, self._root)
            for pattern in node.output:
                yield pattern, i - len(pattern) + 1, i + 1


def _lower_keep_length(text: str) -> str:
    # Per-character lowercasing; the rare character whose lowercase form
    # has a different length is kept as-is so spans stay aligned.
    out = []
    for ch in text:
        low = ch.lower()
        out.append(low if len(low) == 1 else ch)
    return "".join(out)


def _en_boundary_ok(text: str, start: int, end: int) -> bool:
    if start > 0 and text[start - 1].isalnum() and text[start].isalnum():
        return False
    if end < len(text) and text[end].isalnum() and text[end - 1].isalnum():
        return False
    return True


def match_terms(text: str, lexicon: Lexicon) -> list:
    """All occurrences of every relevant lexicon term, ordered by span start."""
    relevant = lexicon.relevant_entries
    if not relevant:
        return []
    en = lexicon.language is Language.EN
    haystack = _lower_keep_length(text) if en else text
    patterns = {}
    for e in relevant:
        key = _lower_keep_length(e.term) if en else e.term
        patterns[key] = e.term
    automaton = _automaton_for(lexicon, tuple(patterns))
    byte_off = _byte_offsets(text)
    matches = []
    for pat, cs, ce in automaton.search(haystack):
        if en and not _en_boundary_ok(haystack, cs, ce):
            continue
        matches.append(Match(term=patterns[pat], start=byte_off[cs], end=byte_off[ce]))
    matches.sort(key=lambda m: (m.start, m.end, m.term))
    return matches


_AUTOMATON_CACHE: dict = {}


def _automaton_for(lexicon: Lexicon, patterns: tuple) -> AhoCorasick:
    key = (id(lexicon), patterns)
    auto = _AUTOMATON_CACHE.get(key)
    if auto is None:
        _AUTOMATON_CACHE.clear()  # one live lexicon at a time is the common case
        auto = AhoCorasick(patterns)
        _AUTOMATON_CACHE[key] = auto
    return auto


def _byte_offsets(text: str) -> list:
    offs = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offs.append(total)
    return offs


# --------------------------------------------------------------------------
# Pre-training corpus filtering
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FilterStats:
    input_count: int
    matched_count: int
    nonmatched_count: int
    retained_nonmatched_count: int
    output_count: int
    keep_prob: float
    seed: int

    def __post_init__(self):
        if self.output_count != self.matched_count + self.retained_nonmatched_count:
            raise ValidationError("filter stats: output != matched + retained")
        if self.input_count != self.matched_count + self.nonmatched_count:
            raise ValidationError("filter stats: input != matched + nonmatched")


def keep_draw(seed: int, doc_id: str) -> float:
    """Uniform [0,1) draw keyed by (seed, doc id); order-independent."""
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    digest = hashlib.blake2b(doc_id.encode("utf-8"), key=key, digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2**64


def filter_pretrain_corpus(
    docs: Sequence[Document],
    lexicon: Lexicon,
    keep_prob: float = 0.30,
    seed: int = 0,
) -> tuple:
    """Retain every matching doc plus a seeded keep_prob sample of the rest."""
    if not 0.0 <= keep_prob <= 1.0:
        raise ValidationError(f"keep_prob {keep_prob} outside [0,1]")
    retained = []
    matched = nonmatched = kept_nonmatched = 0
    for doc in docs:
        if match_terms(doc.text, lexicon):
            matched += 1
            retained.append(doc)
        else:
            nonmatched += 1
            if keep_draw(seed, doc.id) < keep_prob:
                kept_nonmatched += 1
                retained.append(doc)
    stats = FilterStats(
        input_count=len(docs),
        matched_count=matched,
        nonmatched_count=nonmatched,
        retained_nonmatched_count=kept_nonmatched,
        output_count=len(retained),
        keep_prob=keep_prob,
        seed=seed,
    )
    return retained, stats
