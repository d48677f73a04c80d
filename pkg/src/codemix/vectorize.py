"""Dual word/character TF-IDF vectorization with two document-preparation modes.

A fitted model holds a word-level and a character-level vocabulary over the
same training documents; transforming a text concatenates the two blocks
(word indices first, then char indices offset by the word vocabulary size)
and L2-normalizes the result.  Weights use raw term counts and smoothed
inverse document frequency ln((1 + N) / (1 + df)) + 1.
"""

import math
import re
from collections.abc import Iterable, Sequence
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .corpus import Dataset, Sentiment
from .errors import ConfigError, DataError

FORMAT_VERSION = "tfidf v1"


class DocMode(Enum):
    """How training text is grouped into documents before fitting."""

    PER_CLASS_CONCATENATED = "per_class_concatenated"
    ALL_DOCUMENTS = "all_documents"

    @property
    def display_label(self) -> str:
        if self is DocMode.PER_CLASS_CONCATENATED:
            return "concatenated docs per class"
        return "all documents"

    @classmethod
    def from_value(cls, value: str) -> "DocMode":
        try:
            return cls(value)
        except ValueError:
            raise ConfigError(f"unknown doc mode {value!r}") from None


class AnalyzerKind(Enum):
    WORD = "word"
    CHAR = "char"


_WORD_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class Analyzer:
    """N-gram extractor.  Word analyzers lowercase and split on runs of
    non-alphanumeric characters; char analyzers take raw-string n-grams
    (spaces included) of the lowercased text."""

    kind: AnalyzerKind
    ngram_min: int = 1
    ngram_max: int = 1

    def __post_init__(self):
        if not (1 <= self.ngram_min <= self.ngram_max <= 8):
            raise ConfigError("analyzer n-gram range must satisfy 1 <= min <= max <= 8")

    def terms(self, text: str) -> list[str]:
        lowered = text.lower()
        grams: list[str] = []
        if self.kind is AnalyzerKind.WORD:
            tokens = _WORD_TOKEN_RE.findall(lowered)
            for n in range(self.ngram_min, self.ngram_max + 1):
                grams.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
        else:
            for n in range(self.ngram_min, self.ngram_max + 1):
                grams.extend(lowered[i : i + n] for i in range(len(lowered) - n + 1))
        return grams


DEFAULT_WORD_ANALYZER = Analyzer(AnalyzerKind.WORD, 1, 1)
DEFAULT_CHAR_ANALYZER = Analyzer(AnalyzerKind.CHAR, 2, 5)


@dataclass(frozen=True)
class Vocabulary:
    """Term -> dense feature index plus document frequencies."""

    term_index: dict[str, int]
    document_frequency: dict[str, int]
    n_documents: int

    def __len__(self) -> int:
        return len(self.term_index)


@dataclass(frozen=True)
class SparseVector:
    """Strictly index-sorted sparse vector; zero weights are never stored."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]
    dim: int

    def __post_init__(self):
        if len(self.indices) != len(self.weights):
            raise ValueError("indices and weights must have equal length")
        if any(w == 0.0 for w in self.weights):
            raise ValueError("zero weights may not be stored")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if self.indices and not (0 <= self.indices[0] and self.indices[-1] < self.dim):
            raise ValueError("indices must lie in [0, dim)")


@dataclass(frozen=True)
class TfIdfModel:
    word_vocab: Vocabulary
    char_vocab: Vocabulary
    word_analyzer: Analyzer
    char_analyzer: Analyzer
    mode: DocMode

    def __post_init__(self):
        if self.word_analyzer.kind is not AnalyzerKind.WORD:
            raise ConfigError("word_analyzer must have kind WORD")
        if self.char_analyzer.kind is not AnalyzerKind.CHAR:
            raise ConfigError("char_analyzer must have kind CHAR")

    @property
    def dim(self) -> int:
        return len(self.word_vocab) + len(self.char_vocab)


def prepare_documents(dataset: Dataset, mode: DocMode, preprocessed: Sequence[str]) -> list[str]:
    """Group preprocessed tweet texts into TF-IDF input documents.

    ALL_DOCUMENTS keeps one document per tweet; PER_CLASS_CONCATENATED
    space-joins each class's tweets into exactly three documents ordered
    negative, neutral, positive.
    """
    texts = list(preprocessed)
    if len(texts) != len(dataset):
        raise DataError(
            f"got {len(texts)} preprocessed texts for {len(dataset)} tweets in {dataset.name!r}"
        )
    if mode is DocMode.ALL_DOCUMENTS:
        return texts
    buckets: dict[Sentiment, list[str]] = {sentiment: [] for sentiment in Sentiment}
    for tweet, text in zip(dataset, texts):
        if tweet.sentiment is None:
            raise DataError(f"tweet {tweet.id!r} is unlabeled; per-class concatenation needs labels")
        buckets[tweet.sentiment].append(text)
    return [" ".join(buckets[sentiment]) for sentiment in Sentiment]


def fit_vocabulary(docs: Iterable[str], analyzer: Analyzer) -> Vocabulary:
    """Count document frequencies and assign indices in lexicographic term order."""
    docs = list(docs)
    if not docs:
        raise DataError("cannot fit a vocabulary on an empty document list")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(analyzer.terms(doc)))
    term_index = {term: index for index, term in enumerate(sorted(df))}
    return Vocabulary(term_index=term_index, document_frequency=dict(df), n_documents=len(docs))


def fit_tfidf(
    docs: Iterable[str],
    mode: DocMode,
    word_analyzer: Analyzer = DEFAULT_WORD_ANALYZER,
    char_analyzer: Analyzer = DEFAULT_CHAR_ANALYZER,
) -> TfIdfModel:
    """Fit the word and char vocabularies on the same documents."""
    docs = list(docs)
    return TfIdfModel(
        word_vocab=fit_vocabulary(docs, word_analyzer),
        char_vocab=fit_vocabulary(docs, char_analyzer),
        word_analyzer=word_analyzer,
        char_analyzer=char_analyzer,
        mode=mode,
    )


def _idf(vocab: Vocabulary, term: str) -> float:
    return math.log((1 + vocab.n_documents) / (1 + vocab.document_frequency[term])) + 1.0


def _accumulate(entries: dict[int, float], vocab: Vocabulary, analyzer: Analyzer, text: str, offset: int) -> None:
    for term, tf in Counter(analyzer.terms(text)).items():
        index = vocab.term_index.get(term)
        if index is not None:
            entries[offset + index] = tf * _idf(vocab, term)


def transform(model: TfIdfModel, text: str) -> SparseVector:
    """TF-IDF vector of a single text; out-of-vocabulary terms are ignored."""
    entries: dict[int, float] = {}
    _accumulate(entries, model.word_vocab, model.word_analyzer, text, offset=0)
    _accumulate(entries, model.char_vocab, model.char_analyzer, text, offset=len(model.word_vocab))
    items = sorted(entries.items())
    norm = math.sqrt(sum(weight * weight for _, weight in items))
    if norm == 0.0:
        return SparseVector(indices=(), weights=(), dim=model.dim)
    return SparseVector(
        indices=tuple(index for index, _ in items),
        weights=tuple(weight / norm for _, weight in items),
        dim=model.dim,
    )


def transform_batch(model: TfIdfModel, texts: Iterable[str]) -> list[SparseVector]:
    return [transform(model, text) for text in texts]


def _escape_term(term: str) -> str:
    return (
        term.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")
    )


def _unescape_term(escaped: str) -> str:
    out = []
    chars = iter(escaped)
    for ch in chars:
        if ch != "\\":
            out.append(ch)
            continue
        escape = next(chars, None)
        mapped = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(escape or "")
        if mapped is None:
            raise DataError(f"invalid escape sequence in term {escaped!r}")
        out.append(mapped)
    return "".join(out)


def _format_ngrams(analyzer: Analyzer) -> str:
    return f"{analyzer.ngram_min}-{analyzer.ngram_max}"


def _parse_ngrams(field: str, kind: AnalyzerKind) -> Analyzer:
    try:
        low, high = field.split("-", 1)
        return Analyzer(kind, int(low), int(high))
    except (ValueError, ConfigError):
        raise DataError(f"invalid n-gram range field {field!r}") from None


def format_tfidf(model: TfIdfModel) -> str:
    """Versioned text serialization; load_tfidf/parse_tfidf invert it."""
    lines = [
        f"{FORMAT_VERSION} {model.mode.value} {_format_ngrams(model.word_analyzer)}"
        f" {_format_ngrams(model.char_analyzer)}"
        f" {model.word_vocab.n_documents} {model.char_vocab.n_documents}"
    ]
    for block, vocab in (("w", model.word_vocab), ("c", model.char_vocab)):
        for term, index in sorted(vocab.term_index.items(), key=lambda item: item[1]):
            lines.append(f"{block}\t{_escape_term(term)}\t{index}\t{vocab.document_frequency[term]}")
    return "\n".join(lines) + "\n"


def parse_tfidf(text: str) -> TfIdfModel:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(FORMAT_VERSION + " "):
        raise DataError("not a tfidf v1 file")
    fields = lines[0].split(" ")
    if len(fields) != 7:
        raise DataError(f"malformed tfidf header {lines[0]!r}")
    try:
        mode = DocMode(fields[2])
    except ValueError:
        raise DataError(f"unknown doc mode {fields[2]!r}") from None
    word_analyzer = _parse_ngrams(fields[3], AnalyzerKind.WORD)
    char_analyzer = _parse_ngrams(fields[4], AnalyzerKind.CHAR)
    try:
        n_docs = {"w": int(fields[5]), "c": int(fields[6])}
    except ValueError:
        raise DataError(f"malformed tfidf header {lines[0]!r}") from None
    if any(n < 1 for n in n_docs.values()):
        raise DataError("tfidf document counts must be >= 1")

    term_index: dict[str, dict[str, int]] = {"w": {}, "c": {}}
    doc_freq: dict[str, dict[str, int]] = {"w": {}, "c": {}}
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 4 or parts[0] not in ("w", "c"):
            raise DataError(f"malformed tfidf term line {line_no}")
        block, escaped, index, df = parts
        term = _unescape_term(escaped)
        try:
            term_index[block][term] = int(index)
            doc_freq[block][term] = int(df)
        except ValueError:
            raise DataError(f"malformed tfidf term line {line_no}") from None

    def build(block: str) -> Vocabulary:
        indices = sorted(term_index[block].values())
        if indices != list(range(len(indices))):
            raise DataError(f"tfidf {block} block indices are not a dense 0-based range")
        if any(not (1 <= df <= n_docs[block]) for df in doc_freq[block].values()):
            raise DataError(f"tfidf {block} block has document frequencies outside [1, n_documents]")
        return Vocabulary(
            term_index=term_index[block],
            document_frequency=doc_freq[block],
            n_documents=n_docs[block],
        )

    return TfIdfModel(
        word_vocab=build("w"),
        char_vocab=build("c"),
        word_analyzer=word_analyzer,
        char_analyzer=char_analyzer,
        mode=mode,
    )


def save_tfidf(model: TfIdfModel, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_tfidf(model))


def load_tfidf(path: str) -> TfIdfModel:
    with open(path, encoding="utf-8", newline="") as handle:
        return parse_tfidf(handle.read())
