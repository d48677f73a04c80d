"""Tweet text normalization.

Six rules, each individually toggleable, applied in a fixed order:
emoticon/emoji replacement, mention removal, URL replacement, elongation
collapsing, hashtag segmentation, non-ASCII removal.  Non-ASCII removal
runs last so emoji are textualized before they could be stripped.  Every
rule returns single-space-separated text with no leading or trailing
whitespace, which makes each rule (and the whole pipeline) idempotent.
"""

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from importlib import resources

from .errors import ConfigError

_LEXICON_RESOURCE = "data/emoticons.tsv"
_default_lexicon_cache = None


def _squash(text: str) -> str:
    return " ".join(text.split())


class EmojiLexicon:
    """Maps emoji and ASCII emoticons to textual names, longest match first."""

    def __init__(self, entries: Mapping[str, str]):
        for key, value in entries.items():
            if not key:
                raise ConfigError("emoji lexicon keys must be non-empty")
            if not value:
                raise ConfigError(f"emoji lexicon entry {key!r} has an empty name")
        self._entries = dict(entries)
        # Bucket keys by first character, longest first, so matching at a
        # position only scans candidates that can actually start there.
        self._by_first: dict[str, list[str]] = {}
        for key in sorted(self._entries, key=len, reverse=True):
            self._by_first.setdefault(key[0], []).append(key)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def name_of(self, key: str) -> str:
        return self._entries[key]

    def match_at(self, text: str, pos: int) -> str | None:
        """Longest lexicon key matching at text[pos], or None."""
        for key in self._by_first.get(text[pos], ()):
            if text.startswith(key, pos):
                return key
        return None

    @classmethod
    def from_lines(cls, lines: Iterable[str], origin: str = "<lexicon>") -> "EmojiLexicon":
        entries: dict[str, str] = {}
        for line_no, raw in enumerate(lines, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            key, sep, value = line.partition("\t")
            if not sep or not key or not value:
                raise ConfigError(f"{origin}: line {line_no}: expected 'key<TAB>name'")
            if key in entries and entries[key] != value:
                raise ConfigError(f"{origin}: line {line_no}: conflicting duplicate key {key!r}")
            entries[key] = value
        return cls(entries)

    @classmethod
    def from_file(cls, path: str) -> "EmojiLexicon":
        with open(path, encoding="utf-8") as handle:
            return cls.from_lines(handle, origin=str(path))


def default_lexicon() -> EmojiLexicon:
    """The bundled lexicon: CLDR-style emoji names plus ASCII emoticons."""
    global _default_lexicon_cache
    if _default_lexicon_cache is None:
        text = resources.files(__package__).joinpath(_LEXICON_RESOURCE).read_text("utf-8")
        _default_lexicon_cache = EmojiLexicon.from_lines(text.splitlines(), origin=_LEXICON_RESOURCE)
    return _default_lexicon_cache


@dataclass(frozen=True)
class PipelineConfig:
    replace_emoji: bool = True
    remove_mentions: bool = True
    replace_urls: bool = True
    collapse_elongation: bool = True
    segment_hashtags: bool = True
    remove_non_ascii: bool = True
    elongation_min_run: int = 3

    def __post_init__(self):
        if self.elongation_min_run < 2:
            raise ConfigError("elongation_min_run must be >= 2")

    @classmethod
    def identity(cls) -> "PipelineConfig":
        """All rules off; running the pipeline only normalizes whitespace."""
        return cls(
            replace_emoji=False,
            remove_mentions=False,
            replace_urls=False,
            collapse_elongation=False,
            segment_hashtags=False,
            remove_non_ascii=False,
        )


def replace_emoji(text: str, lexicon: EmojiLexicon) -> str:
    """Replace every lexicon match with its textual name, longest match first."""
    out = []
    pos = 0
    while pos < len(text):
        key = lexicon.match_at(text, pos)
        if key is None:
            out.append(text[pos])
            pos += 1
        else:
            out.append(f" {lexicon.name_of(key)} ")
            pos += len(key)
    return _squash("".join(out))


def remove_mentions(text: str) -> str:
    """Drop every whitespace-delimited token that starts with '@'."""
    return " ".join(token for token in text.split() if not token.startswith("@"))


def remove_non_ascii(text: str) -> str:
    """Delete every codepoint above 0x7F."""
    return _squash("".join(ch for ch in text if ord(ch) <= 0x7F))


# URL-shaped tokens: explicit scheme, www. prefix, or bare domain ending in
# one of a small closed set of TLDs (optionally followed by a path or query).
_TLDS = ("com", "net", "org", "edu", "gov", "mil", "io", "co", "es", "uk")
_LABEL = r"[a-z0-9](?:[a-z0-9-]*[a-z0-9])?"
_URL_RE = re.compile(
    r"[a-z][a-z0-9+.-]*://\S*"
    r"|www\.\S+"
    r"|(?:{label}\.)+(?:{tlds})(?:[/?]\S*)?".format(label=_LABEL, tlds="|".join(_TLDS)),
    re.IGNORECASE,
)


def replace_urls(text: str) -> str:
    """Replace every URL-shaped token with the literal token URL."""
    return " ".join("URL" if _URL_RE.fullmatch(token) else token for token in text.split())


def collapse_elongation(text: str, min_run: int = 3) -> str:
    """Reduce runs of >= min_run identical letters to a single letter.

    Runs are matched case-insensitively and keep the first letter's case;
    digits and punctuation are never collapsed.
    """
    if min_run < 2:
        raise ConfigError("min_run must be >= 2")
    out = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        end = pos + 1
        if ch.isalpha():
            while end < len(text) and text[end].lower() == ch.lower():
                end += 1
        out.append(ch if end - pos >= min_run else text[pos:end])
        pos = end
    return _squash("".join(out))


_HASHTAG_BOUNDARY = re.compile(
    r"(?<=[a-z])(?=[A-Z])"  # lowercase -> uppercase
    r"|(?<=[A-Za-z])(?=[0-9])"  # letter -> digit
    r"|(?<=[0-9])(?=[A-Za-z])"  # digit -> letter
)
_HASHTAG_BODY_RE = re.compile(r"\w+", re.UNICODE)


def _split_hashtag_body(body: str) -> str:
    pieces = []
    for chunk in body.split("_"):
        if chunk:
            pieces.extend(piece for piece in _HASHTAG_BOUNDARY.split(chunk) if piece)
    return " ".join(pieces)


def segment_hashtags(text: str) -> str:
    """Strip leading '#'s and split hashtag bodies at case, digit and '_' boundaries.

    Only word-character bodies are segmented; a '#' token whose body holds
    other punctuation is left alone, so segmentation never resurfaces
    mention- or URL-shaped tokens after those rules already ran.
    """
    out = []
    for token in text.split():
        if token.startswith("#"):
            body = token.lstrip("#")
            if not body:
                continue
            if not _HASHTAG_BODY_RE.fullmatch(body):
                out.append(token)
                continue
            segmented = _split_hashtag_body(body)
            if segmented:
                out.append(segmented)
        else:
            out.append(token)
    return " ".join(out)


def _pipeline_pass(text: str, config: PipelineConfig, lexicon: EmojiLexicon | None) -> str:
    if config.replace_emoji:
        text = replace_emoji(text, lexicon if lexicon is not None else default_lexicon())
    if config.remove_mentions:
        text = remove_mentions(text)
    if config.replace_urls:
        text = replace_urls(text)
    if config.collapse_elongation:
        text = collapse_elongation(text, config.elongation_min_run)
    if config.segment_hashtags:
        text = segment_hashtags(text)
    if config.remove_non_ascii:
        text = remove_non_ascii(text)
    return _squash(text)


def run_pipeline(text: str, config: PipelineConfig, lexicon: EmojiLexicon | None = None) -> str:
    """Apply the enabled rules, in the fixed pipeline order, until stable.

    A single ordered pass can expose material for rules that already ran
    (stripping a non-ASCII character may uncover a mention, removing a
    mention may join the halves of an emoticon), so the pass repeats until
    a fixed point: the pipeline is a projection.  Each pass only consumes
    finite, never-recreated material (non-ASCII codepoints, lexicon
    matches, '@'/'#'/URL tokens, letter runs), so the bound below is never
    reached in practice.
    """
    previous = None
    current = _squash(text)
    for _ in range(max(8, len(current))):
        if current == previous:
            break
        previous = current
        current = _pipeline_pass(current, config, lexicon)
    return current
