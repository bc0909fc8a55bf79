"""Comment normalisation and tokenisation.

The rewrite rules run in a fixed order:

1. URLs become ``URL``
2. emoticons become ``EMO``
3. numbers (integers, decimals, fractions, clock times) become ``KNUMK``
4. any character repeated three or more times collapses to one
5. punctuation and symbols are split off as separate tokens
6. contractions are split: ``don't`` -> ``do n't``

The rule chain is applied until the text stops changing, so ``normalize``
is idempotent even when a later rule exposes a pattern an earlier rule
would have caught (``xDDD`` only becomes an emoticon after squeezing).
"""

import re
import unicodedata
from dataclasses import dataclass
from importlib import resources

SPECIAL_TOKENS = frozenset({"URL", "EMO", "KNUMK"})

_URL = re.compile(r"(?:\b(?:https?|ftp)://|\bwww\.)\S*?(?=[.,!?;:)\]}'\"]*(?:\s|$))", re.IGNORECASE)
_NUMBER = re.compile(r"[0-9]+(?:[.,:/][0-9]+)*")
_REPEAT = re.compile(r"(.)\1{2,}", re.DOTALL)
_CONTRACTION = re.compile(r"(?<=\w)(n't|'s|'re|'ve|'ll|'d|'m)(?!\w)", re.IGNORECASE)
_MAX_PASSES = 8
_ZWJ = "\u200d"


def _load_emoticons():
    text = resources.files(__package__).joinpath("data/emoticons.txt").read_text("utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def _emoticon_pattern(emoticons):
    parts = []
    for emo in sorted(set(emoticons), key=lambda e: (-len(e), e)):
        left = r"(?<!\w)" if (emo[0].isalnum() or emo[0] == "_") else r"(?<![0-9])"
        right = r"(?![A-Za-z])" if emo[-1].isalpha() else ""
        parts.append(left + re.escape(emo) + right)
    return re.compile("|".join(parts))


EMOTICONS = tuple(_load_emoticons())
_EMOTICON = _emoticon_pattern(EMOTICONS)


@dataclass(frozen=True)
class RawDocument:
    text: str
    label: int

    def __post_init__(self):
        if self.label < 1:
            raise ValueError(f"labels are 1-based, got {self.label}")


def _is_split_char(text, i):
    ch = text[i]
    cat = unicodedata.category(ch)
    if cat[0] not in "PS":
        return False
    nxt = text[i + 1] if i + 1 < len(text) else ""
    prv = text[i - 1] if i > 0 else ""
    if ch == "'" and (nxt.isalnum() or nxt == "_"):
        return False
    if ch == "-" and prv.isalnum() and nxt.isalnum():
        return False
    return True


def _split_punctuation(text):
    out = []
    i, n = 0, len(text)
    while i < n:
        if not _is_split_char(text, i):
            out.append(text[i])
            i += 1
            continue
        j = i + 1
        # keep variation selectors, combining marks and ZWJ sequences attached
        while j < n and (unicodedata.category(text[j]) in ("Mn", "Me") or text[j] == _ZWJ):
            j += 2 if (text[j] == _ZWJ and j + 1 < n) else 1
        out.append(f" {text[i:j]} ")
        i = j
    return "".join(out)


def _ascii_digits(text):
    # KNUMK must swallow every digit, including non-ASCII ones
    return "".join("0" if (ch.isdigit() and not "0" <= ch <= "9") else ch for ch in text)


def _one_pass(text):
    text = _URL.sub(" URL ", text)
    text = _EMOTICON.sub(" EMO ", text)
    text = _NUMBER.sub(" KNUMK ", _ascii_digits(text))
    text = _REPEAT.sub(r"\1", text)
    text = _split_punctuation(text)
    text = _CONTRACTION.sub(r" \1", text)
    return " ".join(text.split())


def normalize_text(text):
    text = text.replace("’", "'")
    for _ in range(_MAX_PASSES):
        new = _one_pass(text)
        if new == text:
            break
        text = new
    return text


def normalize(doc):
    """Apply the six rewrite rules to a :class:`RawDocument`."""
    return RawDocument(normalize_text(doc.text), doc.label)


def tokenize_text(text):
    return [tok if tok in SPECIAL_TOKENS else tok.lower() for tok in text.split()]


def tokenize(doc):
    """Whitespace tokens of a normalised document, lowercased except specials."""
    return tokenize_text(doc.text)
