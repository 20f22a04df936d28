"""Deterministic English tokenizer/detokenizer plus the BLEU-side tokenizer.

Two tokenizers with different jobs:

* ``moses_tokenize`` / ``moses_detokenize`` follow a pinned subset of the
  classic Moses rules (English non-breaking prefixes, contraction splits,
  digit-internal separators kept). They are used for text normalization and
  diversity counting, and are designed so that joining tokens with single
  spaces and re-tokenizing is a fixed point.
* ``bleu_tokenize`` applies 13a-compatible rules right before BLEU scoring:
  punctuation is separated from words, digit-internal ``. , :`` are kept.

Slot placeholders like ``[name]`` are protected tokens everywhere: they
survive both tokenizers unchanged. Rule data (non-breaking prefixes,
protected patterns) ships in ``data/tokenizer_rules.json``.
"""

import json
import re
from importlib import resources

_RULES = json.loads(
    resources.files("todeval.data").joinpath("tokenizer_rules.json").read_text("utf-8")
)

PROTECTED_RES = [re.compile(p) for p in _RULES["protected_patterns"]]
NONBREAKING_PREFIXES = frozenset(_RULES["nonbreaking_prefixes"])
SOS_RES = [re.compile(p) for p in _RULES["start_of_sequence_patterns"]]

# Private-use sentinels, assumed absent from real input.
_PH_BASE = 0xE000
_IN_HYPHEN = ""
_IN_PERIOD = ""
_IN_COMMA = ""
_IN_COLON = ""

_ALNUM = "A-Za-z0-9À-ɏ"

_MULTIDOT_RE = re.compile(r"(\.{2,})")
_CONTRACTION_RE = re.compile(rf"([{_ALNUM}])'(?=[{_ALNUM}])")
_LONE_APOS_RE = re.compile(rf"'(?![{_ALNUM}])")
_IN_HYPHEN_RE = re.compile(rf"([{_ALNUM}])-(?=[{_ALNUM}])")
_IN_PERIOD_RE = re.compile(rf"([{_ALNUM}])\.(?=[{_ALNUM}])")
_IN_COMMA_RE = re.compile(r"(\d),(?=\d)")
_IN_COLON_RE = re.compile(r"(\d):(?=\d)")
_PREFIX_RE = re.compile(
    r"\b(" + "|".join(sorted(NONBREAKING_PREFIXES)) + r")\.(?=\s+\S)", re.IGNORECASE
)
# Everything else gets spaces around it; apostrophe/hyphen/period/comma/colon
# are handled by the dedicated rules above.
_PAD_RE = re.compile(rf"([^\s{_ALNUM}'\-.,:-])")

_RIGHT_ATTACH = {".", ",", "!", "?", ";", ":", "%", ")", "]", "}", "'", "…", "”"}
_LEFT_ATTACH = {"(", "[", "{", "£", "$", "€", "“"}
_CONTRACTION_TOKEN_RE = re.compile(rf"^'[{_ALNUM}]+$")


def _protect(text: str) -> tuple[str, list[str]]:
    saved: list[str] = []

    def stash(match: re.Match) -> str:
        saved.append(match.group(0))
        return chr(_PH_BASE + len(saved) - 1)

    for pattern in PROTECTED_RES:
        text = pattern.sub(stash, text)
    return text, saved


def _restore(token: str, saved: list[str]) -> str:
    def unstash(match: re.Match) -> str:
        idx = ord(match.group(0)) - _PH_BASE
        return saved[idx] if idx < len(saved) else match.group(0)

    return re.sub(r"[-]", unstash, token)


def moses_tokenize(text: str) -> list[str]:
    """Split text into tokens: punctuation separated, numbers/times/placeholders intact."""
    s, saved = _protect(text)
    s = _MULTIDOT_RE.sub(r" \1 ", s)
    s = _CONTRACTION_RE.sub(r"\1 '", s)
    s = _LONE_APOS_RE.sub(" ' ", s)
    s = _IN_HYPHEN_RE.sub(rf"\1{_IN_HYPHEN}", s)
    s = _IN_PERIOD_RE.sub(rf"\1{_IN_PERIOD}", s)
    s = _IN_COMMA_RE.sub(rf"\1{_IN_COMMA}", s)
    s = _IN_COLON_RE.sub(rf"\1{_IN_COLON}", s)
    s = _PREFIX_RE.sub(lambda m: m.group(1) + _IN_PERIOD, s)
    s = s.replace("-", " - ").replace(".", " . ").replace(",", " , ").replace(":", " : ")
    s = _PAD_RE.sub(r" \1 ", s)
    s = (
        s.replace(_IN_HYPHEN, "-")
        .replace(_IN_PERIOD, ".")
        .replace(_IN_COMMA, ",")
        .replace(_IN_COLON, ":")
    )
    return [_restore(tok, saved) for tok in s.split()]


def moses_detokenize(tokens: list[str]) -> str:
    """Join tokens back into surface text, reattaching punctuation."""
    out: list[str] = []
    quote_open = False
    glue_next = False
    for token in tokens:
        attach_left = bool(
            token in _RIGHT_ATTACH
            or _MULTIDOT_RE.fullmatch(token)
            or _CONTRACTION_TOKEN_RE.match(token)
        )
        if token == '"':
            attach_left = quote_open
            quote_open = not quote_open
        if out and (attach_left or glue_next):
            out[-1] += token
        else:
            out.append(token)
        glue_next = token in _LEFT_ATTACH or (token == '"' and quote_open)
    return " ".join(out)


def strip_sequence_tokens(text: str) -> str:
    """Remove decoder artifacts such as start-of-sequence markers."""
    for pattern in SOS_RES:
        text = pattern.sub(" ", text)
    return re.sub(r"\s+", " ", text).strip()


_B_PUNCT_RE = re.compile(r"([!-&(-+;-@\[-`{-~/])")
_B_NONDIGIT_DOT_RE = re.compile(r"([^0-9])([.,])")
_B_DOT_NONDIGIT_RE = re.compile(r"([.,])([^0-9])")
_B_DIGIT_DASH_RE = re.compile(r"([0-9])(-)")


def bleu_tokenize(text: str) -> list[str]:
    """13a-compatible tokenization for scoring; digit-internal ``. , :`` kept."""
    s, saved = _protect(text)
    s = s.replace("-\n", "").replace("\n", " ")
    s = (
        s.replace("&quot;", '"')
        .replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
    )
    s = _IN_COLON_RE.sub(rf"\1{_IN_COLON}", s)
    s = f" {s} "
    s = _B_PUNCT_RE.sub(r" \1 ", s)
    s = s.replace(":", " : ")
    s = _B_NONDIGIT_DOT_RE.sub(r"\1 \2 ", s)
    s = _B_DOT_NONDIGIT_RE.sub(r" \1 \2", s)
    s = _B_DIGIT_DASH_RE.sub(r"\1 \2 ", s)
    s = s.replace(_IN_COLON, ":")
    return [_restore(tok, saved) for tok in s.split()]
