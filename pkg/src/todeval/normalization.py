"""Response normalization over the unified slot ontology.

Takes a raw delexicalized system output in any supported style and produces
one canonical form: decoder artifacts removed, placeholder-attached suffixes
stripped, text lowercased, placeholders mapped to the unified vocabulary,
and the result passed through the tokenizer round trip so spacing and
punctuation are canonical.
"""

import re
from dataclasses import dataclass

from .ontology import SlotOntology, default_ontology
from .tokenizer import moses_detokenize, moses_tokenize, strip_sequence_tokens

# "-s"/"-ly" and bare "s"/"es" glued to a placeholder: "[value_name]s".
_PLACEHOLDER_SUFFIX_RE = re.compile(r"(?<=\])(?:-(?:s|ly)|es|s)\b")
# Free-standing "-s" / "-ly" fragments left over from sloppy delexicalization.
_DANGLING_SUFFIX_RE = re.compile(r"(?:(?<=\s)|^)-(?:s|ly)(?=\s|$)")
_UNIFIED_TOKEN_RE = re.compile(r"\[([a-z]+)\]")


@dataclass(frozen=True)
class NormalizedUtterance:
    """One normalized response plus its placeholder occurrences (in order)."""

    text: str
    placeholders: tuple[str, ...] = ()
    # Parallel to `placeholders`: the domain named by the raw placeholder
    # (e.g. "restaurant" for "[restaurant_address]"), or None.
    placeholder_domains: tuple[str | None, ...] = ()

    def placeholder_multiset(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for name in self.placeholders:
            counts[name] = counts.get(name, 0) + 1
        return counts


def normalize(
    raw: str, style: str, ontology: SlotOntology | None = None
) -> NormalizedUtterance:
    """Normalize one raw response written in the given delexicalization style.

    Deterministic; raises OntologyError when a placeholder name is not
    covered by the ontology (never drops it silently).
    """
    ontology = ontology or default_ontology()
    rules = ontology.style_rules(style)

    text = strip_sequence_tokens(raw)
    text = _PLACEHOLDER_SUFFIX_RE.sub("", text)
    text = _DANGLING_SUFFIX_RE.sub("", text)

    # Display-form placeholders (bare uppercase unified names, as used when
    # quoting normalized output) are folded into bracket syntax before the
    # lowercasing step erases their identity.
    for surface, unified in ontology.bare_display_placeholders(text):
        text = re.sub(rf"\b{surface}\b", f"[{unified.lower()}]", text)

    text = text.lower()

    found: list[tuple[str, str | None]] = []

    def _map(match: re.Match) -> str:
        unified, domain = ontology.resolve_placeholder(match.group(1), style)
        found.append((unified, domain))
        return f"[{unified.lower()}]"

    text = rules.placeholder_pattern.sub(_map, text)
    text = moses_detokenize(moses_tokenize(text))
    return NormalizedUtterance(
        text=text,
        placeholders=tuple(name for name, _ in found),
        placeholder_domains=tuple(domain for _, domain in found),
    )


def extract_placeholders(utterance: NormalizedUtterance) -> list[str]:
    """Unified placeholder occurrences, in order, duplicates retained."""
    return [m.group(1).upper() for m in _UNIFIED_TOKEN_RE.finditer(utterance.text)]
