"""Unified slot ontology.

All five delexicalization styles (plus the span-based one) name their
placeholders differently; this module maps every observed placeholder name
onto one vocabulary of 18 unified names. The mapping table ships as a
versioned data file and is part of the external contract; pass a custom
path to evaluate against a different ontology.
"""

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import OntologyError, ParseError

STYLES = ("hdsa", "damd", "augpt", "uniconv", "lava", "mwz22")

# Display form used in the project's own normalized output: bare uppercase
# unified names ("NAME is in the AREA"). Recognized in any style.
_BARE_UPPER_RE = re.compile(r"\b([A-Z][A-Z_]{1,})\b")


def _squash(key: str) -> str:
    """Normalize a slot key from goals/states/databases: 'arriveBy' -> 'arriveby'."""
    return re.sub(r"[\s_\-']+", "", key.strip().lower())


@dataclass(frozen=True)
class StyleRules:
    name: str
    placeholder_pattern: re.Pattern
    strip_prefixes: bool
    overrides: dict[str, str] = field(default_factory=dict)


class SlotOntology:
    """Mapping from style-specific placeholder names to the unified vocabulary."""

    def __init__(self, spec: dict):
        self.format_version = spec.get("format_version", 1)
        self.unified = tuple(spec["unified_placeholders"])
        self.requestables = frozenset(spec["requestable_placeholders"])
        self.domains = tuple(spec["domains"])
        self.databased_domains = tuple(spec["databased_domains"])
        self._slot_names = {k.lower(): v for k, v in spec["slot_names"].items()}
        self._domain_prefixes = tuple(spec["domain_prefixes"])
        self.database_slots = {d: tuple(s) for d, s in spec["database_slots"].items()}
        self.ignored_state_slots = {
            d: frozenset(s) for d, s in spec["ignored_state_slots"].items()
        }
        self.time_window_slots = {
            d: dict(s) for d, s in spec.get("time_window_slots", {}).items()
        }
        self.styles: dict[str, StyleRules] = {}
        for name, cfg in spec["styles"].items():
            self.styles[name] = StyleRules(
                name=name,
                placeholder_pattern=re.compile(cfg["placeholder_pattern"]),
                strip_prefixes=bool(cfg.get("strip_prefixes", True)),
                overrides={k.lower(): v for k, v in cfg.get("overrides", {}).items()},
            )
        unknown = set(self._slot_names.values()) - set(self.unified)
        if unknown:
            raise OntologyError(f"slot_names map onto undeclared placeholders: {sorted(unknown)}")

    @classmethod
    def load(cls, path: str | Path | None = None) -> "SlotOntology":
        """Load the bundled ontology, or a replacement file given its path."""
        if path is None:
            text = resources.files("todeval.data").joinpath("slot_ontology.json").read_text("utf-8")
            source = "<bundled slot_ontology.json>"
        else:
            source = str(path)
            text = Path(path).read_text("utf-8")
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid ontology file: {exc.msg}", path=source,
                             location=f"line {exc.lineno}") from exc
        return cls(spec)

    def style_rules(self, style: str) -> StyleRules:
        key = style.lower()
        if key not in self.styles:
            raise OntologyError(
                f"unknown delexicalization style {style!r}; known: {sorted(self.styles)}"
            )
        return self.styles[key]

    def resolve_placeholder(self, source: str, style: str) -> tuple[str, str | None]:
        """Map one style-specific placeholder name to (unified name, domain hint).

        The domain hint is set when the placeholder carries a real domain
        prefix (e.g. 'restaurant_address' -> ('ADDRESS', 'restaurant')).
        Raises OntologyError for names outside the ontology.
        """
        rules = self.style_rules(style)
        name = source.lower()
        if name in rules.overrides:
            return rules.overrides[name], None
        domain_hint = None
        base = name
        if rules.strip_prefixes and "_" in name:
            prefix, rest = name.split("_", 1)
            if prefix in self._domain_prefixes and rest:
                base = rest
                if prefix in self.domains:
                    domain_hint = prefix
        unified = self._slot_names.get(base) or self._slot_names.get(base.replace("_", ""))
        if unified is None and name in {u.lower() for u in self.unified}:
            # already-unified name (round-tripping our own output)
            return name.upper(), domain_hint
        if unified is None:
            raise OntologyError(
                f"placeholder [{source}] (style {style!r}) is not covered by the slot ontology"
            )
        return unified, domain_hint

    def bare_display_placeholders(self, text: str) -> list[tuple[str, str]]:
        """Find bare uppercase unified names used as display-form placeholders.

        Returns (surface, unified) pairs, e.g. ('NAME', 'NAME').
        """
        hits = []
        unified = set(self.unified)
        for match in _BARE_UPPER_RE.finditer(text):
            if match.group(1) in unified:
                hits.append((match.group(1), match.group(1)))
        return hits

    def requested_to_unified(self, name: str) -> str | None:
        """Map a goal's requested-slot name to a unified requestable, or None.

        Returns None when the name is known but not trackable in
        delexicalized text (e.g. 'food'); raises for unknown names.
        """
        key = _squash(name)
        if key.upper() in self.unified:
            unified = key.upper()
        else:
            unified = self._slot_names.get(key)
        if unified is None:
            raise OntologyError(f"unknown requested slot name {name!r}")
        return unified if unified in self.requestables else None

    def normalize_slot_key(self, key: str) -> str:
        return _squash(key)

    def is_databased(self, domain: str) -> bool:
        return domain in self.databased_domains


_DEFAULT: SlotOntology | None = None


def default_ontology() -> SlotOntology:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = SlotOntology.load()
    return _DEFAULT
