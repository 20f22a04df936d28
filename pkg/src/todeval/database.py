"""Slot-value canonicalization, fuzzy matching, and the database query engine.

Slot values come in many surface forms ("4pm" vs "16:00", "… & Cafe" vs
"… and cafe"). Every value is reduced to one canonical form at load time,
and queries compare canonical forms with a fuzzy similarity so residual
variation still matches. Queries are pure reads over immutable tables;
there is no sampling anywhere in this module.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import ParseError, ValidationError
from .ontology import SlotOntology, default_ontology

log = logging.getLogger(__name__)

_RULES = json.loads(
    resources.files("todeval.data").joinpath("canonical_rules.json").read_text("utf-8")
)
WILDCARDS = frozenset(_RULES["wildcard_values"])
_ARTICLES = tuple(_RULES["leading_articles"])
_SPELLED_HOURS = dict(_RULES["spelled_hours"])
_NAMED_TIMES = dict(_RULES["named_times"])
_VALUE_SYNONYMS = {cat: dict(m) for cat, m in _RULES["value_synonyms"].items()}
_BOOLEAN_SLOTS = frozenset(_RULES["boolean_slots"])

DEFAULT_THRESHOLD = 90.0

_TIME_SLOTS = frozenset({"time", "leaveat", "arriveby", "arrive", "leave"})
_NAME_SLOTS = frozenset({"name", "department", "departure", "destination"})

_HHMM_RE = re.compile(r"^(\d{1,2})[:.](\d{2})$")
_HOUR_RE = re.compile(r"^(\d{1,2})$")
_COMPACT_RE = re.compile(r"^(\d{3,4})$")
_MERIDIEM_RE = re.compile(r"\b([ap])\.?\s?m\.?$")
_PUNCT_RE = re.compile(r"[\"'‘’“”.,;:!?()]")


@dataclass(frozen=True)
class CanonicalValue:
    """A slot value and its canonical form; `parsed` is False when a value
    in a structured category (time) could not be interpreted."""

    raw: str
    canonical: str
    parsed: bool = True

    @property
    def is_wildcard(self) -> bool:
        return self.canonical == "dontcare"


def _clean(value: str) -> str:
    s = str(value).strip().lower()
    s = s.replace("’", "'").replace("‘", "'")
    s = s.replace("&", " and ")
    s = re.sub(r"\s+", " ", s).strip()
    return s


def _parse_time(value: str) -> str | None:
    s = value.replace("o'clock", " ").strip()
    if s in _NAMED_TIMES:
        return _NAMED_TIMES[s]
    meridiem = None
    m = _MERIDIEM_RE.search(s)
    if m:
        meridiem = m.group(1)
        s = s[: m.start()].strip()
    s = re.sub(r"\s+", " ", s)
    hour = minute = None
    if s in _SPELLED_HOURS:
        hour, minute = _SPELLED_HOURS[s], 0
    elif m2 := _HHMM_RE.match(s):
        hour, minute = int(m2.group(1)), int(m2.group(2))
    elif (m2 := _HOUR_RE.match(s)) and meridiem:
        hour, minute = int(m2.group(1)), 0
    elif m2 := _COMPACT_RE.match(s):
        digits = m2.group(1)
        hour, minute = int(digits[:-2]), int(digits[-2:])
    elif m2 := _HOUR_RE.match(s):
        hour, minute = int(m2.group(1)), 0
    if hour is None or not (0 <= hour <= 23 and 0 <= minute <= 59):
        return None
    if meridiem == "p" and hour < 12:
        hour += 12
    elif meridiem == "a" and hour == 12:
        hour = 0
    return f"{hour:02d}:{minute:02d}"


def canonicalize(slot: str, value: str) -> CanonicalValue:
    """Reduce one slot value to canonical form. Total: unparseable values in
    structured categories come back flagged, never as an exception."""
    raw = str(value)
    cleaned = _clean(raw)
    if cleaned in WILDCARDS:
        return CanonicalValue(raw, "dontcare")
    key = re.sub(r"[\s_\-']+", "", slot.strip().lower())
    if key in _TIME_SLOTS and key not in ("leave", "arrive"):
        parsed = _parse_time(cleaned)
        if parsed is None:
            return CanonicalValue(raw, cleaned, parsed=False)
        return CanonicalValue(raw, parsed)
    if key in ("leaveat", "arriveby", "leave", "arrive", "time"):
        parsed = _parse_time(cleaned)
        if parsed is None:
            return CanonicalValue(raw, cleaned, parsed=False)
        return CanonicalValue(raw, parsed)
    if key in _BOOLEAN_SLOTS:
        return CanonicalValue(raw, _VALUE_SYNONYMS["boolean"].get(cleaned, cleaned))
    if key in _NAME_SLOTS:
        s = _PUNCT_RE.sub(" ", cleaned)
        s = re.sub(r"\s+", " ", s).strip()
        words = s.split()
        while words and words[0] in _ARTICLES:
            words = words[1:]
        return CanonicalValue(raw, " ".join(words))
    synonyms = _VALUE_SYNONYMS.get(key) or _VALUE_SYNONYMS.get(
        {"pricerange": "pricerange", "area": "area"}.get(key, ""), {}
    )
    return CanonicalValue(raw, synonyms.get(cleaned, cleaned))


def _lcs_length(a: str, b: str) -> int:
    if not a or not b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0]
        for j, cb in enumerate(b, start=1):
            if ca == cb:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


@lru_cache(maxsize=65536)
def _simple_ratio(a: str, b: str) -> float:
    if a == b:
        return 100.0
    total = len(a) + len(b)
    if total == 0:
        return 100.0
    return 200.0 * _lcs_length(a, b) / total


def fuzzy_match(a: str, b: str) -> float:
    """Similarity in [0, 100]: max of the plain edit ratio and the ratio of
    token-sorted forms. Symmetric; 100 iff the token-sorted forms are equal."""
    if a > b:
        a, b = b, a
    sorted_a = " ".join(sorted(a.split()))
    sorted_b = " ".join(sorted(b.split()))
    return max(_simple_ratio(a, b), _simple_ratio(sorted_a, sorted_b))


@dataclass(frozen=True)
class DatabaseEntity:
    """One venue/train record; attribute values are canonical."""

    id: int | str
    domain: str
    attributes: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class QueryResult:
    entity_ids: frozenset
    domain: str


class Database:
    """Immutable per-domain entity tables with fuzzy constraint matching."""

    def __init__(self, tables: dict[str, list[DatabaseEntity]],
                 ontology: SlotOntology | None = None):
        self.ontology = ontology or default_ontology()
        self.tables = {dom: tuple(entities) for dom, entities in tables.items()}

    def counts(self) -> dict[str, int]:
        return {dom: len(entities) for dom, entities in self.tables.items()}

    def _known_slots(self, domain: str) -> frozenset:
        return frozenset(self.ontology.database_slots.get(domain, ())) | \
            self.ontology.ignored_state_slots.get(domain, frozenset())

    def query(self, domain: str, constraints: dict[str, str], mode: str = "full",
              threshold: float = DEFAULT_THRESHOLD) -> QueryResult:
        """Entities whose every constrained attribute matches at `threshold`.

        Wildcard values are ignored. In reduced mode, a name/train-ID
        constraint overrides all others. Deterministic for fixed inputs.
        """
        if mode not in ("full", "reduced"):
            raise ValidationError(f"unknown query mode {mode!r}")
        if domain not in self.tables:
            raise ValidationError(f"domain {domain!r} has no database table")
        filters: dict[str, str] = {}
        for slot, value in constraints.items():
            key = self.ontology.normalize_slot_key(slot)
            if key not in self._known_slots(domain):
                raise ValidationError(f"unknown slot {slot!r} for domain {domain!r}")
            if key in self.ontology.ignored_state_slots.get(domain, frozenset()):
                continue
            canon = value if isinstance(value, CanonicalValue) else canonicalize(key, value)
            if canon.is_wildcard or not canon.canonical:
                continue
            filters[key] = canon.canonical
        key_slot = "trainid" if domain == "train" else "name"
        if mode == "reduced" and key_slot in filters:
            filters = {key_slot: filters[key_slot]}
        windows = self.ontology.time_window_slots.get(domain, {})
        matched = []
        for entity in self.tables[domain]:
            ok = True
            for slot, value in filters.items():
                attr = entity.attributes.get(slot)
                if attr is None:
                    ok = False
                    break
                bound = windows.get(slot)
                if bound and _HHMM_RE.match(value) and _HHMM_RE.match(attr):
                    ok = attr <= value if bound == "max" else attr >= value
                else:
                    ok = fuzzy_match(attr, value) >= threshold
                if not ok:
                    break
            if ok:
                matched.append(entity.id)
        return QueryResult(entity_ids=frozenset(matched), domain=domain)


def load_database(directory: str | Path, ontology: SlotOntology | None = None) -> Database:
    """Load per-domain entity tables, canonicalizing every attribute value.

    Missing tables for databased domains yield a warning and an empty table;
    taxi/police/hospital have no tables by design.
    """
    ontology = ontology or default_ontology()
    directory = Path(directory)
    tables: dict[str, list[DatabaseEntity]] = {}
    for domain in ontology.databased_domains:
        path = None
        for candidate in (f"{domain}_db.json", f"{domain}.json"):
            if (directory / candidate).exists():
                path = directory / candidate
                break
        if path is None:
            log.warning("no database table for domain %r in %s; using empty table",
                        domain, directory)
            tables[domain] = []
            continue
        try:
            payload = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid database file: {exc.msg}", path=str(path),
                             location=f"line {exc.lineno}") from exc
        if isinstance(payload, dict):
            rows = payload.get("entities")
            if not isinstance(rows, list):
                raise ValidationError(f"{path}: expected an 'entities' array")
        elif isinstance(payload, list):
            rows = payload
        else:
            raise ValidationError(f"{path}: expected an array of entity objects")
        entities, seen = [], set()
        for i, row in enumerate(rows):
            if not isinstance(row, dict) or "id" not in row:
                raise ValidationError(f"{path}: entity #{i} lacks an 'id' field")
            eid = row["id"]
            if eid in seen:
                raise ValidationError(f"{path}: duplicate entity id {eid!r}")
            seen.add(eid)
            attributes = {}
            for slot, value in row.items():
                if slot == "id":
                    continue
                key = ontology.normalize_slot_key(slot)
                attributes[key] = canonicalize(key, value).canonical
            entities.append(DatabaseEntity(id=eid, domain=domain, attributes=attributes))
        tables[domain] = entities
        log.info("loaded %d %s entities from %s", len(entities), domain, path.name)
    return Database(tables, ontology=ontology)
