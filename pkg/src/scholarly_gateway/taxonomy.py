"""Mapping of heterogeneous source records onto a faceted taxonomy.

Each source speaks its own dialect ("author" vs "creator", "dataset" vs
"corpus"); a per-source :class:`FieldMap` translates native field names
and type labels into one canonical record shape grouped by facet.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Any, Iterable, Mapping, Optional

from .errors import MappingFailure
from .federation.types import SourceRecord


class Facet(str, Enum):
    ARTICLE = "Article"
    DATASET = "Dataset"
    PROJECT = "Project"
    SOFTWARE_APPLICATION = "SoftwareApplication"
    LEARNING_RESOURCE = "LearningResource"
    MEDIA_OBJECT = "MediaObject"
    CREATIVE_WORK = "CreativeWork"
    PERSON = "Person"
    ORGANIZATION = "Organization"


#: Facets describing works rather than agents; CreativeWork is the fallback.
CREATIVE_FACETS = frozenset(
    {
        Facet.ARTICLE,
        Facet.DATASET,
        Facet.PROJECT,
        Facet.SOFTWARE_APPLICATION,
        Facet.LEARNING_RESOURCE,
        Facet.MEDIA_OBJECT,
        Facet.CREATIVE_WORK,
    }
)


@dataclass
class ScholarlyRecord:
    """One normalized result; ``title`` doubles as the name for agents."""

    facet: Facet
    title: str
    abstract: Optional[str] = None
    authors: list[str] = field(default_factory=list)
    date_published: Optional[date] = None
    year_only: bool = False
    doi: Optional[str] = None
    url: Optional[str] = None
    source_ids: set[str] = field(default_factory=set)
    extras: dict[str, str] = field(default_factory=dict)

    def date_text(self) -> Optional[str]:
        if self.date_published is None:
            return None
        if self.year_only:
            return str(self.date_published.year)
        return self.date_published.isoformat()


@dataclass
class FieldMap:
    """Per-source rename tables.

    ``fields`` maps a native field name to a canonical one (title,
    abstract, authors, date, doi, url); anything absent from the table
    lands in ``extras`` untouched.  ``types`` maps a native type label
    to a facet name.
    """

    fields: dict[str, str] = field(default_factory=dict)
    types: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "FieldMap":
        return cls(
            fields={str(k): str(v) for k, v in raw.get("fields", {}).items()},
            types={str(k).lower(): str(v) for k, v in raw.get("types", {}).items()},
        )


CANONICAL_FIELDS = ("title", "name", "abstract", "authors", "date", "doi", "url", "type")

_FACET_NAMES = frozenset(f.value for f in Facet)

_DOI_PREFIXES = ("https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "doi:")


def normalize_doi(raw: str) -> Optional[str]:
    """Lowercase, strip resolver prefixes, require the "10." registrant start."""
    if raw is None:
        return None
    text = raw.strip().lower()
    for prefix in _DOI_PREFIXES:
        if text.startswith(prefix):
            text = text[len(prefix):]
            break
    text = text.strip()
    if not text.startswith("10."):
        return None
    return text


_YEAR_ONLY = re.compile(r"^(\d{4})$")
_ISO_DATE = re.compile(r"^(\d{4})-(\d{1,2})(?:-(\d{1,2}))?")


def parse_date(raw: str) -> tuple[Optional[date], bool]:
    """Lenient date parse; returns (date, year_only flag).

    Year-only values are pinned to January 1st.
    """
    text = str(raw).strip()
    m = _YEAR_ONLY.match(text)
    if m:
        return date(int(m.group(1)), 1, 1), True
    m = _ISO_DATE.match(text)
    if m:
        year, month = int(m.group(1)), int(m.group(2))
        day = int(m.group(3)) if m.group(3) else 1
        try:
            return date(year, month, day), False
        except ValueError:
            return None, False
    return None, False


def _as_text(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ", ".join(str(v) for v in value)
    return str(value)


def _name_of(value: Any) -> str:
    # sources nest person entries, e.g. {"name": ...} or {"text": ...}
    if isinstance(value, Mapping):
        for key in ("name", "text", "display_name"):
            if key in value:
                return str(value[key]).strip()
    return str(value).strip()


def _as_names(value: Any) -> list[str]:
    if isinstance(value, Mapping) and "author" in value:
        value = value["author"]
    if isinstance(value, (list, tuple)):
        return [name for name in (_name_of(v) for v in value) if name]
    if isinstance(value, Mapping):
        name = _name_of(value)
        return [name] if name else []
    text = str(value).strip()
    if not text:
        return []
    # single string holding several names
    if ";" in text:
        return [part.strip() for part in text.split(";") if part.strip()]
    return [text]


def resolve_facet(type_label: Optional[str], fmap: FieldMap) -> Facet:
    if type_label:
        name = fmap.types.get(type_label.strip().lower())
        if name is None:
            # native label may already be a facet name
            name = type_label.strip()
        try:
            return Facet(name)
        except ValueError:
            pass
    return Facet.CREATIVE_WORK


def map_record(raw: SourceRecord, fmap: Optional[FieldMap] = None) -> ScholarlyRecord:
    """Translate one native record into the canonical shape.

    Unknown sources fall back to the identity mapping: field names that
    already match a canonical name are used directly, the rest goes to
    extras, and the facet defaults to CreativeWork.
    """
    fmap = fmap or FieldMap()
    record = ScholarlyRecord(facet=Facet.CREATIVE_WORK, title="")
    record.source_ids = {raw.source_id}
    type_label: Optional[str] = None

    type_key: Optional[str] = None
    for native_key, value in raw.native_fields.items():
        canonical = fmap.fields.get(native_key, native_key if native_key in CANONICAL_FIELDS else None)
        if canonical in ("title", "name"):
            record.title = _as_text(value).strip()
        elif canonical == "abstract":
            record.abstract = _as_text(value).strip() or None
        elif canonical == "authors":
            record.authors = _as_names(value)
        elif canonical == "date":
            parsed, year_only = parse_date(_as_text(value))
            if parsed is not None:
                record.date_published = parsed
                record.year_only = year_only
            else:
                record.extras[native_key] = _as_text(value)
        elif canonical == "doi":
            doi = normalize_doi(_as_text(value))
            if doi is not None:
                record.doi = doi
            else:
                record.extras[native_key] = _as_text(value)
        elif canonical == "url":
            record.url = _as_text(value).strip() or None
        elif canonical == "type":
            type_label = _as_text(value)
            type_key = native_key
        else:
            record.extras[native_key] = _as_text(value)

    record.facet = resolve_facet(type_label, fmap)
    if type_label is not None and type_key is not None:
        known = fmap.types.get(type_label.strip().lower()) or type_label.strip()
        if known not in _FACET_NAMES:
            # fallback facet: keep the unrecognized native label around
            record.extras[type_key] = type_label
    if not record.title:
        raise MappingFailure(
            f"no title/name for record from source {raw.source_id!r}"
        )
    return record


def group_by_facet(records: Iterable[ScholarlyRecord]) -> dict[Facet, list[ScholarlyRecord]]:
    """Partition records by facet, preserving within-group order."""
    groups: dict[Facet, list[ScholarlyRecord]] = {}
    for record in records:
        groups.setdefault(record.facet, []).append(record)
    return groups
