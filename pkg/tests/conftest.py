"""Shared fixtures: the curated three-source corpus and pipeline builders."""

from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

from scholarly_gateway.federation import SourceDescriptor, SourceKind, SourceRegistry
from scholarly_gateway.federation.types import SourceRecord
from scholarly_gateway.service.pipeline import GatewayPipeline
from scholarly_gateway.service.sessions import SessionStore
from scholarly_gateway.service.telemetry import TelemetryLog
from scholarly_gateway.taxonomy import map_record

FIXTURES = Path(__file__).parent / "fixtures"

SOURCES = FIXTURES / "sources"

#: adapter per fixture source; beta speaks the zenodo dialect
ADAPTERS = {"alpha": "generic", "beta": "zenodo", "gamma": "generic"}

#: a field value present in every fixture record, so this query matches all
MATCH_ALL_QUERY = "scholarly corpus"


def fixture_descriptor(source_id: str, endpoint: Path, timeout: float = 15.0,
                       enabled: bool = True) -> SourceDescriptor:
    return SourceDescriptor(
        id=source_id,
        display_name=source_id.title(),
        kind=SourceKind.FIXTURE,
        endpoint=str(endpoint),
        timeout=timeout,
        enabled=enabled,
        adapter=ADAPTERS.get(source_id, "generic"),
    )


def build_registry(source_dirs: dict[str, Path] | None = None,
                   timeout: float = 15.0) -> SourceRegistry:
    if source_dirs is None:
        source_dirs = {name: SOURCES / name for name in ("alpha", "beta", "gamma")}
    registry = SourceRegistry()
    for source_id, path in source_dirs.items():
        registry.register(fixture_descriptor(source_id, path, timeout=timeout))
    return registry


def copy_sources(tmp_path: Path) -> dict[str, Path]:
    """Writable copies of the fixture sources for control-file tests."""
    copies = {}
    for name in ("alpha", "beta", "gamma"):
        target = tmp_path / name
        shutil.copytree(SOURCES / name, target)
        copies[name] = target
    return copies


def build_pipeline(registry: SourceRegistry | None = None,
                   telemetry_path: Path | None = None) -> GatewayPipeline:
    return GatewayPipeline(
        registry=registry or build_registry(),
        sessions=SessionStore(),
        telemetry=TelemetryLog(telemetry_path),
    )


@pytest.fixture
def registry() -> SourceRegistry:
    return build_registry()


@pytest.fixture
def pipeline() -> GatewayPipeline:
    return build_pipeline()


def load_comparison_records():
    """The seven comparison papers, mapped into canonical records."""
    raw = json.loads((FIXTURES / "comparison_records.json").read_text())
    return [map_record(SourceRecord(source_id="fixtures", native_fields=entry))
            for entry in raw]
