"""Shared fixtures and the acceptance-criteria summary hook."""

from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from ctxrepair.index.build import build_database
from ctxrepair.index.models import ProjectDatabase
from ctxrepair.index.scan import scan_source_files
from ctxrepair.retrieval import LocalEmbedder

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance_outcomes: dict[str, str] = {}


@pytest.fixture(scope="session")
def miniproj_dir() -> Path:
    return FIXTURES / "miniproj"


@pytest.fixture(scope="session")
def replayproj_dir() -> Path:
    return FIXTURES / "replayproj"


@pytest.fixture(scope="session")
def transcripts_dir() -> Path:
    return FIXTURES / "transcripts"


def build_fixture_db(project_dir: Path, root_override: Path | None = None) -> ProjectDatabase:
    embedder = LocalEmbedder()
    units = scan_source_files(project_dir)
    return build_database(
        units,
        embedder,
        project_root=str(root_override or project_dir),
        embedder_info=embedder.info(),
    )


@pytest.fixture(scope="session")
def miniproj_db(miniproj_dir: Path) -> ProjectDatabase:
    return build_fixture_db(miniproj_dir)


@pytest.fixture(scope="session")
def replay_db(replayproj_dir: Path) -> ProjectDatabase:
    return build_fixture_db(replayproj_dir)


@pytest.fixture
def replay_workdir(replayproj_dir: Path, tmp_path: Path) -> Path:
    """A writable copy of the replay project for staging-sensitive tests."""
    dest = tmp_path / "replayproj"
    shutil.copytree(replayproj_dir, dest)
    return dest


# -- acceptance reporting ----------------------------------------------------


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): marks a test as one acceptance criterion"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        name = marker.args[0]
        _acceptance_outcomes[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance_outcomes):
        outcome = _acceptance_outcomes[name]
        terminalreporter.write_line(f"{outcome}  {name}")
