"""Source-file discovery for the indexer."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Sequence

from ..errors import CtxRepairError
from .models import SourceUnit

logger = logging.getLogger(__name__)

DEFAULT_EXTENSIONS = (".py",)


def scan_source_files(
    root: str | os.PathLike,
    extensions: Sequence[str] = DEFAULT_EXTENSIONS,
) -> list[SourceUnit]:
    """Collect all source files under ``root`` matching the extension filter.

    Returns units in lexicographic order of their repository-relative POSIX
    paths.  Symlinked directories are not followed.  A file that cannot be
    read is skipped with a warning; an unreadable root is fatal.
    """
    root_path = Path(root)
    if not root_path.is_dir():
        raise CtxRepairError(f"project root is not a readable directory: {root_path}")

    rel_paths: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root_path, followlinks=False):
        dirnames.sort()
        for fname in filenames:
            if not any(fname.endswith(ext) for ext in extensions):
                continue
            full = Path(dirpath) / fname
            rel_paths.append(full.relative_to(root_path).as_posix())
    rel_paths.sort()

    units: list[SourceUnit] = []
    for rel in rel_paths:
        full = root_path / rel
        try:
            text = full.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            logger.warning("skipping unreadable source file %s: %s", rel, exc)
            continue
        units.append(SourceUnit(path=rel, text=text))
    return units
