"""Code extraction from completion responses.

Backends frequently wrap code in markdown fences, which turn into syntax
errors if inserted verbatim.  The first fenced block wins; bare responses
pass through trimmed.  The result never contains fence marker lines, and
extraction is idempotent.
"""

from __future__ import annotations

import re

from ..errors import EmptyCompletionError

_FENCE_BLOCK = re.compile(r"```[^\n]*\n(.*?)(?:```|\Z)", re.DOTALL)


def extract_code(response: str) -> str:
    """Interior of the first fenced block, or the trimmed response."""
    match = _FENCE_BLOCK.search(response)
    text = match.group(1) if match else response
    lines = [line for line in text.splitlines() if not line.lstrip().startswith("```")]
    code = "\n".join(lines).strip()
    if not code:
        raise EmptyCompletionError("completion contained no code")
    return code
