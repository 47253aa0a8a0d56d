"""CSV emission with optional JSON mirrors.

Values are rendered with repr (shortest round-trip), so identical inputs
reproduce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path


def _render(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(path, header, rows, mirror_json: bool = False) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_render(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    if mirror_json:
        records = [dict(zip(header, row)) for row in rows]
        path.with_suffix(".json").write_text(json.dumps(records, indent=1) + "\n")
