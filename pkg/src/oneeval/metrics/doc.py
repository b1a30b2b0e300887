"""Generate docs/metrics.md from the live registry: python3 -m oneeval.metrics.doc"""

from __future__ import annotations

import sys
from pathlib import Path

from .registry import render_registry_doc


def main(target: str = "docs/metrics.md") -> int:
    path = Path(target)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_registry_doc(), encoding="utf-8")
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main(*sys.argv[1:]))
