"""Append-only JSONL run ledger.

Every line is one JSON object with at least ``schema_version``, ``kind``,
``n``, ``convention``, ``machine``, ``outcome``, ``stage``, ``score``,
``budgets`` and ``timestamp``.  Searches append one ``task`` record per
finished unit of work, ``certificate`` records for champions, and a final
``report`` record; a rerun reads these back and skips whatever is done.
"""

from __future__ import annotations

import json
import os
import time
from pathlib import Path
from typing import Iterator, Optional

SCHEMA_VERSION = 1
FIELDS = ("kind", "n", "convention", "machine", "outcome", "stage", "score", "budgets")


def make_record(kind: str, **fields) -> dict:
    rec = {"schema_version": SCHEMA_VERSION}
    for key in FIELDS:
        rec[key] = fields.pop(key, None)
    rec["kind"] = kind
    rec.update(fields)
    rec["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return rec


class Ledger:
    """A JSONL file; ``None`` path gives an in-memory ledger."""

    def __init__(self, path: Optional[str | os.PathLike] = None) -> None:
        self.path = Path(path) if path is not None else None
        self._memory: list[dict] = []

    def records(self) -> Iterator[dict]:
        if self.path is None:
            yield from self._memory
            return
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    # a torn final line from an interrupted run; everything before it is intact
                    continue
                if rec.get("schema_version") != SCHEMA_VERSION:
                    raise ValueError(f"{self.path}:{lineno}: unsupported schema_version {rec.get('schema_version')!r}")
                yield rec

    def append(self, rec: dict) -> None:
        if self.path is None:
            self._memory.append(rec)
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()

    def find(self, kind: str, search: str) -> list[dict]:
        return [r for r in self.records() if r["kind"] == kind and r.get("search") == search]
