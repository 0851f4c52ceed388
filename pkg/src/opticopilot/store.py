"""Append-only JSON-lines event store; session state is rebuilt by replay."""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Iterator, Optional, Union


class SessionStore:
    """One ``<session_id>.jsonl`` file per session under a data directory.

    Appends are serialized per session; files are never rewritten.
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _path(self, session_id: str) -> Path:
        if not session_id.replace("-", "").isalnum():
            raise ValueError(f"bad session id {session_id!r}")
        return self.root / f"{session_id}.jsonl"

    def append(self, session_id: str, event: dict) -> None:
        line = json.dumps(event, sort_keys=True, separators=(",", ":"))
        with self._lock_for(session_id):
            with self._path(session_id).open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def events(self, session_id: str) -> list[dict]:
        path = self._path(session_id)
        if not path.is_file():
            return []
        with self._lock_for(session_id):
            return [
                json.loads(line)
                for line in path.read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).is_file()

    def session_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.jsonl"))
