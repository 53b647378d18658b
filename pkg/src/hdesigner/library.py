"""Preset storage: named pattern specs in a single JSON file.

Saves are atomic (write temp file, fsync, os.replace) so a crash mid-save
leaves either the previous library or the new one on disk, never a torn
file. Builtin presets are served alongside stored ones but are not
persisted and cannot be deleted; storing under a builtin name shadows it.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from .envelope import PatternSpec, SpecError
from .presets import PresetEntry, builtin_presets

FORMAT_VERSION = 1


class LibraryError(Exception):
    pass


class PresetLibrary:
    """Thread-safe preset store backed by one JSON file."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._builtins = {p.name: p for p in builtin_presets()}
        self._stored: dict[str, PatternSpec] = {}
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        raw = self.path.read_text(encoding="utf-8")
        if not raw.strip():
            return
        doc = json.loads(raw)
        if not isinstance(doc, dict) or doc.get("version") != FORMAT_VERSION:
            raise LibraryError(f"unsupported library format in {self.path}")
        presets = doc.get("presets")
        if not isinstance(presets, list):
            raise LibraryError(f"malformed library file {self.path}")
        for item in presets:
            if not isinstance(item, dict) or not isinstance(item.get("name"), str):
                raise LibraryError(f"malformed preset entry in {self.path}")
            try:
                spec = PatternSpec.from_dict(item.get("spec"))
                spec.validate()
            except SpecError as e:
                raise LibraryError(
                    f"invalid preset {item['name']!r} in {self.path}: {e}") from e
            self._stored[item["name"]] = spec

    def _save_locked(self) -> None:
        doc = {
            "version": FORMAT_VERSION,
            "presets": [{"name": name, "spec": spec.to_dict()}
                        for name, spec in sorted(self._stored.items())],
        }
        data = json.dumps(doc, indent=2) + "\n"
        tmp = self.path.with_name(self.path.name + ".tmp")
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp, "w", encoding="utf-8") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, self.path)

    # -- queries ---------------------------------------------------------

    def names(self) -> list[str]:
        with self._lock:
            names = set(self._builtins) | set(self._stored)
        return sorted(names)

    def entries(self) -> list[PresetEntry]:
        with self._lock:
            merged = {name: PresetEntry(name, p.spec, builtin=True)
                      for name, p in self._builtins.items()}
            for name, spec in self._stored.items():
                merged[name] = PresetEntry(name, spec, builtin=False)
        return [merged[name] for name in sorted(merged)]

    def get(self, name: str) -> PresetEntry | None:
        with self._lock:
            if name in self._stored:
                return PresetEntry(name, self._stored[name], builtin=False)
            return self._builtins.get(name)

    # -- mutations -------------------------------------------------------

    def put(self, name: str, spec: PatternSpec) -> PresetEntry:
        if not name or len(name) > 100:
            raise LibraryError("preset name must be 1..100 characters")
        spec.validate()
        with self._lock:
            self._stored[name] = spec
            self._save_locked()
        return PresetEntry(name, spec, builtin=False)

    def delete(self, name: str) -> bool:
        """Remove a stored preset. Returns False if it does not exist;
        raises LibraryError for builtins (they are not deletable)."""
        with self._lock:
            if name in self._stored:
                del self._stored[name]
                self._save_locked()
                return True
            if name in self._builtins:
                raise LibraryError(f"{name!r} is a builtin preset and cannot be deleted")
            return False
