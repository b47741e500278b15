"""Read-only access to a run's artifact directory.

Every finished run writes a manifest.json naming its files and their sha256
hashes, with a completeness flag. Everything here goes through that
manifest: an unfinished or tampered run directory is refused up front
rather than half-plotted.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ArtifactError(Exception):
    """An artifact directory or file cannot be used as plot input."""


@dataclass(frozen=True)
class ArtifactDir:
    """A verified run directory: its path plus the parsed manifest."""

    path: Path
    manifest: dict

    def has(self, name: str) -> bool:
        return name in self.manifest["files"]

    def _verified_path(self, name: str) -> Path:
        files = self.manifest["files"]
        if name not in files:
            raise ArtifactError(
                f"{name} is not listed in the manifest of {self.path}")
        f = self.path / name
        if not f.is_file():
            raise ArtifactError(f"{name} is listed in the manifest but "
                                f"missing from {self.path}")
        digest = hashlib.sha256(f.read_bytes()).hexdigest()
        if digest != files[name]:
            raise ArtifactError(
                f"{name} does not match its manifest hash; the run "
                f"directory {self.path} has been modified")
        return f

    def read_csv(self, name: str, required_columns: tuple[str, ...]) -> np.ndarray:
        """Load a CSV as a structured array, insisting on named columns."""
        f = self._verified_path(name)
        data = np.genfromtxt(f, delimiter=",", names=True)
        data = np.atleast_1d(data)
        have = data.dtype.names or ()
        missing = [c for c in required_columns if c not in have]
        if missing:
            raise ArtifactError(
                f"{name} is missing required column(s): {', '.join(missing)}")
        return data

    def read_json(self, name: str, required_keys: tuple[str, ...] = ()) -> dict:
        f = self._verified_path(name)
        doc = json.loads(f.read_text())
        if not isinstance(doc, dict):
            raise ArtifactError(f"{name} is not a JSON object")
        missing = [k for k in required_keys if k not in doc]
        if missing:
            raise ArtifactError(
                f"{name} is missing required key(s): {', '.join(missing)}")
        return doc


def open_artifacts(path) -> ArtifactDir:
    """Gatekeeper: returns an ArtifactDir only for a complete, finished run."""
    path = Path(path)
    if not path.is_dir():
        raise ArtifactError(f"{path} is not a directory")
    mf = path / "manifest.json"
    if not mf.is_file():
        raise ArtifactError(
            f"no manifest.json in {path}; not a finished run directory")
    try:
        manifest = json.loads(mf.read_text())
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"manifest.json in {path} is not valid JSON: "
                            f"{exc}") from exc
    if not isinstance(manifest, dict) or "complete" not in manifest \
            or not isinstance(manifest.get("files"), dict):
        raise ArtifactError(f"manifest.json in {path} lacks the expected "
                            "complete/files fields")
    if manifest["complete"] is not True:
        raise ArtifactError(
            f"manifest marks an incomplete run (complete=false); "
            f"refusing {path}")
    return ArtifactDir(path=path, manifest=manifest)
