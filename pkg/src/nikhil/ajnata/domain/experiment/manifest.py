"""
Run manifest: resolved configuration, seeds and per-file checksums

The manifest is written with status "incomplete" before any output and
rewritten with status "complete" after the last file, so an interrupted run
is recognisable from its directory alone.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from nikhil.ajnata.utils.json_utils import JsonUtils

logger = logging.getLogger(__name__)

MANIFEST_FILENAME = "manifest.json"
STATUS_INCOMPLETE = "incomplete"
STATUS_COMPLETE = "complete"


def sha256_file(file_path: Path, chunk_size: int = 1 << 16) -> str:
    digest = hashlib.sha256()
    with open(file_path, 'rb') as f:
        for chunk in iter(lambda: f.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    output_dir: Path
    config: Dict[str, Any]
    seeds: Dict[str, int]
    overrides: Dict[str, Any] = field(default_factory=dict)
    files: List[Path] = field(default_factory=list)
    status: str = STATUS_INCOMPLETE

    @property
    def path(self) -> Path:
        return Path(self.output_dir) / MANIFEST_FILENAME

    def add(self, paths: Iterable[Path]) -> None:
        """Register output files (absolute or relative to output_dir)"""
        for path in paths:
            path = Path(path)
            if path not in self.files:
                self.files.append(path)

    def _file_entries(self) -> List[Dict[str, str]]:
        root = Path(self.output_dir)
        entries = []
        for path in self.files:
            if not (path.is_absolute() or path.is_relative_to(root)):
                path = root / path
            relative = path.relative_to(root) if path.is_relative_to(root) else path
            entries.append({"path": relative.as_posix(), "sha256": sha256_file(path)})
        return sorted(entries, key=lambda entry: entry["path"])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "seeds": self.seeds,
            "overrides": self.overrides,
            "config": self.config,
            "files": self._file_entries() if self.status == STATUS_COMPLETE else [],
        }

    def write(self) -> Path:
        return JsonUtils.save_json_to_file(self.to_dict(), self.path)

    def start(self) -> Path:
        self.status = STATUS_INCOMPLETE
        return self.write()

    def complete(self) -> Path:
        self.status = STATUS_COMPLETE
        path = self.write()
        logger.info("Manifest complete: %s (%d files)", path, len(self.files))
        return path


def load_manifest(output_dir: Path) -> Dict[str, Any]:
    return JsonUtils.load_json_from_file(Path(output_dir) / MANIFEST_FILENAME)


def verify_manifest(output_dir: Path) -> Optional[List[str]]:
    """
    Recompute every listed checksum

    Returns:
        None when the manifest is complete and every file matches,
        otherwise the list of problems found
    """
    manifest = load_manifest(output_dir)
    problems = []
    if manifest.get("status") != STATUS_COMPLETE:
        problems.append(f"status is {manifest.get('status')!r}")
    for entry in manifest.get("files", []):
        path = Path(output_dir) / entry["path"]
        if not path.exists():
            problems.append(f"{entry['path']}: missing")
        elif sha256_file(path) != entry["sha256"]:
            problems.append(f"{entry['path']}: checksum mismatch")
    return problems or None
