"""
Run output management.

Owns a run's output directory: writes artifacts, keeps the machine-readable
index of everything written and marks failed runs.
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

from ..utils import config
from ..utils.errors import InputError
from ..utils.helpers import sha256_hex

logger = logging.getLogger(__name__)


def to_json(payload: Any) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class ArtifactManager:
    """
    Manages the files of one pipeline run.

    Every artifact is recorded with its stage, kind and SHA-256 digest. The
    index is rewritten after each write, so a failed run still lists what it
    produced before the failure.
    """

    def __init__(self, output_dir: Union[str, Path]) -> None:
        """
        Initialize the manager and create the output directory.

        Args:
            output_dir: Run output directory

        Raises:
            InputError: If the directory cannot be created
        """
        self.output_dir = Path(output_dir)
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise InputError(f"cannot create output directory {self.output_dir}: {e}") from e
        self.entries: list[dict[str, str]] = []

        # leftovers of an earlier failed run would contradict this one
        marker = self.output_dir / config.FAILURE_MARKER_FILE
        if marker.exists():
            marker.unlink()
            logger.info(f"Removed stale failure marker in {self.output_dir}")

        logger.info(f"ArtifactManager writing to {self.output_dir}")

    @property
    def index_path(self) -> Path:
        return self.output_dir / config.RUN_INDEX_FILE

    def path_of(self, name: str) -> Path:
        return self.output_dir / name

    def write(self, name: str, data: Union[bytes, str], stage: str, kind: str) -> Path:
        """
        Write one artifact and record it in the index.

        Args:
            name: File name relative to the output directory
            data: Contents; text is written as UTF-8
            stage: Stage that produced it
            kind: Artifact kind (stats, mask, model, metrics, change, overlay, ...)

        Returns:
            Path of the written file
        """
        payload = data.encode("utf-8") if isinstance(data, str) else data
        path = self.path_of(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)

        self.entries = [e for e in self.entries if e["path"] != name]
        self.entries.append(
            {"path": name, "stage": stage, "kind": kind, "sha256": sha256_hex(payload)}
        )
        self._write_index()
        logger.info(f"[{stage}] wrote {name} ({len(payload)} bytes)")
        return path

    def write_json(self, name: str, payload: Any, stage: str, kind: str) -> Path:
        """Write a JSON artifact."""
        return self.write(name, to_json(payload), stage, kind)

    def _write_index(self) -> None:
        self.index_path.write_text(to_json({"artifacts": self.entries}), encoding="utf-8")

    def mark_failed(self, stage: str, error: BaseException) -> Path:
        """
        Write the failure marker next to the partial outputs.

        Args:
            stage: Name of the failing stage
            error: The error that stopped the run

        Returns:
            Path of the marker
        """
        marker = self.output_dir / config.FAILURE_MARKER_FILE
        marker.write_text(
            to_json({"stage": stage, "error": str(error), "type": type(error).__name__}),
            encoding="utf-8",
        )
        logger.error(f"Run failed in stage '{stage}'; partial outputs kept in {self.output_dir}")
        return marker

    def artifact(self, name: str) -> Optional[dict[str, str]]:
        """Index entry of an artifact, or None if it was not written."""
        for entry in self.entries:
            if entry["path"] == name:
                return entry
        return None
