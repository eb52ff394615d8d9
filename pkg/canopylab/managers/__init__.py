"""Managers for run-wide resources."""

from .artifact_manager import ArtifactManager, to_json

__all__ = ["ArtifactManager", "to_json"]
