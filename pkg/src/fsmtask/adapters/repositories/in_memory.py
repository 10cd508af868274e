from typing import List

from .interface import ArtifactStore


class InMemoryArtifactStore(ArtifactStore):
    """An in-memory implementation of the ArtifactStore interface."""

    def __init__(self) -> None:
        self.artifacts: dict[str, bytes] = {}

    def put(self, name: str, data: bytes) -> None:
        self.artifacts[name] = data

    def get(self, name: str) -> bytes:
        return self.artifacts[name]

    def list(self) -> List[str]:
        return sorted(self.artifacts)
