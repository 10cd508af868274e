from typing import List, Protocol


class ArtifactStore(Protocol):
    """A store interface for run outputs, addressed by relative name."""

    def put(self, name: str, data: bytes) -> None:
        """Store an artifact, replacing any previous one with that name."""
        ...

    def get(self, name: str) -> bytes:
        """Get an artifact by name."""
        ...

    def list(self) -> List[str]:
        """Get the sorted names of all artifacts."""
        ...
