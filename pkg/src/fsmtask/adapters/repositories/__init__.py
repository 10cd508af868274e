from .interface import ArtifactStore
from .in_memory import InMemoryArtifactStore
from .filesystem import FileSystemArtifactStore


__all__ = ["ArtifactStore", "InMemoryArtifactStore", "FileSystemArtifactStore"]
