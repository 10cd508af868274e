import logging
import os
import tempfile
from pathlib import Path
from typing import List

from .interface import ArtifactStore

logger = logging.getLogger(__name__)


class FileSystemArtifactStore(ArtifactStore):
    """Stores artifacts as files below an output directory.

    Files are written to a temporary sibling first and then renamed, so a
    reader never sees a half-written artifact.
    """

    def __init__(self, root: Path | str) -> None:
        self.root = Path(root)

    def _path_for(self, name: str) -> Path:
        path = (self.root / name).resolve()
        if not path.is_relative_to(self.root.resolve()):
            raise ValueError(f"artifact name escapes the output directory: {name}")
        return path

    def put(self, name: str, data: bytes) -> None:
        path = self._path_for(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        try:
            with os.fdopen(fd, "wb") as tmp_file:
                tmp_file.write(data)
            os.chmod(tmp_name, 0o644)
            os.replace(tmp_name, path)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
        logger.debug("wrote %s (%d bytes)", path, len(data))

    def get(self, name: str) -> bytes:
        return self._path_for(name).read_bytes()

    def list(self) -> List[str]:
        if not self.root.exists():
            return []
        return sorted(
            path.relative_to(self.root).as_posix()
            for path in self.root.rglob("*")
            if path.is_file() and not path.name.startswith(".")
        )
