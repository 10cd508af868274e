import os

import pytest

from fsmtask.adapters.repositories import FileSystemArtifactStore, InMemoryArtifactStore


@pytest.fixture(params=["memory", "filesystem"])
def artifact_store(request, tmp_path):
    if request.param == "memory":
        return InMemoryArtifactStore()
    return FileSystemArtifactStore(tmp_path / "out")


def test_put_and_get(artifact_store):
    artifact_store.put("grid.txt", b"1 1\n0.0\n")
    assert artifact_store.get("grid.txt") == b"1 1\n0.0\n"


def test_put_replaces(artifact_store):
    artifact_store.put("grid.txt", b"old")
    artifact_store.put("grid.txt", b"new")
    assert artifact_store.get("grid.txt") == b"new"
    assert artifact_store.list() == ["grid.txt"]


def test_list_is_sorted_and_nested(artifact_store):
    artifact_store.put("tiles/tile_000_001.ppm", b"b")
    artifact_store.put("heatmap.ppm", b"h")
    artifact_store.put("tiles/tile_000_000.ppm", b"a")
    assert artifact_store.list() == [
        "heatmap.ppm",
        "tiles/tile_000_000.ppm",
        "tiles/tile_000_001.ppm",
    ]


def test_missing_artifact(artifact_store):
    with pytest.raises((KeyError, FileNotFoundError)):
        artifact_store.get("nothing.txt")


def test_filesystem_store_creates_output_directory(tmp_path):
    root = tmp_path / "a" / "b"
    store = FileSystemArtifactStore(root)

    assert store.list() == []
    store.put("run.meta", b"subcommand=synth\n")

    assert (root / "run.meta").read_bytes() == b"subcommand=synth\n"
    assert oct(os.stat(root / "run.meta").st_mode & 0o777) == oct(0o644)


def test_filesystem_store_leaves_no_temporary_files(tmp_path):
    store = FileSystemArtifactStore(tmp_path)
    store.put("grid.txt", b"x")
    assert sorted(path.name for path in tmp_path.iterdir()) == ["grid.txt"]


def test_filesystem_store_refuses_to_escape(tmp_path):
    store = FileSystemArtifactStore(tmp_path / "out")
    with pytest.raises(ValueError, match="escapes"):
        store.put("../outside.txt", b"x")
