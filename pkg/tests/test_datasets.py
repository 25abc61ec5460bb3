import json
import zipfile

import pytest

from netclass import datasets
from netclass.errors import ConfigError, DataError


def write_tu_zip(tmp_path, name, inner_dir=True):
    """Zip a minimal two-graph benchmark the way the archives ship."""
    prefix = f"{name}/" if inner_dir else ""
    files = {
        f"{prefix}{name}_A.txt": "2, 1\n1, 2\n3, 4\n4, 3\n4, 5\n5, 4\n3, 5\n5, 3\n",
        f"{prefix}{name}_graph_indicator.txt": "1\n1\n2\n2\n2\n",
        f"{prefix}{name}_graph_labels.txt": "1\n2\n",
    }
    zip_path = tmp_path / f"{name}.zip"
    with zipfile.ZipFile(zip_path, "w") as zf:
        for arcname, text in files.items():
            zf.writestr(arcname, text)
    return zip_path


def test_data_root_precedence(tmp_path, monkeypatch):
    monkeypatch.delenv(datasets.ENV_DATA_DIR, raising=False)
    assert datasets.data_root(None).name == "data"
    monkeypatch.setenv(datasets.ENV_DATA_DIR, str(tmp_path / "env"))
    assert datasets.data_root(None) == tmp_path / "env"
    # explicit flag beats the environment
    assert datasets.data_root(str(tmp_path / "flag")) == tmp_path / "flag"


def test_locate_checks_subdir_and_root(tmp_path):
    assert datasets.locate("TOY", str(tmp_path)) is None
    sub = tmp_path / "TOY"
    sub.mkdir()
    (sub / "TOY_A.txt").write_text("1, 2\n2, 1\n")
    assert datasets.locate("TOY", str(tmp_path)) == sub


def test_fetch_unknown_dataset_rejected(tmp_path):
    with pytest.raises(ConfigError):
        datasets.fetch("NOT-A-DATASET", data_dir=str(tmp_path))


def test_fetch_from_local_url_extracts_and_records_checksum(tmp_path, capsys):
    zip_path = write_tu_zip(tmp_path, "TOY")
    root = tmp_path / "store"
    found = datasets.fetch("TOY", data_dir=str(root), url=zip_path.as_uri())
    assert found == root / "TOY"
    assert (found / "TOY_A.txt").is_file()
    recorded = json.loads((root / "checksums.json").read_text())
    assert len(recorded["TOY"]) == 64
    assert "recorded" in capsys.readouterr().out

    col = datasets.load("TOY", data_dir=str(root))
    assert len(col.graphs) == 2
    assert list(col.labels) == [1, 2]


def test_fetch_skips_when_present(tmp_path, capsys):
    zip_path = write_tu_zip(tmp_path, "TOY")
    root = tmp_path / "store"
    datasets.fetch("TOY", data_dir=str(root), url=zip_path.as_uri())
    capsys.readouterr()
    again = datasets.fetch("TOY", data_dir=str(root), url=zip_path.as_uri())
    assert again == root / "TOY"
    assert "already present" in capsys.readouterr().out


def test_fetch_verifies_recorded_checksum(tmp_path):
    zip_path = write_tu_zip(tmp_path, "TOY")
    root = tmp_path / "store"
    datasets.fetch("TOY", data_dir=str(root), url=zip_path.as_uri())
    # wipe the extracted copy but keep the checksum record, then serve a
    # different archive under the same name
    for f in (root / "TOY").iterdir():
        f.unlink()
    (root / "TOY").rmdir()
    with zipfile.ZipFile(zip_path, "w") as zf:
        zf.writestr("TOY/TOY_A.txt", "1, 2\n2, 1\n")
    with pytest.raises(DataError, match="sha256 mismatch"):
        datasets.fetch("TOY", data_dir=str(root), url=zip_path.as_uri())


def test_fetch_rejects_zip_slip(tmp_path):
    zip_path = tmp_path / "evil.zip"
    with zipfile.ZipFile(zip_path, "w") as zf:
        zf.writestr("../escape.txt", "nope")
    with pytest.raises(DataError, match="escapes"):
        datasets.fetch("EVIL", data_dir=str(tmp_path / "store"), url=zip_path.as_uri())


def test_fetch_unreachable_url_is_data_error(tmp_path):
    missing = (tmp_path / "absent.zip").as_uri()
    with pytest.raises(DataError, match="download"):
        datasets.fetch("TOY", data_dir=str(tmp_path / "store"), url=missing)


def test_load_hint_names_fetch_command(tmp_path):
    with pytest.raises(DataError, match="netclass fetch --dataset IMDB-BINARY"):
        datasets.load("IMDB-BINARY", data_dir=str(tmp_path))
