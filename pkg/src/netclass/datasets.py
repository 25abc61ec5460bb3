"""Benchmark collection management: download, checksum, locate, load.

Datasets are never vendored. `fetch` downloads a zip from the public
distribution site into the data root (--data flag, NETCLASS_DATA, or
./data, in that order). Archives are checksummed: if a sha256 is already
recorded in checksums.json at the data root it is verified, otherwise
the computed digest is recorded on first download with a warning, so
later fetches of a changed archive fail loudly.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import urllib.error
import urllib.request
import zipfile
from pathlib import Path

from .errors import ConfigError, DataError
from .graph import GraphCollection, load_tu_benchmark

DATASETS = (
    "IMDB-BINARY",
    "IMDB-MULTI",
    "REDDIT-BINARY",
    "REDDIT-MULTI-5K",
    "REDDIT-MULTI-12K",
    "COLLAB",
)
DOWNLOAD_URL = "https://www.chrsmrrs.com/graphkerneldatasets/{name}.zip"
ENV_DATA_DIR = "NETCLASS_DATA"


def data_root(explicit: str | None = None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get(ENV_DATA_DIR)
    return Path(env) if env else Path("data")


def locate(name: str, data_dir: str | None = None) -> Path | None:
    """Directory holding NAME_A.txt, or None when absent."""
    root = data_root(data_dir)
    for candidate in (root / name, root):
        if (candidate / f"{name}_A.txt").is_file():
            return candidate
    return None


def _checksum_path(root: Path) -> Path:
    return root / "checksums.json"


def _load_checksums(root: Path) -> dict:
    path = _checksum_path(root)
    if path.is_file():
        with open(path) as fh:
            return json.load(fh)
    return {}


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _safe_extract(archive: zipfile.ZipFile, target: Path) -> None:
    target = target.resolve()
    for member in archive.namelist():
        dest = (target / member).resolve()
        if not dest.is_relative_to(target):
            raise DataError(f"archive entry escapes target directory: {member}")
    archive.extractall(target)


def fetch(
    name: str,
    data_dir: str | None = None,
    url: str | None = None,
    timeout: float = 120.0,
) -> Path:
    """Download and extract one dataset; returns its directory."""
    if name not in DATASETS and url is None:
        raise ConfigError(
            f"unknown dataset {name!r}; known: {', '.join(DATASETS)} "
            "(pass --url for others)"
        )
    root = data_root(data_dir)
    root.mkdir(parents=True, exist_ok=True)
    existing = locate(name, data_dir)
    if existing is not None:
        print(f"{name}: already present at {existing}")
        return existing
    url = url or DOWNLOAD_URL.format(name=name)
    print(f"fetching {url}")
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp, \
                tempfile.NamedTemporaryFile(dir=root, suffix=".zip", delete=False) as tmp:
            while True:
                chunk = resp.read(1 << 20)
                if not chunk:
                    break
                tmp.write(chunk)
            tmp_path = Path(tmp.name)
    except (urllib.error.URLError, OSError, TimeoutError) as exc:
        raise DataError(f"download of {name} failed: {exc}") from exc
    try:
        digest = _sha256(tmp_path)
        checksums = _load_checksums(root)
        if name in checksums:
            if checksums[name] != digest:
                raise DataError(
                    f"{name}: sha256 mismatch (expected {checksums[name]}, "
                    f"got {digest}); refusing to extract"
                )
        else:
            checksums[name] = digest
            with open(_checksum_path(root), "w") as fh:
                json.dump(checksums, fh, indent=2, sort_keys=True)
            print(
                f"warning: no pinned checksum for {name}; recorded "
                f"sha256={digest} for future verification"
            )
        with zipfile.ZipFile(tmp_path) as archive:
            _safe_extract(archive, root)
    finally:
        tmp_path.unlink(missing_ok=True)
    found = locate(name, data_dir)
    if found is None:
        raise DataError(f"{name}: archive extracted but {name}_A.txt not found")
    print(f"{name}: extracted to {found}")
    return found


def load(name: str, data_dir: str | None = None) -> GraphCollection:
    """Load a benchmark collection, with a fetch hint when missing."""
    found = locate(name, data_dir)
    if found is None:
        raise DataError(
            f"dataset {name} not found under {data_root(data_dir)}; "
            f"run: netclass fetch --dataset {name}"
        )
    return load_tu_benchmark(found, name)
