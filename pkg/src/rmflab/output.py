"""Small output helpers: lossless float text, atomic file writes, digests."""

from __future__ import annotations

import hashlib
import os
import tempfile


def fmt_float(x: float) -> str:
    """Format with 17 significant digits: parsing the text recovers the bits."""
    return format(float(x), ".17g")


def atomic_write(path, data: str) -> None:
    """Write text to path via a temp file + rename; never leaves partial files."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_text(data: str) -> str:
    return hashlib.sha256(data.encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()
