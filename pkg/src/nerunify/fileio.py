from __future__ import annotations

import hashlib
import os
import tempfile
from typing import Union

from .corpus import UNIFIED, Corpus, parse_conll


def atomic_write(path: str, data: Union[str, bytes]) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def read_unified(path: str, id_prefix: str = "sent") -> Corpus:
    """Read a CoNLL file already in the unified schema."""
    return parse_conll(read_bytes(path), source=UNIFIED, id_prefix=id_prefix)
