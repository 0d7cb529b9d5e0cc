"""Reader and writer for ``.qcd`` design files.

Layout (ASCII, optionally gzip-compressed when the name ends in ``.gz``)::

    # qcd design file
    {"blocks": ..., "e": ..., "family": ..., "format_version": 1, ...}
    <row key> <row key> ... (k hex keys per block, one block per line)

A row key packs the n coordinate codes of one generator row base q with
the first coordinate least significant.  Blocks must be in canonical RREF.
The header is JSON with sorted keys and gzip output carries no timestamp,
so writing the same design twice gives identical bytes.
"""

from __future__ import annotations

import gzip
import io
import json
from pathlib import Path

import numpy as np

from .design import Design
from .errors import FormatError
from .gfq import FieldSpec
from .projgeom import rref_batch

FORMAT_VERSION = 1
MAGIC = "# qcd design file"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def _row_weights(q: int, n: int) -> np.ndarray:
    return np.array([q**j for j in range(n)], dtype=object)


def encode(design: Design) -> str:
    F = design.field
    header = {
        "format_version": FORMAT_VERSION,
        "q": F.q,
        "p": F.p,
        "e": F.e,
        "modulus": list(F.modulus),
        "n": design.n,
        "k": design.k,
        "r": design.r,
        "family": design.family,
        "blocks": design.size,
        "meta": _jsonable(design.meta),
    }
    out = io.StringIO()
    out.write(MAGIC + "\n")
    out.write(json.dumps(header, sort_keys=True) + "\n")
    q, n = F.q, design.n
    if q**n < 2**63:
        w = np.array([q**j for j in range(n)], dtype=np.int64)
        keys = design.gens @ w
    else:
        keys = design.gens.astype(object) @ _row_weights(q, n)
    for row in keys:
        out.write(" ".join(format(int(x), "x") for x in row) + "\n")
    return out.getvalue()


def write_design(design: Design, path) -> None:
    data = encode(design).encode("ascii")
    path = Path(path)
    if path.suffix == ".gz":
        with open(path, "wb") as raw, gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0) as fh:
            fh.write(data)
    else:
        path.write_bytes(data)


def _read_text(path) -> str:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    try:
        return raw.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not an ASCII design file") from exc


def decode(text: str) -> Design:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise FormatError("empty design file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad header: {exc}") from exc
    need = ("format_version", "q", "p", "e", "modulus", "n", "k", "r", "family", "blocks")
    missing = [k for k in need if k not in header]
    if missing:
        raise FormatError(f"header lacks {missing}")
    if header["format_version"] != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {header['format_version']}")
    try:
        F = FieldSpec(header["p"], header["e"], tuple(header["modulus"]))
    except Exception as exc:
        raise FormatError(f"bad field in header: {exc}") from exc
    if F.q != header["q"]:
        raise FormatError("q does not equal p^e")
    n, k, r = header["n"], header["k"], header["r"]
    body = lines[1:]
    if len(body) != header["blocks"]:
        raise FormatError(f"header announces {header['blocks']} blocks, body has {len(body)}")
    q = F.q
    try:
        keys = [[int(tok, 16) for tok in ln.split()] for ln in body]
    except ValueError as exc:
        raise FormatError(f"bad row key: {exc}") from exc
    if any(len(row) != k for row in keys):
        raise FormatError(f"every block needs exactly {k} row keys")
    limit = q**n
    if any(x < 0 or x >= limit for row in keys for x in row):
        raise FormatError("row key out of range")
    arr = np.array(keys, dtype=object if limit >= 2**63 else np.int64).reshape(-1, k)
    gens = np.empty((arr.shape[0], k, n), dtype=np.int64)
    for j in range(n):
        gens[:, :, j] = (arr // q**j) % q
    if gens.shape[0]:
        R, rk = rref_batch(F, gens)
        bad = np.nonzero((rk != k) | (R != gens).any(axis=(1, 2)))[0]
        if bad.size:
            raise FormatError(f"block {int(bad[0])} is not a canonical rank-{k} RREF matrix")
    return Design(F, n, k, r, gens, header["family"], header.get("meta", {}))


def read_design(path) -> Design:
    return decode(_read_text(path))

