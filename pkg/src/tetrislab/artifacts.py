"""Run manifests and the common artifact file conventions.

Every file this tool writes starts with a manifest: a single commented line
``# manifest: {json}`` for CSV/text artifacts, or a ``"manifest"`` field for
JSON documents.  The manifest records the fully resolved configuration
(command, game config, policy reference, seeds, tool version) so any artifact
can be regenerated byte-identically, excluding the wall-clock ``created``
field, by re-running its command.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import Iterable, Sequence

from ._version import __version__

MANIFEST_PREFIX = "# manifest: "


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def build_manifest(kind: str, **fields) -> dict:
    """Assemble a manifest dict; extra fields land after the common header."""
    manifest = {
        "tool": "tetrislab",
        "version": __version__,
        "created": utc_now_iso(),
        "kind": kind,
    }
    for key, value in fields.items():
        if value is not None:
            manifest[key] = value
    return manifest


def manifest_line(manifest: dict) -> str:
    return MANIFEST_PREFIX + json.dumps(manifest, sort_keys=True, separators=(", ", ": "))


def parse_manifest_line(line: str) -> dict:
    if not line.startswith(MANIFEST_PREFIX):
        raise ValueError(f"not a manifest line: {line[:40]!r}")
    return json.loads(line[len(MANIFEST_PREFIX):])


def format_csv_row(values: Iterable[object]) -> str:
    """Plain comma join; every value this tool emits is comma-free by design."""
    parts = [str(v) for v in values]
    for part in parts:
        if "," in part or "\n" in part:
            raise ValueError(f"CSV value {part!r} needs quoting, which this format forbids")
    return ",".join(parts)


def write_csv(
    path: str,
    manifest: dict,
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
    trailer: Sequence[str] = (),
) -> None:
    """CSV artifact: manifest comment, header row, data rows, comment trailer."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(manifest_line(manifest) + "\n")
        fh.write(format_csv_row(header) + "\n")
        for row in rows:
            fh.write(format_csv_row(row) + "\n")
        for line in trailer:
            fh.write(f"# {line}\n")


def read_csv(path: str) -> tuple[dict, list[str], list[list[str]], list[str]]:
    """Inverse of :func:`write_csv`; trailer lines come back uncommented."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty artifact")
    manifest = parse_manifest_line(lines[0])
    header: list[str] = []
    rows: list[list[str]] = []
    trailer: list[str] = []
    for line in lines[1:]:
        if line.startswith("#"):
            trailer.append(line[1:].strip())
        elif not header:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return manifest, header, rows, trailer


def csv_body(path: str) -> str:
    """Everything except manifest/comment lines; the reproducible part."""
    with open(path, "r", encoding="utf-8") as fh:
        return "".join(line for line in fh if not line.startswith("#"))
