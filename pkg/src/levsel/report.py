"""Tab-separated output files with a reproducibility header.

Every emitted file starts with comment lines carrying the tool version and
the fully resolved configuration (seed included), so a file is always
traceable to the exact invocation that produced it.  No timestamps: the
same invocation must produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

from . import __version__


def format_value(v) -> str:
    if isinstance(v, float):
        return format(v, ".10g")
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def header_lines(config: dict, extra: list[str] | None = None) -> list[str]:
    lines = [f"# levsel {__version__}"]
    for key in config:
        lines.append(f"# {key} = {format_value(config[key])}")
    for line in extra or []:
        lines.append(f"# {line}")
    return lines


def write_table(
    path,
    columns: list[str],
    rows,
    config: dict,
    extra: list[str] | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = header_lines(config, extra)
    out.append("\t".join(columns))
    for row in rows:
        out.append("\t".join(format_value(v) for v in row))
    path.write_text("\n".join(out) + "\n")
    return path


def write_lines(path, lines: list[str], config: dict, extra: list[str] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = header_lines(config, extra) + list(lines)
    path.write_text("\n".join(body) + "\n")
    return path
