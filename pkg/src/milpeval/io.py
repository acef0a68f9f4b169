"""Instance file dispatch: format detection plus read/write helpers."""

import os

from .errors import UnknownFormat
from .lpfile import parse_lp
from .mps import parse_mps, write_mps

_MPS_LEADS = {"NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"}
_LP_LEADS = {"minimize", "minimum", "min", "maximize", "maximum", "max"}


def sniff_format(text):
    """Guess mps/lp from the first meaningful token."""
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            return "mps"
        if line.startswith("\\"):
            return "lp"
        first = line.split()[0]
        if first.upper() in _MPS_LEADS:
            return "mps"
        if first.lower() in _LP_LEADS:
            return "lp"
        raise UnknownFormat(f"cannot tell MPS from LP (first token {first!r})")
    raise UnknownFormat("empty input")


def parse_instance(path_or_text, format="auto", name=None):
    """Parse an instance from a path or raw text.

    Strings containing a newline are treated as raw content; anything
    else is treated as a path. `format` may be auto, mps, or lp.
    """
    source = os.fspath(path_or_text) if hasattr(path_or_text, "__fspath__") else path_or_text
    if "\n" in source:
        text = source
        default_name = ""
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
        base = os.path.basename(source)
        default_name = os.path.splitext(base)[0]
        if format == "auto":
            ext = os.path.splitext(base)[1].lower()
            if ext == ".mps":
                format = "mps"
            elif ext == ".lp":
                format = "lp"

    if format == "auto":
        format = sniff_format(text)
    if format == "mps":
        inst = parse_mps(text)
        if name is not None:
            inst.name = name
        elif not inst.name:
            inst.name = default_name
        return inst
    if format == "lp":
        return parse_lp(text, name=name if name is not None else default_name)
    raise UnknownFormat(f"unknown format {format!r}")


def read_instance(path, format="auto"):
    return parse_instance(os.fspath(path), format=format)


def write_instance(inst, path):
    """Write an instance to a free-MPS file."""
    text = write_mps(inst)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def list_instance_files(directory):
    """Instance files under a directory, name-sorted for determinism."""
    names = [s for s in os.listdir(directory) if s.lower().endswith((".mps", ".lp"))]
    return [os.path.join(directory, s) for s in sorted(names)]
