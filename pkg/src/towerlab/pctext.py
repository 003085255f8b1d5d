"""Plain-text format for pc presentations.

::

    # <243,5>
    p: 3
    gens: x y s2 s3 t3
    x^3 = s3
    y^3 = s3
    [y,x] = s2
    [s2,x] = s3
    [s2,y] = t3

Rules may also be written with the word on the left (``s2 = [y,x]``).
Unlisted rules are trivial; ``1`` denotes the identity.
"""

from __future__ import annotations

import re
from pathlib import Path

from .pcgroup import PcPresentation, PresentationError

_POW = re.compile(r"^([A-Za-z_]\w*)\^(\d+)$")
_COMM = re.compile(r"^\[\s*([A-Za-z_]\w*)\s*,\s*([A-Za-z_]\w*)\s*\]$")


def parse_presentation(text: str, check: bool = True) -> PcPresentation:
    p = 3
    gens: list[str] | None = None
    powers: dict[str, str] = {}
    comms: dict[tuple[str, str], str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition(":")
        if sep and key.strip() in ("p", "gens"):
            if key.strip() == "p":
                p = int(val)
            else:
                gens = val.split()
            continue
        if "=" not in line:
            raise PresentationError(f"line {lineno}: expected a rule, got {raw!r}")
        lhs, rhs = (s.strip() for s in line.split("=", 1))
        if not (_POW.match(lhs) or _COMM.match(lhs)):
            lhs, rhs = rhs, lhs
        if m := _POW.match(lhs):
            if int(m.group(2)) != p:
                raise PresentationError(f"line {lineno}: power rules must use exponent {p}")
            powers[m.group(1)] = rhs
        elif m := _COMM.match(lhs):
            comms[(m.group(1), m.group(2))] = rhs
        else:
            raise PresentationError(f"line {lineno}: cannot read rule {raw!r}")
    if gens is None:
        raise PresentationError("missing 'gens:' header")
    return PcPresentation(gens, powers, comms, p=p, check=check)


def format_presentation(G: PcPresentation, title: str | None = None) -> str:
    lines = []
    if title:
        lines.append(f"# {title}")
    lines.append(f"p: {G.p}")
    lines.append("gens: " + " ".join(G.labels))
    for kind, idx, rhs in G.rules():
        if not any(rhs):
            continue
        w = G.format_element(rhs)
        if kind == "pow":
            lines.append(f"{G.labels[idx[0]]}^{G.p} = {w}")
        else:
            j, i = idx
            lines.append(f"[{G.labels[j]},{G.labels[i]}] = {w}")
    return "\n".join(lines) + "\n"


def load_presentation(path: str | Path) -> PcPresentation:
    return parse_presentation(Path(path).read_text())
