"""One batch script per figure kind: --in CSV, --out image, --overlay k=v."""

from __future__ import annotations

import argparse
import sys

from .io import DataError
from .render import PlotJob, render


def _parse(kind: str, argv: list[str] | None):
    parser = argparse.ArgumentParser(
        prog=f"dw-fig-{kind}",
        description=f"Render a {kind} figure from doublewell CSV output.")
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        help="input CSV (repeatable)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--overlay", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="overlay directive, e.g. vline=0.0202 or "
                             "hline=20,60 or title=...")
    args = parser.parse_args(argv)
    overlays: dict[str, list[str] | str] = {}
    for item in args.overlay:
        if "=" not in item:
            parser.error(f"overlay {item!r} is not KEY=VALUE")
        key, value = item.split("=", 1)
        if key == "title":
            overlays[key] = value
        else:
            overlays.setdefault(key, []).append(value)
    return PlotJob(kind=kind, inputs=args.inputs, output=args.out,
                   overlays=overlays)


def _run(kind: str, argv: list[str] | None) -> int:
    job = _parse(kind, argv)
    try:
        meta = render(job)
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {meta['output']}")
    return 0


def main_heatmap(argv: list[str] | None = None) -> int:
    return _run("heatmap", argv)


def main_eigencurves(argv: list[str] | None = None) -> int:
    return _run("eigencurves", argv)


def main_crossings(argv: list[str] | None = None) -> int:
    return _run("crossings", argv)
