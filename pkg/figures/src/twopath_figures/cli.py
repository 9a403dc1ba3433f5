"""Command line: twopath-render --spec <file> --out <dir>.

Exit codes: 0 success, 2 schema/spec error (including empty data), 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .render import EmptyData, FigureSpec, RenderError, SchemaMismatch, render

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_IO = 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="twopath-render",
        description="Render throughput/SEP curves from twopath sweep CSV files.",
    )
    parser.add_argument("--spec", required=True, help="JSON figure spec")
    parser.add_argument("--out", default=".", help="output directory for the image")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec.from_json(args.spec)
        result = render(spec, args.out)
        print(result.image_path)
        for s in result.series:
            print(f"  series {'/'.join(map(str, s.key))}: {len(s.x)} points ({s.style})")
        return EXIT_OK
    except (SchemaMismatch, EmptyData) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except RenderError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
