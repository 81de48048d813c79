"""Script entry: render every composite figure for a results directory.

Exit codes: 0 success, 1 usage error, 2 missing or invalid inputs.
"""

import argparse
import sys

from .render import render_grid


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def main(argv=None) -> int:
    parser = _Parser(prog="truncfigs", description=__doc__.splitlines()[0])
    parser.add_argument("--results", required=True,
                        help="results directory containing plotdata/")
    parser.add_argument("--out", required=True, help="directory for the images")
    args = parser.parse_args(argv)
    try:
        written = render_grid(args.results, args.out)
    except (OSError, ValueError) as exc:
        print(f"truncfigs: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
