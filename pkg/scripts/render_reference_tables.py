#!/usr/bin/env python3
"""Print the bundled published score tables through the report formatter.

The three scenes ship with the package as formatter fixtures (the source
imagery is not distributed); this renders them exactly as a benchmark run
would, with best-per-column marks.
"""

import argparse
import sys
from pathlib import Path

from pansharp.bench import emit_report, render_report, report_filename
from pansharp.reference_scores import reference_reports


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=None, help="also write csv/json/txt here")
    args = parser.parse_args()

    for scene, report in reference_reports().items():
        print(render_report(report, "text-table"))
        if args.out_dir:
            for fmt in ("csv", "json", "text-table"):
                path = emit_report(
                    report, fmt, Path(args.out_dir) / report_filename(scene, fmt)
                )
                print(f"wrote {path}")
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
