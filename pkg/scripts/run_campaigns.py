#!/usr/bin/env python3
"""Run the campaign configs and print a one-line digest per pass flag.

    python3 scripts/run_campaigns.py                 # distance, epidemic, collision
    python3 scripts/run_campaigns.py smoke --workers 2
"""
import argparse
import sys
import time
from pathlib import Path

from nwfpp import experiments

HERE = Path(__file__).resolve().parent
DEFAULT = ("distance", "epidemic", "collision")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("names", nargs="*", default=DEFAULT, help="config names under scripts/configs")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args(argv)

    code = 0
    for name in args.names:
        path = HERE / "configs" / f"{name}.json"
        t0 = time.perf_counter()
        summary, rc = experiments.run_campaign(path, workers=args.workers)
        code = max(code, rc)
        print(f"== {name} ({time.perf_counter() - t0:.0f} s) -> {summary['config']['output_dir']}")
        for flag, ok in summary["pass"].items():
            print(f"   {'PASS' if ok else 'FAIL'} {flag}")
    return code


if __name__ == "__main__":
    sys.exit(main())
