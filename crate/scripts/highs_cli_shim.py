#!/usr/bin/env python3
"""Run highspy with the arguments of the HiGHS command-line executable.

Usage: highs_cli_shim.py --model_file M --options_file O --solution_file S
"""

import argparse
import sys

import highspy


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--model_file", required=True)
    parser.add_argument("--options_file")
    parser.add_argument("--solution_file", required=True)
    args = parser.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if args.options_file and h.readOptions(args.options_file) != highspy.HighsStatus.kOk:
        print(f"cannot read options file {args.options_file}", file=sys.stderr)
        return 1
    if h.readModel(args.model_file) == highspy.HighsStatus.kError:
        print(f"cannot read model file {args.model_file}", file=sys.stderr)
        return 1
    if h.run() == highspy.HighsStatus.kError:
        print("solver run failed", file=sys.stderr)
        return 1
    h.writeSolution(args.solution_file, 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
