#!/usr/bin/env python3
"""Human-readable table of every fixed construction vs its closed form.

The machine-readable equivalent is `skewgain verify-paper`; this script
prints the same blocks as a 6-significant-digit table for eyeballing.
"""

import json
import sys
from io import StringIO

from skewgain.cli import main


def run():
    buf = StringIO()
    stdout = sys.stdout
    sys.stdout = buf
    try:
        code = main(["verify-paper"])
    finally:
        sys.stdout = stdout
    doc = json.loads(buf.getvalue())

    header = f"{'block':<22} {'c_in':>10} {'c_out':>10} {'delta':>10} {'closed':>10}  ok"
    print(header)
    print("-" * len(header))
    for block in doc["blocks"]:
        print(
            f"{block['name']:<22} {block['c_in']:>10.6g} {block['c_out']:>10.6g}"
            f" {block['delta']:>10.6g} {block['delta_closed_form']:>10.6g}  {block['ok']}"
        )
    print("-" * len(header))
    print(f"all blocks agree within {doc['tolerance']:g}: {doc['ok']}")
    return code


if __name__ == "__main__":
    sys.exit(run())
