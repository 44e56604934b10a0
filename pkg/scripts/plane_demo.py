"""End-to-end demo: generate a synthetic plane scene, estimate its
disparity, and score the result.

Usage: python scripts/plane_demo.py [workdir]
"""

import sys
import tempfile

from lumen.cli import run


def main() -> int:
    workdir = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="lumen_demo_")
    scene = f"{workdir}/scene"
    out = f"{workdir}/out"
    steps = [
        ["generate", "--out", scene, "--scene", "plane", "--disparity", "0.5",
         "--size", "64x64", "--seed", "7"],
        ["estimate", "--input", scene, "--out", out,
         "--profile", "synthetic", "--levels", "4"],
        ["evaluate", "--est", f"{out}/disparity.pfm", "--gt", f"{scene}/gt.pfm",
         "--threshold", "0.002"],
    ]
    for argv in steps:
        print(f"$ lumen {' '.join(argv)}")
        code = run(argv)
        if code != 0:
            return code
    print(f"\nartifacts in {workdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
