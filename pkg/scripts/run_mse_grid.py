"""Sweep test MSE over noise kind, p and gate count.

Extra arguments are passed to ``noisyqrc mse-grid``, for example

    python scripts/run_mse_grid.py --synthetic 8,0.2,2.0,37 --p 0.001,0.003 --workers 8
"""

import sys

from noisyqrc.cli import main

if __name__ == "__main__":
    sys.exit(main(["mse-grid", *sys.argv[1:]]))
