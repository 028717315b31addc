"""Two-qubit toy model: Pauli coefficients after one noisy random circuit,
plus the ensemble statistics of how often each channel fills in zeros.

    python scripts/toy_model.py --ensemble 4000 --out results/toy
"""

import sys

from noisyqrc.cli import main

if __name__ == "__main__":
    sys.exit(main(["toy-pauli", *sys.argv[1:]]))
