"""Mean output fidelity per channel and p over circuits below 200 gates.

    python scripts/fidelity_tables.py --dataset lih.json --seeds 100 --workers 8
"""

import sys

from noisyqrc.cli import main

if __name__ == "__main__":
    sys.exit(main(["fidelity-table", *sys.argv[1:]]))
