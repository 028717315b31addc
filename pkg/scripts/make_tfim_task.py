"""Write a transverse-field Ising regression task as a dataset JSON file.

    python scripts/make_tfim_task.py --synthetic 8,0.2,2.0,37 --output tfim8.json
"""

import sys

from noisyqrc.cli import main

if __name__ == "__main__":
    sys.exit(main(["gen-task", *sys.argv[1:]]))
