import sys

from noisyqrc.cli import main

sys.exit(main())
