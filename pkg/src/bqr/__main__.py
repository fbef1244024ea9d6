"""Allow `python -m bqr ...` as an alias for the `bqr` console script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
