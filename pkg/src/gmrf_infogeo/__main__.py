"""Allow ``python -m gmrf_infogeo`` as an alternative to the console script."""

import sys

from gmrf_infogeo.cli import main

if __name__ == "__main__":
    sys.exit(main())
