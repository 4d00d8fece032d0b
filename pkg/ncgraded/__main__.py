"""Allow the package to be run with python3 -m ncgraded"""

import sys

from .bin import main

if __name__ == "__main__":
    sys.exit(main())
