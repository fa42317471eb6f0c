"""Allow `python -m grs`."""

import sys

from grs.main import main

if __name__ == "__main__":
    sys.exit(main())
