"""Allow `python -m polsim` as an alias for the polsim console script."""

import sys

from .cli import main

sys.exit(main())
