"""Entry point for `python -m spinscan`."""

import sys

from .cli import main

sys.exit(main())
