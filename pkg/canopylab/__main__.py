"""Allow `python -m canopylab`."""

import sys

from .cli import main

sys.exit(main())
