#!/usr/bin/env python3
"""
canopylab - tree canopy mapping from LiDAR-derived noisy labels

Main entry point for the command-line tool.

Usage:
    python main.py [--threads N] [--verbose] <command> ...
    python main.py synth demo && python main.py run demo/manifest.ini
"""

import sys
from pathlib import Path

# Add the canopylab package to path
sys.path.insert(0, str(Path(__file__).parent))

from canopylab.cli import main as cli_main


if __name__ == "__main__":
    sys.exit(cli_main())
