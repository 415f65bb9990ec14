#!/usr/bin/env python3
"""
QKD Budget - Main Runner
Main entry point for the key-budget workflow.

Usage:
    python runner.py budget scenario_config/scenarios/golden.json
    python runner.py optimize scenario_config/scenarios/golden.json --target mu
    python runner.py sweep scenario_config/scenarios/golden.json --out output/alpha_sweep.csv
    python runner.py validate scenario_config/scenarios/golden.json --seeds 20

Any scenario key can be overridden on the command line, e.g. --channel.alpha=0.05
"""

import os
import sys

# Add the current directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
