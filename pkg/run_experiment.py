#!/usr/bin/env python3
"""
Script to run a single l1rom command, e.g. ``python run_experiment.py rom burgers --method all``
"""
from l1rom.cli.main import main

if __name__ == "__main__":
    main()
