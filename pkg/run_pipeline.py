#!/usr/bin/env python3
"""
Script to run every study through the Prefect pipeline
"""
import argparse

from l1rom.config.environment import load_env_file
from l1rom.infrastructure.batch.experiment_pipeline import study_pipeline


def parse_args():
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(description="Run the advection, Burgers, Euler and nozzle studies")
    parser.add_argument(
        "--out",
        type=str,
        default="results",
        help="Root output directory"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=0,
        help="Seed for rank perturbations"
    )
    parser.add_argument(
        "--experiments",
        nargs="+",
        choices=["advection", "burgers", "euler", "nozzle"],
        default=None,
        help="Subset of experiments to run (default: all)"
    )
    parser.add_argument(
        "--max-samples",
        type=int,
        default=10,
        help="Greedy iterations for the advection study"
    )
    return parser.parse_args()


if __name__ == "__main__":
    args = parse_args()
    load_env_file()
    study_pipeline(
        output_dir=args.out, seed=args.seed, experiments=args.experiments, max_samples=args.max_samples
    )
