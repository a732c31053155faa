#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Script to run every reproduction recipe through the command line.
Usage:
    python reproduce.py                 # Run all recipes
    python reproduce.py fig2-trajectory # Run selected recipes
"""

import os
import sys
import subprocess
from pathlib import Path

ROOT = Path(__file__).resolve().parent
RECIPES = ROOT / 'src' / 'hkepler' / 'recipes'


def run_command(cmd):
    """Run a command and return the result."""
    print(f"Running: {' '.join(cmd)}")

    env = os.environ.copy()
    env['PYTHONPATH'] = str(ROOT / 'src') + os.pathsep + env.get('PYTHONPATH', '')
    env.setdefault('HK_LOG', 'info')

    return subprocess.run(cmd, capture_output=True, text=True, encoding='utf-8', env=env, cwd=ROOT)


def recipe_names():
    """Names of the shipped recipes."""
    return sorted(path.stem for path in RECIPES.glob('*.json'))


def main():
    """Main function."""
    names = sys.argv[1:] or recipe_names()

    print("hkepler - reproduction recipes")
    print("=" * 40)

    failed = []
    for name in names:
        result = run_command([sys.executable, '-m', 'hkepler', 'recipe', name,
                              '--out', str(ROOT / 'out' / 'recipes' / name)])
        status = 'ok' if result.returncode == 0 else f'FAILED (exit {result.returncode})'
        print(f"{name}: {status}")
        if result.returncode != 0:
            print(result.stderr)
            failed.append(name)

    print("=" * 40)
    if failed:
        print(f"{len(failed)} of {len(names)} recipes failed: {', '.join(failed)}")
        sys.exit(1)
    print(f"All {len(names)} recipes passed. Reports are in out/recipes/<name>/recipe.json")


if __name__ == "__main__":
    main()
