#!/usr/bin/env python3
"""
Elliptica
Startup script for the command-line application
"""

import sys


def check_dependencies():
    """Check if required dependencies are installed"""
    try:
        import jsonschema
        import joblib
        import numpy
        import orjson
        import pandas
        import pydantic
        import scipy
        import typer
        return True
    except ImportError as e:
        print(f"ERROR: Missing dependency: {e}", file=sys.stderr)
        print("Please run: pip install -r requirements.txt", file=sys.stderr)
        return False


def main():
    """Main function"""
    if not check_dependencies():
        sys.exit(2)

    from src.cli import app
    app(prog_name="elliptica")


if __name__ == "__main__":
    main()
