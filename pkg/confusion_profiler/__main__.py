"""
Entry point for running confusion_profiler as a module.

This allows the package to be executed with: python -m confusion_profiler
"""

from .main import main

if __name__ == "__main__":
    exit(main())
