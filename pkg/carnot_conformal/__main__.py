"""
Carnot Conformal
Entry point untuk `python -m carnot_conformal`
"""

from .commands import main


if __name__ == "__main__":
    raise SystemExit(main())
