"""Allow ``python -m jacfact`` to behave like the installed script."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
