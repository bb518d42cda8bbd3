"""Entry point for ``python -m prefixalign``."""

from prefixalign.cli import main

if __name__ == "__main__":
    main()
