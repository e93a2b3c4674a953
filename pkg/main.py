"""Entry point: python main.py [--log-level LEVEL] COMMAND [OPTIONS]."""

from src.cli import main

if __name__ == "__main__":
    main()
