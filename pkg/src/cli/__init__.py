"""Command-line interface."""

from src.cli.app import cli, main

__all__ = ["cli", "main"]
