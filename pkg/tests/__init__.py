"""Test package for the exact sample-size engine."""
