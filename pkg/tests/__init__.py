"""Test package for edudyn."""
