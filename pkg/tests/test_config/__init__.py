"""Tests for configuration and result files."""
