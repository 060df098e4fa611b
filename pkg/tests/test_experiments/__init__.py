"""Tests for the experiments."""
