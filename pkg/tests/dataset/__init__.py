"""Tests for dataset synthesis."""
