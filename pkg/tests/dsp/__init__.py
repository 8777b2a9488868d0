"""Tests for signal primitives."""
