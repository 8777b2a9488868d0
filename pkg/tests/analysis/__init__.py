"""Tests for impulse-response analysis."""
