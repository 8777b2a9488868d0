"""Tests for noise generation and mixing."""
