"""Tests for baseline estimators."""
