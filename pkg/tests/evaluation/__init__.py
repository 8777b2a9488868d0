"""Tests for evaluation metrics and reports."""
