"""Tests for the numpy network stack."""
