"""Test suite for roomsense package."""
