"""Tests for MFCC features."""
