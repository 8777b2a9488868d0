"""
Configuration management for the acoustic estimation pipeline.
"""

from roomsense.config.settings import Settings, get_settings

__all__ = ["Settings", "get_settings"]
