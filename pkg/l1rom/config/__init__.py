"""Configuration package for l1rom."""

from l1rom.config.settings import get_settings, Settings

__all__ = ["get_settings", "Settings"]
