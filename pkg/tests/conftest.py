"""Shared fixtures."""

import numpy as np
import pytest

import roomsense.config.settings as settings_module
from roomsense.config.settings import Settings
from roomsense.dsp.signal import Signal


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from default settings, unaffected by a local .env file."""
    monkeypatch.setattr(settings_module, "_settings", Settings(_env_file=None))
    yield
    monkeypatch.setattr(settings_module, "_settings", None)


@pytest.fixture
def settings():
    return settings_module.get_settings()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def unit_impulse():
    """A 0.5 s impulse response with all energy in its first sample."""
    h = np.zeros(8000)
    h[0] = 1.0
    return Signal(h, 16000)


@pytest.fixture
def sine():
    """One second of a 1 kHz tone at 16 kHz."""
    t = np.arange(16000) / 16000
    return Signal(0.5 * np.sin(2 * np.pi * 1000 * t), 16000)
