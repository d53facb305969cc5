"""Narrative reasoning agent: Xapi stories, focus, shadows and headless shadows."""

from ._core import Agent, ConfigError, Domain, StoryError, XapagyError

__all__ = ["Agent", "ConfigError", "Domain", "StoryError", "XapagyError"]
