"""Shared registry so the terminal summary can list one line per acceptance criterion."""

RESULTS: dict[int, tuple[bool, str]] = {}
