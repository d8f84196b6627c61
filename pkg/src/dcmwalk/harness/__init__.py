"""Scenario loading, episodes, metrics and the command-line interface."""
