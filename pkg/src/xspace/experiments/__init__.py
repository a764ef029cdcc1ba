"""Desk-scale experiments built on the norm engine."""
