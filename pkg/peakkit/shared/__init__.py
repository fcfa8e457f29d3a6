"""Shared plumbing: errors, settings, logging."""
