"""Test package for the discriminantal TC toolkit."""
