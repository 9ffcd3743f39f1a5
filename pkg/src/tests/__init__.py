"""Unit tests for the weldedtree package."""
