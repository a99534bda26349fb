"""Test suite for Cap'n Web Python implementation."""
