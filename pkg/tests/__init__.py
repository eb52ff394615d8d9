"""Test suite for canopylab."""
