"""Test suite for the synthesis toolkit."""
