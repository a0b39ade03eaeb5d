"""Tests for hybrid_tail_system."""
