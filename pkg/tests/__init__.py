"""Tests for omega-combing."""
