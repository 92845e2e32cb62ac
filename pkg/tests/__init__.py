"""
Tests for bessel-rkbs
"""
