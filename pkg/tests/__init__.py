"""
Test suite for qfox package
"""
