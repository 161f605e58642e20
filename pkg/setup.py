"""
Setup script for qfox package.
This file is maintained for backward compatibility.
Configuration is in pyproject.toml.
"""

from setuptools import setup

setup()
