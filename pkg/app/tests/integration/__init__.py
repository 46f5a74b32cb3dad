"""
Integration tests package.

Contains the acceptance suites, CLI workflows and executed documentation.
"""
