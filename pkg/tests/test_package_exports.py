#!/usr/bin/env python3
"""
Tests for the package-level export lists.
"""

import importlib

import pytest


class TestExports:

    @pytest.mark.parametrize("package", ['src.models', 'src.services', 'src.integrations'])
    def test_every_listed_name_is_importable(self, package):
        module = importlib.import_module(package)
        missing = [name for name in module.__all__ if not hasattr(module, name)]
        assert missing == []

    def test_star_import(self):
        namespace = {}
        exec('from src.services import *', namespace)
        assert 'FactorizationCommands' in namespace
        assert callable(namespace['solve_pg'])
