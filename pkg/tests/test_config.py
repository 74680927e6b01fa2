# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

from __future__ import annotations

import pytest

from vpatch.config import DEFAULT_TOLERANCES, THREADS_ENV, load_settings
from vpatch.errors import ConfigurationError


class TestLoadSettings:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV, raising=False)
        settings = load_settings()
        assert settings.tolerances == DEFAULT_TOLERANCES
        assert settings.evaluation_nodes == 256
        assert settings.solve_nodes == 512
        assert settings.threads == 1

    def test_yaml_overrides(self, tmp_path):
        path = tmp_path / "vpatch.yaml"
        path.write_text("tolerances:\n  strict: 1.0e-12\n  oversampling: 8\nnodes:\n  evaluation: 128\n")
        settings = load_settings(path, threads=2)
        assert settings.tolerances.strict == 1e-12
        assert settings.tolerances.oversampling == 8
        assert isinstance(settings.tolerances.oversampling, int)
        assert settings.tolerances.geometric == DEFAULT_TOLERANCES.geometric
        assert settings.evaluation_nodes == 128
        assert settings.threads == 2

    def test_unknown_tolerance(self, tmp_path):
        path = tmp_path / "vpatch.yaml"
        path.write_text("tolerances:\n  sloppy: 1\n")
        with pytest.raises(ConfigurationError) as info:
            load_settings(path)
        assert info.value.witness["keys"] == ["sloppy"]

    def test_unknown_section(self, tmp_path):
        path = tmp_path / "vpatch.yaml"
        path.write_text("plots: {}\n")
        with pytest.raises(ConfigurationError):
            load_settings(path)

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "vpatch.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigurationError):
            load_settings(path)

    def test_threads_from_environment(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "3")
        assert load_settings().threads == 3

    @pytest.mark.parametrize("raw", ["many", "0"])
    def test_bad_thread_environment(self, monkeypatch, raw):
        monkeypatch.setenv(THREADS_ENV, raw)
        with pytest.raises(ConfigurationError):
            load_settings()
