"""Tests for run configuration loading."""

from pathlib import Path

import pytest
from pydantic import ValidationError

from weldedtree.config import HardnessConfig, WeldedTreeConfig
from weldedtree.interfaces import GenuinenessPolicy
from weldedtree.streams import WORKERS_ENV

ROOT = Path(__file__).resolve().parents[2]


class TestDefaults:
    """Test default values."""

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv(WORKERS_ENV, raising=False)
        config = WeldedTreeConfig()
        assert config.graph.n == 4
        assert config.graph.fixture is None
        assert config.simulator.enforce_rootedness
        assert config.simulator.genuineness is GenuinenessPolicy.RAISE
        assert config.hardness.mode == "path"
        assert config.hardness.length == 24
        assert config.walk.dt == 0.001
        assert config.run.workers == 1

    def test_load_none(self):
        assert WeldedTreeConfig.load(None) == WeldedTreeConfig()

    def test_shipped_default_file(self, monkeypatch):
        """Test config/default.yaml matches the built-in defaults."""
        monkeypatch.delenv(WORKERS_ENV, raising=False)
        loaded = WeldedTreeConfig.load(str(ROOT / "config" / "default.yaml"))
        assert loaded == WeldedTreeConfig()


class TestFiles:
    """Test YAML and TOML files."""

    def test_yaml_round_trip(self, tmp_path):
        config = WeldedTreeConfig()
        config.graph.n = 6
        config.hardness.mode = "desirable"
        config.simulator.genuineness = GenuinenessPolicy.GADGET
        path = tmp_path / "run.yaml"
        config.to_yaml(str(path))
        assert WeldedTreeConfig.load(str(path)) == config

    def test_toml(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('[graph]\nn = 9\nfixture = "reference-n3"\n\n[run]\nseed = 42\n')
        config = WeldedTreeConfig.load(str(path))
        assert config.graph.n == 9
        assert config.graph.fixture == "reference-n3"
        assert config.run.seed == 42
        assert config.walk.tmax == 100.0

    def test_empty_yaml(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert WeldedTreeConfig.from_yaml(str(path)) == WeldedTreeConfig()


class TestValidation:
    """Test rejected values."""

    def test_unknown_mode(self):
        with pytest.raises(ValidationError):
            HardnessConfig(mode="exhaustive")

    @pytest.mark.parametrize(
        "data",
        [
            {"graph": {"n": 0}},
            {"walk": {"dt": 0.0}},
            {"simulator": {"genuineness": "ignore"}},
            {"run": {"workers": 0}},
        ],
    )
    def test_bad_values(self, data):
        with pytest.raises(ValidationError):
            WeldedTreeConfig(**data)


class TestWorkersEnvironment:
    """Test the worker count default from the environment."""

    def test_env_sets_default(self, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV, "3")
        assert WeldedTreeConfig().run.workers == 3

    @pytest.mark.parametrize("value", ["many", "0", "-2"])
    def test_bad_env_falls_back(self, monkeypatch, value):
        monkeypatch.setenv(WORKERS_ENV, value)
        assert WeldedTreeConfig().run.workers == 1
