"""Run configuration for welded tree experiments."""

from typing import Optional

import yaml
from pydantic import BaseModel, Field, field_validator

from weldedtree.interfaces import GenuinenessPolicy
from weldedtree.streams import default_workers


class GraphConfig(BaseModel):
    """Welded tree construction parameters."""

    n: int = Field(4, ge=1, description="Height of each binary tree")
    seed: int = Field(0, description="Construction seed (weld, labels, coloring)")
    fixture: Optional[str] = Field(None, description="Named reference graph instead of a random one")


class SimulatorConfig(BaseModel):
    """Sparse state simulation parameters."""

    prune_threshold: float = Field(
        1e-14, gt=0.0, le=1e-6, description="Amplitudes with magnitude at or below this are dropped"
    )
    support_cap: int = Field(2**20, ge=1, description="Maximum number of basis configurations")
    enforce_rootedness: bool = Field(
        True, description="Oracle gates only act when the result stays rooted"
    )
    genuineness: GenuinenessPolicy = Field(
        GenuinenessPolicy.RAISE,
        description="Vertex-space oracle gates on non-compliant configs: raise or act as identity",
    )


class ClassicalConfig(BaseModel):
    """Classical transcript simulation parameters."""

    trials: int = Field(1000, ge=0, description="Independent runs of the classical simulation")


class HardnessConfig(BaseModel):
    """Monte Carlo hardness experiment parameters."""

    mode: str = Field("path", description="Experiment: path, subtree or desirable")
    length: int = Field(24, ge=1, description="Color tuple length for path experiments")
    subtree_size: int = Field(24, ge=1, description="Vertex count of random address subtrees")
    trials: int = Field(10000, ge=1, description="Permutation draws")

    @field_validator("mode")
    @classmethod
    def _known_mode(cls, value: str) -> str:
        if value not in ("path", "subtree", "desirable"):
            raise ValueError(f"unknown hardness mode {value!r}")
        return value


class WalkConfig(BaseModel):
    """Quantum walk demo and classical baseline parameters."""

    tmax: float = Field(100.0, ge=0.0, description="Largest evolution time")
    dt: float = Field(0.001, gt=0.0, description="Integrator step")
    baseline_queries: int = Field(100, ge=0, description="Query budget of the classical baseline")
    baseline_trials: int = Field(10000, ge=1, description="Classical baseline trials")


class RunConfig(BaseModel):
    """Seeding and parallelism."""

    seed: int = Field(0, description="Root seed for every random stream of a run")
    workers: int = Field(
        default_factory=default_workers, ge=1, description="Worker processes for trial sweeps"
    )


class WeldedTreeConfig(BaseModel):
    """Complete experiment configuration."""

    graph: GraphConfig = Field(default_factory=GraphConfig)
    simulator: SimulatorConfig = Field(default_factory=SimulatorConfig)
    classical: ClassicalConfig = Field(default_factory=ClassicalConfig)
    hardness: HardnessConfig = Field(default_factory=HardnessConfig)
    walk: WalkConfig = Field(default_factory=WalkConfig)
    run: RunConfig = Field(default_factory=RunConfig)

    @classmethod
    def from_yaml(cls, path: str) -> "WeldedTreeConfig":
        """
        Load configuration from a YAML file.

        Args:
            path: Path to YAML configuration file

        Returns:
            WeldedTreeConfig instance
        """
        with open(path, "r") as f:
            data = yaml.safe_load(f)
        return cls(**(data or {}))

    @classmethod
    def from_toml(cls, path: str) -> "WeldedTreeConfig":
        """
        Load configuration from a TOML file.

        Args:
            path: Path to TOML configuration file

        Returns:
            WeldedTreeConfig instance
        """
        try:
            import tomli
        except ImportError:
            import tomllib as tomli

        with open(path, "rb") as f:
            data = tomli.load(f)
        return cls(**data)

    @classmethod
    def load(cls, path: Optional[str]) -> "WeldedTreeConfig":
        """Load by file extension; None gives the defaults."""
        if path is None:
            return cls()
        if path.endswith(".toml"):
            return cls.from_toml(path)
        return cls.from_yaml(path)

    def to_yaml(self, path: str) -> None:
        """
        Save configuration to a YAML file.

        Args:
            path: Path to save YAML file
        """
        with open(path, "w") as f:
            yaml.safe_dump(self.model_dump(mode="json"), f, default_flow_style=False)
