"""Sparse amplitude states over register/workspace basis configurations."""

from __future__ import annotations

import math
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Optional

from weldedtree.interfaces import Space


class BasisConfig(NamedTuple):
    """One computational basis configuration.

    ``regs`` holds the register strings as ints; bit q of ``work`` is workspace qubit q.
    Tuple ordering is the canonical iteration order.
    """

    regs: tuple[int, ...]
    work: int

    def with_reg(self, index: int, value: int) -> BasisConfig:
        regs = list(self.regs)
        regs[index] = value
        return BasisConfig(tuple(regs), self.work)

    def swapped(self, a: int, b: int) -> BasisConfig:
        regs = list(self.regs)
        regs[a], regs[b] = regs[b], regs[a]
        return BasisConfig(tuple(regs), self.work)

    def bit(self, q: int) -> int:
        return (self.work >> q) & 1

    def flip(self, q: int) -> BasisConfig:
        return BasisConfig(self.regs, self.work ^ (1 << q))


class SparseState:
    """
    Finite map from basis configurations to complex amplitudes.

    Instances are treated as immutable values; every operation returns a new state.

    Args:
        amplitudes: Initial amplitudes (copied)
        space: Register space tag
    """

    def __init__(
        self,
        amplitudes: Optional[Mapping[BasisConfig, complex]] = None,
        space: Space = Space.VERTEX,
    ):
        self._amps: dict[BasisConfig, complex] = dict(amplitudes or {})
        self.space = space

    @classmethod
    def basis(cls, config: BasisConfig, space: Space = Space.VERTEX) -> SparseState:
        return cls({config: 1.0 + 0j}, space)

    @classmethod
    def zero(cls, space: Space = Space.VERTEX) -> SparseState:
        return cls({}, space)

    def __len__(self) -> int:
        return len(self._amps)

    def __contains__(self, config: object) -> bool:
        return config in self._amps

    def __iter__(self) -> Iterator[BasisConfig]:
        return iter(self.support())

    def amplitude(self, config: BasisConfig) -> complex:
        return self._amps.get(config, 0j)

    def support(self) -> list[BasisConfig]:
        """Configurations in canonical order."""
        return sorted(self._amps)

    def items(self) -> list[tuple[BasisConfig, complex]]:
        return [(c, self._amps[c]) for c in self.support()]

    def as_dict(self) -> dict[BasisConfig, complex]:
        return dict(self._amps)

    def norm_squared(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self._amps.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def probabilities(self) -> list[tuple[BasisConfig, float]]:
        return [(c, abs(a) ** 2) for c, a in self.items()]

    def scaled(self, factor: complex) -> SparseState:
        return SparseState({c: a * factor for c, a in self._amps.items()}, self.space)

    def __add__(self, other: SparseState) -> SparseState:
        out = dict(self._amps)
        for c, a in other._amps.items():
            out[c] = out.get(c, 0j) + a
        return SparseState(out, self.space)

    def __sub__(self, other: SparseState) -> SparseState:
        return self + other.scaled(-1)

    def project(self, keep: Callable[[BasisConfig], bool]) -> SparseState:
        """Restriction to the configurations satisfying ``keep``."""
        return SparseState({c: a for c, a in self._amps.items() if keep(c)}, self.space)

    def map_configs(
        self, fn: Callable[[BasisConfig], BasisConfig], space: Optional[Space] = None
    ) -> SparseState:
        """Push amplitudes through a config map, summing collisions."""
        out: dict[BasisConfig, complex] = {}
        for c, a in self._amps.items():
            key = fn(c)
            out[key] = out.get(key, 0j) + a
        return SparseState(out, space or self.space)

    def inner(self, other: SparseState) -> complex:
        """<self|other>."""
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        total = sum(
            (self._amps[c].conjugate() * other._amps[c] for c in small._amps if c in large._amps),
            0j,
        )
        return total

    def max_residual(self, other: SparseState) -> float:
        """Largest amplitude difference over the union of supports."""
        keys: Iterable[BasisConfig] = set(self._amps) | set(other._amps)
        return max((abs(self.amplitude(c) - other.amplitude(c)) for c in keys), default=0.0)

    def pruned(self, threshold: float) -> tuple[SparseState, float]:
        """Drop amplitudes with magnitude <= threshold; returns the state and the dropped mass."""
        kept: dict[BasisConfig, complex] = {}
        dropped = 0.0
        for c, a in self._amps.items():
            if abs(a) > threshold:
                kept[c] = a
            else:
                dropped += abs(a) ** 2
        return SparseState(kept, self.space), dropped

    def __repr__(self) -> str:
        return f"SparseState({self.space.value}, support={len(self)}, norm={self.norm():.12g})"
