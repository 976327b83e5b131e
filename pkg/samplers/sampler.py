from dataclasses import dataclass, field
from importlib import import_module
from typing import Any
import numpy as np
from exceptions import InvalidConfigException
from registration.qubo_builder import ReducedQubo
from services.printr import Printr

printr = Printr()

# Energies closer than this (relative to max(1, |E|)) are treated as ties.
TIE_TOLERANCE = 1e-9


def tie_scale(energy: float) -> float:
    return TIE_TOLERANCE * max(1.0, abs(energy))


@dataclass(frozen=True)
class Solution:
    bits: np.ndarray
    """Full bitstring q with the clamped bit restored as q[0] = 1."""

    energy: float
    """qᵀPq of `bits`."""

    @property
    def free_bits(self) -> np.ndarray:
        return self.bits[1:]

    @property
    def hex(self) -> str:
        return bits_to_hex(self.bits)


@dataclass(frozen=True)
class EnergySpectrum:
    levels: np.ndarray
    """Distinct energies, ascending."""

    multiplicities: np.ndarray
    representatives: np.ndarray
    """Lexicographically smallest free-bit state index of every level."""

    @property
    def gap(self) -> float:
        if self.levels.size < 2:
            return 0.0
        return float(self.levels[1] - self.levels[0])


@dataclass(frozen=True)
class TraceEvent:
    step: int
    energy: float
    bits: np.ndarray


@dataclass
class Trace:
    """Best-so-far improvements, strictly decreasing in energy."""

    events: list[TraceEvent] = field(default_factory=list)

    @property
    def final_energy(self) -> float | None:
        return self.events[-1].energy if self.events else None


@dataclass
class SampleResult:
    solution: Solution
    trace: Trace | None = None
    spectrum: EnergySpectrum | None = None


def bits_to_hex(bits) -> str:
    """Bit 0 is the most significant digit."""
    value = 0
    for bit in np.asarray(bits).reshape(-1):
        value = (value << 1) | int(bit)
    width = (len(np.asarray(bits).reshape(-1)) + 3) // 4
    return f"{value:0{width}x}"


def with_clamped_bit(free_bits) -> np.ndarray:
    return np.concatenate(([1], np.asarray(free_bits, dtype=np.int8))).astype(np.int8)


def exact_energy(reduced: ReducedQubo, free_bits) -> float:
    b = np.asarray(free_bits, dtype=np.float64)
    return float(b @ reduced.Q @ b + reduced.linear @ b + reduced.constant)


class Sampler:
    """Base class of every sampler. Override `sample` (and optionally the hooks) in a subclass.

    Samplers are created from the `sampler` config section, either by name or
    dynamically from a module path and class name.
    """

    def __init__(self, name: str, config: dict[str, Any]):
        self.name = name
        """The configured sampler name, e.g. "sa"."""

        self.config = config
        """The `sampler` config section."""

        self.debug: bool = bool(config.get("debug", False))

    @staticmethod
    def create_dynamically(module_path: str, class_name: str, name: str, config: dict[str, Any], **kwargs):
        """Creates a sampler from a module path (e.g. samplers.my_sampler) and class name."""
        module = import_module(module_path)
        DerivedSamplerClass = getattr(module, class_name)
        return DerivedSamplerClass(name, config, **kwargs)

    def validate(self) -> list[str]:
        """Collects config problems. A sampler returning errors is not used."""
        return []

    def prepare(self):
        """Called once after validate()."""

    def sample(self, reduced: ReducedQubo, seed: int = 0) -> SampleResult:
        raise NotImplementedError


def create_sampler(config: dict[str, Any]) -> Sampler:
    """Instantiates, validates and prepares the sampler named in the `sampler` config section."""
    sampler_config = dict(config.get("sampler", {}))
    sampler_config.setdefault("debug", config.get("debug", False))
    name = sampler_config.get("name", "exhaustive")
    class_config = sampler_config.get("class")

    # subclasses import this module
    from samplers.exhaustive_sampler import ExhaustiveSampler
    from samplers.simulated_annealing_sampler import SimulatedAnnealingSampler

    try:
        if class_config:
            sampler = Sampler.create_dynamically(
                module_path=class_config.get("module"),
                class_name=class_config.get("name"),
                name=name,
                config=sampler_config,
                **class_config.get("args", {}),
            )
        elif name == "exhaustive":
            sampler = ExhaustiveSampler(name, sampler_config)
        elif name == "sa":
            sampler = SimulatedAnnealingSampler(name, sampler_config)
        else:
            raise InvalidConfigException(f"Unknown sampler '{name}' (use exhaustive or sa)")
    except (ImportError, AttributeError, TypeError) as e:
        msg = str(e).strip() or type(e).__name__
        raise InvalidConfigException(f"Could not create sampler '{name}': {msg}") from e

    errors = sampler.validate()
    if errors:
        raise InvalidConfigException(", ".join(errors))
    sampler.prepare()
    printr.print_debug(f"Using sampler '{name}' ({type(sampler).__name__})")
    return sampler
