"""
Validated run configuration for the mooncat command line.

Builds one RunConfig from an INI file (through ConfigLoader) plus command-line
flags. Model sections map onto the physics models:

- [moon]      -> MoonModel
- [two_mode]  -> TwoModeModel (optional)

Every subcommand reads its own settings section ([kernel], [wigner],
[scaling], [zeno], [adaptive], [repcode], [circuit]). Unknown keys and
values of the wrong type raise ConfigError naming the offending section.key.
"""

import logging
import os
import typing
from typing import Dict, List, Literal, Optional, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from mooncat.config.defaults import get_default
from mooncat.config.loader import ConfigLoader
from mooncat.constants import REFERENCE_RATES
from mooncat.exceptions import ConfigError
from mooncat.models import MoonModel, TwoModeModel, canonical_hash

logger = logging.getLogger(__name__)

COMMANDS = ("kernel", "wigner", "scaling", "zeno", "adaptive", "repcode", "circuit")


# =============================================================================
# Section Settings
# =============================================================================

class SectionSettings(BaseModel):
    """Base for subcommand sections: frozen, unknown keys rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)


class KernelSettings(SectionSettings):
    alphas: List[float] = [2.0]
    lams: List[float] = [0.0]
    kind: Literal["moon", "squeezed"] = "moon"
    tol: float = Field(default=get_default("state_tol"), gt=0.0)
    kernel_tol: float = Field(default=get_default("kernel_tol"), gt=0.0)

    @field_validator("alphas")
    @classmethod
    def _positive_alphas(cls, value: List[float]) -> List[float]:
        if not value or any(a <= 0 for a in value):
            raise ValueError("alphas must be positive")
        return value


class WignerSettings(SectionSettings):
    alpha: float = Field(default=2.0, gt=0.0)
    lam: float = 1.0
    kind: Literal["moon", "squeezed"] = "moon"
    state: Literal["even", "odd", "plus", "minus", "mixture"] = "even"
    extent: float = Field(default=get_default("wigner_extent"), gt=0.0)
    points: int = Field(default=get_default("wigner_points"), ge=3)


class ScalingSettings(SectionSettings):
    n_bars: List[float] = [2.0, 3.0, 4.0]
    lams: List[float] = [0.0, 0.5, 1.0]
    kinds: List[Literal["moon", "squeezed"]] = ["moon"]
    method: Literal["spectral", "fit", "auto"] = "spectral"
    window: List[float] = []
    saturation_floor: float = Field(default=get_default("saturation_floor"), ge=0.0)

    @field_validator("n_bars")
    @classmethod
    def _n_bar_range(cls, value: List[float]) -> List[float]:
        if not value or any(not 1.0 <= n <= 8.0 for n in value):
            raise ValueError("n_bars must lie in [1, 8]")
        return value

    @field_validator("lams")
    @classmethod
    def _lam_range(cls, value: List[float]) -> List[float]:
        if not value or any(not 0.0 <= lam <= 1.2 for lam in value):
            raise ValueError("lams must lie in [0, 1.2]")
        return value

    @field_validator("window")
    @classmethod
    def _window_pair(cls, value: List[float]) -> List[float]:
        if value and len(value) != 2:
            raise ValueError("window needs two values: low, high")
        return value


class ZenoSettings(SectionSettings):
    method: Literal["fit", "spectral", "analytic"] = "spectral"
    xi_points: int = Field(default=13, ge=3)
    xi_decades: float = Field(default=1.0, gt=0.0)
    xi_min: Optional[float] = Field(default=None, gt=0.0)
    xi_max: Optional[float] = Field(default=None, gt=0.0)


class AdaptiveSettings(SectionSettings):
    mode: Literal["campaign", "benchmark"] = "campaign"
    rate: float = Field(default=1.0, gt=0.0)
    c0: float = Field(default=0.95, ge=0.0, le=1.0)
    cinf: float = Field(default=0.0, ge=-1.0, le=1.0)
    zeno: bool = False
    deterministic: bool = False
    rate_min: float = Field(default=get_default("rate_min"), gt=0.0)
    rate_max: float = Field(default=get_default("rate_max"), gt=0.0)
    shots: int = Field(default=get_default("shots_per_round"), ge=2)
    target_sigma: float = Field(default=get_default("target_sigma"), gt=0.0)
    budget: Optional[float] = Field(default=None, gt=0.0)
    max_rounds: int = Field(default=get_default("max_rounds"), ge=1)
    overhead: float = Field(default=get_default("round_overhead"), ge=0.0)
    benchmark_rates: List[float] = [0.01, 1.0, 100.0]
    campaigns: int = Field(default=10, ge=1)


class RepcodeSettings(SectionSettings):
    kinds: List[Literal["moon", "standard"]] = ["moon", "standard"]
    moon_n_bar: float = Field(default=4.0, gt=0.0)
    moon_lam: float = Field(default=1.0, ge=0.0)
    standard_n_bar: float = Field(default=8.0, gt=0.0)
    distances: List[int] = [3, 5, 7]
    ratios: List[float] = [1e-4, 3e-4, 1e-3, 3e-3]
    gate_time: float = Field(default=1.0, gt=0.0)
    shots: int = Field(default=get_default("max_shots"), ge=1000)
    min_errors: int = Field(default=get_default("min_logical_errors"), ge=1)

    @field_validator("distances")
    @classmethod
    def _odd_distances(cls, value: List[int]) -> List[int]:
        if not value or any(d < 3 or d % 2 == 0 for d in value):
            raise ValueError("distances must be odd and >= 3")
        return value

    def settings(self) -> List[Dict]:
        """Cat-kind settings for threshold_sweep."""
        table = {
            "moon": {"kind": "moon", "n_bar": self.moon_n_bar, "lam": self.moon_lam},
            "standard": {"kind": "standard", "n_bar": self.standard_n_bar, "lam": 0.0},
        }
        return [table[kind] for kind in self.kinds]


class CircuitSettings(SectionSettings):
    g2_target: float = Field(default=REFERENCE_RATES["g2"], gt=0.0)
    g_l: float = Field(default=REFERENCE_RATES["g_l"], gt=0.0)
    mutual: float = Field(default=1.0, gt=0.0)
    delta_l: float = 0.0
    omega_p: float = 0.0
    v_att_min: float = -2.0
    v_att_max: float = -0.5
    v_phi_min: float = -3.0
    v_phi_max: float = 3.0
    points: int = Field(default=61, ge=5)


SECTION_MODELS: Dict[str, Type[SectionSettings]] = {
    "kernel": KernelSettings,
    "wigner": WignerSettings,
    "scaling": ScalingSettings,
    "zeno": ZenoSettings,
    "adaptive": AdaptiveSettings,
    "repcode": RepcodeSettings,
    "circuit": CircuitSettings,
}

DEFAULT_MOON = {"alpha": 2.0, "kappa2": 1.0, "kappa1": 1e-3}


# =============================================================================
# INI Parsing
# =============================================================================

def _is_list(annotation) -> bool:
    return typing.get_origin(annotation) in (list, List)


def _is_complex(annotation) -> bool:
    return annotation is complex or complex in typing.get_args(annotation)


def _coerce(text: str, annotation, key: str):
    """Turn INI text into a value pydantic can validate."""
    text = text.strip()
    if _is_list(annotation):
        return [item.strip() for item in text.split(",") if item.strip()]
    if text.lower() in ("", "none") and type(None) in typing.get_args(annotation):
        return None
    if _is_complex(annotation):
        try:
            return complex(text.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"expected a complex number, got {text!r}", key=key) from exc
    return text


def _build(section: str, model_cls: Type[BaseModel], raw: Dict[str, str], base: Optional[Dict] = None):
    values = dict(base or {})
    fields = model_cls.model_fields
    for key, text in raw.items():
        if key not in fields:
            raise ConfigError("unknown key", key=f"{section}.{key}")
        values[key] = _coerce(text, fields[key].annotation, f"{section}.{key}")
    try:
        return model_cls(**values)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = error["loc"][0] if error["loc"] else ""
        raise ConfigError(error["msg"], key=f"{section}.{field}" if field else section) from exc


# =============================================================================
# Run Configuration
# =============================================================================

class RunConfig(BaseModel):
    """Everything one CLI invocation needs, validated.

    Attributes:
        command: Subcommand name
        seed: Base seed (default 0)
        out: Output directory
        threads: Worker threads (0 means all cores)
        log_level: Logger level name
        moon: Memory model shared by kernel/scaling/zeno runs
        two_mode: Optional memory-buffer model
    """

    model_config = ConfigDict(frozen=True)

    command: Literal["kernel", "wigner", "scaling", "zeno", "adaptive", "repcode", "circuit"]
    seed: int = Field(default=0, ge=0)
    out: str = "results"
    threads: int = Field(default=0, ge=0)
    log_level: str = "INFO"
    moon: MoonModel = MoonModel(**DEFAULT_MOON)
    two_mode: Optional[TwoModeModel] = None
    kernel: KernelSettings = KernelSettings()
    wigner: WignerSettings = WignerSettings()
    scaling: ScalingSettings = ScalingSettings()
    zeno: ZenoSettings = ZenoSettings()
    adaptive: AdaptiveSettings = AdaptiveSettings()
    repcode: RepcodeSettings = RepcodeSettings()
    circuit: CircuitSettings = CircuitSettings()

    @classmethod
    def from_loader(
        cls,
        loader: ConfigLoader,
        command: str,
        seed: Optional[int] = None,
        out: Optional[str] = None,
        threads: Optional[int] = None,
    ) -> "RunConfig":
        """
        Validate a loaded INI configuration; flags override [Common].

        Raises:
            ConfigError: For unknown sections or keys and invalid values
        """
        known = {"Common", "moon", "two_mode", *SECTION_MODELS}
        for section in loader.sections():
            if section not in known:
                raise ConfigError("unknown section", key=section)
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}", key="command")

        values = {
            "command": command,
            "seed": seed if seed is not None else loader.seed,
            "out": out if out is not None else loader.get("Common", "out", fallback="results"),
            "threads": threads if threads is not None else loader.threads,
            "log_level": loader.get_log_level(),
            "moon": _build("moon", MoonModel, loader.section("moon"), DEFAULT_MOON),
        }
        if loader.has_section("two_mode"):
            values["two_mode"] = _build("two_mode", TwoModeModel, loader.section("two_mode"))
        for section, model_cls in SECTION_MODELS.items():
            values[section] = _build(section, model_cls, loader.section(section))
        try:
            return cls(**values)
        except ValidationError as exc:
            error = exc.errors()[0]
            raise ConfigError(error["msg"], key=f"Common.{error['loc'][0]}") from exc

    @classmethod
    def from_file(cls, path: Optional[str], command: str, **flags) -> "RunConfig":
        """Load and validate an INI file (None gives all defaults)."""
        return cls.from_loader(ConfigLoader(path), command, **flags)

    def config_hash(self) -> str:
        """SHA-256 of the validated content, excluding out and threads."""
        return canonical_hash(self.model_dump(exclude={"out", "threads"}))

    def worker_count(self) -> int:
        """Resolved thread count."""
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)
