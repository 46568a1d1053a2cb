"""
Molecule files and runtime settings.

A molecule file is a flat JSON object with the chain parameters in Hz.
Runtime settings come from the environment (``.env`` is loaded by the
entry points).
"""

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.exceptions import ConfigParseError, ConfigValidationError
from core.spin_system import SpinChainParams

logger = logging.getLogger(__name__)

MOLECULE_DIR = Path(__file__).parent / "molecules"
DEFAULT_MOLECULE = MOLECULE_DIR / "alanine.json"
DEFAULT_DB_PATH = "softpulse_runs.db"


class MoleculeConfig(BaseModel):
    """Chain parameters as quoted for a molecule (cyclic frequencies)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    label: str = "molecule"
    j12_hz: float = Field(..., gt=0, description="J12 coupling (Hz)")
    j23_hz: float = Field(..., gt=0, description="J23 coupling (Hz)")
    delta12_hz: float = Field(..., allow_inf_nan=False, description="Carrier minus qubit-2 Larmor (Hz)")
    delta13_hz: float = Field(..., allow_inf_nan=False, description="Carrier minus qubit-3 Larmor (Hz)")

    def to_params(self) -> SpinChainParams:
        return SpinChainParams.from_hz(
            self.j12_hz, self.j23_hz, self.delta12_hz, self.delta13_hz, label=self.label
        )


def resolve_molecule_path(name: Union[str, Path]) -> Path:
    """A path as given, or the bundled file of that name when nothing exists there."""
    path = Path(name)
    if path.exists():
        return path
    bundled = MOLECULE_DIR / (path.name if path.suffix else f"{path.name}.json")
    return bundled if bundled.exists() else path


def parse_config(path: Union[str, Path]) -> MoleculeConfig:
    """
    Read and validate a molecule file.

    Args:
        path: JSON file, or the name of a bundled molecule.

    Returns:
        The validated :class:`MoleculeConfig`.

    Raises:
        ConfigParseError: Missing file or malformed JSON (with line and column).
        ConfigValidationError: Missing, unknown or out-of-range fields.
    """
    resolved = resolve_molecule_path(path)
    try:
        text = resolved.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigParseError(str(path), f"cannot read file: {e.strerror or e}") from e
    config = parse_config_text(text, str(resolved))
    logger.debug("loaded molecule %s from %s", config.label, resolved)
    return config


def parse_config_text(text: str, source: str = "<text>") -> MoleculeConfig:
    """Validate molecule JSON already in memory; ``source`` names it in errors."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(source, e.msg, line=e.lineno, column=e.colno) from e
    try:
        return MoleculeConfig.model_validate(raw)
    except ValidationError as e:
        problems = [
            f"{'.'.join(str(part) for part in err['loc']) or '<root>'}: {err['msg']}"
            for err in e.errors()
        ]
        raise ConfigValidationError(source, problems) from e


def write_config(config: MoleculeConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(config.model_dump(), indent=2) + "\n", encoding="utf-8")
    return path


def config_from_params(p: SpinChainParams) -> MoleculeConfig:
    return MoleculeConfig(**p.to_hz())


@dataclass(frozen=True)
class Settings:
    molecule: str
    db_path: str
    log_level: str

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            molecule=os.getenv("SOFTPULSE_MOLECULE") or str(DEFAULT_MOLECULE),
            db_path=os.getenv("SOFTPULSE_DB_PATH") or DEFAULT_DB_PATH,
            log_level=(os.getenv("SOFTPULSE_LOG_LEVEL") or "WARNING").upper(),
        )
