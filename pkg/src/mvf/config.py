"""Loading of configuration assets: domain calibrations, axis registries,
the mock judge's rule table, and the meta-language pattern list.

Each loader checks an optional config directory first and falls back to the
packaged defaults, per file, so a partial override directory works. The
config directory mirrors the packaged layout::

    config/
      calibration/<domain>.json
      axes/<domain>.json
      judge-mock.rules.json
      metalanguage-patterns.json
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import MultiverseError
from .tagging import AxisSpec
from .verification import CheckKind, DomainCalibration


class ConfigError(MultiverseError):
    code = "config_error"


def _read(relative: str, config_dir: str | Path | None) -> str | None:
    if config_dir is not None:
        candidate = Path(config_dir) / relative
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8")
    packaged = resources.files("mvf").joinpath("config_defaults")
    for part in relative.split("/"):
        packaged = packaged.joinpath(part)
    if packaged.is_file():
        return packaged.read_text(encoding="utf-8")
    return None


def load_calibration(domain: str, config_dir: str | Path | None = None) -> DomainCalibration:
    """Calibration for the domain, falling back to the generic default."""
    text = _read(f"calibration/{domain}.json", config_dir)
    if text is None:
        text = _read("calibration/default.json", config_dir)
    if text is None:
        raise ConfigError(f"no calibration available for domain {domain!r}")
    raw = json.loads(text)
    thresholds = raw["thresholds"]
    guidance = raw["guidance"]
    for kind in CheckKind:
        if kind.value not in thresholds:
            raise ConfigError(f"calibration {raw.get('domain')}: missing thresholds for {kind.value}")
        if kind.value not in guidance:
            raise ConfigError(f"calibration {raw.get('domain')}: missing guidance for {kind.value}")
    return DomainCalibration(
        domain=raw["domain"],
        verifier_introduction=raw["verifier_introduction"],
        guidance=dict(guidance),
        thresholds=dict(thresholds),
    )


def load_axes(domain: str, config_dir: str | Path | None = None) -> list[AxisSpec]:
    text = _read(f"axes/{domain}.json", config_dir)
    if text is None:
        raise ConfigError(f"no axis registry for domain {domain!r}")
    raw = json.loads(text)
    axes = []
    for spec in raw["axes"]:
        if spec["mode"] == "fixed":
            axes.append(AxisSpec.fixed(spec["name"], spec["values"]))
        else:
            axes.append(
                AxisSpec.discovered(spec["name"], spec["min_values"], spec["max_values"])
            )
    return axes


def load_mock_rules(config_dir: str | Path | None = None) -> list[dict]:
    text = _read("judge-mock.rules.json", config_dir)
    return json.loads(text)["rules"] if text else []


def load_metalanguage_patterns(config_dir: str | Path | None = None) -> list[str]:
    text = _read("metalanguage-patterns.json", config_dir)
    return json.loads(text)["patterns"] if text else []
