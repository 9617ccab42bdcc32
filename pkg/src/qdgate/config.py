"""Flat ``key = value`` run configuration.

Physical values are written in laboratory units and converted to the
internal meV / ps / nm system here, and nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .dynamics import NoiseMode
from .model import Configuration, PhysicalParams, Transition
from .units import CM_PER_S_TO_NM_PER_PS, EV_TO_MEV, G_PER_CM3_TO_INTERNAL

# key -> (unit in the file, factor to internal units, internal unit)
PHYSICAL_UNITS = {
    "omega_a": ("eV", EV_TO_MEV, "meV"),
    "V_F": ("meV", 1.0, "meV"),
    "V_xx": ("meV", 1.0, "meV"),
    "Omega": ("meV", 1.0, "meV"),
    "Gamma": ("ueV", 1e-3, "meV"),
    "l_e": ("nm", 1.0, "nm"),
    "l_h": ("nm", 1.0, "nm"),
    "mu": ("g/cm^3", 1.0, "g/cm^3"),
    "c_s": ("cm/s", CM_PER_S_TO_NM_PER_PS, "nm/ps"),
    "D_e": ("eV", EV_TO_MEV, "meV"),
    "D_h": ("eV", EV_TO_MEV, "meV"),
    "T": ("K", 1.0, "K"),
}

RUN_KEYS = ("configuration", "transition", "noise", "temperature", "t_max", "dt", "output", "seed",
            "ring_d_meaning", "sample_every")


class ConfigError(ValueError):
    pass


def units_help() -> str:
    defaults = PhysicalParams()
    rows = ["configuration keys (file units -> internal units):"]
    for key, (unit, factor, internal) in PHYSICAL_UNITS.items():
        default = getattr(defaults, key) / factor
        rows.append(f"  {key:<8} [{unit}] x {factor:g} -> {internal}   (default {default:g})")
    rows.append(f"  mu enters the phonon form factor as 1 g/cm^3 = {G_PER_CM3_TO_INTERNAL:.10g} meV ps^2 / nm^5")
    rows.append("  run keys: " + ", ".join(RUN_KEYS))
    rows.append("  temperature takes a comma-separated list in K; t_max and dt are in ps")
    return "\n".join(rows)


@dataclass(frozen=True)
class RunConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    configuration: Configuration = Configuration.RING
    transition: Transition = Transition.HIGH
    noise: NoiseMode = NoiseMode.FULL
    temperatures: tuple[float, ...] = ()
    t_max: float | None = None
    dt: float | None = None
    output: str | None = None
    seed: int = 0
    ring_d_meaning: str = "radius"
    sample_every: int = 1

    def __post_init__(self):
        for t in self.temperatures:
            if t < 0:
                raise ConfigError(f"invalid value for temperature: {t} (must be >= 0)")
        for key in ("t_max", "dt"):
            v = getattr(self, key)
            if v is not None and not v > 0:
                raise ConfigError(f"invalid value for {key}: {v} (must be > 0)")
        if self.sample_every < 1:
            raise ConfigError(f"invalid value for sample_every: {self.sample_every} (must be >= 1)")
        if self.ring_d_meaning not in ("radius", "spacing"):
            raise ConfigError(f"invalid value for ring_d_meaning: {self.ring_d_meaning!r}")

    @property
    def resolved_temperatures(self) -> tuple[float, ...]:
        return self.temperatures or (self.params.T,)

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    def echo(self) -> list[tuple[str, str]]:
        """Every setting that affects a run, in internal units."""
        out = []
        for key, (_, _, internal) in PHYSICAL_UNITS.items():
            out.append((key, f"{getattr(self.params, key)!r} {internal}"))
        out += [
            ("configuration", self.configuration.value),
            ("transition", self.transition.value),
            ("noise", self.noise.value),
            ("ring_d_meaning", self.ring_d_meaning),
            ("sample_every", str(self.sample_every)),
            ("seed", str(self.seed)),
        ]
        return out


def _number(key: str, raw: str, kind=float):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from None


def _enum(key: str, raw: str, enum_cls):
    try:
        return enum_cls(raw.lower())
    except ValueError:
        choices = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"invalid value for {key}: {raw!r} (choose from {choices})") from None


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    base = base or RunConfig()
    physical: dict[str, float] = {}
    run: dict[str, object] = {}
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"duplicate key: {key}")
        seen.add(key)
        if key in PHYSICAL_UNITS:
            physical[key] = _number(key, raw) * PHYSICAL_UNITS[key][1]
        elif key == "configuration":
            run[key] = _enum(key, raw, Configuration)
        elif key == "transition":
            run[key] = _enum(key, raw, Transition)
        elif key == "noise":
            run[key] = _enum(key, raw, NoiseMode)
        elif key == "temperature":
            run["temperatures"] = tuple(_number(key, t.strip()) for t in raw.split(",") if t.strip())
        elif key in ("t_max", "dt"):
            run[key] = _number(key, raw)
        elif key in ("seed", "sample_every"):
            run[key] = _number(key, raw, int)
        elif key in ("output", "ring_d_meaning"):
            run[key] = raw
        else:
            raise ConfigError(f"unknown key: {key}")
    try:
        params = replace(base.params, **physical) if physical else base.params
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return replace(base, params=params, **run)


def load_config(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, base)
