"""Flat ``dotted.key = value`` scenario configuration.

Blank lines and ``#`` comments are ignored.  Example::

    mode = analytic
    pulse1.center_z = -2.5
    pulse1.half_width = 2
    pulse2.center_z = 2.5
    pulse2.half_width = 2
    domain.z_min = -5
    domain.z_max = 5
    domain.nz = 512
    slice_times = auto
    output.path = report.csv
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .cylinder import CylinderSpec, overlap_time
from .errors import ConfigError, SetupError
from .fields import DIRECTIONS, PROFILES, DomainSpec, PulseSpec

MODES = ("analytic", "fdtd")
_PULSE_FIELDS = ("profile", "amplitude", "center_z", "half_width", "direction",
                 "polarization_angle")
_DOMAIN_FIELDS = ("Lx", "Ly", "z_min", "z_max", "nx", "ny", "nz")
KEYS = frozenset(
    ["mode", "slice_times", "fdtd.dt_cfl", "output.path", "rng.seed"]
    + [f"pulse{i}.{f}" for i in (1, 2) for f in _PULSE_FIELDS]
    + [f"domain.{f}" for f in _DOMAIN_FIELDS]
)
REQUIRED = ("domain.z_min", "domain.z_max", "domain.nz", "pulse1.center_z",
            "pulse1.half_width", "output.path")
DEFAULTS = {
    "mode": "analytic",
    "slice_times": "auto",
    "fdtd.dt_cfl": "0.5",
    "rng.seed": "0",
    "domain.Lx": "1.0",
    "domain.Ly": "1.0",
    "domain.nx": "4",
    "domain.ny": "4",
}
_PULSE_DEFAULTS = {"profile": "bump", "amplitude": "1.0", "polarization_angle": "0.0"}


@dataclass(frozen=True)
class ScenarioConfig:
    mode: str
    pulse1: PulseSpec
    pulse2: PulseSpec | None
    domain: DomainSpec
    slice_times: tuple
    dt_cfl: float
    output_path: str
    seed: int

    @property
    def pulses(self) -> tuple:
        return (self.pulse1,) if self.pulse2 is None else (self.pulse1, self.pulse2)

    def cylinder(self) -> CylinderSpec:
        """Region spanning t = 0 to the last slice."""
        t_end = self.slice_times[-1] if self.slice_times[-1] > 0 else 1.0
        return CylinderSpec(0.0, t_end, self.slice_times, self.domain)


def _read_lines(text: str) -> tuple[dict, dict]:
    values, lines = {}, {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError("unknown key", key, number)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", key, number)
        if not value:
            raise ConfigError("empty value", key, number)
        values[key] = value
        lines[key] = number
    return values, lines


class _Reader:
    def __init__(self, values, lines):
        self.values = values
        self.lines = lines

    def fail(self, key, message):
        raise ConfigError(message, key, self.lines.get(key))

    def raw(self, key, default=None):
        if key in self.values:
            return self.values[key]
        if default is None:
            raise ConfigError("missing required key", key)
        return default

    def real(self, key, default=None, check=None, what=""):
        text = self.raw(key, default)
        try:
            value = float(text)
        except ValueError:
            self.fail(key, f"not a number: {text!r}")
        if not math.isfinite(value):
            self.fail(key, "must be finite")
        if check is not None and not check(value):
            self.fail(key, f"out of range: {text} ({what})")
        return value

    def integer(self, key, default=None, minimum=0):
        text = self.raw(key, default)
        try:
            value = int(text)
        except ValueError:
            self.fail(key, f"not an integer: {text!r}")
        if value < minimum:
            self.fail(key, f"out of range: {text} (must be >= {minimum})")
        return value

    def choice(self, key, options, default=None):
        text = self.raw(key, default)
        if text not in options:
            self.fail(key, f"must be one of {', '.join(options)}, got {text!r}")
        return text


def _pulse(reader: _Reader, i: int) -> PulseSpec:
    p = f"pulse{i}."
    return PulseSpec(
        profile=reader.choice(p + "profile", PROFILES, _PULSE_DEFAULTS["profile"]),
        amplitude=reader.real(p + "amplitude", _PULSE_DEFAULTS["amplitude"]),
        center_z=reader.real(p + "center_z"),
        half_width=reader.real(p + "half_width", check=lambda v: v > 0, what="must be > 0"),
        direction=reader.choice(p + "direction", DIRECTIONS, "+z" if i == 1 else "-z"),
        polarization_angle=reader.real(p + "polarization_angle",
                                       _PULSE_DEFAULTS["polarization_angle"]),
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario; raises ConfigError naming key and line."""
    values, lines = _read_lines(text)
    for key in REQUIRED:
        if key not in values:
            raise ConfigError("missing required key", key)
    r = _Reader(values, lines)

    mode = r.choice("mode", MODES, DEFAULTS["mode"])
    pulse1 = _pulse(r, 1)
    pulse2 = _pulse(r, 2) if any(k.startswith("pulse2.") for k in values) else None

    positive = dict(check=lambda v: v > 0, what="must be > 0")
    z_min = r.real("domain.z_min")
    z_max = r.real("domain.z_max", check=lambda v: v > z_min, what="must exceed domain.z_min")
    domain = DomainSpec(
        Lx=r.real("domain.Lx", DEFAULTS["domain.Lx"], **positive),
        Ly=r.real("domain.Ly", DEFAULTS["domain.Ly"], **positive),
        z_min=z_min, z_max=z_max,
        nx=r.integer("domain.nx", DEFAULTS["domain.nx"], minimum=4),
        ny=r.integer("domain.ny", DEFAULTS["domain.ny"], minimum=4),
        nz=r.integer("domain.nz", minimum=4),
    )

    dt_cfl = r.real("fdtd.dt_cfl", DEFAULTS["fdtd.dt_cfl"],
                    check=lambda v: 0 < v <= 1, what="must lie in (0, 1]")
    seed = r.integer("rng.seed", DEFAULTS["rng.seed"], minimum=0)
    output_path = r.raw("output.path")

    text = r.raw("slice_times", DEFAULTS["slice_times"])
    if text == "auto":
        if pulse2 is None:
            r.fail("slice_times", "'auto' needs both pulse1 and pulse2")
        try:
            t = overlap_time(pulse1, pulse2)
        except SetupError as exc:
            r.fail("slice_times", f"'auto' needs approaching pulses: {exc}")
        times = (0.0, 0.5 * t, t, 1.5 * t)
    else:
        try:
            times = tuple(float(v) for v in text.split(","))
        except ValueError:
            r.fail("slice_times", f"expected 'auto' or comma-separated numbers, got {text!r}")
        if not all(math.isfinite(v) and v >= 0 for v in times):
            r.fail("slice_times", "times must be finite and >= 0")
        if list(times) != sorted(times):
            r.fail("slice_times", "times must be in ascending order")

    return ScenarioConfig(mode, pulse1, pulse2, domain, times, dt_cfl, output_path, seed)


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
