"""Builtin pattern catalog: the palette every fresh install starts with."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .envelope import (
    Assignment,
    CurveType,
    EnvelopeSpec,
    PatternSpec,
    SegmentSpec,
)

DELTA_MS = 10
ALL_MOTORS = 0b111  # reference band drives three motors


@dataclass(frozen=True)
class PresetEntry:
    """A named, persistable pattern design."""

    name: str
    spec: PatternSpec
    builtin: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "builtin": self.builtin, "spec": self.spec.to_dict()}


def _env(attack_ms: int, attack_curve: CurveType, sustain_ms: int,
         release_ms: int, release_curve: CurveType,
         peak: float = 100.0, floor: float = 0.0) -> EnvelopeSpec:
    return EnvelopeSpec(
        delta_ms=DELTA_MS,
        peak_pct=peak,
        min_pct=floor,
        attack=SegmentSpec(attack_ms, attack_curve),
        sustain_ms=sustain_ms,
        release=SegmentSpec(release_ms, release_curve),
    )


def _single(env: EnvelopeSpec, delay_ms: int = 0, repeat: int = 1,
            mask: int = ALL_MOTORS) -> PatternSpec:
    return PatternSpec(assignments=(Assignment(mask=mask, envelope=env),),
                       delay_ms=delay_ms, repeat=repeat)


def _pulse_train(bpm: int, pulse_ms: int = 80, repeat: int = 8) -> PatternSpec:
    # Pulse onset spacing is 60000/BPM ms: pulse + inter-repetition delay.
    period_ms = 60000 // bpm
    return _single(_env(pulse_ms, CurveType.SQUARE, 0, 0, CurveType.LINEAR),
                   delay_ms=period_ms - pulse_ms, repeat=repeat)


def _heartbeat_60() -> PatternSpec:
    """Lub-dub pair once per second: lub on motors 0+1, dub on motor 2.

    Both envelopes are 200 ms; the dub starts 300 ms into the cycle and the
    500 ms delay pads the played cycle out to exactly 1000 ms (60 BPM).
    """
    lub = _env(40, CurveType.QUAD_EASE_OUT, 60, 100, CurveType.QUAD_EASE_IN)
    dub = _env(40, CurveType.QUAD_EASE_OUT, 40, 120, CurveType.QUAD_EASE_IN, peak=70.0)
    return PatternSpec(
        assignments=(
            Assignment(mask=0b011, envelope=lub),
            Assignment(mask=0b100, envelope=dub, start_offset_ms=300),
        ),
        delay_ms=500,
        repeat=3,
    )


def _rotation() -> PatternSpec:
    """One pulse sweeping motor 0 → 1 → 2, each offset by the pulse length."""
    pulse = _env(80, CurveType.QUAD_EASE_OUT, 120, 100, CurveType.QUAD_EASE_IN)
    return PatternSpec(
        assignments=(
            Assignment(mask=0b001, envelope=pulse, start_offset_ms=0),
            Assignment(mask=0b010, envelope=pulse, start_offset_ms=300),
            Assignment(mask=0b100, envelope=pulse, start_offset_ms=600),
        ),
    )


def _sliding() -> PatternSpec:
    """Overlapping ramps that hand intensity from one motor to the next."""
    ramp = _env(150, CurveType.LINEAR, 100, 150, CurveType.LINEAR)
    return PatternSpec(
        assignments=(
            Assignment(mask=0b001, envelope=ramp, start_offset_ms=0),
            Assignment(mask=0b010, envelope=ramp, start_offset_ms=200),
            Assignment(mask=0b100, envelope=ramp, start_offset_ms=400),
        ),
    )


def _catalog() -> tuple[PresetEntry, ...]:
    linear = CurveType.LINEAR
    entries = [
        # Linear ramps at three slopes (shorter ramp = steeper slope).
        ("ramp-up-fast", _single(_env(100, linear, 150, 100, linear))),
        ("ramp-up-medium", _single(_env(300, linear, 150, 100, linear))),
        ("ramp-up-slow", _single(_env(600, linear, 150, 100, linear))),
        ("ramp-down-fast", _single(_env(0, linear, 150, 100, linear))),
        ("ramp-down-medium", _single(_env(0, linear, 150, 300, linear))),
        ("ramp-down-slow", _single(_env(0, linear, 150, 600, linear))),
        # Quadratic easing variants.
        ("quad-ease-in-fast", _single(_env(200, CurveType.QUAD_EASE_IN, 100, 150, linear))),
        ("quad-ease-in-slow", _single(_env(500, CurveType.QUAD_EASE_IN, 100, 150, linear))),
        ("quad-ease-out-fast", _single(_env(200, CurveType.QUAD_EASE_OUT, 100, 150, linear))),
        ("quad-ease-out-slow", _single(_env(500, CurveType.QUAD_EASE_OUT, 100, 150, linear))),
        ("square-pulse", _single(_env(200, CurveType.SQUARE, 0, 0, linear))),
        ("tapping", _single(_env(50, CurveType.SQUARE, 0, 0, linear),
                            delay_ms=150, repeat=8)),
        ("heartbeat-60", _heartbeat_60()),
        ("rotation", _rotation()),
        ("sliding", _sliding()),
        # Beat-spaced pulse trains for tempo work.
        ("pulse-60bpm", _pulse_train(60)),
        ("pulse-100bpm", _pulse_train(100)),
        ("pulse-120bpm", _pulse_train(120)),
        ("pulse-150bpm", _pulse_train(150)),
    ]
    return tuple(PresetEntry(name=name, spec=spec, builtin=True) for name, spec in entries)


_CATALOG = _catalog()


def builtin_presets() -> list[PresetEntry]:
    """The fixed builtin catalog, in palette order."""
    return list(_CATALOG)
