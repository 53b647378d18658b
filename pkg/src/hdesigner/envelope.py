"""ASR envelope rendering: turn attack/sustain/release parameters into PWM streams.

Everything here is pure computation over immutable inputs. A pattern is a set
of per-channel envelope assignments plus delay/repeat composition; rendering
quantizes it onto a tick grid (one tick = ``delta_ms``) and emits integer PWM
samples in [0, 1023] with labeled segment spans for plotting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping

PWM_MAX = 1023
NUM_CHANNELS = 8
# One rendered cycle per channel must fit in a single datagram.
MAX_CYCLE_SAMPLES = 512
# Safety bound on a fully expanded render; `repeat` has no schema ceiling.
MAX_TOTAL_TICKS = 65536


class SpecError(ValueError):
    """A pattern spec violated its schema; `field` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class PatternTooLongError(ValueError):
    """Rendered output would exceed a per-channel sample cap (REJECT_TOO_LONG)."""

    code = "REJECT_TOO_LONG"


class CurveType(str, Enum):
    LINEAR = "LINEAR"
    QUAD_EASE_IN = "QUAD_EASE_IN"
    QUAD_EASE_OUT = "QUAD_EASE_OUT"
    SQUARE = "SQUARE"


class SegmentLabel(str, Enum):
    ATTACK = "ATTACK"
    SUSTAIN = "SUSTAIN"
    RELEASE = "RELEASE"
    DELAY = "DELAY"
    OFFSET = "OFFSET"


def pwm_from_pct(pct: float) -> int:
    """Quantize an intensity percentage to 10-bit PWM, half away from zero."""
    # pct is never negative here, so floor(x + 0.5) is half-away-from-zero.
    return int(math.floor(pct * PWM_MAX / 100.0 + 0.5))


def _curve_at(curve: CurveType, u: float) -> float:
    if curve is CurveType.LINEAR:
        return u
    if curve is CurveType.QUAD_EASE_IN:
        return u * u
    if curve is CurveType.QUAD_EASE_OUT:
        return 1.0 - (1.0 - u) * (1.0 - u)
    # SQUARE holds the far endpoint for the whole segment; the u=0 boundary
    # stays at the near endpoint so a square release still lands on the floor.
    return 1.0 if u > 0.0 else 0.0


def ticks_for(duration_ms: int, delta_ms: int) -> int:
    """Number of grid ticks covering `duration_ms` (ceiling)."""
    return -(-duration_ms // delta_ms)


@dataclass(frozen=True)
class SegmentSpec:
    """One ramp segment: how long it lasts and which curve shapes it."""

    duration_ms: int
    curve: CurveType = CurveType.LINEAR


@dataclass(frozen=True)
class EnvelopeSpec:
    """Full ASR envelope: intensity bounds plus the three timed segments."""

    delta_ms: int
    peak_pct: float
    min_pct: float
    attack: SegmentSpec
    sustain_ms: int
    release: SegmentSpec

    def validate(self, field: str = "envelope") -> None:
        if self.delta_ms < 1:
            raise SpecError(f"{field}.delta_ms", "must be >= 1")
        for name, value in (("peak_pct", self.peak_pct), ("min_pct", self.min_pct)):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise SpecError(f"{field}.{name}", "must be a number")
            if not math.isfinite(value):
                raise SpecError(f"{field}.{name}", "must be finite")
        if not 0 <= self.min_pct <= 100:
            raise SpecError(f"{field}.min_pct", "must be in [0, 100]")
        if not 0 <= self.peak_pct <= 100:
            raise SpecError(f"{field}.peak_pct", "must be in [0, 100]")
        if self.min_pct > self.peak_pct:
            raise SpecError(f"{field}.min_pct", "must not exceed peak_pct")
        if self.attack.duration_ms < 0:
            raise SpecError(f"{field}.attack.duration_ms", "must be >= 0")
        if self.release.duration_ms < 0:
            raise SpecError(f"{field}.release.duration_ms", "must be >= 0")
        if self.sustain_ms < 0:
            raise SpecError(f"{field}.sustain_ms", "must be >= 0")

    def tick_count(self) -> int:
        return (
            ticks_for(self.attack.duration_ms, self.delta_ms)
            + ticks_for(self.sustain_ms, self.delta_ms)
            + ticks_for(self.release.duration_ms, self.delta_ms)
        )


@dataclass(frozen=True)
class Assignment:
    """An envelope applied to a set of motor channels at a start offset."""

    mask: int
    envelope: EnvelopeSpec
    start_offset_ms: int = 0

    def channels(self) -> list[int]:
        return [ch for ch in range(NUM_CHANNELS) if self.mask & (1 << ch)]


@dataclass(frozen=True)
class PatternSpec:
    """A full design: channel assignments plus delay/repeat composition."""

    assignments: tuple[Assignment, ...]
    delay_ms: int = 0
    repeat: int = 1

    @property
    def delta_ms(self) -> int:
        return self.assignments[0].envelope.delta_ms

    def validate(self) -> None:
        if not self.assignments:
            raise SpecError("assignments", "at least one assignment is required")
        if self.repeat < 1:
            raise SpecError("repeat", "must be >= 1")
        if self.delay_ms < 0:
            raise SpecError("delay_ms", "must be >= 0")
        delta = self.assignments[0].envelope.delta_ms
        seen_mask = 0
        for i, a in enumerate(self.assignments):
            at = f"assignments[{i}]"
            a.envelope.validate(f"{at}.envelope")
            if a.envelope.delta_ms != delta:
                raise SpecError(f"{at}.envelope.delta_ms",
                                "all assignments must share one delta_ms")
            if not 0 < a.mask <= 0xFF:
                raise SpecError(f"{at}.mask", "must be an 8-bit mask with at least one channel")
            if a.mask & seen_mask:
                raise SpecError(f"{at}.mask", "channel masks must be disjoint")
            seen_mask |= a.mask
            if a.start_offset_ms < 0:
                raise SpecError(f"{at}.offset_ms", "must be >= 0")
            if a.start_offset_ms % delta != 0:
                raise SpecError(f"{at}.offset_ms", f"must be a multiple of delta_ms ({delta})")

    # -- JSON schema (shared by the HTTP API and preset files) --------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "delta_ms": self.delta_ms,
            "repeat": self.repeat,
            "delay_ms": self.delay_ms,
            "assignments": [
                {
                    "mask": a.mask,
                    "offset_ms": a.start_offset_ms,
                    "envelope": {
                        "peak_pct": a.envelope.peak_pct,
                        "min_pct": a.envelope.min_pct,
                        "attack": {
                            "duration_ms": a.envelope.attack.duration_ms,
                            "curve": a.envelope.attack.curve.value,
                        },
                        "sustain_ms": a.envelope.sustain_ms,
                        "release": {
                            "duration_ms": a.envelope.release.duration_ms,
                            "curve": a.envelope.release.curve.value,
                        },
                    },
                }
                for a in self.assignments
            ],
        }

    @classmethod
    def from_dict(cls, obj: Any) -> "PatternSpec":
        if not isinstance(obj, Mapping):
            raise SpecError("$", "pattern spec must be a JSON object")
        delta = _req_int(obj, "delta_ms", minimum=1)
        repeat = _req_int(obj, "repeat", minimum=1)
        delay = _req_int(obj, "delay_ms", minimum=0)
        raw = obj.get("assignments")
        if not isinstance(raw, list) or not raw:
            raise SpecError("assignments", "must be a non-empty array")
        assignments = []
        for i, entry in enumerate(raw):
            at = f"assignments[{i}]"
            if not isinstance(entry, Mapping):
                raise SpecError(at, "must be an object")
            mask = _req_int(entry, "mask", at=at, minimum=1)
            offset = _req_int(entry, "offset_ms", at=at, minimum=0)
            env = entry.get("envelope")
            if not isinstance(env, Mapping):
                raise SpecError(f"{at}.envelope", "must be an object")
            assignments.append(Assignment(
                mask=mask,
                start_offset_ms=offset,
                envelope=EnvelopeSpec(
                    delta_ms=delta,
                    peak_pct=_req_num(env, "peak_pct", at=f"{at}.envelope"),
                    min_pct=_req_num(env, "min_pct", at=f"{at}.envelope"),
                    attack=_parse_segment(env, "attack", at=f"{at}.envelope"),
                    sustain_ms=_req_int(env, "sustain_ms", at=f"{at}.envelope", minimum=0),
                    release=_parse_segment(env, "release", at=f"{at}.envelope"),
                ),
            ))
        spec = cls(assignments=tuple(assignments), delay_ms=delay, repeat=repeat)
        spec.validate()
        return spec


def _req_int(obj: Mapping, key: str, at: str = "", minimum: int | None = None) -> int:
    field = f"{at}.{key}" if at else key
    if key not in obj:
        raise SpecError(field, "is required")
    value = obj[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise SpecError(field, "must be an integer")
    if minimum is not None and value < minimum:
        raise SpecError(field, f"must be >= {minimum}")
    return value


def _req_num(obj: Mapping, key: str, at: str = "") -> float:
    field = f"{at}.{key}" if at else key
    if key not in obj:
        raise SpecError(field, "is required")
    value = obj[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SpecError(field, "must be a number")
    if not math.isfinite(value):
        raise SpecError(field, "must be finite")
    return value


def _parse_segment(obj: Mapping, key: str, at: str) -> SegmentSpec:
    field = f"{at}.{key}"
    seg = obj.get(key)
    if not isinstance(seg, Mapping):
        raise SpecError(field, "must be an object")
    duration = _req_int(seg, "duration_ms", at=field, minimum=0)
    curve_name = seg.get("curve", CurveType.LINEAR.value)
    if not isinstance(curve_name, str):
        raise SpecError(f"{field}.curve", "must be a string")
    try:
        curve = CurveType(curve_name)
    except ValueError:
        names = "|".join(c.value for c in CurveType)
        raise SpecError(f"{field}.curve", f"unknown curve, expected {names}") from None
    return SegmentSpec(duration_ms=duration, curve=curve)


@dataclass(frozen=True)
class Span:
    """Half-open labeled tick range [start_tick, end_tick)."""

    label: SegmentLabel
    start_tick: int
    end_tick: int

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label.value,
                "start_tick": self.start_tick,
                "end_tick": self.end_tick}


@dataclass(frozen=True)
class RenderedPattern:
    """Per-channel PWM streams on a shared tick grid, with labeled spans.

    All channel lists share one length (shorter channels are padded with
    trailing zeros); spans tile each channel's own content range.
    """

    delta_ms: int
    channels: dict[int, list[int]]
    segments: dict[int, list[Span]]

    @property
    def length(self) -> int:
        return max((len(s) for s in self.channels.values()), default=0)

    def content_length(self, channel: int) -> int:
        spans = self.segments[channel]
        return spans[-1].end_tick if spans else 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "delta_ms": self.delta_ms,
            "length": self.length,
            "channels": {str(ch): samples for ch, samples in sorted(self.channels.items())},
            "segments": {str(ch): [s.to_dict() for s in spans]
                         for ch, spans in sorted(self.segments.items())},
        }


def render_segment(seg: SegmentSpec, role: SegmentLabel, env: EnvelopeSpec) -> list[int]:
    """Render one attack or release ramp to PWM samples.

    Sample i (0-indexed, N = ceil(duration/delta) total) is taken at phase
    u = (i+1)/N, i.e. at the end of its tick, so the last attack sample hits
    peak exactly and the last release sample hits the floor exactly.
    """
    if role not in (SegmentLabel.ATTACK, SegmentLabel.RELEASE):
        raise ValueError("role must be ATTACK or RELEASE")
    n = ticks_for(seg.duration_ms, env.delta_ms)
    if n <= 0:
        return []
    lo, hi = env.min_pct, env.peak_pct
    samples = []
    for i in range(n):
        u = (i + 1) / n
        phase = u if role is SegmentLabel.ATTACK else 1.0 - u
        pct = lo + (hi - lo) * _curve_at(seg.curve, phase)
        samples.append(pwm_from_pct(pct))
    return samples


def render_envelope(env: EnvelopeSpec) -> tuple[list[int], list[Span]]:
    """Render attack ‖ sustain ‖ release; returns samples plus labeled spans."""
    attack = render_segment(env.attack, SegmentLabel.ATTACK, env)
    sustain_n = ticks_for(env.sustain_ms, env.delta_ms)
    sustain = [pwm_from_pct(env.peak_pct)] * sustain_n
    release = render_segment(env.release, SegmentLabel.RELEASE, env)

    spans: list[Span] = []
    pos = 0
    for label, chunk in ((SegmentLabel.ATTACK, attack),
                         (SegmentLabel.SUSTAIN, sustain),
                         (SegmentLabel.RELEASE, release)):
        if chunk:
            spans.append(Span(label, pos, pos + len(chunk)))
            pos += len(chunk)
    return attack + sustain + release, spans


def render_cycle(spec: PatternSpec) -> dict[int, list[int]]:
    """Render one cycle per channel: start-offset zeros followed by the envelope.

    This is exactly what goes on the wire; the device expands repeat/delay
    locally. Raises PatternTooLongError when a channel cycle exceeds the
    per-datagram sample cap.
    """
    spec.validate()
    delta = spec.delta_ms
    out: dict[int, list[int]] = {}
    for i, a in enumerate(spec.assignments):
        offset_ticks = a.start_offset_ms // delta
        cycle_len = offset_ticks + a.envelope.tick_count()
        if cycle_len > MAX_CYCLE_SAMPLES:
            raise PatternTooLongError(
                f"assignments[{i}]: cycle is {cycle_len} samples, cap is {MAX_CYCLE_SAMPLES}")
        samples, _ = render_envelope(a.envelope)
        stream = [0] * offset_ticks + samples
        for ch in a.channels():
            out[ch] = list(stream)
    return out


def render_pattern(spec: PatternSpec) -> RenderedPattern:
    """Render the fully expanded pattern: repeat copies with delay gaps.

    Per assignment: start-offset zeros (repetition 1 only), then `repeat`
    copies of the envelope separated by ceil(delay/delta) zero ticks
    (repeat−1 gaps, none trailing). Channels are padded with trailing zeros
    to the longest stream.
    """
    spec.validate()
    delta = spec.delta_ms
    delay_ticks = ticks_for(spec.delay_ms, delta)

    # Bound-check before materializing anything.
    lengths = []
    for i, a in enumerate(spec.assignments):
        offset_ticks = a.start_offset_ms // delta
        env_ticks = a.envelope.tick_count()
        if offset_ticks + env_ticks > MAX_CYCLE_SAMPLES:
            raise PatternTooLongError(
                f"assignments[{i}]: cycle is {offset_ticks + env_ticks} samples, "
                f"cap is {MAX_CYCLE_SAMPLES}")
        total = offset_ticks + spec.repeat * env_ticks + (spec.repeat - 1) * delay_ticks
        if total > MAX_TOTAL_TICKS:
            raise PatternTooLongError(
                f"assignments[{i}]: expanded stream is {total} ticks, cap is {MAX_TOTAL_TICKS}")
        lengths.append(total)

    channels: dict[int, list[int]] = {}
    segments: dict[int, list[Span]] = {}
    for a in spec.assignments:
        offset_ticks = a.start_offset_ms // delta
        env_samples, env_spans = render_envelope(a.envelope)
        env_ticks = len(env_samples)

        stream = [0] * offset_ticks
        spans: list[Span] = []
        if offset_ticks:
            spans.append(Span(SegmentLabel.OFFSET, 0, offset_ticks))
        pos = offset_ticks
        if env_ticks or delay_ticks:
            for rep in range(spec.repeat):
                stream.extend(env_samples)
                spans.extend(Span(s.label, pos + s.start_tick, pos + s.end_tick)
                             for s in env_spans)
                pos += env_ticks
                if rep < spec.repeat - 1 and delay_ticks:
                    stream.extend([0] * delay_ticks)
                    spans.append(Span(SegmentLabel.DELAY, pos, pos + delay_ticks))
                    pos += delay_ticks
        for ch in a.channels():
            channels[ch] = list(stream)
            segments[ch] = list(spans)

    width = max(lengths)
    for ch, stream in channels.items():
        if len(stream) < width:
            stream.extend([0] * (width - len(stream)))
    return RenderedPattern(delta_ms=delta, channels=channels, segments=segments)
