"""hdesigner: design, preview and play vibrotactile patterns.

The package splits along the wire: envelope/presets/library are pure
pattern-design code, wire/transport carry rendered patterns to devices
over UDP, server exposes the whole thing over HTTP, and simulator is a
software device for development without hardware.
"""

from .envelope import (
    NUM_CHANNELS,
    PWM_MAX,
    Assignment,
    CurveType,
    EnvelopeSpec,
    PatternSpec,
    PatternTooLongError,
    RenderedPattern,
    SegmentLabel,
    SegmentSpec,
    Span,
    SpecError,
    render_cycle,
    render_envelope,
    render_pattern,
)
from .library import LibraryError, PresetLibrary
from .presets import PresetEntry, builtin_presets
from .server import HapticServer
from .transport import DeliveryResult, FaultInjector, UdpTransport
from .wire import (
    AckMsg,
    HelloMsg,
    PatternMsg,
    StopMsg,
    WireError,
    decode,
    encode,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "AckMsg",
    "CurveType",
    "DeliveryResult",
    "EnvelopeSpec",
    "FaultInjector",
    "HapticServer",
    "HelloMsg",
    "LibraryError",
    "NUM_CHANNELS",
    "PatternMsg",
    "PatternSpec",
    "PatternTooLongError",
    "PresetEntry",
    "PresetLibrary",
    "PWM_MAX",
    "RenderedPattern",
    "SegmentLabel",
    "SegmentSpec",
    "Span",
    "SpecError",
    "StopMsg",
    "UdpTransport",
    "WireError",
    "builtin_presets",
    "decode",
    "encode",
    "render_cycle",
    "render_envelope",
    "render_pattern",
]
