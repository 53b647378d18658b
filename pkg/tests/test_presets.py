"""Builtin catalog integrity checks."""

import pytest

from hdesigner.envelope import render_cycle, render_pattern
from hdesigner.presets import builtin_presets


def by_name(name):
    entry = {p.name: p for p in builtin_presets()}.get(name)
    assert entry is not None, f"missing builtin {name}"
    return entry


def test_catalog_names_unique_and_flagged():
    presets = builtin_presets()
    names = [p.name for p in presets]
    assert len(names) == len(set(names))
    assert all(p.builtin for p in presets)
    assert len(presets) >= 12


def test_every_builtin_validates_and_renders():
    for p in builtin_presets():
        p.spec.validate()
        rendered = render_pattern(p.spec)
        assert rendered.length > 0
        cycle = render_cycle(p.spec)
        assert all(len(s) <= 512 for s in cycle.values())


def test_every_builtin_survives_json_round_trip():
    from hdesigner.envelope import PatternSpec
    for p in builtin_presets():
        assert PatternSpec.from_dict(p.spec.to_dict()) == p.spec


def test_curve_palette_covers_all_families():
    curves = set()
    for p in builtin_presets():
        for a in p.spec.assignments:
            curves.add(a.envelope.attack.curve.value)
            curves.add(a.envelope.release.curve.value)
    assert {"LINEAR", "QUAD_EASE_IN", "QUAD_EASE_OUT", "SQUARE"} <= curves


def test_ramp_families_are_speed_ordered():
    for stem, pick in (("ramp-up", lambda e: e.attack.duration_ms),
                       ("ramp-down", lambda e: e.release.duration_ms)):
        durations = [pick(by_name(f"{stem}-{speed}").spec.assignments[0].envelope)
                     for speed in ("fast", "medium", "slow")]
        assert durations == sorted(durations)
        assert len(set(durations)) == 3


def test_heartbeat_60_beats_at_one_hz():
    spec = by_name("heartbeat-60").spec
    assert spec.repeat == 3
    cycle = render_cycle(spec)
    period_ticks = max(len(s) for s in cycle.values()) + spec.delay_ms // spec.delta_ms
    assert period_ticks * spec.delta_ms == 1000
    # lub leads on motors 0+1, dub answers later on motor 2
    assert cycle[0][0] > 0 and cycle[1][0] > 0
    dub_onset = next(i for i, v in enumerate(cycle[2]) if v)
    assert dub_onset * spec.delta_ms == 300


def test_heartbeat_dub_is_softer_than_lub():
    spec = by_name("heartbeat-60").spec
    cycle = render_cycle(spec)
    assert max(cycle[2]) < max(cycle[0])


def test_pulse_trains_space_onsets_by_beat_period():
    for bpm in (60, 100, 120, 150):
        spec = by_name(f"pulse-{bpm}bpm").spec
        rendered = render_pattern(spec)
        stream = rendered.channels[0]
        onsets = [i for i, v in enumerate(stream)
                  if v and (i == 0 or not stream[i - 1])]
        assert len(onsets) == spec.repeat
        gaps_ms = {(b - a) * spec.delta_ms for a, b in zip(onsets, onsets[1:])}
        assert gaps_ms == {(60000 // bpm) // spec.delta_ms * spec.delta_ms}


def test_rotation_sweeps_the_three_motors_in_order():
    spec = by_name("rotation").spec
    rendered = render_pattern(spec)
    onsets = {}
    for ch in (0, 1, 2):
        onsets[ch] = next(i for i, v in enumerate(rendered.channels[ch]) if v)
    assert onsets[0] < onsets[1] < onsets[2]


def test_sliding_ramps_overlap():
    spec = by_name("sliding").spec
    rendered = render_pattern(spec)
    both = [i for i in range(rendered.length)
            if rendered.channels[0][i] and rendered.channels[1][i]]
    assert both, "adjacent motors never overlap; the handoff is broken"


def test_tapping_is_a_square_train():
    spec = by_name("tapping").spec
    assert spec.repeat == 8
    stream = render_pattern(spec).channels[0]
    assert set(stream) == {0, 1023}
