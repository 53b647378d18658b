import type { PatternSpec, RenderedPattern } from "../src/types.js";

export function simpleSpec(overrides: Partial<PatternSpec> = {}): PatternSpec {
  return {
    delta_ms: 10,
    repeat: 1,
    delay_ms: 0,
    assignments: [{
      mask: 1,
      offset_ms: 0,
      envelope: {
        peak_pct: 100,
        min_pct: 0,
        attack: { duration_ms: 50, curve: "LINEAR" },
        sustain_ms: 40,
        release: { duration_ms: 40, curve: "LINEAR" },
      },
    }],
    ...overrides,
  };
}

/** 13-tick envelope: 5 attack + 4 sustain + 4 release, as the server
 *  would render it for the simpleSpec above. */
export function envelopePreview(): RenderedPattern {
  const attack = [205, 409, 614, 818, 1023];
  const sustain = [1023, 1023, 1023, 1023];
  const release = [767, 512, 256, 0];
  return {
    delta_ms: 10,
    length: 13,
    channels: { "0": [...attack, ...sustain, ...release] },
    segments: {
      "0": [
        { label: "ATTACK", start_tick: 0, end_tick: 5 },
        { label: "SUSTAIN", start_tick: 5, end_tick: 9 },
        { label: "RELEASE", start_tick: 9, end_tick: 13 },
      ],
    },
  };
}

/** The same envelope repeated 3 times with a 2-tick delay gap between
 *  repetitions, plus a second, shorter channel padded with zeros. */
export function repeatedPreview(): RenderedPattern {
  const one = envelopePreview().channels["0"]!;
  const gap = [0, 0];
  const long = [...one, ...gap, ...one, ...gap, ...one];
  const short = [512, 512, 512];
  const spanGroup = (base: number) => [
    { label: "ATTACK" as const, start_tick: base, end_tick: base + 5 },
    { label: "SUSTAIN" as const, start_tick: base + 5, end_tick: base + 9 },
    { label: "RELEASE" as const, start_tick: base + 9, end_tick: base + 13 },
  ];
  return {
    delta_ms: 10,
    length: long.length,
    channels: {
      "0": long,
      "2": [...short, ...Array<number>(long.length - short.length).fill(0)],
    },
    segments: {
      "0": [
        ...spanGroup(0),
        { label: "DELAY", start_tick: 13, end_tick: 15 },
        ...spanGroup(15),
        { label: "DELAY", start_tick: 28, end_tick: 30 },
        ...spanGroup(30),
      ],
      "2": [{ label: "SUSTAIN", start_tick: 0, end_tick: 3 }],
    },
  };
}
