import { describe, expect, it } from "vitest";

import type { PatternSpec } from "../src/types.js";
import { maskChannels, validateSpec } from "../src/validate.js";
import { simpleSpec } from "./fixtures.js";

function broken(mutate: (spec: PatternSpec) => void): PatternSpec {
  const spec = simpleSpec();
  mutate(spec);
  return spec;
}

describe("validateSpec", () => {
  it("accepts a well-formed spec", () => {
    expect(validateSpec(simpleSpec())).toBeNull();
  });

  // the field paths must match what the server would answer, so the inline
  // error panel looks the same whichever side catches it first
  it.each<[string, (s: PatternSpec) => void]>([
    ["delta_ms", (s) => { s.delta_ms = 0; }],
    ["delta_ms", (s) => { s.delta_ms = 2.5; }],
    ["repeat", (s) => { s.repeat = 0; }],
    ["delay_ms", (s) => { s.delay_ms = -1; }],
    ["assignments", (s) => { s.assignments = []; }],
    ["assignments[0].mask", (s) => { s.assignments[0]!.mask = 0; }],
    ["assignments[0].mask", (s) => { s.assignments[0]!.mask = 256; }],
    ["assignments[0].offset_ms", (s) => { s.assignments[0]!.offset_ms = 15; }],
    ["assignments[0].envelope.peak_pct", (s) => { s.assignments[0]!.envelope.peak_pct = 101; }],
    ["assignments[0].envelope.min_pct", (s) => { s.assignments[0]!.envelope.min_pct = -1; }],
    ["assignments[0].envelope.min_pct", (s) => {
      s.assignments[0]!.envelope.min_pct = 80;
      s.assignments[0]!.envelope.peak_pct = 50;
    }],
    ["assignments[0].envelope.attack.duration_ms", (s) => {
      s.assignments[0]!.envelope.attack.duration_ms = -10;
    }],
    ["assignments[0].envelope.attack.curve", (s) => {
      (s.assignments[0]!.envelope.attack as { curve: string }).curve = "BOUNCE";
    }],
    ["assignments[0].envelope.sustain_ms", (s) => {
      s.assignments[0]!.envelope.sustain_ms = 3.7;
    }],
  ])("flags %s", (field, mutate) => {
    const error = validateSpec(broken(mutate));
    expect(error).not.toBeNull();
    expect(error!.field).toBe(field);
  });

  it("flags overlapping masks on the second assignment", () => {
    const spec = simpleSpec();
    spec.assignments.push(structuredClone(spec.assignments[0]!));
    const error = validateSpec(spec);
    expect(error).toEqual({
      field: "assignments[1].mask",
      message: "channel masks must be disjoint",
    });
  });

  it("accepts disjoint masks", () => {
    const spec = simpleSpec();
    const second = structuredClone(spec.assignments[0]!);
    second.mask = 0b110;
    spec.assignments.push(second);
    expect(validateSpec(spec)).toBeNull();
  });
});

describe("maskChannels", () => {
  it("unpacks bits LSB-first", () => {
    expect(maskChannels(0b00000101)).toEqual([0, 2]);
    expect(maskChannels(0xff)).toEqual([0, 1, 2, 3, 4, 5, 6, 7]);
    expect(maskChannels(0)).toEqual([]);
  });
});
