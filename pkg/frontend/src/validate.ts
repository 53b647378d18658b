import { CURVE_NAMES, type PatternSpec } from "./types.js";

export interface FieldError {
  field: string;
  message: string;
}

const isInt = (v: unknown): v is number =>
  typeof v === "number" && Number.isInteger(v);
const isNum = (v: unknown): v is number =>
  typeof v === "number" && Number.isFinite(v);

/** Client-side mirror of the server's spec invariants, same field paths.
 *  Returns the first violation, or null when the spec is sendable. Keeping
 *  this in lockstep with the server means a slider can never emit a request
 *  that bounces. */
export function validateSpec(spec: PatternSpec): FieldError | null {
  if (!isInt(spec.delta_ms) || spec.delta_ms < 1) {
    return { field: "delta_ms", message: "must be an integer >= 1" };
  }
  if (!isInt(spec.repeat) || spec.repeat < 1) {
    return { field: "repeat", message: "must be an integer >= 1" };
  }
  if (!isInt(spec.delay_ms) || spec.delay_ms < 0) {
    return { field: "delay_ms", message: "must be an integer >= 0" };
  }
  if (!Array.isArray(spec.assignments) || spec.assignments.length === 0) {
    return { field: "assignments", message: "at least one assignment is required" };
  }

  let seenMask = 0;
  for (let i = 0; i < spec.assignments.length; i++) {
    const a = spec.assignments[i]!;
    const at = `assignments[${i}]`;

    if (!isInt(a.mask) || a.mask <= 0 || a.mask > 0xff) {
      return { field: `${at}.mask`, message: "must be an 8-bit mask with at least one channel" };
    }
    if (a.mask & seenMask) {
      return { field: `${at}.mask`, message: "channel masks must be disjoint" };
    }
    seenMask |= a.mask;

    if (!isInt(a.offset_ms) || a.offset_ms < 0) {
      return { field: `${at}.offset_ms`, message: "must be an integer >= 0" };
    }
    if (a.offset_ms % spec.delta_ms !== 0) {
      return { field: `${at}.offset_ms`, message: `must be a multiple of delta_ms (${spec.delta_ms})` };
    }

    const env = a.envelope;
    const envAt = `${at}.envelope`;
    if (!isNum(env.min_pct) || env.min_pct < 0 || env.min_pct > 100) {
      return { field: `${envAt}.min_pct`, message: "must be in [0, 100]" };
    }
    if (!isNum(env.peak_pct) || env.peak_pct < 0 || env.peak_pct > 100) {
      return { field: `${envAt}.peak_pct`, message: "must be in [0, 100]" };
    }
    if (env.min_pct > env.peak_pct) {
      return { field: `${envAt}.min_pct`, message: "must not exceed peak_pct" };
    }
    for (const [name, seg] of [["attack", env.attack], ["release", env.release]] as const) {
      if (!isInt(seg.duration_ms) || seg.duration_ms < 0) {
        return { field: `${envAt}.${name}.duration_ms`, message: "must be an integer >= 0" };
      }
      if (!CURVE_NAMES.includes(seg.curve)) {
        return { field: `${envAt}.${name}.curve`, message: `must be one of ${CURVE_NAMES.join(", ")}` };
      }
    }
    if (!isInt(env.sustain_ms) || env.sustain_ms < 0) {
      return { field: `${envAt}.sustain_ms`, message: "must be an integer >= 0" };
    }
  }
  return null;
}

/** Channels selected by a mask, LSB = channel 0. */
export function maskChannels(mask: number): number[] {
  const out: number[] = [];
  for (let ch = 0; ch < 8; ch++) {
    if (mask & (1 << ch)) out.push(ch);
  }
  return out;
}
