// JSON shapes shared with the server. Field names mirror the REST payloads
// exactly; everything the UI knows about a pattern flows through these.

export type CurveName = "LINEAR" | "QUAD_EASE_IN" | "QUAD_EASE_OUT" | "SQUARE";

export const CURVE_NAMES: readonly CurveName[] = [
  "LINEAR", "QUAD_EASE_IN", "QUAD_EASE_OUT", "SQUARE",
];

export interface SegmentSpec {
  duration_ms: number;
  curve: CurveName;
}

export interface EnvelopeSpec {
  peak_pct: number;
  min_pct: number;
  attack: SegmentSpec;
  sustain_ms: number;
  release: SegmentSpec;
}

export interface Assignment {
  mask: number;
  offset_ms: number;
  envelope: EnvelopeSpec;
}

export interface PatternSpec {
  delta_ms: number;
  repeat: number;
  delay_ms: number;
  assignments: Assignment[];
}

export type SpanLabel = "ATTACK" | "SUSTAIN" | "RELEASE" | "DELAY" | "OFFSET";

export interface Span {
  label: SpanLabel;
  start_tick: number;
  end_tick: number;
}

// POST /api/render response: the fully expanded timeline plus labeled spans.
export interface RenderedPattern {
  delta_ms: number;
  length: number;
  channels: Record<string, number[]>;
  segments: Record<string, Span[]>;
}

export interface DeviceInfo {
  id: string;
  address: string;
  channels: number;
  alive: boolean;
  last_seen_ms: number;
}

export interface PresetEntry {
  name: string;
  builtin: boolean;
  spec: PatternSpec;
}

export type DeliveryStatus = "DELIVERED" | "FAILED" | "SUPERSEDED";

export interface DeliveryResult {
  status: DeliveryStatus;
  attempts: number;
  rtt_ms: number | null;
}

export const PWM_MAX = 1023;
