import type { RenderedPattern, Span, SpanLabel } from "./types.js";

// One color per span kind, used for the filled regions under the trace.
export const SPAN_COLORS: Record<SpanLabel, string> = {
  ATTACK: "#2e7d32",
  SUSTAIN: "#1565c0",
  RELEASE: "#e65100",
  DELAY: "#9e9e9e",
  OFFSET: "#cfd8dc",
};

export interface ChannelTrack {
  channel: number;
  samples: number[];
  spans: Span[];
}

export interface PlotModel {
  deltaMs: number;
  lengthTicks: number;
  tracks: ChannelTrack[];
}

/** The whole pattern, repetition and all, straight from the preview
 *  payload. No client-side envelope math: what the server rendered is
 *  what gets drawn. */
export function patternModel(preview: RenderedPattern): PlotModel {
  const channels = Object.keys(preview.channels)
    .map(Number)
    .sort((a, b) => a - b);
  return {
    deltaMs: preview.delta_ms,
    lengthTicks: preview.length,
    tracks: channels.map((ch) => ({
      channel: ch,
      samples: preview.channels[String(ch)] ?? [],
      spans: preview.segments[String(ch)] ?? [],
    })),
  };
}

const ASR_RANK: Partial<Record<SpanLabel, number>> = {
  ATTACK: 0,
  SUSTAIN: 1,
  RELEASE: 2,
};

/** Just the first envelope of each channel, sliced out of the full preview
 *  so the ASR shape stays readable whatever repeat is set to.
 *
 *  An envelope is a run of attack/sustain/release spans in that order
 *  (zero-length segments are absent); the run ends at the first span that
 *  is not a strict rank increase, which is exactly where a delay gap or
 *  the next repetition begins. */
export function envelopeModel(preview: RenderedPattern): PlotModel {
  const full = patternModel(preview);
  let lengthTicks = 0;
  const tracks: ChannelTrack[] = [];

  for (const track of full.tracks) {
    const first = track.spans.findIndex((s) => s.label in ASR_RANK);
    if (first < 0) {
      tracks.push({ channel: track.channel, samples: [], spans: [] });
      continue;
    }
    const group: Span[] = [track.spans[first]!];
    for (let i = first + 1; i < track.spans.length; i++) {
      const span = track.spans[i]!;
      const rank = ASR_RANK[span.label];
      const prev = ASR_RANK[group[group.length - 1]!.label]!;
      if (rank === undefined || rank <= prev) break;
      group.push(span);
    }
    const start = group[0]!.start_tick;
    const end = group[group.length - 1]!.end_tick;
    tracks.push({
      channel: track.channel,
      samples: track.samples.slice(start, end),
      spans: group.map((s) => ({
        label: s.label,
        start_tick: s.start_tick - start,
        end_tick: s.end_tick - start,
      })),
    });
    lengthTicks = Math.max(lengthTicks, end - start);
  }
  return { deltaMs: full.deltaMs, lengthTicks, tracks };
}

/** Count spans with a given label across one track, e.g. 3 attacks and 2
 *  delay gaps for repeat=3. Handy for summary captions. */
export function countSpans(track: ChannelTrack, label: SpanLabel): number {
  return track.spans.reduce((n, s) => n + (s.label === label ? 1 : 0), 0);
}
