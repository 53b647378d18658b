import { SPAN_COLORS, type PlotModel } from "./plot.js";
import { PWM_MAX } from "./types.js";

// Canvas rendering of a PlotModel: stacked tracks, colored span fills, and
// the PWM trace as a step line. Pure presentation; all numbers come from
// the model, which comes from the server preview.

const TRACK_GAP = 10;
const LABEL_W = 34;
const AXIS_COLOR = "#78909c";
const TRACE_COLOR = "#102027";

export function drawModel(canvas: HTMLCanvasElement, model: PlotModel): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;

  const dpr = window.devicePixelRatio || 1;
  const cssW = canvas.clientWidth || canvas.width;
  const cssH = canvas.clientHeight || canvas.height;
  canvas.width = Math.round(cssW * dpr);
  canvas.height = Math.round(cssH * dpr);
  ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  ctx.clearRect(0, 0, cssW, cssH);

  if (model.tracks.length === 0 || model.lengthTicks === 0) {
    ctx.fillStyle = AXIS_COLOR;
    ctx.font = "12px system-ui, sans-serif";
    ctx.fillText("nothing to plot", 10, 20);
    return;
  }

  const plotW = cssW - LABEL_W - 8;
  const trackH = (cssH - TRACK_GAP * (model.tracks.length - 1)) / model.tracks.length;
  const xAt = (tick: number) => LABEL_W + (tick / model.lengthTicks) * plotW;

  model.tracks.forEach((track, row) => {
    const top = row * (trackH + TRACK_GAP);
    const bottom = top + trackH;
    const yAt = (level: number) => bottom - (level / PWM_MAX) * (trackH - 14);

    ctx.fillStyle = AXIS_COLOR;
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText(`ch ${track.channel}`, 2, top + 12);

    for (const span of track.spans) {
      ctx.fillStyle = SPAN_COLORS[span.label] + "33"; // ~20% alpha fill
      ctx.fillRect(xAt(span.start_tick), top, xAt(span.end_tick) - xAt(span.start_tick), trackH);
      ctx.fillStyle = SPAN_COLORS[span.label];
      ctx.fillRect(xAt(span.start_tick), bottom - 3, xAt(span.end_tick) - xAt(span.start_tick), 3);
    }

    ctx.strokeStyle = AXIS_COLOR;
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(LABEL_W, bottom + 0.5);
    ctx.lineTo(cssW - 8, bottom + 0.5);
    ctx.stroke();

    if (track.samples.length === 0) return;
    ctx.strokeStyle = TRACE_COLOR;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let y = yAt(0);
    ctx.moveTo(xAt(0), y);
    track.samples.forEach((level, i) => {
      const nextY = yAt(level);
      ctx.lineTo(xAt(i), y);      // hold previous level to the tick edge
      ctx.lineTo(xAt(i), nextY);  // then step
      y = nextY;
    });
    ctx.lineTo(xAt(track.samples.length), y);
    ctx.stroke();
  });

  // time axis caption
  ctx.fillStyle = AXIS_COLOR;
  ctx.font = "11px system-ui, sans-serif";
  const totalMs = model.lengthTicks * model.deltaMs;
  ctx.fillText(`${totalMs} ms (${model.lengthTicks} ticks x ${model.deltaMs} ms)`, LABEL_W, cssH - 2);
}

/** Color swatches for the caption row under each chart. */
export function legendHtml(): string {
  return (Object.keys(SPAN_COLORS) as (keyof typeof SPAN_COLORS)[])
    .map((label) =>
      `<span class="legend-item"><span class="legend-swatch" style="background:${SPAN_COLORS[label]}"></span>${label.toLowerCase()}</span>`)
    .join(" ");
}
