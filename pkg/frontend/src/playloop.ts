import { ApiFailure } from "./api.js";
import type { Notifier } from "./notify.js";
import { Throttle } from "./throttle.js";
import type { DeliveryResult, PatternSpec } from "./types.js";
import { validateSpec } from "./validate.js";

export const PLAY_INTERVAL_MS = 150;

/** The slice of the API the loop needs; ApiClient satisfies it. */
export interface PlayApi {
  play(deviceId: string, spec: PatternSpec, realtime?: boolean): Promise<DeliveryResult>;
  stop(deviceId: string): Promise<DeliveryResult>;
}

/** Send-on-change loop for realtime mode.
 *
 *  Edits are rate-gated (at most one play per 150 ms window plus the
 *  leading edge), at most one request is in flight per device, and a
 *  generation counter makes sure only the newest response is ever
 *  reported; anything slower is a superseded edit and stays silent. A
 *  rejected request is reported and the loop keeps going.
 */
export class RealtimeLoop {
  deviceId: string | null = null;
  enabled = false;

  private readonly gate: Throttle<PatternSpec>;
  private inFlight = false;
  private queued: PatternSpec | null = null;
  private generation = 0;

  constructor(
    private readonly api: PlayApi,
    private readonly notify: Notifier,
    private readonly onStatus: (text: string, failed: boolean) => void = () => {},
    intervalMs: number = PLAY_INTERVAL_MS,
  ) {
    this.gate = new Throttle<PatternSpec>(intervalMs, (spec) => this.dispatch(spec));
  }

  /** Feed one edit. Invalid specs never leave the browser; the editor
   *  surfaces those inline, this loop just stays quiet. */
  edit(spec: PatternSpec): void {
    if (!this.enabled || this.deviceId === null) return;
    if (validateSpec(spec) !== null) return;
    this.gate.push(spec);
  }

  setDevice(deviceId: string | null): void {
    if (deviceId === this.deviceId) return;
    this.deviceId = deviceId;
    this.gate.cancel();
    this.queued = null;
    this.generation++; // orphan any in-flight response for the old device
  }

  setEnabled(enabled: boolean): void {
    this.enabled = enabled;
    if (!enabled) {
      this.gate.cancel();
      this.queued = null;
    }
  }

  /** Explicit one-shot play (the Play button), same reporting path. */
  playNow(spec: PatternSpec): void {
    if (this.deviceId === null) return;
    if (validateSpec(spec) !== null) return;
    this.gate.cancel();
    this.queued = null;
    this.dispatch(spec);
  }

  /** Cut the band off. Supersedes everything queued or in flight. */
  async stopNow(): Promise<void> {
    const device = this.deviceId;
    if (device === null) return;
    this.gate.cancel();
    this.queued = null;
    const gen = ++this.generation; // late play responses are now stale
    try {
      const result = await this.api.stop(device);
      if (gen === this.generation) this.report(device, "STOP", result);
    } catch (e) {
      if (gen === this.generation) this.reportError(device, e);
    }
  }

  private dispatch(spec: PatternSpec): void {
    if (this.inFlight) {
      this.queued = spec; // latest wins; the previous queued edit is superseded
      return;
    }
    void this.send(spec);
  }

  private async send(spec: PatternSpec): Promise<void> {
    const device = this.deviceId;
    if (device === null) return;
    const gen = ++this.generation;
    this.inFlight = true;
    try {
      const result = await this.api.play(device, spec, true);
      if (gen === this.generation) this.report(device, "play", result);
    } catch (e) {
      if (gen === this.generation) this.reportError(device, e);
    } finally {
      this.inFlight = false;
      const next = this.queued;
      if (next !== null) {
        this.queued = null;
        void this.send(next);
      }
    }
  }

  private report(device: string, what: string, result: DeliveryResult): void {
    if (result.status === "FAILED") {
      this.notify.error(
        `Delivery to ${device} FAILED after ${result.attempts} attempts`,
        { sticky: true },
      );
      this.onStatus(`${what}: FAILED (${result.attempts} attempts)`, true);
      return;
    }
    if (result.status === "DELIVERED") {
      this.notify.clear("error"); // the link recovered; retire stale banners
      const rtt = result.rtt_ms === null ? "" : ` in ${result.rtt_ms.toFixed(1)} ms`;
      this.onStatus(`${what}: delivered${rtt}`, false);
      return;
    }
    this.onStatus(`${what}: ${result.status.toLowerCase()}`, false);
  }

  private reportError(device: string, e: unknown): void {
    const text = e instanceof ApiFailure
      ? `${e.code}: ${e.message}`
      : e instanceof Error ? e.message : String(e);
    this.notify.error(`Request to ${device} failed: ${text}`, { sticky: true });
    this.onStatus(text, true);
  }
}
