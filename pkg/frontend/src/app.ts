import { ApiClient, ApiFailure } from "./api.js";
import { drawModel, legendHtml } from "./draw.js";
import { Notifier } from "./notify.js";
import { RealtimeLoop } from "./playloop.js";
import { envelopeModel, patternModel } from "./plot.js";
import { Throttle } from "./throttle.js";
import {
  CURVE_NAMES,
  type Assignment,
  type PatternSpec,
  type PresetEntry,
} from "./types.js";
import { maskChannels, validateSpec } from "./validate.js";

// Entry point: wires the static index.html skeleton to the API client,
// the realtime loop, and the canvas plots. All envelope math stays on the
// server; this file only moves JSON around and draws what comes back.

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

function defaultSpec(): PatternSpec {
  return {
    delta_ms: 10,
    repeat: 1,
    delay_ms: 0,
    assignments: [{
      mask: 0b111,
      offset_ms: 0,
      envelope: {
        peak_pct: 100,
        min_pct: 0,
        attack: { duration_ms: 100, curve: "LINEAR" },
        sustain_ms: 150,
        release: { duration_ms: 200, curve: "LINEAR" },
      },
    }],
  };
}

class App {
  private readonly api = new ApiClient("");
  private readonly notifier = new Notifier();
  private readonly loop: RealtimeLoop;
  private readonly previewGate: Throttle<PatternSpec>;

  private spec: PatternSpec = defaultSpec();
  private presets: PresetEntry[] = [];

  constructor() {
    this.loop = new RealtimeLoop(this.api, this.notifier, (text, failed) => {
      const el = $("delivery-status");
      el.textContent = text;
      el.className = failed ? "status-bad" : "status-ok";
    });
    this.previewGate = new Throttle(150, (spec) => void this.renderPreview(spec));

    this.notifier.onChange = (notices) => {
      const box = $("notices");
      box.replaceChildren();
      for (const n of notices) {
        const div = document.createElement("div");
        div.className = `notice notice-${n.kind}`;
        div.textContent = n.text;
        const x = document.createElement("button");
        x.textContent = "x";
        x.className = "notice-dismiss";
        x.addEventListener("click", () => this.notifier.dismiss(n.id));
        div.appendChild(x);
        box.appendChild(div);
      }
    };

    $("legend-envelope").innerHTML = legendHtml();
    $("legend-pattern").innerHTML = legendHtml();

    $<HTMLInputElement>("realtime-toggle").addEventListener("change", (e) => {
      this.loop.setEnabled((e.target as HTMLInputElement).checked);
    });
    $<HTMLInputElement>("advanced-toggle").addEventListener("change", (e) => {
      $("editor-panel").hidden = !(e.target as HTMLInputElement).checked;
    });
    $("play-button").addEventListener("click", () => this.loop.playNow(this.spec));
    $("stop-button").addEventListener("click", () => void this.loop.stopNow());
    $("save-button").addEventListener("click", () => void this.savePreset());
    $("add-assignment").addEventListener("click", () => this.addAssignment());
    $<HTMLSelectElement>("device-select").addEventListener("change", (e) => {
      const value = (e.target as HTMLSelectElement).value;
      this.loop.setDevice(value === "" ? null : value);
    });

    this.buildEditor();
    this.onEdit();
    void this.loadPresets();
    void this.pollDevices();
    setInterval(() => void this.pollDevices(), 1000);
  }

  // -- edits ---------------------------------------------------------------

  /** Every input change lands here: validate, surface, preview, maybe play. */
  private onEdit(): void {
    const error = validateSpec(this.spec);
    const panel = $("error-panel");
    if (error) {
      panel.hidden = false;
      panel.textContent = `${error.field}: ${error.message}`;
      return;
    }
    panel.hidden = true;
    this.previewGate.push(this.spec);
    this.loop.edit(this.spec);
  }

  private async renderPreview(spec: PatternSpec): Promise<void> {
    try {
      const preview = await this.api.render(spec);
      drawModel($<HTMLCanvasElement>("envelope-canvas"), envelopeModel(preview));
      drawModel($<HTMLCanvasElement>("pattern-canvas"), patternModel(preview));
    } catch (e) {
      const panel = $("error-panel");
      panel.hidden = false;
      panel.textContent = e instanceof ApiFailure
        ? (e.field ? `${e.field}: ${e.message}` : `${e.code}: ${e.message}`)
        : String(e);
    }
  }

  // -- editor DOM ------------------------------------------------------------

  private buildEditor(): void {
    this.bindNumber("delta-input", this.spec.delta_ms, (v) => { this.spec.delta_ms = v; });
    this.bindNumber("repeat-input", this.spec.repeat, (v) => { this.spec.repeat = v; });
    this.bindNumber("delay-input", this.spec.delay_ms, (v) => { this.spec.delay_ms = v; });

    const host = $("assignments");
    host.replaceChildren();
    this.spec.assignments.forEach((a, i) => host.appendChild(this.assignmentCard(a, i)));
  }

  private bindNumber(id: string, value: number, set: (v: number) => void): void {
    const input = $<HTMLInputElement>(id);
    input.value = String(value);
    input.oninput = () => {
      set(Number(input.value));
      this.onEdit();
    };
  }

  private assignmentCard(a: Assignment, index: number): HTMLElement {
    const card = document.createElement("fieldset");
    card.className = "assignment";
    const legend = document.createElement("legend");
    legend.textContent = `assignment ${index}`;
    card.appendChild(legend);

    const channels = document.createElement("div");
    channels.className = "channel-row";
    for (let ch = 0; ch < 8; ch++) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = maskChannels(a.mask).includes(ch);
      box.addEventListener("change", () => {
        a.mask = box.checked ? a.mask | (1 << ch) : a.mask & ~(1 << ch);
        this.onEdit();
      });
      label.append(box, String(ch));
      channels.appendChild(label);
    }
    card.appendChild(channels);

    const num = (text: string, value: number, set: (v: number) => void) => {
      const label = document.createElement("label");
      label.className = "field";
      const input = document.createElement("input");
      input.type = "number";
      input.value = String(value);
      input.addEventListener("input", () => { set(Number(input.value)); this.onEdit(); });
      label.append(text, input);
      return label;
    };
    const curve = (text: string, value: string, set: (v: string) => void) => {
      const label = document.createElement("label");
      label.className = "field";
      const select = document.createElement("select");
      for (const name of CURVE_NAMES) {
        const opt = document.createElement("option");
        opt.value = name;
        opt.textContent = name.toLowerCase().replace(/_/g, " ");
        select.appendChild(opt);
      }
      select.value = value;
      select.addEventListener("change", () => { set(select.value); this.onEdit(); });
      label.append(text, select);
      return label;
    };

    const env = a.envelope;
    card.append(
      num("offset ms", a.offset_ms, (v) => { a.offset_ms = v; }),
      num("peak %", env.peak_pct, (v) => { env.peak_pct = v; }),
      num("floor %", env.min_pct, (v) => { env.min_pct = v; }),
      num("attack ms", env.attack.duration_ms, (v) => { env.attack.duration_ms = v; }),
      curve("attack curve", env.attack.curve, (v) => { env.attack.curve = v as Assignment["envelope"]["attack"]["curve"]; }),
      num("sustain ms", env.sustain_ms, (v) => { env.sustain_ms = v; }),
      num("release ms", env.release.duration_ms, (v) => { env.release.duration_ms = v; }),
      curve("release curve", env.release.curve, (v) => { env.release.curve = v as Assignment["envelope"]["release"]["curve"]; }),
    );

    if (this.spec.assignments.length > 1) {
      const remove = document.createElement("button");
      remove.textContent = "remove";
      remove.addEventListener("click", () => {
        this.spec.assignments.splice(index, 1);
        this.buildEditor();
        this.onEdit();
      });
      card.appendChild(remove);
    }
    return card;
  }

  private addAssignment(): void {
    const used = this.spec.assignments.reduce((m, a) => m | a.mask, 0);
    const free = maskChannels(~used & 0xff);
    this.spec.assignments.push({
      mask: free.length > 0 ? 1 << free[0]! : 0,
      offset_ms: 0,
      envelope: {
        peak_pct: 100,
        min_pct: 0,
        attack: { duration_ms: 100, curve: "LINEAR" },
        sustain_ms: 0,
        release: { duration_ms: 100, curve: "LINEAR" },
      },
    });
    this.buildEditor();
    this.onEdit();
  }

  private loadSpec(spec: PatternSpec): void {
    this.spec = structuredClone(spec);
    this.buildEditor();
    this.onEdit();
  }

  // -- palette -----------------------------------------------------------

  private async loadPresets(): Promise<void> {
    try {
      this.presets = await this.api.presets();
    } catch (e) {
      this.notifier.error(`could not load presets: ${String(e)}`);
      return;
    }
    const grid = $("palette");
    grid.replaceChildren();
    for (const entry of this.presets) {
      const tile = document.createElement("div");
      tile.className = entry.builtin ? "preset preset-builtin" : "preset";
      const load = document.createElement("button");
      load.className = "preset-load";
      load.textContent = entry.name;
      load.addEventListener("click", () => this.loadSpec(entry.spec));
      tile.appendChild(load);
      if (!entry.builtin) {
        // builtins cannot be deleted, so they get no delete control at all
        const del = document.createElement("button");
        del.className = "preset-delete";
        del.textContent = "x";
        del.title = `delete ${entry.name}`;
        del.addEventListener("click", () => void this.deletePreset(entry.name));
        tile.appendChild(del);
      }
      grid.appendChild(tile);
    }
  }

  private async savePreset(): Promise<void> {
    const error = validateSpec(this.spec);
    if (error) {
      this.notifier.error(`fix the spec first (${error.field}: ${error.message})`);
      return;
    }
    const name = window.prompt("preset name");
    if (!name) return;
    try {
      const { created } = await this.api.savePreset(name, this.spec);
      this.notifier.success(created ? `saved ${name}` : `updated ${name}`);
      await this.loadPresets();
    } catch (e) {
      const text = e instanceof ApiFailure ? e.message : String(e);
      this.notifier.error(`save failed: ${text}`);
    }
  }

  private async deletePreset(name: string): Promise<void> {
    try {
      await this.api.deletePreset(name);
      this.notifier.info(`deleted ${name}`);
      await this.loadPresets();
    } catch (e) {
      const text = e instanceof ApiFailure ? e.message : String(e);
      this.notifier.error(`delete failed: ${text}`);
    }
  }

  // -- devices ------------------------------------------------------------

  private async pollDevices(): Promise<void> {
    let devices;
    try {
      devices = await this.api.devices();
    } catch {
      return; // transient; the next poll will catch up
    }
    const select = $<HTMLSelectElement>("device-select");
    const current = select.value;
    select.replaceChildren();
    const none = document.createElement("option");
    none.value = "";
    none.textContent = devices.length > 0 ? "select a band" : "no bands found";
    select.appendChild(none);
    for (const d of devices) {
      const opt = document.createElement("option");
      opt.value = d.id;
      opt.textContent = `${d.id} (${d.channels} ch${d.alive ? "" : ", offline"})`;
      select.appendChild(opt);
    }
    if (devices.some((d) => d.id === current)) select.value = current;
    this.loop.setDevice(select.value === "" ? null : select.value);

    const chosen = devices.find((d) => d.id === select.value);
    const dot = $("device-dot");
    dot.className = chosen?.alive ? "dot dot-alive" : "dot dot-dead";
  }
}

new App();
