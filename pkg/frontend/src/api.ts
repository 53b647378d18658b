import type {
  DeliveryResult,
  DeviceInfo,
  PatternSpec,
  PresetEntry,
  RenderedPattern,
} from "./types.js";

/** Any non-2xx response, plus network failures (status 0, code E_NETWORK). */
export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
    this.name = "ApiFailure";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed wrapper over the server's REST surface. The fetch
 *  implementation is injectable so tests can run without a server. */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown,
  ): Promise<{ status: number; data: T }> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (e) {
      throw new ApiFailure(0, "E_NETWORK", e instanceof Error ? e.message : String(e));
    }
    const data: unknown = await resp.json().catch(() => null);
    if (!resp.ok) {
      const err = (data as { error?: { code?: string; message?: string; field?: string } } | null)?.error;
      throw new ApiFailure(
        resp.status,
        err?.code ?? "E_HTTP",
        err?.message ?? `HTTP ${resp.status}`,
        err?.field,
      );
    }
    return { status: resp.status, data: data as T };
  }

  async devices(): Promise<DeviceInfo[]> {
    const { data } = await this.request<{ devices: DeviceInfo[] }>("GET", "/api/devices");
    return data.devices;
  }

  async render(spec: PatternSpec): Promise<RenderedPattern> {
    return (await this.request<RenderedPattern>("POST", "/api/render", spec)).data;
  }

  async play(deviceId: string, spec: PatternSpec, realtime = false): Promise<DeliveryResult> {
    const path = `/api/devices/${encodeURIComponent(deviceId)}/play`;
    return (await this.request<DeliveryResult>("POST", path, { spec, realtime })).data;
  }

  async stop(deviceId: string): Promise<DeliveryResult> {
    const path = `/api/devices/${encodeURIComponent(deviceId)}/stop`;
    return (await this.request<DeliveryResult>("POST", path)).data;
  }

  async presets(): Promise<PresetEntry[]> {
    const { data } = await this.request<{ presets: PresetEntry[] }>("GET", "/api/presets");
    return data.presets;
  }

  /** PUT; the server answers 201 on create and 200 on update. */
  async savePreset(name: string, spec: PatternSpec,
  ): Promise<{ created: boolean; entry: PresetEntry }> {
    const path = `/api/presets/${encodeURIComponent(name)}`;
    const { status, data } = await this.request<PresetEntry>("PUT", path, spec);
    return { created: status === 201, entry: data };
  }

  async deletePreset(name: string): Promise<void> {
    await this.request<{ deleted: string }>("DELETE", `/api/presets/${encodeURIComponent(name)}`);
  }
}
