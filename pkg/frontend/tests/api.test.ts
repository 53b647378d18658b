import { describe, expect, it } from "vitest";

import { ApiClient, ApiFailure } from "../src/api.js";
import { simpleSpec } from "./fixtures.js";

interface Recorded {
  url: string;
  method: string;
  body: unknown;
}

/** fetch stand-in returning a canned (status, json) per call. */
function fakeFetch(responses: { status: number; json: unknown }[]) {
  const calls: Recorded[] = [];
  const impl = (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    });
    const next = responses.shift();
    if (!next) throw new Error("fakeFetch ran out of responses");
    return Promise.resolve({
      ok: next.status >= 200 && next.status < 300,
      status: next.status,
      json: () => Promise.resolve(next.json),
    } as Response);
  };
  return { impl, calls };
}

describe("ApiClient", () => {
  it("play posts spec and realtime flag to the device route", async () => {
    const { impl, calls } = fakeFetch([
      { status: 200, json: { status: "DELIVERED", attempts: 1, rtt_ms: 2.0 } },
    ]);
    const api = new ApiClient("", impl);
    const spec = simpleSpec();
    const result = await api.play("wrist left", spec, true);

    expect(result.status).toBe("DELIVERED");
    expect(calls[0]!.url).toBe("/api/devices/wrist%20left/play");
    expect(calls[0]!.method).toBe("POST");
    expect(calls[0]!.body).toEqual({ spec, realtime: true });
  });

  it("server error envelopes become ApiFailure with code and field", async () => {
    const { impl } = fakeFetch([
      { status: 400, json: { error: { code: "E_BAD_SPEC", message: "must be >= 1", field: "delta_ms" } } },
    ]);
    const api = new ApiClient("", impl);
    const error = await api.render(simpleSpec()).catch((e: unknown) => e);

    expect(error).toBeInstanceOf(ApiFailure);
    const failure = error as ApiFailure;
    expect(failure.status).toBe(400);
    expect(failure.code).toBe("E_BAD_SPEC");
    expect(failure.field).toBe("delta_ms");
    expect(failure.message).toBe("must be >= 1");
  });

  it("a FAILED delivery is a result, not an exception", async () => {
    const { impl } = fakeFetch([
      { status: 502, json: { error: { code: "E_DELIVERY", message: "band-1 unreachable" } } },
    ]);
    const api = new ApiClient("", impl);
    // 502 means the server gave up on the band; the client surfaces it as
    // a typed failure the loop can report
    const error = await api.play("band-1", simpleSpec()).catch((e: unknown) => e);
    expect((error as ApiFailure).code).toBe("E_DELIVERY");
    expect((error as ApiFailure).status).toBe(502);
  });

  it("savePreset distinguishes created from updated", async () => {
    const entry = { name: "mine", builtin: false, spec: simpleSpec() };
    const { impl, calls } = fakeFetch([
      { status: 201, json: entry },
      { status: 200, json: entry },
    ]);
    const api = new ApiClient("", impl);
    expect((await api.savePreset("mine", entry.spec)).created).toBe(true);
    expect((await api.savePreset("mine", entry.spec)).created).toBe(false);
    expect(calls[0]!.method).toBe("PUT");
    expect(calls[0]!.url).toBe("/api/presets/mine");
    expect(calls[0]!.body).toEqual(entry.spec); // PUT body is the bare spec
  });

  it("presets unwraps the listing envelope", async () => {
    const { impl } = fakeFetch([
      { status: 200, json: { presets: [{ name: "a", builtin: true, spec: simpleSpec() }] } },
    ]);
    const api = new ApiClient("", impl);
    const presets = await api.presets();
    expect(presets).toHaveLength(1);
    expect(presets[0]!.builtin).toBe(true);
  });

  it("network failures surface as E_NETWORK with status 0", async () => {
    const api = new ApiClient("", () => Promise.reject(new TypeError("fetch failed")));
    const error = await api.devices().catch((e: unknown) => e);
    expect((error as ApiFailure).code).toBe("E_NETWORK");
    expect((error as ApiFailure).status).toBe(0);
  });

  it("a non-JSON error body still raises a usable failure", async () => {
    const impl = (): Promise<Response> => Promise.resolve({
      ok: false,
      status: 500,
      json: () => Promise.reject(new SyntaxError("not json")),
    } as unknown as Response);
    const api = new ApiClient("", impl);
    const error = await api.devices().catch((e: unknown) => e);
    expect((error as ApiFailure).code).toBe("E_HTTP");
    expect((error as ApiFailure).message).toBe("HTTP 500");
  });
});
