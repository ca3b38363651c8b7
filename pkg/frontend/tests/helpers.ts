import { ApiClient, type FetchLike } from "../src/api.js";

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export type Responder = (call: RecordedCall) => Response | Promise<Response>;

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function pngResponse(bytes: Uint8Array): Response {
  return new Response(new Uint8Array(bytes), {
    status: 200,
    headers: { "content-type": "image/png" },
  });
}

/** Fetch stub that records every call and delegates to a responder. */
export function mockFetch(responder: Responder): { fetch: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (input, init) => {
    const call: RecordedCall = {
      url: input,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : null,
    };
    calls.push(call);
    return responder(call);
  };
  return { fetch: fetchImpl, calls };
}

export function clientWith(responder: Responder, baseUrl = "http://svc") {
  const { fetch, calls } = mockFetch(responder);
  return { client: new ApiClient(baseUrl, fetch), calls };
}

export function summary(overrides: Record<string, unknown> = {}) {
  return {
    version: 1,
    output_duration: 300,
    objects: [],
    captions: 0,
    segments: 1,
    can_undo: true,
    can_redo: false,
    command_id: 1,
    ...overrides,
  };
}
