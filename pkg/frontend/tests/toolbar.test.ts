import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { EditorViewState } from "../src/state.js";
import { AFFORDANCE_COMMAND, ToolbarController } from "../src/toolbar.js";
import { jsonResponse, mockFetch, summary } from "./helpers.js";

function setup(duration = 300) {
  const { fetch, calls } = mockFetch((call) => {
    if (call.url.endsWith("/commands")) {
      const body = call.body as { kind: string };
      // a freeze insertion lengthens the output
      const out = body.kind === "insert_freeze" ? duration + 25 : duration;
      return jsonResponse(summary({ output_duration: out }));
    }
    return jsonResponse(summary({ output_duration: duration }));
  });
  const api = new ApiClient("http://svc", fetch);
  const state = new EditorViewState("p1", duration);
  return { toolbar: new ToolbarController(api, state), state, calls };
}

describe("AFFORDANCE_COMMAND", () => {
  it("maps every editing affordance to exactly one command kind", () => {
    expect(AFFORDANCE_COMMAND).toEqual({
      freeze: "insert_freeze",
      split: "split_at",
      mute: "set_muted",
      duplicate: "duplicate_segment",
      speed: "set_speed",
    });
    const kinds = Object.values(AFFORDANCE_COMMAND);
    expect(new Set(kinds).size).toBe(kinds.length);
  });
});

describe("ToolbarController", () => {
  it("splits at the current playhead", async () => {
    const { toolbar, state, calls } = setup();
    state.setPlayhead(140);
    await toolbar.split();
    expect(calls[0].body).toEqual({ kind: "split_at", payload: { frame: 140 } });
  });

  it("inserts a freeze at the playhead and adopts the new duration", async () => {
    const { toolbar, state, calls } = setup();
    state.setPlayhead(50);
    await toolbar.freeze(25);
    expect(calls[0].body).toEqual({
      kind: "insert_freeze",
      payload: { frame: 50, duration: 25 },
    });
    expect(state.duration).toBe(325);
  });

  it("re-clamps the playhead when an edit shortens the output", async () => {
    const { fetch, calls } = mockFetch(() => jsonResponse(summary({ output_duration: 100 })));
    const state = new EditorViewState("p1", 300);
    const toolbar = new ToolbarController(new ApiClient("http://svc", fetch), state);
    state.setPlayhead(250);
    await toolbar.duplicate(0);
    expect(calls[0].body).toEqual({
      kind: "duplicate_segment",
      payload: { segment_index: 0 },
    });
    expect(state.playhead).toBe(99);
  });

  it("sets segment speed as a rational", async () => {
    const { toolbar, calls } = setup();
    await toolbar.speed(1, { num: 1, den: 2 });
    expect(calls[0].body).toEqual({
      kind: "set_speed",
      payload: { segment_index: 1, speed: [1, 2] },
    });
  });

  it("mutes a segment", async () => {
    const { toolbar, calls } = setup();
    await toolbar.mute(2, true);
    expect(calls[0].body).toEqual({
      kind: "set_muted",
      payload: { segment_index: 2, muted: true },
    });
  });

  it("routes reset, undo and redo to their endpoints", async () => {
    const { toolbar, calls } = setup();
    await toolbar.undo();
    await toolbar.redo();
    await toolbar.reset();
    expect(calls.map((c) => c.url)).toEqual([
      "http://svc/projects/p1/undo",
      "http://svc/projects/p1/redo",
      "http://svc/projects/p1/reset",
    ]);
    expect(calls.every((c) => c.method === "POST")).toBe(true);
  });
});
