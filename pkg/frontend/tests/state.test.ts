import { describe, expect, it } from "vitest";
import { EditorViewState, featureCategory, trackColor } from "../src/state.js";
import type { ObjectSummary } from "../src/types.js";

describe("EditorViewState", () => {
  it("keeps the playhead within [0, output_duration)", () => {
    const state = new EditorViewState("p1", 120);
    expect(state.setPlayhead(-5)).toBe(0);
    expect(state.setPlayhead(119)).toBe(119);
    expect(state.setPlayhead(120)).toBe(119);
    expect(state.setPlayhead(10_000)).toBe(119);
    expect(state.setPlayhead(42.9)).toBe(42);
  });

  it("re-clamps the playhead when the output duration shrinks", () => {
    const state = new EditorViewState("p1", 300);
    state.setPlayhead(250);
    state.setOutputDuration(100);
    expect(state.playhead).toBe(99);
  });

  it("rejects non-positive durations", () => {
    expect(() => new EditorViewState("p1", 0)).toThrow();
    const state = new EditorViewState("p1", 10);
    expect(() => state.setOutputDuration(0)).toThrow();
  });
});

describe("track colors", () => {
  it("colors player features orange", () => {
    for (const kind of ["circle", "spotlight", "connector", "zoom_in", "text"] as const) {
      expect(featureCategory(kind)).toBe("player");
      expect(trackColor(kind)).toBe("orange");
    }
  });

  it("colors tactic features green", () => {
    for (const kind of ["path", "zone", "marker"] as const) {
      expect(featureCategory(kind)).toBe("tactic");
      expect(trackColor(kind)).toBe("green");
    }
  });

  it("colors action features blue", () => {
    for (const kind of ["bg_filter", "caption", "freeze_frame"] as const) {
      expect(featureCategory(kind)).toBe("action");
      expect(trackColor(kind)).toBe("blue");
    }
  });

  it("lays out one colored row per visible object", () => {
    const objects: ObjectSummary[] = [
      { id: "bg", kind: "background" },
      { id: "c1", kind: "circle" },
      { id: "z1", kind: "zone" },
      { id: "f1", kind: "bg_filter" },
      { id: "fg", kind: "foreground" },
    ];
    const rows = new EditorViewState("p1", 10).trackLayout(objects);
    expect(rows).toEqual([
      { objectId: "c1", kind: "circle", row: 0, color: "orange" },
      { objectId: "z1", kind: "zone", row: 1, color: "green" },
      { objectId: "f1", kind: "bg_filter", row: 2, color: "blue" },
    ]);
  });
});
