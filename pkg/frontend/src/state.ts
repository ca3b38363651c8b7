import type { ObjectKind, ObjectSummary } from "./types.js";

/** Tools available on the canvas and feature panels. */
export type Tool =
  | "select"
  | "circle"
  | "spotlight"
  | "connector"
  | "zoom_in"
  | "text"
  | "path"
  | "zone"
  | "marker";

export type FeatureCategory = "player" | "tactic" | "action";
export type TrackColor = "orange" | "green" | "blue";

const PLAYER_KINDS: ReadonlySet<ObjectKind> = new Set([
  "circle",
  "spotlight",
  "connector",
  "zoom_in",
  "text",
]);
const TACTIC_KINDS: ReadonlySet<ObjectKind> = new Set(["path", "zone", "marker"]);

export function featureCategory(kind: ObjectKind): FeatureCategory {
  if (PLAYER_KINDS.has(kind)) return "player";
  if (TACTIC_KINDS.has(kind)) return "tactic";
  return "action";
}

const CATEGORY_COLOR: Record<FeatureCategory, TrackColor> = {
  player: "orange",
  tactic: "green",
  action: "blue",
};

export function trackColor(kind: ObjectKind): TrackColor {
  return CATEGORY_COLOR[featureCategory(kind)];
}

export interface TrackRow {
  objectId: string;
  kind: ObjectKind;
  row: number;
  color: TrackColor;
}

/** Mutable view state of the editor; playhead stays within the output range. */
export class EditorViewState {
  playhead = 0;
  selectedTool: Tool = "select";
  selectedObjectId: string | null = null;

  constructor(
    public projectId: string,
    private outputDuration: number,
  ) {
    if (outputDuration < 1) {
      throw new Error("output duration must be at least one frame");
    }
  }

  get duration(): number {
    return this.outputDuration;
  }

  /** Clamp into [0, output_duration) so the invariant always holds. */
  setPlayhead(frame: number): number {
    const clamped = Math.min(Math.max(0, Math.floor(frame)), this.outputDuration - 1);
    this.playhead = clamped;
    return clamped;
  }

  /** Timeline edits change the output duration; re-clamp the playhead. */
  setOutputDuration(duration: number): void {
    if (duration < 1) {
      throw new Error("output duration must be at least one frame");
    }
    this.outputDuration = duration;
    this.setPlayhead(this.playhead);
  }

  /** One row per object in document order, colored by feature category. */
  trackLayout(objects: ObjectSummary[]): TrackRow[] {
    return objects
      .filter((o) => o.kind !== "background" && o.kind !== "foreground")
      .map((o, row) => ({
        objectId: o.id,
        kind: o.kind,
        row,
        color: trackColor(o.kind),
      }));
  }
}
