import type { ApiClient } from "./api.js";
import type { EditorViewState, Tool } from "./state.js";
import type { ObjectDoc, Point, ProjectSummary } from "./types.js";

/** Player tools anchor to a tracked entity under the click. */
const PLAYER_TOOLS: ReadonlySet<Tool> = new Set([
  "circle",
  "spotlight",
  "connector",
  "zoom_in",
  "text",
]);

/** Tactic tools accumulate drawn points and confirm explicitly. */
const MULTI_POINT_TOOLS: ReadonlySet<Tool> = new Set(["path", "zone"]);

export interface CanvasCallbacks {
  /** Player tool clicked empty court: shake the cursor, issue no request. */
  onMiss?: () => void;
  onObjectAdded?: (summary: ProjectSummary) => void;
  onError?: (error: unknown) => void;
}

const DEFAULT_SPAN_FRAMES = 90;

let objectCounter = 0;

function freshId(tool: Tool): string {
  return `${tool}-${++objectCounter}`;
}

/** Visible-for-tests reset of the id counter. */
export function resetObjectIds(): void {
  objectCounter = 0;
}

function objectSpan(state: EditorViewState): { start_frame: number; end_frame: number } {
  const start = state.playhead;
  const end = Math.min(state.duration, start + DEFAULT_SPAN_FRAMES);
  return { start_frame: start, end_frame: Math.max(end, start + 1) };
}

function playerObject(tool: Tool, entityId: string, state: EditorViewState): ObjectDoc {
  const span = objectSpan(state);
  switch (tool) {
    case "circle":
      return { id: freshId(tool), kind: "circle", ...span, params: { anchor_entity: entityId } };
    case "spotlight":
      return { id: freshId(tool), kind: "spotlight", ...span, params: { anchor_entity: entityId } };
    case "connector":
      return {
        id: freshId(tool),
        kind: "connector",
        ...span,
        params: { anchor_entities: [entityId] },
      };
    case "zoom_in":
      return {
        id: freshId(tool),
        kind: "zoom_in",
        ...span,
        params: { target: { entity_id: entityId, placement: "waist" } },
      };
    case "text":
      return {
        id: freshId(tool),
        kind: "text",
        ...span,
        params: {
          content: "Label",
          target: { entity_id: entityId, placement: "head" },
          placement: "head",
        },
      };
    default:
      throw new Error(`not a player tool: ${tool}`);
  }
}

function tacticObject(tool: Tool, points: Point[], state: EditorViewState): ObjectDoc {
  const span = objectSpan(state);
  const pts = points.map((p) => [p.x, p.y]);
  switch (tool) {
    case "path":
      return { id: freshId(tool), kind: "path", ...span, params: { points: pts } };
    case "zone":
      return { id: freshId(tool), kind: "zone", ...span, params: { points: pts } };
    case "marker":
      return {
        id: freshId(tool),
        kind: "marker",
        ...span,
        params: { symbol: "x", position: pts[0] },
      };
    default:
      throw new Error(`not a tactic tool: ${tool}`);
  }
}

/**
 * Click-to-annotate dispatcher. Player tools hit-test and add on a hit;
 * tactic tools rubber-band points locally until confirm() posts one command.
 */
export class CanvasController {
  private pendingPoints: Point[] = [];

  constructor(
    private api: ApiClient,
    private state: EditorViewState,
    private callbacks: CanvasCallbacks = {},
  ) {}

  get draftPoints(): readonly Point[] {
    return this.pendingPoints;
  }

  async onCanvasClick(point: Point, tool: Tool = this.state.selectedTool): Promise<void> {
    if (PLAYER_TOOLS.has(tool)) {
      const entity = await this.api.hittest(
        this.state.projectId,
        this.state.playhead,
        point.x,
        point.y,
      );
      if (entity === null) {
        this.callbacks.onMiss?.();
        return;
      }
      await this.addObject(playerObject(tool, entity, this.state));
      return;
    }
    if (MULTI_POINT_TOOLS.has(tool)) {
      this.pendingPoints.push(point);
      return;
    }
    if (tool === "marker") {
      await this.addObject(tacticObject(tool, [point], this.state));
      return;
    }
    // select tool: pick the object under the cursor, if any
    const entity = await this.api.hittest(
      this.state.projectId,
      this.state.playhead,
      point.x,
      point.y,
    );
    this.state.selectedObjectId = entity;
  }

  /** Confirm a multi-point draft; posts exactly one AddObject. */
  async confirm(tool: Tool = this.state.selectedTool): Promise<void> {
    if (!MULTI_POINT_TOOLS.has(tool)) return;
    const minPoints = tool === "zone" ? 3 : 2;
    if (this.pendingPoints.length < minPoints) return;
    const points = this.pendingPoints;
    this.pendingPoints = [];
    await this.addObject(tacticObject(tool, points, this.state));
  }

  cancelDraft(): void {
    this.pendingPoints = [];
  }

  private async addObject(object: ObjectDoc): Promise<void> {
    try {
      const summary = await this.api.postCommand(this.state.projectId, {
        kind: "add_object",
        payload: { object },
      });
      this.callbacks.onObjectAdded?.(summary);
    } catch (error) {
      this.callbacks.onError?.(error);
    }
  }
}
