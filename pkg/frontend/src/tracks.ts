import { ApiError, type ApiClient } from "./api.js";
import { optimistic } from "./optimistic.js";
import type { EditorViewState } from "./state.js";
import type { ProjectSummary } from "./types.js";

export interface TrackSpan {
  start: number;
  end: number;
}

export interface TrackCallbacks {
  /** Redraw the local track row for an object. */
  render: (objectId: string, span: TrackSpan) => void;
  onReconciled?: (summary: ProjectSummary) => void;
  /** Server rejected the drag (e.g. 409): span was reverted. */
  onRejected?: (message: string) => void;
}

/**
 * Timeline track dragging: optimistic local update, one MoveResizeObject
 * command per drop, revert + toast on rejection.
 */
export class TrackController {
  private spans = new Map<string, TrackSpan>();

  constructor(
    private api: ApiClient,
    private state: EditorViewState,
    private callbacks: TrackCallbacks,
  ) {}

  setSpan(objectId: string, span: TrackSpan): void {
    this.spans.set(objectId, { ...span });
  }

  getSpan(objectId: string): TrackSpan | undefined {
    const span = this.spans.get(objectId);
    return span ? { ...span } : undefined;
  }

  /** Client-side validation first: invalid spans never reach the server. */
  isValidSpan(span: TrackSpan): boolean {
    return (
      Number.isInteger(span.start) &&
      Number.isInteger(span.end) &&
      span.start >= 0 &&
      span.end > span.start &&
      span.end <= this.state.duration
    );
  }

  async onTrackDrag(objectId: string, newStart: number, newEnd: number): Promise<boolean> {
    const current = this.spans.get(objectId);
    if (!current) {
      throw new Error(`unknown track: ${objectId}`);
    }
    const next: TrackSpan = { start: newStart, end: newEnd };
    if (!this.isValidSpan(next)) {
      return false; // blocked client-side; no request
    }
    const result = await optimistic({
      apply: () => {
        const snapshot = { ...current };
        this.spans.set(objectId, next);
        this.callbacks.render(objectId, next);
        return snapshot;
      },
      remote: () =>
        this.api.postCommand(this.state.projectId, {
          kind: "move_resize_object",
          payload: { id: objectId, start_frame: newStart, end_frame: newEnd },
        }),
      revert: (snapshot) => {
        this.spans.set(objectId, snapshot);
        this.callbacks.render(objectId, snapshot);
      },
      onError: (error) => {
        const message =
          error instanceof ApiError ? error.message : "drag could not be saved";
        this.callbacks.onRejected?.(message);
      },
    });
    if (result !== null) {
      this.callbacks.onReconciled?.(result);
      return true;
    }
    return false;
  }
}
