import type { ApiClient } from "./api.js";
import type { EditorViewState } from "./state.js";

export interface PreviewCallbacks {
  /** Display the server-rendered frame. */
  display: (frame: number, image: Blob) => void;
  onError?: (error: unknown) => void;
}

/**
 * Server-rendered preview with scrub debouncing: at most one request in
 * flight; while one is pending only the latest requested frame is kept, and
 * stale responses are never displayed.
 */
export class PreviewLoader {
  private inFlight = false;
  private pendingFrame: number | null = null;
  private displayedFrame: number | null = null;

  constructor(
    private api: ApiClient,
    private state: EditorViewState,
    private callbacks: PreviewCallbacks,
  ) {}

  get isLoading(): boolean {
    return this.inFlight;
  }

  /** Scrub or seek to a frame; returns once the pipeline drains. */
  async renderPreview(playhead: number): Promise<void> {
    const frame = this.state.setPlayhead(playhead);
    if (this.inFlight) {
      this.pendingFrame = frame; // latest wins
      return;
    }
    this.inFlight = true;
    let next: number | null = frame;
    try {
      while (next !== null) {
        const current: number = next;
        try {
          const image = await this.api.fetchFrame(this.state.projectId, current);
          // drop stale imagery if the playhead moved on while fetching
          if (this.pendingFrame === null || this.pendingFrame === current) {
            this.callbacks.display(current, image);
            this.displayedFrame = current;
          }
        } catch (error) {
          this.callbacks.onError?.(error);
        }
        next = this.pendingFrame;
        this.pendingFrame = null;
        if (next === this.displayedFrame) {
          next = null;
        }
      }
    } finally {
      this.inFlight = false;
    }
  }

  /** Force a refetch of the current frame (e.g. after undo/redo/commands). */
  async refresh(): Promise<void> {
    this.displayedFrame = null;
    await this.renderPreview(this.state.playhead);
  }
}
