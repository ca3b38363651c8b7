import type { ApiClient } from "./api.js";
import type { EditorViewState } from "./state.js";
import type { CommandBody, CommandKind, ProjectSummary } from "./types.js";

/** Toolbar buttons and timeline context-menu entries. */
export type Affordance =
  | "reset"
  | "undo"
  | "redo"
  | "freeze"
  | "split"
  | "mute"
  | "duplicate"
  | "speed";

/** Each editing affordance maps to exactly one command kind. */
export const AFFORDANCE_COMMAND: Record<
  Exclude<Affordance, "reset" | "undo" | "redo">,
  CommandKind
> = {
  freeze: "insert_freeze",
  split: "split_at",
  mute: "set_muted",
  duplicate: "duplicate_segment",
  speed: "set_speed",
};

export interface SpeedOption {
  num: number;
  den: number;
}

export class ToolbarController {
  constructor(
    private api: ApiClient,
    private state: EditorViewState,
  ) {}

  private async post(command: CommandBody): Promise<ProjectSummary> {
    const summary = await this.api.postCommand(this.state.projectId, command);
    this.state.setOutputDuration(summary.output_duration);
    return summary;
  }

  reset(): Promise<ProjectSummary> {
    return this.api.reset(this.state.projectId);
  }

  undo(): Promise<ProjectSummary> {
    return this.api.undo(this.state.projectId);
  }

  redo(): Promise<ProjectSummary> {
    return this.api.redo(this.state.projectId);
  }

  freeze(durationFrames?: number): Promise<ProjectSummary> {
    const payload: Record<string, unknown> = { frame: this.state.playhead };
    if (durationFrames !== undefined) payload.duration = durationFrames;
    return this.post({ kind: AFFORDANCE_COMMAND.freeze, payload });
  }

  split(): Promise<ProjectSummary> {
    return this.post({ kind: AFFORDANCE_COMMAND.split, payload: { frame: this.state.playhead } });
  }

  mute(segmentIndex: number, muted: boolean): Promise<ProjectSummary> {
    return this.post({
      kind: AFFORDANCE_COMMAND.mute,
      payload: { segment_index: segmentIndex, muted },
    });
  }

  duplicate(segmentIndex: number): Promise<ProjectSummary> {
    return this.post({
      kind: AFFORDANCE_COMMAND.duplicate,
      payload: { segment_index: segmentIndex },
    });
  }

  speed(segmentIndex: number, speed: SpeedOption): Promise<ProjectSummary> {
    return this.post({
      kind: AFFORDANCE_COMMAND.speed,
      payload: { segment_index: segmentIndex, speed: [speed.num, speed.den] },
    });
  }
}
