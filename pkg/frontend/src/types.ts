/** Wire types for the highlight-authoring HTTP service. */

export type CommandKind =
  | "add_object"
  | "remove_object"
  | "move_resize_object"
  | "set_params"
  | "add_caption"
  | "edit_caption"
  | "remove_caption"
  | "split_at"
  | "insert_freeze"
  | "set_speed"
  | "set_muted"
  | "duplicate_segment"
  | "set_homography";

export type ObjectKind =
  | "background"
  | "foreground"
  | "circle"
  | "spotlight"
  | "connector"
  | "path"
  | "zone"
  | "marker"
  | "bg_filter"
  | "zoom_in"
  | "text"
  | "caption"
  | "freeze_frame";

export interface Point {
  x: number;
  y: number;
}

export interface ObjectDoc {
  id: string;
  kind: ObjectKind;
  start_frame: number;
  end_frame: number;
  layer?: number;
  z?: number;
  params: Record<string, unknown>;
}

export interface CommandBody {
  kind: CommandKind;
  payload: Record<string, unknown>;
}

export interface ObjectSummary {
  id: string;
  kind: ObjectKind;
}

/** Mutation response: the server's post-command view of the project. */
export interface ProjectSummary {
  version: number;
  output_duration: number;
  objects: ObjectSummary[];
  captions: number;
  segments: number;
  can_undo: boolean;
  can_redo: boolean;
  command_id?: number;
}

export interface ServiceError {
  error: {
    code: string;
    message: string;
    violations?: string[];
  };
}

export interface ExportJob {
  job_id: string;
  state: "queued" | "running" | "done" | "failed";
  progress: { frames_done: number; total: number };
  manifest?: Record<string, unknown>;
  message?: string;
}
