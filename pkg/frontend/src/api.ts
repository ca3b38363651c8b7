import type { CommandBody, ExportJob, ProjectSummary, ServiceError } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public violations: string[] = [],
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin JSON client for the authoring service; base URL is configurable. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  url(path: string): string {
    return this.baseUrl + path;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.url(path), init);
    if (!response.ok) {
      let body: ServiceError | null = null;
      try {
        body = (await response.json()) as ServiceError;
      } catch {
        // non-JSON error body
      }
      throw new ApiError(
        response.status,
        body?.error.code ?? "http_error",
        body?.error.message ?? `HTTP ${response.status}`,
        body?.error.violations ?? [],
      );
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  async createProject(refs: {
    video_ref: string;
    tracking_ref: string;
    mask_ref: string;
  }): Promise<string> {
    const body = await this.post<{ project_id: string }>("/projects", refs);
    return body.project_id;
  }

  getProject(projectId: string): Promise<Record<string, unknown>> {
    return this.request(`/projects/${projectId}`);
  }

  postCommand(projectId: string, command: CommandBody): Promise<ProjectSummary> {
    return this.post(`/projects/${projectId}/commands`, command);
  }

  undo(projectId: string): Promise<ProjectSummary> {
    return this.post(`/projects/${projectId}/undo`);
  }

  redo(projectId: string): Promise<ProjectSummary> {
    return this.post(`/projects/${projectId}/redo`);
  }

  reset(projectId: string): Promise<ProjectSummary> {
    return this.post(`/projects/${projectId}/reset`);
  }

  /** URL of the server-rendered PNG for an output frame. */
  frameUrl(projectId: string, frame: number): string {
    return this.url(`/projects/${projectId}/frames/${frame}`);
  }

  async fetchFrame(projectId: string, frame: number): Promise<Blob> {
    const response = await this.fetchImpl(this.frameUrl(projectId, frame));
    if (!response.ok) {
      throw new ApiError(response.status, "frame_error", `HTTP ${response.status}`);
    }
    return response.blob();
  }

  async hittest(
    projectId: string,
    frame: number,
    x: number,
    y: number,
  ): Promise<string | null> {
    const body = await this.request<{ entity_id: string | null }>(
      `/projects/${projectId}/hittest?frame=${frame}&x=${x}&y=${y}`,
    );
    return body.entity_id;
  }

  async startExport(projectId: string): Promise<string> {
    const body = await this.post<{ job_id: string }>(`/projects/${projectId}/exports`);
    return body.job_id;
  }

  getExport(jobId: string): Promise<ExportJob> {
    return this.request(`/exports/${jobId}`);
  }
}
