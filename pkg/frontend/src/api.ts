import type {
  AlignmentMatrix,
  ClassDiagnostic,
  DriftReport,
  PreferenceRecord,
  ReviewItem,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; ok: boolean; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Thin typed client for the serve API. The only write it can issue is
 * POST /api/preferences. */
export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly base = "",
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.base + path);
    if (!resp.ok) {
      throw new ApiError(resp.status, await detailOf(resp));
    }
    return (await resp.json()) as T;
  }

  async fetchReviewQueue(): Promise<ReviewItem[]> {
    const payload = await this.get<{ items: ReviewItem[] }>("/api/review/queue");
    return payload.items;
  }

  async listRuns(): Promise<string[]> {
    const payload = await this.get<{ runs: string[] }>("/api/runs");
    return payload.runs;
  }

  async fetchAlignment(runId: string): Promise<AlignmentMatrix> {
    return this.get<AlignmentMatrix>(`/api/alignment/${runId}`);
  }

  async fetchDiagnostics(runId: string): Promise<ClassDiagnostic[]> {
    const payload = await this.get<{ diagnostics: ClassDiagnostic[] }>(
      `/api/diagnostics/${runId}`,
    );
    return payload.diagnostics;
  }

  async fetchDriftLatest(): Promise<DriftReport> {
    return this.get<DriftReport>("/api/drift/latest");
  }

  async submitPreference(record: PreferenceRecord): Promise<PreferenceRecord> {
    const resp = await this.fetchFn(this.base + "/api/preferences", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(record),
    });
    if (!resp.ok) {
      throw new ApiError(resp.status, await detailOf(resp));
    }
    return (await resp.json()) as PreferenceRecord;
  }
}

async function detailOf(resp: {
  json(): Promise<unknown>;
}): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: unknown };
    return typeof body.detail === "string"
      ? body.detail
      : JSON.stringify(body.detail ?? body);
  } catch {
    return "request failed";
  }
}
