// HTTP client with optimistic-concurrency plumbing. Mutations always send
// the caller's revision token via If-Match; a stale token surfaces as a
// ConflictError and is never retried here.

import type {
  CatalogRow,
  ClassifyResult,
  EvalReport,
  ReferenceSetDoc,
  RoutineSummary,
  SegmentsDoc,
  TrajectoryDoc,
  FrameMeta,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ConflictError extends ApiError {
  constructor(readonly currentRevision: number | null) {
    super(409, "stale revision token");
  }
}

async function raise(res: Response): Promise<never> {
  let detail = "";
  let current: number | null = null;
  try {
    const body = await res.json();
    detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    if (body.detail && typeof body.detail === "object") {
      current = body.detail.current_revision ?? null;
    }
  } catch {
    // non-JSON error body
  }
  if (res.status === 409) throw new ConflictError(current);
  throw new ApiError(res.status, detail || res.statusText);
}

export class Client {
  constructor(readonly base: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, init);
    if (!res.ok) await raise(res);
    return (await res.json()) as T;
  }

  private mutation(revision: number, body?: unknown): RequestInit {
    return {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "If-Match": `"${revision}"`,
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    };
  }

  catalog(): Promise<CatalogRow[]> {
    return this.json("/api/catalog");
  }

  routines(): Promise<RoutineSummary[]> {
    return this.json("/api/routines");
  }

  routine(id: string): Promise<RoutineSummary> {
    return this.json(`/api/routines/${id}`);
  }

  segments(id: string): Promise<SegmentsDoc> {
    return this.json(`/api/routines/${id}/segments`);
  }

  frameUrl(id: string, n: number): string {
    return `${this.base}/api/routines/${id}/frames/${n}`;
  }

  frameMeta(id: string, n: number): Promise<FrameMeta> {
    return this.json(`/api/routines/${id}/frames/${n}/meta`);
  }

  /** Raw pose stream (JSON lines) or null when the routine has none. */
  async poses(id: string): Promise<string | null> {
    const res = await fetch(`${this.base}/api/routines/${id}/poses`);
    if (res.status === 404) return null;
    if (!res.ok) await raise(res);
    return res.text();
  }

  putTrampolineLine(
    id: string,
    topRow: number,
    revision: number,
  ): Promise<{ routine: RoutineSummary; segments: SegmentsDoc }> {
    return this.json(`/api/routines/${id}/trampoline-line`, {
      ...this.mutation(revision, { top_row: topRow }),
      method: "PUT",
    });
  }

  labelSegment(
    segmentId: string,
    code: string,
    addToReferenceSet: boolean,
    revision: number,
  ): Promise<{
    labels: Record<string, string>;
    revision: number;
    reference_entry: { entry_id: string; code: string } | null;
  }> {
    return this.json(
      `/api/segments/${segmentId}/label`,
      this.mutation(revision, { code, add_to_reference_set: addToReferenceSet }),
    );
  }

  classifySegment(segmentId: string): Promise<ClassifyResult> {
    return this.json(`/api/segments/${segmentId}/classify`, { method: "POST" });
  }

  segmentFeatures(segmentId: string): Promise<TrajectoryDoc> {
    return this.json(`/api/segments/${segmentId}/features`);
  }

  referenceSet(): Promise<ReferenceSetDoc> {
    return this.json("/api/reference-set");
  }

  deleteReference(entryId: string, revision: number): Promise<{ deleted: string }> {
    return this.json(`/api/reference-set/${entryId}`, {
      ...this.mutation(revision),
      method: "DELETE",
    });
  }

  async latestEvaluation(): Promise<EvalReport | null> {
    try {
      return await this.json<EvalReport>("/api/evaluation/latest");
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }
}
