/** Thin typed client for the four endpoints the UI consumes. */

import type { AskResponse, ModelSummary, SimulateResponse, SlotValue, Trace } from "./types";

export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function describeFailure(status: number, body: unknown): string {
  if (body && typeof body === "object") {
    const record = body as Record<string, unknown>;
    if (typeof record.detail === "string") return record.detail;
    if (Array.isArray(record.errors) && record.errors.length > 0) {
      return record.errors.join("; ");
    }
  }
  return `request failed with status ${status}`;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (error) {
      throw new ApiError(0, `service unreachable: ${String(error)}`);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      throw new ApiError(response.status, describeFailure(response.status, body));
    }
    return body as T;
  }

  getModels(): Promise<{ models: ModelSummary[] }> {
    return this.request("/models");
  }

  ask(modelId: string, question: string, sessionId: string | null = null): Promise<AskResponse> {
    return this.request("/ask", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ model_id: modelId, question, session_id: sessionId }),
    });
  }

  simulate(
    modelId: string,
    taskId: string,
    initialState: Record<string, SlotValue> | null = null,
    stepLimit: number | null = null,
  ): Promise<SimulateResponse> {
    return this.request("/simulate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        model_id: modelId,
        task_id: taskId,
        initial_state: initialState,
        step_limit: stepLimit,
      }),
    });
  }

  getTrace(traceId: string): Promise<Trace> {
    return this.request(`/traces/${encodeURIComponent(traceId)}`);
  }
}
