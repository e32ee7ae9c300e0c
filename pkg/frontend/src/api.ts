import type {
  OutputsPayload,
  Rating,
  SessionView,
  SummaryPayload,
  TreeExport,
  TreeStats,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Everything the navigator needs from the server. ApiClient is the real
 * implementation; tests substitute recordings. */
export interface NavigatorApi {
  listTrees(): Promise<{ trees: string[] }>;
  getTree(treeId: string): Promise<TreeExport>;
  getStats(treeId: string): Promise<TreeStats>;
  openSession(treeId: string): Promise<SessionView>;
  getSession(sessionId: string): Promise<SessionView>;
  select(sessionId: string, condition: string): Promise<SessionView>;
  back(sessionId: string): Promise<SessionView>;
  jump(sessionId: string, decision: string): Promise<SessionView>;
  gotoOutput(sessionId: string, terminal: string): Promise<SessionView>;
  setFilters(sessionId: string, filters: Record<string, string[]>): Promise<SessionView>;
  outputs(sessionId: string): Promise<OutputsPayload>;
  rate(treeId: string, terminal: string, rating: Rating): Promise<{ revision: number }>;
  summary(treeId: string): Promise<SummaryPayload>;
}

/** Thin typed client over the session API. The fetch function is injectable
 * so tests can replay recorded payloads without a server. */
export class ApiClient implements NavigatorApi {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      const body = await response.text();
      throw new Error(`${init?.method ?? "GET"} ${path} -> ${response.status}: ${body}`);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body ?? {}),
    });
  }

  private put<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  listTrees(): Promise<{ trees: string[] }> {
    return this.request("/trees");
  }

  getTree(treeId: string): Promise<TreeExport> {
    return this.request(`/trees/${treeId}`);
  }

  getStats(treeId: string): Promise<TreeStats> {
    return this.request(`/trees/${treeId}/stats`);
  }

  openSession(treeId: string): Promise<SessionView> {
    return this.post("/sessions", { tree: treeId });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request(`/sessions/${sessionId}`);
  }

  select(sessionId: string, condition: string): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/select`, { condition });
  }

  back(sessionId: string): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/back`);
  }

  jump(sessionId: string, decision: string): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/jump`, { decision });
  }

  gotoOutput(sessionId: string, terminal: string): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/goto`, { terminal });
  }

  setFilters(sessionId: string, filters: Record<string, string[]>): Promise<SessionView> {
    return this.put(`/sessions/${sessionId}/filters`, { filters });
  }

  outputs(sessionId: string): Promise<OutputsPayload> {
    return this.request(`/sessions/${sessionId}/outputs`);
  }

  rate(treeId: string, terminal: string, rating: Rating): Promise<{ revision: number }> {
    return this.put(`/annotations/${treeId}/${terminal}`, { rating });
  }

  summary(treeId: string): Promise<SummaryPayload> {
    return this.request(`/annotations/${treeId}/summary`);
  }
}
