import type {
  BlockRequest,
  BlockRow,
  ConsoleRow,
  IpAnalysisRow,
  StatusInfo,
  WebAnalysisRow,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin client over the admin API. The token lives in memory only; reads
 * are tokenless, mutations send X-Admin-Token. Concurrent GETs of the
 * same path share one in-flight request.
 */
export class ApiClient {
  private token: string | null = null;
  private inflight = new Map<string, Promise<unknown>>();

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  setToken(token: string): void {
    this.token = token;
  }

  hasToken(): boolean {
    return this.token !== null && this.token !== "";
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    withToken = false,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (withToken && this.token) {
      headers["X-Admin-Token"] = this.token;
    }
    let payload: string | undefined;
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      payload = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: payload,
    });
    const text = await resp.text();
    if (!resp.ok) {
      let message = text || resp.statusText;
      try {
        const parsed = JSON.parse(text);
        if (parsed && typeof parsed.error === "string") message = parsed.error;
      } catch {
        // non-JSON error body, keep the raw text
      }
      throw new ApiError(resp.status, message);
    }
    return (text ? JSON.parse(text) : null) as T;
  }

  private get<T>(path: string): Promise<T> {
    const pending = this.inflight.get(path);
    if (pending) return pending as Promise<T>;
    const promise = this.request<T>("GET", path).finally(() => {
      this.inflight.delete(path);
    });
    this.inflight.set(path, promise);
    return promise;
  }

  status(): Promise<StatusInfo> {
    return this.get("/api/status");
  }

  attacks(since?: string): Promise<ConsoleRow[]> {
    const query = since ? `?since=${encodeURIComponent(since)}` : "";
    return this.get(`/api/attacks${query}`);
  }

  blocked(): Promise<BlockRow[]> {
    return this.get("/api/blocked");
  }

  ipAnalysis(ip?: string): Promise<IpAnalysisRow[]> {
    const query = ip ? `?ip=${encodeURIComponent(ip)}` : "";
    return this.get(`/api/analysis/ip${query}`);
  }

  webAnalysis(): Promise<WebAnalysisRow[]> {
    return this.get("/api/analysis/web");
  }

  block(req: BlockRequest): Promise<BlockRow> {
    return this.request("POST", "/api/block", req, true);
  }

  unblock(subject: string): Promise<{ removed: boolean }> {
    return this.request(
      "DELETE",
      `/api/block/${encodeURIComponent(subject)}`,
      undefined,
      true,
    );
  }
}
