export interface Followups {
  questions: string[];
  method: string;
}

export interface SessionState {
  session_id: string;
  followups: Followups | null;
  active_topic: string | null;
}

export interface CreateSessionResult extends SessionState {
  greeting: string;
}

export interface MessageResult extends SessionState {
  reply: string;
}

export interface TopicSwitchResult {
  topic: string;
  followups: Followups | null;
}

export interface ExamplePost {
  id: string;
  title: string;
  body: string;
  category: string;
  engagement: number;
}

export interface ExampleResult {
  post: ExamplePost;
  disclaimer: string;
}

export class ApiError extends Error {
  status: number;
  code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Api {
  baseUrl: string;
  fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, "network", String(err));
    }
    if (!response.ok) {
      // Server errors share one JSON shape, {"code", "message"}; keep a
      // fallback for proxies that answer with something else.
      let code = "http_error";
      let message = `HTTP ${response.status}`;
      try {
        const body = await response.json();
        if (body && typeof body.code === "string") code = body.code;
        if (body && typeof body.message === "string") message = body.message;
      } catch {
        // not JSON, keep the fallback
      }
      throw new ApiError(response.status, code, message);
    }
    return response.json() as Promise<T>;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(): Promise<CreateSessionResult> {
    return this.post("/sessions", {});
  }

  sendMessage(sessionId: string, query: string, method?: string): Promise<MessageResult> {
    const body: { query: string; method?: string } = { query };
    if (method) body.method = method;
    return this.post(`/sessions/${sessionId}/messages`, body);
  }

  explain(sessionId: string, selected: string): Promise<MessageResult> {
    return this.post(`/sessions/${sessionId}/explain`, { selected });
  }

  autocomplete(q: string): Promise<string[]> {
    return this.request<{ suggestions: string[] }>(
      `/autocomplete?q=${encodeURIComponent(q)}`,
    ).then((r) => r.suggestions);
  }

  topics(): Promise<string[]> {
    return this.request<{ topics: string[] }>("/topics").then((r) => r.topics);
  }

  switchTopic(sessionId: string, topic: string): Promise<TopicSwitchResult> {
    return this.post(`/sessions/${sessionId}/topic`, { topic });
  }

  example(sessionId: string, category?: string): Promise<ExampleResult> {
    return this.post(`/sessions/${sessionId}/example`, category ? { category } : {});
  }
}
