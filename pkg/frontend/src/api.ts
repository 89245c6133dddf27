// Typed client for the pragmex HTTP API. Every guess shown in the UI
// comes from these calls; nothing is inferred client-side.

export type UiMode = "positive_only" | "positive_negative";
export type Robot = "green" | "blue";
export type SessionStatus = "active" | "solved" | "abandoned";
export type SignValue = "+" | "-";

export interface ExampleView {
  string: string;
  sign: SignValue | null;
}

export interface SessionView {
  id: string;
  ui_mode: UiMode;
  robot: Robot;
  status: SessionStatus;
  target: string;
  target_explanation: string;
  examples: ExampleView[];
  guess: string;
  solved: boolean;
  posterior_size: number;
  created_at: number;
  updated_at: number;
}

export interface GuessUpdate {
  guess: string;
  solved: boolean;
  posterior_size: number;
}

export interface CreateSessionRequest {
  ui_mode: UiMode;
  robot: Robot;
  seed?: number;
  target?: string;
}

export interface Health {
  status: string;
  version: string;
  sessions: number;
  domain: { num_concepts: number; num_strings: number; max_len: number };
}

/** Server-reported failure: carries the error code from {code, message}. */
export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class Client {
  constructor(readonly base: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = "HttpError";
      let message = `${method} ${path} failed: ${response.status}`;
      try {
        const payload = await response.json();
        if (payload && typeof payload.code === "string") {
          code = payload.code;
          message = payload.message ?? message;
        }
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(code, message, response.status);
    }
    return response.json() as Promise<T>;
  }

  health(): Promise<Health> {
    return this.request("GET", "/healthz");
  }

  createSession(req: CreateSessionRequest): Promise<SessionView> {
    return this.request("POST", "/sessions", req);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  addExample(id: string, example: string, sign?: SignValue): Promise<GuessUpdate> {
    return this.request("POST", `/sessions/${id}/examples`, { string: example, sign });
  }

  removeExample(id: string, example: string, sign?: SignValue): Promise<GuessUpdate> {
    return this.request("DELETE", `/sessions/${id}/examples`, { string: example, sign });
  }

  requestGuess(id: string): Promise<GuessUpdate> {
    return this.request("POST", `/sessions/${id}/guess`);
  }

  abandonSession(id: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/abandon`);
  }
}
