// Thin typed client for the seqctl session service. The base URL is the
// console's single configuration point.

import { Meta, ServiceError, SessionView, isSessionView } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly rawBody: string,
  ) {
    super(message);
  }
}

export class MalformedPayloadError extends Error {
  constructor(public readonly rawBody: string) {
    super("service payload does not look like a session view");
  }
}

async function parseJson(response: Response): Promise<{ body: unknown; raw: string }> {
  const raw = await response.text();
  try {
    return { body: JSON.parse(raw), raw };
  } catch {
    throw new MalformedPayloadError(raw);
  }
}

async function expectSession(response: Response): Promise<SessionView> {
  const { body, raw } = await parseJson(response);
  if (!response.ok) {
    const err = body as ServiceError;
    throw new ApiError(response.status, err.code ?? "HTTP_ERROR", err.message ?? raw, raw);
  }
  if (!isSessionView(body)) throw new MalformedPayloadError(raw);
  return body;
}

export class Client {
  constructor(private readonly baseUrl: string) {}

  async meta(): Promise<Meta> {
    const response = await fetch(`${this.baseUrl}/v1/meta`);
    const { body, raw } = await parseJson(response);
    if (!response.ok) throw new ApiError(response.status, "HTTP_ERROR", raw, raw);
    return body as Meta;
  }

  async createSession(): Promise<SessionView> {
    const response = await fetch(`${this.baseUrl}/v1/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: "{}",
    });
    return expectSession(response);
  }

  async getSession(id: string): Promise<SessionView> {
    return expectSession(await fetch(`${this.baseUrl}/v1/sessions/${id}`));
  }

  async observe(id: string, outcome: string): Promise<SessionView> {
    const response = await fetch(`${this.baseUrl}/v1/sessions/${id}/observe`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ outcome }),
    });
    return expectSession(response);
  }
}
