/** Typed client for the verification service's JSON API. */

export interface SessionInfo {
  session_id: string;
  state: string;
}

export interface TilePayload {
  index: number;
  image_pgm_base64?: string;
  image_url?: string;
}

export interface AudioPayload {
  wav_base64?: string;
  wav_url?: string;
}

export type Modality = "grid" | "audio" | "paired";

export interface ChallengePayload {
  session_id: string;
  challenge_id: string;
  modality: Modality;
  level: number;
  time_limit_s: number;
  issued_at: string;
  prompt: string;
  tiles?: TilePayload[];
  audio?: AudioPayload;
}

export interface VerdictInfo {
  label: "human" | "bot" | "uncertain";
  score: number;
  flags: Record<string, boolean>;
}

export interface SubmitResult {
  verdict: VerdictInfo;
  state: string;
  next_challenge?: ChallengePayload;
  token?: string;
}

export interface VerdictQuery {
  state: string;
  token?: string;
}

export type GridSolution = { indices: number[] };
export type AudioSolution = { transcript: string };
export type Solution = GridSolution | AudioSolution;

export interface TelemetryEvent {
  kind: "pointer_move" | "click" | "key" | "submit";
  t: number;
  x?: number;
  y?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseJson(response: Response): Promise<any> {
  const text = await response.text();
  try {
    return text ? JSON.parse(text) : {};
  } catch {
    throw new ApiError(response.status, "bad_payload", "service returned non-JSON payload");
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<any> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const doc = await parseJson(response);
    if (!response.ok) {
      throw new ApiError(response.status, doc.code ?? "error", doc.message ?? response.statusText);
    }
    return doc;
  }

  createSession(): Promise<SessionInfo> {
    return this.request("POST", "/v1/session");
  }

  fetchChallenge(sessionId: string, modality: Modality): Promise<ChallengePayload> {
    return this.request("POST", `/v1/session/${sessionId}/challenge?modality=${modality}`);
  }

  submitResponse(
    sessionId: string,
    challengeId: string,
    solution: Solution,
    telemetry: TelemetryEvent[],
  ): Promise<SubmitResult> {
    return this.request("POST", `/v1/session/${sessionId}/response`, {
      challenge_id: challengeId,
      solution,
      telemetry,
    });
  }

  getVerdict(sessionId: string): Promise<VerdictQuery> {
    return this.request("GET", `/v1/session/${sessionId}/verdict`);
  }

  healthz(): Promise<{ status: string }> {
    return this.request("GET", "/v1/healthz");
  }
}
