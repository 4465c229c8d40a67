/**
 * The challenge widget: renders a 3x3 tile grid or an audio player,
 * captures pointer/click/key-timing telemetry from challenge receipt,
 * and walks the service's verification flow (solving -> submitting ->
 * passed | blocked | escalated-with-next-challenge).
 */

import {
  ApiClient,
  ApiError,
  type ChallengePayload,
  type FetchLike,
  type Modality,
  type Solution,
} from "./api.js";
import { normalizeTranscript } from "./normalize.js";
import { base64ToBytes, decodePgm, paintTile } from "./pgm.js";
import { TelemetryRecorder, type NowFn } from "./telemetry.js";

export type Phase =
  | "idle"
  | "loading"
  | "solving"
  | "submitting"
  | "passed"
  | "blocked"
  | "escalated";

export interface WidgetOptions {
  modality?: Modality;
  fetchFn?: FetchLike;
  now?: NowFn;
  /** ms before the retry button appears after a network failure */
  retryDelayMs?: number;
}

export class CaptchaWidget {
  readonly api: ApiClient;
  readonly telemetry: TelemetryRecorder;
  phase: Phase = "idle";
  sessionId: string | null = null;
  challenge: ChallengePayload | null = null;
  selected = new Set<number>();
  token: string | null = null;
  lastError: string | null = null;

  private readonly modality: Modality;
  private readonly root: HTMLElement;
  private phaseListeners: Array<(phase: Phase) => void> = [];

  constructor(container: HTMLElement, serviceUrl: string, options: WidgetOptions = {}) {
    this.root = container;
    this.modality = options.modality ?? "grid";
    this.api = new ApiClient(serviceUrl, options.fetchFn);
    this.telemetry = new TelemetryRecorder(options.now);
    this.root.classList.add("adaptcha");
    this.root.addEventListener("pointermove", (e) => {
      const ev = e as PointerEvent;
      this.telemetry.pointerMove(ev.clientX, ev.clientY);
    });
  }

  onPhase(listener: (phase: Phase) => void): void {
    this.phaseListeners.push(listener);
  }

  private setPhase(phase: Phase): void {
    this.phase = phase;
    this.root.dataset.phase = phase;
    for (const listener of this.phaseListeners) listener(phase);
  }

  async start(): Promise<void> {
    this.setPhase("loading");
    this.render();
    try {
      const session = await this.api.createSession();
      this.sessionId = session.session_id;
      await this.loadChallenge();
    } catch (err) {
      this.showRetry(err);
    }
  }

  private async loadChallenge(): Promise<void> {
    if (!this.sessionId) throw new Error("no session");
    this.setPhase("loading");
    this.render();
    try {
      const payload = await this.api.fetchChallenge(this.sessionId, this.modality);
      this.acceptChallenge(payload);
    } catch (err) {
      if (err instanceof ApiError && (err.status === 409 || err.status === 410)) {
        // stale state: surface the verdict instead
        const verdict = await this.api.getVerdict(this.sessionId);
        this.finish(verdict.state, verdict.token ?? null);
        return;
      }
      this.showRetry(err);
    }
  }

  /** New challenge payload: reset selection + telemetry, start solving. */
  private acceptChallenge(payload: ChallengePayload): void {
    this.challenge = payload;
    this.selected.clear();
    this.telemetry.start();
    this.setPhase("solving");
    this.render();
  }

  toggleTile(index: number): void {
    if (this.phase !== "solving") return;
    if (this.selected.has(index)) this.selected.delete(index);
    else this.selected.add(index);
    this.render();
  }

  private currentSolution(): Solution {
    if (!this.challenge) throw new Error("no challenge");
    if (this.challenge.tiles) {
      return { indices: [...this.selected].sort((a, b) => a - b) };
    }
    const input = this.root.querySelector<HTMLInputElement>(".adaptcha-transcript");
    return { transcript: normalizeTranscript(input?.value ?? "") };
  }

  async submit(): Promise<void> {
    if (this.phase !== "solving" || !this.challenge || !this.sessionId) return;
    const challengeId = this.challenge.challenge_id;
    const solution = this.currentSolution();
    const telemetry = this.telemetry.snapshotWithSubmit();
    this.setPhase("submitting");
    this.render();
    try {
      const result = await this.api.submitResponse(this.sessionId, challengeId, solution, telemetry);
      if (result.state === "verified_human") {
        this.finish("verified_human", result.token ?? null);
      } else if (result.next_challenge) {
        this.setPhase("escalated");
        this.acceptChallenge(result.next_challenge);
      } else if (result.state === "blocked") {
        this.finish("blocked", null);
      } else {
        // escalated without an inline payload: fetch the next one
        this.setPhase("escalated");
        await this.loadChallenge();
      }
    } catch (err) {
      if (err instanceof ApiError && (err.status === 409 || err.status === 410)) {
        await this.loadChallenge();
        return;
      }
      this.setPhase("solving");
      this.showRetry(err);
    }
  }

  private finish(state: string, token: string | null): void {
    this.token = token;
    this.setPhase(state === "verified_human" ? "passed" : "blocked");
    this.render();
  }

  private showRetry(err: unknown): void {
    this.lastError = err instanceof Error ? err.message : String(err);
    this.render();
    const retry = document.createElement("button");
    retry.className = "adaptcha-retry";
    retry.textContent = "Connection problem - retry";
    retry.addEventListener("click", () => {
      this.lastError = null;
      void (this.sessionId ? this.loadChallenge() : this.start());
    });
    this.root.appendChild(retry);
  }

  // -- rendering ---------------------------------------------------------

  private render(): void {
    this.root.textContent = "";
    const status = document.createElement("div");
    status.className = "adaptcha-status";
    status.textContent = this.statusText();
    this.root.appendChild(status);

    if (this.phase === "passed" && this.token) {
      const tokenEl = document.createElement("code");
      tokenEl.className = "adaptcha-token";
      tokenEl.textContent = this.token;
      this.root.appendChild(tokenEl);
      return;
    }
    if (this.phase === "blocked" || this.phase === "loading" || this.phase === "idle") return;
    if (!this.challenge) return;

    const prompt = document.createElement("div");
    prompt.className = "adaptcha-prompt";
    prompt.textContent = this.challenge.prompt;
    this.root.appendChild(prompt);

    if (this.challenge.tiles) this.renderGrid();
    if (this.challenge.audio) this.renderAudio();

    const submit = document.createElement("button");
    submit.className = "adaptcha-submit";
    submit.textContent = "Verify";
    submit.disabled = this.phase !== "solving";
    submit.addEventListener("click", (e) => {
      const ev = e as MouseEvent;
      this.telemetry.click(ev.clientX ?? 0, ev.clientY ?? 0);
      void this.submit();
    });
    this.root.appendChild(submit);
  }

  private renderGrid(): void {
    const grid = document.createElement("div");
    grid.className = "adaptcha-grid";
    for (const tile of this.challenge!.tiles!) {
      const cell = document.createElement("canvas");
      cell.className = "adaptcha-tile";
      cell.dataset.index = String(tile.index);
      cell.dataset.selected = this.selected.has(tile.index) ? "true" : "false";
      if (tile.image_pgm_base64) {
        paintTile(cell, decodePgm(base64ToBytes(tile.image_pgm_base64)));
      } else if (tile.image_url) {
        cell.dataset.imageUrl = tile.image_url;
      }
      cell.addEventListener("click", (e) => {
        const ev = e as MouseEvent;
        this.telemetry.click(ev.clientX ?? 0, ev.clientY ?? 0);
        this.toggleTile(tile.index);
      });
      grid.appendChild(cell);
    }
    this.root.appendChild(grid);
  }

  private renderAudio(): void {
    const audio = this.challenge!.audio!;
    const player = document.createElement("audio");
    player.className = "adaptcha-audio";
    player.controls = true;
    if (audio.wav_base64) player.src = `data:audio/wav;base64,${audio.wav_base64}`;
    else if (audio.wav_url) player.src = audio.wav_url;
    this.root.appendChild(player);

    if (!this.challenge!.tiles) {
      const input = document.createElement("input");
      input.className = "adaptcha-transcript";
      input.type = "text";
      input.placeholder = "Type what you hear";
      // timing only; the key identity stays in the browser
      input.addEventListener("keydown", () => this.telemetry.keyTiming());
      this.root.appendChild(input);
    }
  }

  private statusText(): string {
    if (this.lastError) return "Could not reach the verification service";
    switch (this.phase) {
      case "idle":
        return "";
      case "loading":
        return "Loading challenge...";
      case "solving":
        return "Solve the challenge";
      case "submitting":
        return "Checking...";
      case "escalated":
        return "One more check...";
      case "passed":
        return "Verified - you are human";
      case "blocked":
        return "Verification failed";
    }
  }
}

/** Mount the widget and begin the verification flow immediately. */
export function mount(
  container: HTMLElement,
  serviceUrl: string,
  options: WidgetOptions = {},
): CaptchaWidget {
  const widget = new CaptchaWidget(container, serviceUrl, options);
  void widget.start();
  return widget;
}
