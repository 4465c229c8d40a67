export {
  ApiClient,
  ApiError,
  type AudioPayload,
  type ChallengePayload,
  type Modality,
  type SessionInfo,
  type Solution,
  type SubmitResult,
  type TelemetryEvent,
  type TilePayload,
  type VerdictInfo,
} from "./api.js";
export { normalizeTranscript } from "./normalize.js";
export { base64ToBytes, decodePgm, paintTile, toRgba, type GrayImage } from "./pgm.js";
export { TelemetryRecorder, type NowFn } from "./telemetry.js";
export { CaptchaWidget, mount, type Phase, type WidgetOptions } from "./widget.js";
