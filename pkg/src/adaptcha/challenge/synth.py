"""Tone synthesis and WAV encoding for audio challenges.

Each token becomes its two-tone signature played for the level's tone
duration, tokens are separated by 100 ms of silence, and white gaussian
noise is mixed in to hit the level's SNR measured over the voiced
segments. Output is 16 kHz mono 16-bit PCM.
"""

from __future__ import annotations

import io
import wave

import numpy as np

from ..rng import fill_gauss
from .audio import AudioChallenge, tone_pair_hz

SAMPLE_RATE = 16_000
GAP_MS = 100
TONE_AMPLITUDE = 0.35          # per sine; the pair peaks at 0.7
FADE_MS = 5.0                  # raised-cosine ramp against clicks
PEAK_TARGET = 0.99


def _tone(freqs: tuple[float, float], n_samples: int) -> np.ndarray:
    t = np.arange(n_samples, dtype=np.float64) / SAMPLE_RATE
    x = TONE_AMPLITUDE * (np.sin(2 * np.pi * freqs[0] * t) + np.sin(2 * np.pi * freqs[1] * t))
    n_fade = min(int(FADE_MS * SAMPLE_RATE / 1000), n_samples // 2)
    if n_fade > 0:
        ramp = 0.5 * (1 - np.cos(np.pi * np.arange(n_fade) / n_fade))
        x[:n_fade] *= ramp
        x[-n_fade:] *= ramp[::-1]
    return x


def render_waveform(
    challenge: AudioChallenge, *, disable_noise: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Float waveform in [-1, 1] plus a boolean voiced-segment mask.

    ``disable_noise`` is the clean-signal hook used by spectral tests
    and by the SNR measurement oracle.
    """
    tone_n = round(SAMPLE_RATE * challenge.params.tone_duration_ms / 1000)
    gap_n = round(SAMPLE_RATE * GAP_MS / 1000)
    n_tokens = len(challenge.tokens)
    total = n_tokens * tone_n + (n_tokens - 1) * gap_n

    signal = np.zeros(total, dtype=np.float64)
    voiced = np.zeros(total, dtype=bool)
    pos = 0
    for i, token in enumerate(challenge.tokens):
        signal[pos:pos + tone_n] = _tone(tone_pair_hz(token), tone_n)
        voiced[pos:pos + tone_n] = True
        pos += tone_n
        if i < n_tokens - 1:
            pos += gap_n

    if disable_noise:
        return signal, voiced

    signal_power = float(np.mean(signal[voiced] ** 2))
    noise_power = signal_power / (10.0 ** (challenge.params.audio_snr_db / 10.0))
    noise = fill_gauss(challenge.waveform_seed, total) * np.sqrt(noise_power)
    mix = signal + noise

    peak = float(np.max(np.abs(mix)))
    if peak > PEAK_TARGET:
        mix = mix * (PEAK_TARGET / peak)
    return mix, voiced


def render_audio(challenge: AudioChallenge, *, disable_noise: bool = False) -> bytes:
    """RIFF WAV bytes (PCM 16-bit LE, mono, 16 kHz)."""
    waveform, _ = render_waveform(challenge, disable_noise=disable_noise)
    return encode_wav(waveform)


def encode_wav(waveform: np.ndarray) -> bytes:
    pcm = np.clip(np.rint(waveform * 32767.0), -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(SAMPLE_RATE)
        w.writeframes(pcm.tobytes())
    return buf.getvalue()


def decode_wav(data: bytes) -> np.ndarray:
    """Float samples in [-1, 1] from a WAV produced by encode_wav."""
    with wave.open(io.BytesIO(data), "rb") as w:
        if w.getnchannels() != 1 or w.getsampwidth() != 2 or w.getframerate() != SAMPLE_RATE:
            raise ValueError("unexpected WAV format")
        frames = w.readframes(w.getnframes())
    return np.frombuffer(frames, dtype="<i2").astype(np.float64) / 32767.0
