/**
 * Transcript normalization, kept byte-for-byte compatible with the
 * server rule (lowercase, trim, collapse internal whitespace) so a
 * visually-correct answer never fails on spacing.
 */
export function normalizeTranscript(text: string): string {
  return text.trim().toLowerCase().replace(/\s+/g, " ");
}
